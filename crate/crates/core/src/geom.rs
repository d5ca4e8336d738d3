//! Outward-rounded interval arithmetic on axis-aligned boxes.
//!
//! The boxes over-approximate cylinder sets; every arithmetic result is
//! widened by a few ulps so the enclosures stay sound under f64 rounding.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

/// Closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

fn widen_lo(x: f64) -> f64 {
    if x.is_finite() {
        x.next_down()
    } else {
        x
    }
}

fn widen_hi(x: f64) -> f64 {
    if x.is_finite() {
        x.next_up()
    } else {
        x
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval bounds out of order: [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval::new(widen_lo(self.lo + o.lo), widen_hi(self.hi + o.hi))
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval::new(widen_lo(self.lo - o.hi), widen_hi(self.hi - o.lo))
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(widen_lo(lo), widen_hi(hi))
    }

    pub fn scale(&self, s: f64) -> Interval {
        self.mul(&Interval::point(s))
    }

    pub fn offset(&self, t: f64) -> Interval {
        Interval::new(widen_lo(self.lo + t), widen_hi(self.hi + t))
    }

    /// `x^2` with the sign information kept (never negative).
    pub fn square(&self) -> Interval {
        if self.lo >= 0.0 {
            Interval::new(widen_lo(self.lo * self.lo), widen_hi(self.hi * self.hi))
        } else if self.hi <= 0.0 {
            Interval::new(widen_lo(self.hi * self.hi), widen_hi(self.lo * self.lo))
        } else {
            let m = self.lo.abs().max(self.hi.abs());
            Interval::new(0.0, widen_hi(m * m))
        }
    }

    /// Reciprocal; requires `0 ∉ [lo, hi]`.
    pub fn recip(&self) -> Option<Interval> {
        if self.lo <= 0.0 && self.hi >= 0.0 {
            return None;
        }
        Some(Interval::new(widen_lo(1.0 / self.hi), widen_hi(1.0 / self.lo)))
    }

    /// Distance between two intervals (0 when they overlap).
    pub fn distance(&self, o: &Interval) -> f64 {
        if self.hi < o.lo {
            o.lo - self.hi
        } else if o.hi < self.lo {
            self.lo - o.hi
        } else {
            0.0
        }
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        Interval::new(self.lo.min(o.lo), self.hi.max(o.hi))
    }
}

/// Axis-aligned box in `R^d`, one interval per coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalBox {
    pub coords: Vec<Interval>,
}

impl IntervalBox {
    pub fn new(coords: Vec<Interval>) -> Self {
        IntervalBox { coords }
    }

    /// The unit cube `[0,1]^d`.
    pub fn unit(d: usize) -> Self {
        IntervalBox {
            coords: vec![Interval::new(0.0, 1.0); d],
        }
    }

    pub fn point(x: &DVector<f64>) -> Self {
        IntervalBox {
            coords: x.iter().map(|&v| Interval::point(v)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn midpoint(&self) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.coords.iter().map(|c| c.midpoint()))
    }

    /// Euclidean diameter (length of the diagonal).
    pub fn diameter(&self) -> f64 {
        self.coords.iter().map(|c| c.width() * c.width()).sum::<f64>().sqrt()
    }

    pub fn hull(&self, o: &IntervalBox) -> IntervalBox {
        IntervalBox {
            coords: self
                .coords
                .iter()
                .zip(&o.coords)
                .map(|(a, b)| a.hull(b))
                .collect(),
        }
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.coords.iter().zip(x.iter()).all(|(c, &v)| c.contains(v))
    }

    /// Euclidean distance between two boxes (0 when they intersect).
    pub fn distance(&self, o: &IntervalBox) -> f64 {
        self.coords
            .iter()
            .zip(&o.coords)
            .map(|(a, b)| {
                let g = a.distance(b);
                g * g
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn intersects(&self, o: &IntervalBox) -> bool {
        self.distance(o) == 0.0
    }

    /// Minimal Euclidean distance from the box to a point.
    pub fn min_dist_to(&self, x: &DVector<f64>) -> f64 {
        self.coords
            .iter()
            .zip(x.iter())
            .map(|(c, &v)| {
                let g = if v < c.lo {
                    c.lo - v
                } else if v > c.hi {
                    v - c.hi
                } else {
                    0.0
                };
                g * g
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Maximal Euclidean distance from the box to a point.
    pub fn max_dist_to(&self, x: &DVector<f64>) -> f64 {
        self.coords
            .iter()
            .zip(x.iter())
            .map(|(c, &v)| {
                let g = (v - c.lo).abs().max((v - c.hi).abs());
                g * g
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Deterministic grid of unit direction vectors, `count` per sphere.
///
/// d = 1 yields `{+1}` (opposite directions are redundant for the audits);
/// d = 2 equally spaced angles; d >= 3 a Fibonacci-style spiral.
pub fn direction_grid(d: usize, count: usize) -> Vec<DVector<f64>> {
    match d {
        0 => vec![],
        1 => vec![DVector::from_element(1, 1.0)],
        2 => (0..count)
            .map(|i| {
                let th = std::f64::consts::PI * (i as f64) / (count as f64);
                DVector::from_vec(vec![th.cos(), th.sin()])
            })
            .collect(),
        _ => {
            // golden-angle spiral on S^2, then pad trailing coordinates for d > 3
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / (count as f64);
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let th = golden * i as f64;
                    let mut v = vec![r * th.cos(), r * th.sin(), z];
                    v.resize(d, 0.0);
                    let mut dv = DVector::from_vec(v);
                    let n = dv.norm();
                    if n > 0.0 {
                        dv /= n;
                    }
                    dv
                })
                .collect()
        }
    }
}

/// Operator 2-norm of a small dense matrix.
pub fn operator_norm(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}
