//! Decay profiles: per-band maxima of `|μ̂|` over deterministic frequency
//! grids, log-spaced bands.

use crate::fourier::evaluator::Evaluate;
use crate::geom::direction_grid;
use crate::Result;
use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct BandStats {
    pub band_lo: f64,
    pub band_hi: f64,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub argmax: Vec<f64>,
    pub grid_points: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayProfile {
    pub bands: Vec<BandStats>,
    pub grid_step: f64,
    pub directions: usize,
}

impl DecayProfile {
    /// Geometric midpoints and band maxima, for the fit drivers.
    pub fn fit_points(&self) -> Vec<(f64, f64)> {
        self.bands
            .iter()
            .map(|b| ((b.band_lo * b.band_hi).sqrt(), b.max_abs))
            .collect()
    }
}

/// Sweeps `|μ̂|` over log-spaced bands `[10^{j/bpd}, 10^{(j+1)/bpd})` up to
/// `t_max`. Frequencies are `grid_step`-spaced along each band; in d ≥ 2 the
/// grid runs along `directions` sampled directions per sphere.
pub fn decay_profile(
    evaluator: &dyn Evaluate,
    t_max: f64,
    bands_per_decade: usize,
    grid_step: f64,
    directions: usize,
) -> Result<DecayProfile> {
    assert!(t_max >= 10.0, "decay profiles start at T = 10");
    assert!(bands_per_decade >= 1 && grid_step > 0.0);
    let d = evaluator.dim();
    let dirs = if d == 1 {
        vec![DVector::from_element(1, 1.0)]
    } else {
        direction_grid(d, directions)
    };

    let mut edges = Vec::new();
    let mut j = bands_per_decade; // first edge at 10^1
    loop {
        let e = 10f64.powf(j as f64 / bands_per_decade as f64);
        edges.push(e);
        if e >= t_max {
            break;
        }
        j += 1;
    }

    let mut bands = Vec::new();
    for win in edges.windows(2) {
        let (lo, hi) = (win[0], win[1]);
        let radii: Vec<f64> = {
            let mut r = Vec::new();
            let mut k = (lo / grid_step).ceil() as u64;
            while (k as f64) * grid_step < hi {
                r.push(k as f64 * grid_step);
                k += 1;
            }
            r
        };
        let evals: Vec<(Vec<f64>, f64)> = radii
            .par_iter()
            .flat_map(|&r| {
                dirs.par_iter().map(move |e| {
                    let xi = e * r;
                    (xi, r)
                })
            })
            .map(|(xi, _)| {
                let v = evaluator.eval(&xi).map(|fv| fv.value.norm()).unwrap_or(f64::NAN);
                (xi.iter().cloned().collect::<Vec<f64>>(), v)
            })
            .collect();
        let finite: Vec<&(Vec<f64>, f64)> = evals.iter().filter(|(_, v)| v.is_finite()).collect();
        if finite.is_empty() {
            continue;
        }
        let mut max_abs = f64::NEG_INFINITY;
        let mut argmax = finite[0].0.clone();
        let mut sum = 0.0;
        for (xi, v) in &finite {
            sum += v;
            if *v > max_abs {
                max_abs = *v;
                argmax = xi.clone();
            }
        }
        bands.push(BandStats {
            band_lo: lo,
            band_hi: hi,
            max_abs,
            mean_abs: sum / finite.len() as f64,
            argmax,
            grid_points: finite.len(),
        });
    }
    Ok(DecayProfile {
        bands,
        grid_step,
        directions: dirs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::fourier::evaluator::{EvaluatorSpec, Measure};

    #[test]
    fn cantor_band_maxima_do_not_decay() {
        let mu = Measure::SelfSimilar(bundled::cantor_measure());
        let ev = EvaluatorSpec::FunctionalEquation { tol: 1e-9 }
            .build(&mu)
            .unwrap();
        let prof = decay_profile(ev.as_ref(), 1e4, 1, 1.0, 1).unwrap();
        // every band containing a power of 3 reaches |μ̂(1)| (non-Rajchman)
        let base = ev
            .eval(&DVector::from_element(1, 1.0))
            .unwrap()
            .value
            .norm();
        for b in &prof.bands {
            let has_power = (0..25).any(|k| {
                let p = 3f64.powi(k);
                b.band_lo <= p && p < b.band_hi
            });
            if has_power {
                assert!(
                    b.max_abs >= base - 1e-6,
                    "band [{}, {}) max {} < {}",
                    b.band_lo,
                    b.band_hi,
                    b.max_abs,
                    base
                );
            }
        }
    }

    #[test]
    fn lebesgue_band_maxima_decay_like_one_over_t() {
        let mu = Measure::SelfSimilar(bundled::lebesgue_measure());
        let ev = EvaluatorSpec::FunctionalEquation { tol: 1e-10 }
            .build(&mu)
            .unwrap();
        let prof = decay_profile(ev.as_ref(), 1e3, 1, 0.25, 1).unwrap();
        for b in &prof.bands {
            // closed form |μ̂(ξ)| = |sin(πξ)/(πξ)| ≤ 1/(πξ); the grid max over a
            // band is bounded by 1/(π·band_lo) plus grid slack
            let bound = 1.0 / (std::f64::consts::PI * b.band_lo) + 0.05;
            assert!(b.max_abs <= bound, "band {} max {}", b.band_lo, b.max_abs);
        }
    }
}
