//! Rescaled restrictions `μ_{β,ξ} = S*_{s} μ_β`: the normalized restriction
//! of a measure to the cylinder `X_β`, pushed forward by `x ↦ s·x`.

use crate::geom::IntervalBox;
use crate::ifs::Word;
use crate::measures::{MassInterval, MeasureOracle};
use crate::{CoreError, Result};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct RescaledRestriction<'a, M: MeasureOracle + ?Sized> {
    parent: &'a M,
    beta: Word,
    scale: f64,
    beta_mass: MassInterval,
    /// Anchor `x_β = f_β(reference)`, in parent coordinates.
    pub anchor: DVector<f64>,
}

impl<'a, M: MeasureOracle + ?Sized> RescaledRestriction<'a, M> {
    pub fn new(parent: &'a M, beta: Word, scale: f64) -> Result<Self> {
        if !parent.system().is_admissible(&beta) {
            return Err(CoreError::InadmissibleWord(
                beta.display(parent.system().labels()),
            ));
        }
        let beta_mass = parent.cylinder_mass(&beta)?;
        let anchor = parent.system().anchor(&beta)?;
        Ok(RescaledRestriction {
            parent,
            beta,
            scale,
            beta_mass,
            anchor,
        })
    }

    pub fn beta(&self) -> &Word {
        &self.beta
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Mass of the suffix cylinder `X_{βγ}` relative to `X_β` (bracket).
    pub fn suffix_mass(&self, gamma: &Word) -> Result<MassInterval> {
        let full = self.beta.concat(gamma);
        let m = self.parent.cylinder_mass(&full)?;
        Ok(MassInterval::new(
            m.lo / self.beta_mass.hi,
            (m.hi / self.beta_mass.lo).min(1.0),
        ))
    }

    /// Support hull in the rescaled frame.
    pub fn support_hull(&self) -> Result<IntervalBox> {
        let hull = self.parent.system().cylinder_hull(&self.beta)?;
        Ok(IntervalBox::new(
            hull.coords.iter().map(|c| c.scale(self.scale)).collect(),
        ))
    }

    /// Support diameter in the rescaled frame.
    pub fn support_diameter(&self) -> Result<f64> {
        Ok(self.support_hull()?.diameter())
    }

    /// Points of `μ_{β,s}` in the scaled frame: continue the digit chain past
    /// the forced prefix `β` and push forward by the scaling.
    pub fn sample_points(&self, seed: u64, n: usize) -> Vec<DVector<f64>> {
        let sys = self.parent.system();
        let depth = crate::measures::depth_for_diameter(sys, 1e-15).min(4000);
        let x0 = sys.reference_point();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let mut w = self.beta.clone();
                let mut prev = w.last();
                for _ in 0..depth {
                    let dist = self.parent.step_distribution(prev);
                    let u: f64 = rand::Rng::random(&mut rng);
                    let mut acc = 0.0;
                    let mut pick = dist.len() - 1;
                    for (i, &p) in dist.iter().enumerate() {
                        acc += p;
                        if u < acc {
                            pick = i;
                            break;
                        }
                    }
                    w.push(pick);
                    prev = Some(pick);
                }
                sys.compose_word(&w, &x0).expect("admissible chain") * self.scale
            })
            .collect()
    }

    /// Fourier transform in the scaled frame via suffix-cylinder expansion
    /// with anchor phases; the returned error bound covers the truncation and
    /// the mass brackets.
    pub fn fourier_cylinder(
        &self,
        zeta: &DVector<f64>,
        tol: f64,
        budget: usize,
    ) -> Result<crate::fourier::FourierValue> {
        let sys = self.parent.system();
        let x0 = sys.reference_point();
        let norm = zeta.norm();
        let mut value = num_complex::Complex64::new(0.0, 0.0);
        let mut err = 0.0f64;
        let mut count = 0usize;
        let mut stack = vec![self.beta.clone()];
        while let Some(w) = stack.pop() {
            count += 1;
            if count > budget {
                return Err(CoreError::TolTooTight(budget));
            }
            let hull = sys.cylinder_hull(&w)?;
            let diam = hull.diameter() * self.scale;
            let mass = {
                let m = self.parent.cylinder_mass(&w)?;
                MassInterval::new(m.lo / self.beta_mass.hi, m.hi / self.beta_mass.lo)
            };
            if 2.0 * std::f64::consts::PI * norm * diam <= tol || mass.hi < 1e-18 {
                let anchor = sys.compose_word(&w, &x0)? * self.scale;
                let phase = 2.0 * std::f64::consts::PI * zeta.dot(&anchor);
                value += num_complex::Complex64::from_polar(mass.mid(), phase);
                err += mass.mid() * (2.0 * std::f64::consts::PI * norm * diam).min(2.0)
                    + mass.width();
                continue;
            }
            for a in 0..sys.alphabet_len() {
                let ok = match (sys.subshift(), w.last()) {
                    (Some(m), Some(last)) => m.admits(last, a),
                    _ => true,
                };
                if ok {
                    stack.push(w.child(a));
                }
            }
        }
        Ok(crate::fourier::FourierValue { value, error: err })
    }
}
