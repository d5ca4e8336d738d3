//! Self-similar measures `μ = Σ_a p_a f_a μ` for similitude systems.

use crate::ifs::{IFSSystem, Word};
use crate::measures::{MassInterval, MeasureOracle, ProbabilityVector};
use crate::{CoreError, Result};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct SelfSimilarMeasure {
    system: Arc<IFSSystem>,
    p: ProbabilityVector,
    barycenter: DVector<f64>,
}

impl SelfSimilarMeasure {
    pub fn new(system: Arc<IFSSystem>, p: ProbabilityVector) -> Result<Self> {
        if !system.all_similitudes() {
            return Err(CoreError::invalid(
                "self-similar measures need similitude maps; use a Gibbs measure otherwise",
            ));
        }
        if system.subshift().is_some() {
            return Err(CoreError::invalid(
                "self-similar (Bernoulli) measures live on the full shift; use a Gibbs measure",
            ));
        }
        if p.len() != system.alphabet_len() {
            return Err(CoreError::invalid("weight count must match alphabet"));
        }
        let barycenter = solve_barycenter(&system, &p)?;
        Ok(SelfSimilarMeasure {
            system,
            p,
            barycenter,
        })
    }

    pub fn weights(&self) -> &ProbabilityVector {
        &self.p
    }

    pub fn system_arc(&self) -> Arc<IFSSystem> {
        Arc::clone(&self.system)
    }

    /// Signed ratio and rotation of each map (constant for similitudes).
    pub fn linear_parts(&self) -> Vec<(f64, DMatrix<f64>, DVector<f64>)> {
        self.system
            .maps()
            .iter()
            .map(|m| match m {
                crate::ifs::ConformalMap::Similitude(s) => {
                    (s.ratio, s.rotation.matrix().clone(), s.translation.clone())
                }
                _ => unreachable!("validated similitude system"),
            })
            .collect()
    }
}

/// Barycenter solves `(I − Σ p_a r_a O_a)·c = Σ p_a t_a`.
fn solve_barycenter(system: &IFSSystem, p: &ProbabilityVector) -> Result<DVector<f64>> {
    let d = system.dimension();
    let mut m = DMatrix::<f64>::identity(d, d);
    let mut rhs = DVector::<f64>::zeros(d);
    for (a, map) in system.maps().iter().enumerate() {
        match map {
            crate::ifs::ConformalMap::Similitude(s) => {
                m -= s.linear() * p.get(a);
                rhs += &s.translation * p.get(a);
            }
            _ => unreachable!(),
        }
    }
    m.lu()
        .solve(&rhs)
        .ok_or_else(|| CoreError::invalid("barycenter system is singular"))
}

impl MeasureOracle for SelfSimilarMeasure {
    fn system(&self) -> &IFSSystem {
        &self.system
    }

    fn cylinder_mass(&self, word: &Word) -> Result<MassInterval> {
        if !self.system.is_admissible(word) {
            return Err(CoreError::InadmissibleWord(word.display(self.system.labels())));
        }
        Ok(MassInterval::point(self.p.word_weight(word)))
    }

    fn step_distribution(&self, _prev: Option<usize>) -> Vec<f64> {
        self.p.as_slice().to_vec()
    }

    fn barycenter(&self) -> Option<DVector<f64>> {
        Some(self.barycenter.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::measures::sample_points;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cantor_barycenter_is_half() {
        let mu = bundled::cantor_measure();
        assert_abs_diff_eq!(mu.barycenter().unwrap()[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn cylinder_masses_are_products_and_partition() {
        let mu = bundled::cantor_measure();
        let w = mu.system().word(&[0, 1, 0]);
        assert_abs_diff_eq!(mu.cylinder_mass(&w).unwrap().mid(), 0.125, epsilon = 1e-15);
        // all length-6 cylinders partition the mass
        let mut total = 0.0;
        for bits in 0..64u32 {
            let syms: Vec<usize> = (0..6).map(|i| ((bits >> i) & 1) as usize).collect();
            total += mu.cylinder_mass(&mu.system().word(&syms)).unwrap().mid();
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn samples_lie_in_attractor_and_reproduce() {
        let mu = bundled::cantor_measure();
        let pts = sample_points(&mu, 11, 200);
        // nested-interval membership: ternary digits of attractor points avoid 1
        for x in &pts {
            let mut v = x[0];
            for _ in 0..30 {
                v *= 3.0;
                let digit = v.floor() as i64;
                v -= digit as f64;
                assert_ne!(digit.rem_euclid(3), 1, "sample escaped the Cantor set");
            }
        }
        let again = sample_points(&mu, 11, 200);
        assert_eq!(pts, again);
    }

    #[test]
    fn empirical_cylinder_frequencies_match_masses() {
        let mu = bundled::half_third_measure();
        let n = 4000usize;
        let pts = sample_points(&mu, 5, n);
        // frequency of landing in X_0 = [0, 1/2] vs mass 1/2 within a CLT band
        let hull0 = mu.system().cylinder_hull(&mu.system().word(&[0])).unwrap();
        let count = pts.iter().filter(|x| hull0.contains(x)).count() as f64;
        let freq = count / n as f64;
        let mass = mu
            .cylinder_mass(&mu.system().word(&[0]))
            .unwrap()
            .mid();
        assert!(
            (freq - mass).abs() <= 4.0 / (n as f64).sqrt(),
            "freq {freq} vs mass {mass}"
        );
    }
}
