//! Stationary Markov chains backing the exactly-computable Gibbs measures.
//!
//! Conventions: `pair[(a,b)] = w̃(a|b)` is the normalized weight of prepending
//! `a` ahead of a configuration starting with `b`; columns over admissible
//! pairs sum to 1. Cylinder masses are
//! `μ(X_{a_1…a_n}) = ∏_{i<n} pair[(a_i,a_{i+1})] · π(a_n)`.

use crate::ifs::{SubshiftMatrix, Word};
use crate::measures::MassInterval;
use crate::{CoreError, Result};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

#[derive(Clone, Debug)]
pub struct MarkovChain {
    pair: DMatrix<f64>,
    station: DVector<f64>,
    /// Forward sampling kernel `T(a→b) = pair[(a,b)]·π(b)/π(a)`; rows sum to 1.
    forward: DMatrix<f64>,
}

impl MarkovChain {
    pub fn from_pair_weights(pair: DMatrix<f64>, shift: &SubshiftMatrix) -> Result<Self> {
        let k = pair.nrows();
        if pair.ncols() != k || shift.len() != k {
            return Err(CoreError::invalid("pair-weight matrix shape mismatch"));
        }
        for b in 0..k {
            let col: f64 = (0..k).map(|a| pair[(a, b)]).sum();
            if (col - 1.0).abs() > 1e-9 {
                return Err(CoreError::invalid(format!(
                    "pair weights into state {b} sum to {col}, not 1"
                )));
            }
        }
        let (rho, station) = perron_eigen(&pair)?;
        if (rho - 1.0).abs() > 1e-9 {
            return Err(CoreError::invalid(format!(
                "column-stochastic matrix has spectral radius {rho}"
            )));
        }
        let total: f64 = station.sum();
        let station = station / total;
        let forward = DMatrix::from_fn(k, k, |a, b| pair[(a, b)] * station[b] / station[a]);
        Ok(MarkovChain {
            pair,
            station,
            forward,
        })
    }

    /// Bernoulli chain: independent symbols with the given weights.
    pub fn bernoulli(p: &[f64]) -> Self {
        let k = p.len();
        let pair = DMatrix::from_fn(k, k, |a, _| p[a]);
        let station = DVector::from_vec(p.to_vec());
        let forward = DMatrix::from_fn(k, k, |_, b| p[b]);
        MarkovChain {
            pair,
            station,
            forward,
        }
    }

    pub fn len(&self) -> usize {
        self.station.len()
    }

    pub fn is_empty(&self) -> bool {
        self.station.is_empty()
    }

    pub fn pair_weights(&self) -> &DMatrix<f64> {
        &self.pair
    }

    pub fn station(&self) -> &DVector<f64> {
        &self.station
    }

    pub fn forward(&self) -> &DMatrix<f64> {
        &self.forward
    }

    /// Exact cylinder mass (a point interval).
    pub fn cylinder_mass(&self, word: &Word) -> MassInterval {
        if word.is_empty() {
            return MassInterval::point(1.0);
        }
        let n = word.len();
        let mut m = self.station[word.symbol(n - 1)];
        for i in 0..n - 1 {
            m *= self.pair[(word.symbol(i), word.symbol(i + 1))];
        }
        MassInterval::point(m)
    }

    /// Quasi-Bernoulli constant: sup over admissible pairs of
    /// `max(w̃(a|b)/π(a), π(a)/w̃(a|b))`.
    pub fn quasi_bernoulli_constant(&self) -> f64 {
        let k = self.len();
        let mut c = 1.0f64;
        for a in 0..k {
            for b in 0..k {
                if self.pair[(a, b)] > 0.0 {
                    let r = self.pair[(a, b)] / self.station[a];
                    c = c.max(r).max(1.0 / r);
                }
            }
        }
        c
    }

    /// Draws the next symbol given the previous one (stationary start).
    pub fn step<R: Rng>(&self, prev: Option<usize>, rng: &mut R) -> usize {
        let dist: Vec<f64> = match prev {
            None => self.station.iter().cloned().collect(),
            Some(a) => (0..self.len()).map(|b| self.forward[(a, b)]).collect(),
        };
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, &w) in dist.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        dist.len() - 1
    }
}

/// Dominant eigenvalue and positive right eigenvector of a non-negative
/// primitive matrix (power iteration; deterministic start).
pub fn perron_eigen(m: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    let k = m.nrows();
    if k == 0 {
        return Err(CoreError::invalid("empty matrix"));
    }
    let mut v = DVector::from_element(k, 1.0 / k as f64);
    let mut rho = 1.0f64;
    for _ in 0..50_000 {
        let w = m * &v;
        let norm = w.sum();
        if !(norm > 0.0) {
            return Err(CoreError::invalid(
                "matrix has a zero row-sum iterate; not primitive",
            ));
        }
        let next = &w / norm;
        let delta = (&next - &v).abs().max();
        rho = norm;
        v = next;
        if delta < 1e-15 {
            break;
        }
    }
    Ok((rho, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bernoulli_masses_are_products() {
        let c = MarkovChain::bernoulli(&[0.5, 0.5]);
        let w = Word::from_symbols(&[0, 1, 0], 2);
        assert_abs_diff_eq!(c.cylinder_mass(&w).mid(), 0.125, epsilon = 1e-15);
        assert_abs_diff_eq!(c.quasi_bernoulli_constant(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn level_masses_partition() {
        let shift = SubshiftMatrix::from_u8(&[vec![1, 1], vec![1, 0]]).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let pair = DMatrix::from_row_slice(
            2,
            2,
            &[1.0 / phi, 1.0, 1.0 / (phi * phi), 0.0],
        );
        let chain = MarkovChain::from_pair_weights(pair, &shift).unwrap();
        for n in 1..=6 {
            let words = shift.words_of_length(n, 10_000).unwrap();
            let total: f64 = words.iter().map(|w| chain.cylinder_mass(w).mid()).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn perron_of_golden_matrix() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]);
        let (rho, _) = perron_eigen(&m).unwrap();
        assert_abs_diff_eq!(rho, (1.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-12);
    }
}
