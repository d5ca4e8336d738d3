//! Probability vectors over the alphabet.

use crate::{CoreError, Result};
use serde::{Deserialize, Serialize};

/// Strictly positive weights summing to 1 (within 1e-12).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(CoreError::invalid("probability vector must be non-empty"));
        }
        if weights.iter().any(|&p| !(p > 0.0)) {
            return Err(CoreError::invalid("all probabilities must be positive"));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(CoreError::invalid(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        Ok(ProbabilityVector(weights))
    }

    pub fn uniform(k: usize) -> Self {
        ProbabilityVector(vec![1.0 / k as f64; k])
    }

    /// Normalizes arbitrary positive weights.
    pub fn normalized(weights: &[f64]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) {
            return Err(CoreError::invalid("weights must have positive sum"));
        }
        Self::new(weights.iter().map(|w| w / sum).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, a: usize) -> f64 {
        self.0[a]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Product weight `p_α` of a word.
    pub fn word_weight(&self, word: &crate::ifs::Word) -> f64 {
        word.counts()
            .iter()
            .enumerate()
            .map(|(a, &c)| self.0[a].powi(c as i32))
            .product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_vectors() {
        assert!(ProbabilityVector::new(vec![0.5, 0.4]).is_err());
        assert!(ProbabilityVector::new(vec![1.1, -0.1]).is_err());
        assert!(ProbabilityVector::new(vec![0.5, 0.5]).is_ok());
    }

    #[test]
    fn word_weight_is_product() {
        let p = ProbabilityVector::new(vec![0.25, 0.75]).unwrap();
        let w = crate::ifs::Word::from_symbols(&[0, 1, 1], 2);
        assert!((p.word_weight(&w) - 0.25 * 0.75 * 0.75).abs() < 1e-15);
    }
}
