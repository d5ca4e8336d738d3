//! Subshifts of finite type: 0/1 transition matrices with a topological
//! mixing certificate.

use crate::ifs::Word;
use crate::{CoreError, Result};
use serde::{Deserialize, Serialize};

/// Square 0/1 matrix over the alphabet; `A(a,b) = 1` means `ab` is admissible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubshiftMatrix {
    entries: Vec<Vec<bool>>,
    /// Smallest `n ≤ k²` with `Aⁿ` strictly positive.
    mixing_power: usize,
}

impl SubshiftMatrix {
    pub fn new(entries: Vec<Vec<bool>>) -> Result<Self> {
        let k = entries.len();
        if k == 0 || entries.iter().any(|r| r.len() != k) {
            return Err(CoreError::invalid("subshift matrix must be square and non-empty"));
        }
        // boolean powers up to k^2; primitivity must show by then
        let cap = k * k;
        let mut pow = entries.clone();
        let mut n = 1usize;
        loop {
            if pow.iter().all(|r| r.iter().all(|&b| b)) {
                return Ok(SubshiftMatrix {
                    entries,
                    mixing_power: n,
                });
            }
            if n >= cap {
                return Err(CoreError::NonPrimitiveSubshift(cap));
            }
            pow = bool_mul(&pow, &entries);
            n += 1;
        }
    }

    pub fn from_u8(rows: &[Vec<u8>]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| v != 0).collect())
                .collect(),
        )
    }

    pub fn full_shift(k: usize) -> Self {
        SubshiftMatrix {
            entries: vec![vec![true; k]; k],
            mixing_power: 1,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The certificate power: `Aⁿ > 0` for this and every larger `n`.
    pub fn mixing_power(&self) -> usize {
        self.mixing_power
    }

    /// The relation `a ⇝ b` (the word `ab` is admissible).
    pub fn admits(&self, a: usize, b: usize) -> bool {
        self.entries[a][b]
    }

    pub fn is_admissible(&self, word: &Word) -> bool {
        let syms: Vec<usize> = word.symbols().collect();
        syms.windows(2).all(|w| self.admits(w[0], w[1]))
    }

    /// `α ⇝ β`: the concatenation is admissible (both assumed admissible).
    pub fn leads_to(&self, alpha: &Word, beta: &Word) -> bool {
        match (alpha.last(), beta.first()) {
            (Some(a), Some(b)) => self.admits(a, b),
            _ => true,
        }
    }

    /// All admissible words of exactly length `n`, depth-first order.
    pub fn words_of_length(&self, n: usize, budget: usize) -> Result<Vec<Word>> {
        let k = self.len();
        let mut out = Vec::new();
        let mut stack = vec![Word::empty(k)];
        while let Some(w) = stack.pop() {
            if w.len() == n {
                out.push(w);
                if out.len() > budget {
                    return Err(CoreError::WordBudgetExceeded {
                        budget,
                        needed: out.len(),
                    });
                }
                continue;
            }
            for a in (0..k).rev() {
                let ok = match w.last() {
                    Some(last) => self.admits(last, a),
                    None => true,
                };
                if ok {
                    stack.push(w.child(a));
                }
            }
        }
        if out.is_empty() {
            return Err(CoreError::EmptyAdmissibleSet(n));
        }
        Ok(out)
    }
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let k = a.len();
    let mut out = vec![vec![false; k]; k];
    for i in 0..k {
        for l in 0..k {
            if a[i][l] {
                for j in 0..k {
                    out[i][j] |= b[l][j];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_mean_is_mixing() {
        let a = SubshiftMatrix::from_u8(&[vec![1, 1], vec![1, 0]]).unwrap();
        assert!(a.mixing_power() <= 4);
        // words of every length exist at and beyond the certificate power
        for n in a.mixing_power()..a.mixing_power() + 4 {
            assert!(!a.words_of_length(n, 10_000).unwrap().is_empty());
        }
    }

    #[test]
    fn reducible_matrix_rejected() {
        let r = SubshiftMatrix::from_u8(&[vec![1, 0], vec![0, 1]]);
        assert!(matches!(r, Err(CoreError::NonPrimitiveSubshift(_))));
    }

    #[test]
    fn admissible_word_enumeration() {
        let a = SubshiftMatrix::from_u8(&[vec![1, 1], vec![1, 0]]).unwrap();
        // Fibonacci count: length n admissible words = F(n+2)
        let w3 = a.words_of_length(3, 100).unwrap();
        assert_eq!(w3.len(), 5);
        assert!(w3.iter().all(|w| a.is_admissible(w)));
    }
}
