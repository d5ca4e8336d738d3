//! Symbolic words over a finite alphabet, with cached letter counts.

use serde::{Deserialize, Serialize};

/// A finite word. Symbols are indices into the system alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    symbols: Vec<u16>,
    counts: Vec<u32>,
}

impl Word {
    pub fn empty(alphabet_len: usize) -> Self {
        Word {
            symbols: Vec::new(),
            counts: vec![0; alphabet_len],
        }
    }

    pub fn from_symbols(symbols: &[usize], alphabet_len: usize) -> Self {
        let mut counts = vec![0u32; alphabet_len];
        for &s in symbols {
            assert!(s < alphabet_len, "symbol {s} outside alphabet");
            counts[s] += 1;
        }
        Word {
            symbols: symbols.iter().map(|&s| s as u16).collect(),
            counts,
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = usize> + '_ {
        self.symbols.iter().map(|&s| s as usize)
    }

    pub fn symbol(&self, i: usize) -> usize {
        self.symbols[i] as usize
    }

    pub fn first(&self) -> Option<usize> {
        self.symbols.first().map(|&s| s as usize)
    }

    pub fn last(&self) -> Option<usize> {
        self.symbols.last().map(|&s| s as usize)
    }

    /// Number of occurrences `|α|_a` of the symbol `a`.
    pub fn count_of(&self, a: usize) -> u32 {
        self.counts[a]
    }

    /// The full letter-count vector.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// `α⁻`: drops exactly the last symbol. Empty word maps to itself.
    pub fn parent(&self) -> Word {
        let mut w = self.clone();
        if let Some(s) = w.symbols.pop() {
            w.counts[s as usize] -= 1;
        }
        w
    }

    pub fn push(&mut self, a: usize) {
        self.symbols.push(a as u16);
        self.counts[a] += 1;
    }

    pub fn child(&self, a: usize) -> Word {
        let mut w = self.clone();
        w.push(a);
        w
    }

    /// Concatenation `αβ`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.symbols.extend_from_slice(&other.symbols);
        for (c, o) in w.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
        w
    }

    /// `α ∧ β`: maximal common prefix.
    pub fn common_prefix(&self, other: &Word) -> Word {
        let n = self
            .symbols
            .iter()
            .zip(&other.symbols)
            .take_while(|(a, b)| a == b)
            .count();
        Word::from_symbols(
            &self.symbols[..n].iter().map(|&s| s as usize).collect::<Vec<_>>(),
            self.counts.len(),
        )
    }

    /// Prefix of the first `n` symbols (or the whole word when shorter).
    pub fn prefix(&self, n: usize) -> Word {
        let n = n.min(self.len());
        Word::from_symbols(
            &self.symbols[..n].iter().map(|&s| s as usize).collect::<Vec<_>>(),
            self.counts.len(),
        )
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        self.len() <= other.len() && self.symbols[..] == other.symbols[..self.len()]
    }

    /// Render against an alphabet of labels, e.g. `"abba"`.
    pub fn display(&self, labels: &[String]) -> String {
        self.symbols().map(|s| labels[s].clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_sum_to_length() {
        let w = Word::from_symbols(&[0, 1, 1, 2, 0], 3);
        assert_eq!(w.counts().iter().sum::<u32>() as usize, w.len());
        assert_eq!(w.count_of(1), 2);
    }

    #[test]
    fn parent_drops_last() {
        let w = Word::from_symbols(&[0, 1, 2], 3);
        let p = w.parent();
        assert_eq!(p.len(), 2);
        assert_eq!(p.count_of(2), 0);
        assert!(Word::empty(3).parent().is_empty());
    }

    #[test]
    fn common_prefix_and_concat() {
        let a = Word::from_symbols(&[0, 1, 0], 2);
        let b = Word::from_symbols(&[0, 1, 1, 0], 2);
        assert_eq!(a.common_prefix(&b).len(), 2);
        let c = a.concat(&b);
        assert_eq!(c.len(), 7);
        assert_eq!(c.count_of(0), 4);
    }
}
