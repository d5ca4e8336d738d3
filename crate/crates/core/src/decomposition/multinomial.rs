//! Exact multinomial maximization with the `⌊p_a n⌋ ± 10k` localization.

use crate::measures::ProbabilityVector;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct MultinomialMax {
    pub n: usize,
    pub max_prob: f64,
    pub argmax: Vec<usize>,
}

/// Maximizes `n!/(∏ k_a!)·∏ p_a^{k_a}` over compositions of `n`.
///
/// The search is pruned to the window `⌊p_a n⌋ ± 10k` around the expected
/// counts; the window provably contains every maximizer.
pub fn multinomial_max(n: usize, p: &ProbabilityVector) -> MultinomialMax {
    let k = p.len();
    let log_fact = log_factorials(n);
    let margin = 10 * k;
    let windows: Vec<(usize, usize)> = (0..k)
        .map(|a| {
            let c = (p.get(a) * n as f64).floor() as isize;
            let lo = (c - margin as isize).max(0) as usize;
            let hi = ((c + margin as isize) as usize).min(n);
            (lo, hi)
        })
        .collect();
    let mut best = f64::NEG_INFINITY;
    let mut arg = vec![0usize; k];
    let mut current = vec![0usize; k];
    search(
        0,
        n,
        &windows,
        p,
        &log_fact,
        &mut current,
        &mut best,
        &mut arg,
    );
    MultinomialMax {
        n,
        max_prob: best.exp(),
        argmax: arg,
    }
}

/// Exhaustive maximization (oracle for small n).
pub fn multinomial_max_brute(n: usize, p: &ProbabilityVector) -> MultinomialMax {
    let k = p.len();
    let log_fact = log_factorials(n);
    let windows: Vec<(usize, usize)> = vec![(0, n); k];
    let mut best = f64::NEG_INFINITY;
    let mut arg = vec![0usize; k];
    let mut current = vec![0usize; k];
    search(
        0,
        n,
        &windows,
        p,
        &log_fact,
        &mut current,
        &mut best,
        &mut arg,
    );
    MultinomialMax {
        n,
        max_prob: best.exp(),
        argmax: arg,
    }
}

#[allow(clippy::too_many_arguments)]
fn search(
    a: usize,
    remaining: usize,
    windows: &[(usize, usize)],
    p: &ProbabilityVector,
    log_fact: &[f64],
    current: &mut Vec<usize>,
    best: &mut f64,
    arg: &mut Vec<usize>,
) {
    let k = windows.len();
    if a == k - 1 {
        let (lo, hi) = windows[a];
        if remaining < lo || remaining > hi {
            return;
        }
        current[a] = remaining;
        let lp = log_prob(current, p, log_fact);
        if lp > *best {
            *best = lp;
            arg.clone_from(current);
        }
        return;
    }
    let (lo, hi) = windows[a];
    for c in lo..=hi.min(remaining) {
        current[a] = c;
        search(a + 1, remaining - c, windows, p, log_fact, current, best, arg);
    }
}

fn log_prob(counts: &[usize], p: &ProbabilityVector, log_fact: &[f64]) -> f64 {
    let n: usize = counts.iter().sum();
    let mut lp = log_fact[n];
    for (a, &c) in counts.iter().enumerate() {
        lp -= log_fact[c];
        lp += c as f64 * p.get(a).ln();
    }
    lp
}

fn log_factorials(n: usize) -> Vec<f64> {
    let mut lf = vec![0.0f64; n + 1];
    for i in 1..=n {
        lf[i] = lf[i - 1] + (i as f64).ln();
    }
    lf
}

/// `max_prob · n^{(k−1)/2}` over a sweep of n (the lemma's scaling check).
pub fn scaling_sweep(p: &ProbabilityVector, ns: &[usize]) -> Vec<(usize, f64)> {
    let k = p.len() as f64;
    ns.iter()
        .map(|&n| {
            let m = multinomial_max(n, p);
            (n, m.max_prob * (n as f64).powf((k - 1.0) / 2.0))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_one_picks_largest_weight() {
        let p = ProbabilityVector::new(vec![0.2, 0.5, 0.3]).unwrap();
        let m = multinomial_max(1, &p);
        assert!((m.max_prob - 0.5).abs() < 1e-12);
        assert_eq!(m.argmax, vec![0, 1, 0]);
    }

    #[test]
    fn two_flips_balanced() {
        let p = ProbabilityVector::uniform(2);
        let m = multinomial_max(2, &p);
        // compositions: (2,0) 1/4, (1,1) 1/2, (0,2) 1/4
        assert!((m.max_prob - 0.5).abs() < 1e-12);
        assert_eq!(m.argmax, vec![1, 1]);
    }

    #[test]
    fn pruned_equals_brute_force() {
        for p in [
            ProbabilityVector::uniform(2),
            ProbabilityVector::new(vec![0.2, 0.3, 0.5]).unwrap(),
            ProbabilityVector::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap(),
        ] {
            for n in 1..=40 {
                let a = multinomial_max(n, &p);
                let b = multinomial_max_brute(n, &p);
                assert!(
                    (a.max_prob - b.max_prob).abs() <= 1e-12 * b.max_prob,
                    "n={n}: {} vs {}",
                    a.max_prob,
                    b.max_prob
                );
            }
        }
    }

    #[test]
    fn scaling_is_bounded() {
        for p in [
            ProbabilityVector::uniform(2),
            ProbabilityVector::new(vec![0.2, 0.3, 0.5]).unwrap(),
        ] {
            let ns: Vec<usize> = (1..=40).map(|i| i * 50).collect();
            let sweep = scaling_sweep(&p, &ns);
            let top: Vec<f64> = sweep
                .iter()
                .filter(|(n, _)| *n >= 200)
                .map(|&(_, s)| s)
                .collect();
            let max = top.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = top.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(
                (max - min) / min < 0.2,
                "scaled maxima vary too much: [{min}, {max}]"
            );
        }
    }
}
