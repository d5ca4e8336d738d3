//! The averaging pipeline audit: the exact triangle inequality
//! `|μ̂(ξ)| ≤ Σ_{α∈𝒜̃_ξ} p_α|μ̂(r_α O_αᵀ ξ)| + Σ_{bad} p_α`, together with the
//! bad-band accounting and its multinomial majorant.

use crate::decomposition::cutoff::stopping_words;
use crate::decomposition::goodwords::{counts_are_good, good_word_params, GoodWordParams};
use crate::fourier::Evaluate;
use crate::measures::{ProbabilityVector, SelfSimilarMeasure};
use crate::Result;
use nalgebra::DVector;
use serde::Serialize;
use std::collections::{HashMap, HashSet};

#[derive(Clone, Debug, Serialize)]
pub struct PipelineAudit {
    pub xi_norm: f64,
    pub params: GoodWordParams,
    /// `|μ̂(ξ)|` and its evaluator error.
    pub direct: f64,
    pub direct_error: f64,
    /// `Σ_{α∈𝒜̃_ξ} p_α |μ̂(r_α O_αᵀ ξ)|` with accumulated evaluator error.
    pub average: f64,
    pub average_error: f64,
    /// Residual mass of the non-good cutoff words.
    pub bad_word_mass: f64,
    /// Bands of `|r_α|‖ξ‖` where some child transform exceeds the threshold.
    pub bad_band_count: usize,
    /// Actual contribution of the bad bands to the average.
    pub bad_band_contribution: f64,
    /// Multinomial majorant of that contribution.
    pub bad_band_majorant: f64,
    pub threshold: f64,
    /// Triangle inequality `direct ≤ average + bad_word_mass` within errors.
    pub triangle_ok: bool,
    /// `bad_band_majorant ≥ bad_band_contribution` (up to evaluator error).
    pub majorant_ok: bool,
}

/// Runs the audit at one frequency. `tau` sets the badness threshold
/// `(log‖ξ‖)^{−τ}` from the flattening step.
#[allow(clippy::too_many_arguments)]
pub fn average_bound_report(
    measure: &SelfSimilarMeasure,
    evaluator: &dyn Evaluate,
    xi: &DVector<f64>,
    l: f64,
    delta: f64,
    epsilon: f64,
    tau: f64,
    budget: usize,
) -> Result<PipelineAudit> {
    let system = measure.system();
    let p: &ProbabilityVector = measure.weights();
    let xi_norm = xi.norm();
    let params = good_word_params(system, p, xi_norm, l, delta, epsilon)?;
    let cutoff = stopping_words(system, p, params.xi_tilde, budget)?;
    let parts = measure.linear_parts();

    let direct_v = evaluator.eval(xi)?;
    let direct = direct_v.value.norm();

    let threshold = xi_norm.ln().powf(-tau);

    let mut average = 0.0f64;
    let mut average_error = 0.0f64;
    let mut bad_word_mass = 0.0f64;
    // per band: (max child |μ̂|, Σ p_α |μ̂| , distinct count-vectors present)
    let mut band_max: HashMap<i64, f64> = HashMap::new();
    let mut band_sum: HashMap<i64, f64> = HashMap::new();
    let mut band_counts: HashMap<i64, HashSet<Vec<u32>>> = HashMap::new();

    for m in &cutoff.members {
        let good = m.word.len() >= params.n_xi
            && counts_are_good(m.word.prefix(params.n_xi).counts(), &params, p);
        if !good {
            bad_word_mass += m.weight;
            continue;
        }
        // child frequency r_α O_αᵀ ξ by the constant similitude cocycle
        let mut zeta = xi.clone();
        for a in m.word.symbols().rev() {
            zeta = parts[a].1.transpose() * zeta * parts[a].0.abs();
        }
        let child = evaluator.eval(&zeta)?;
        let child_abs = child.value.norm();
        average += m.weight * child_abs;
        average_error += m.weight * child.error;
        let band = (m.r_abs * xi_norm).floor() as i64;
        let e = band_max.entry(band).or_insert(0.0);
        *e = e.max(child_abs);
        *band_sum.entry(band).or_insert(0.0) += m.weight * child_abs;
        band_counts
            .entry(band)
            .or_default()
            .insert(m.word.counts().to_vec());
    }

    let bad_bands: Vec<i64> = band_max
        .iter()
        .filter(|&(_, &mx)| mx >= threshold)
        .map(|(&b, _)| b)
        .collect();
    let bad_band_contribution: f64 = bad_bands.iter().map(|b| band_sum[b]).sum();
    // majorant: for each bad band, the total p-mass of every count vector
    // present there (all words with those exact counts), which dominates the
    // actual in-band mass times |μ̂| ≤ 1
    let mut bad_band_majorant = 0.0f64;
    for b in &bad_bands {
        for counts in &band_counts[b] {
            bad_band_majorant += multinomial_mass(counts, p);
        }
    }

    let triangle_ok =
        direct <= average + bad_word_mass + direct_v.error + average_error + 1e-12;
    let majorant_ok = bad_band_majorant + average_error + 1e-12 >= bad_band_contribution;

    Ok(PipelineAudit {
        xi_norm,
        params,
        direct,
        direct_error: direct_v.error,
        average,
        average_error,
        bad_word_mass,
        bad_band_count: bad_bands.len(),
        bad_band_contribution,
        bad_band_majorant,
        threshold,
        triangle_ok,
        majorant_ok,
    })
}

/// Total weight of all words with the given letter counts:
/// `(Σc)!/(∏c!) · ∏ p^c`, in log space.
fn multinomial_mass(counts: &[u32], p: &ProbabilityVector) -> f64 {
    let n: u32 = counts.iter().sum();
    let mut lf = vec![0.0f64; n as usize + 1];
    for i in 1..=n as usize {
        lf[i] = lf[i - 1] + (i as f64).ln();
    }
    let mut lp = lf[n as usize];
    for (a, &c) in counts.iter().enumerate() {
        lp -= lf[c as usize];
        lp += c as f64 * p.get(a).ln();
    }
    lp.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::fourier::{EvaluatorSpec, Measure};
    use rand::Rng;
    use rand::SeedableRng;

    #[test]
    fn triangle_inequality_at_random_frequencies() {
        let mu = bundled::half_third_measure();
        let ev = EvaluatorSpec::FunctionalEquation { tol: 1e-9 }
            .build(&Measure::SelfSimilar(mu.clone()))
            .unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let xi = DVector::from_vec(vec![rng.random_range(5e3..5e4)]);
            let audit =
                average_bound_report(&mu, ev.as_ref(), &xi, 1.0, 0.1, 0.1, 0.5, 1_000_000)
                    .unwrap();
            assert!(audit.triangle_ok, "triangle fails at {xi:?}: {audit:?}");
            assert!(audit.majorant_ok, "majorant fails at {xi:?}");
        }
    }

    #[test]
    fn cantor_average_does_not_decay() {
        // control: for the Cantor measure at ξ = 3^k the children sit at
        // powers of three again, so the average stays pinned near |μ̂(1)|
        let mu = bundled::cantor_measure();
        let ev = EvaluatorSpec::FunctionalEquation { tol: 1e-9 }
            .build(&Measure::SelfSimilar(mu.clone()))
            .unwrap();
        let base = ev
            .eval(&DVector::from_element(1, 1.0))
            .unwrap()
            .value
            .norm();
        let xi = DVector::from_vec(vec![3f64.powi(11)]);
        let audit =
            average_bound_report(&mu, ev.as_ref(), &xi, 1.0, 0.1, 0.1, 0.5, 1_000_000).unwrap();
        assert!(
            audit.average > 0.5 * base,
            "average {} vs base {base}",
            audit.average
        );
    }
}
