//! Separation audits: conditioning classes of the good cutoff set and the
//! unit-band collision check that the Diophantine (or rotation) hypothesis
//! keeps contraction products apart.

use crate::decomposition::cutoff::{stopping_words, CutoffMember};
use crate::decomposition::goodwords::{good_word_params, GoodWordParams};
use crate::ifs::{IFSSystem, Word};
use crate::measures::ProbabilityVector;
use crate::{CoreError, Result};
use nalgebra::DVector;
use serde::Serialize;
use std::collections::HashMap;

/// Which separation lemma is audited.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SeparationMode {
    /// Distinct `(|α|_{a₁}, |α|_{a₂})` in one class must land in distinct
    /// unit bands of `|r_α|·‖ξ‖`.
    Ratio,
    /// Planar rotation form: distinct count pairs must have
    /// `‖r_α O_αᵀξ − r_{α'} O_{α'}ᵀξ‖ > 1`.
    Rotation,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationViolation {
    pub class: Vec<u32>,
    pub band: i64,
    pub counts_a: (u32, u32),
    pub counts_b: (u32, u32),
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassBandRow {
    pub class: Vec<u32>,
    pub band: i64,
    pub members: usize,
    /// Minimal pairwise distance of the audited frequencies in this cell.
    pub min_gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationAudit {
    pub mode: SeparationMode,
    pub xi_norm: f64,
    pub params: GoodWordParams,
    pub cutoff_size: usize,
    pub good_cutoff_size: usize,
    pub class_count: usize,
    /// Measured constant in `#K ≤ C·(log‖ξ‖)^{(k−2)(1/2+δ)}`.
    pub class_bound_constant: f64,
    pub rows: Vec<ClassBandRow>,
    pub violations: Vec<SeparationViolation>,
}

/// Runs the audit at frequency `ξ` for the distinguished pair `(a1, a2)`.
#[allow(clippy::too_many_arguments)]
pub fn separation_check(
    system: &IFSSystem,
    p: &ProbabilityVector,
    xi: &DVector<f64>,
    pair: (usize, usize),
    l: f64,
    delta: f64,
    epsilon: f64,
    mode: SeparationMode,
    budget: usize,
) -> Result<SeparationAudit> {
    let xi_norm = xi.norm();
    let params = good_word_params(system, p, xi_norm, l, delta, epsilon)?;
    let cutoff = stopping_words(system, p, params.xi_tilde, budget)?;
    let (a1, a2) = pair;
    if a1 == a2 || a1 >= system.alphabet_len() || a2 >= system.alphabet_len() {
        return Err(CoreError::invalid("distinguished pair must be two distinct symbols"));
    }

    // 𝒜̃_ξ: members whose length-n(ξ) prefix is good
    let good: Vec<&CutoffMember> = cutoff
        .members
        .iter()
        .filter(|m| {
            m.word.len() >= params.n_xi
                && crate::decomposition::goodwords::counts_are_good(
                    m.word.prefix(params.n_xi).counts(),
                    &params,
                    p,
                )
        })
        .collect();

    // conditioning classes: letter counts over 𝒜 ∖ {a1, a2}
    let class_of = |w: &Word| -> Vec<u32> {
        (0..system.alphabet_len())
            .filter(|&a| a != a1 && a != a2)
            .map(|a| w.count_of(a))
            .collect()
    };

    // group by (class, band); rotation mode needs the full frequency vectors
    #[derive(Clone)]
    struct Entry {
        counts: (u32, u32),
        freq: DVector<f64>,
        scalar: f64,
    }
    let mut cells: HashMap<(Vec<u32>, i64), Vec<Entry>> = HashMap::new();
    let mut classes: HashMap<Vec<u32>, ()> = HashMap::new();
    for m in &good {
        let (scalar, freq) = match mode {
            SeparationMode::Ratio => {
                let s = m.r_abs * xi_norm;
                (s, DVector::from_vec(vec![s]))
            }
            SeparationMode::Rotation => {
                let (lam, rot) = system.word_derivative(&m.word, &system.attractor_hull().midpoint())?;
                let zeta = rot.transpose() * xi * lam.abs();
                (m.r_abs * xi_norm, zeta)
            }
        };
        let band = scalar.floor() as i64; // half-open [n, n+1)
        let class = class_of(&m.word);
        classes.entry(class.clone()).or_insert(());
        cells.entry((class, band)).or_default().push(Entry {
            counts: (m.word.count_of(a1), m.word.count_of(a2)),
            freq,
            scalar,
        });
    }

    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let mut keys: Vec<(Vec<u32>, i64)> = cells.keys().cloned().collect();
    keys.sort();
    for key in keys {
        let entries = &cells[&key];
        let mut min_gap = f64::INFINITY;
        for i in 0..entries.len() {
            for j in i + 1..entries.len() {
                let (ea, eb) = (&entries[i], &entries[j]);
                if ea.counts == eb.counts {
                    continue;
                }
                let gap = match mode {
                    SeparationMode::Ratio => (ea.scalar - eb.scalar).abs(),
                    SeparationMode::Rotation => (&ea.freq - &eb.freq).norm(),
                };
                min_gap = min_gap.min(gap);
                let collide = match mode {
                    // same unit band with distinct counts is already a violation
                    SeparationMode::Ratio => true,
                    SeparationMode::Rotation => gap <= 1.0,
                };
                if collide {
                    violations.push(SeparationViolation {
                        class: key.0.clone(),
                        band: key.1,
                        counts_a: ea.counts,
                        counts_b: eb.counts,
                        gap,
                    });
                }
            }
        }
        rows.push(ClassBandRow {
            class: key.0.clone(),
            band: key.1,
            members: entries.len(),
            min_gap: if min_gap.is_finite() { min_gap } else { f64::NAN },
        });
    }

    let k = system.alphabet_len() as f64;
    let denom = xi_norm.ln().powf((k - 2.0) * (0.5 + delta));
    Ok(SeparationAudit {
        mode,
        xi_norm,
        params,
        cutoff_size: cutoff.len(),
        good_cutoff_size: good.len(),
        class_count: classes.len(),
        class_bound_constant: classes.len() as f64 / denom,
        rows,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    #[test]
    fn half_third_has_no_collisions_at_1e6() {
        // distinct (m, n) give distinct 2^{-m}3^{-n} by unique factorization;
        // at ‖ξ‖ = 1e6 the products in the cutoff window are > 1 apart
        let sys = bundled::half_third_system();
        let p = ProbabilityVector::uniform(2);
        let xi = DVector::from_vec(vec![1e6]);
        let audit = separation_check(
            &sys,
            &p,
            &xi,
            (0, 1),
            1.0,
            0.1,
            0.1,
            SeparationMode::Ratio,
            1_000_000,
        )
        .unwrap();
        assert!(audit.good_cutoff_size > 0);
        assert!(
            audit.violations.is_empty(),
            "violations: {:?}",
            audit.violations
        );
    }

    #[test]
    fn homogeneous_control_collides() {
        let sys = bundled::homogeneous_control_system();
        let p = ProbabilityVector::uniform(2);
        let xi = DVector::from_vec(vec![1e6]);
        let audit = separation_check(
            &sys,
            &p,
            &xi,
            (0, 1),
            1.0,
            0.1,
            0.1,
            SeparationMode::Ratio,
            1_000_000,
        )
        .unwrap();
        assert!(
            !audit.violations.is_empty(),
            "equal ratios must collide massively"
        );
    }

    #[test]
    fn rotation_form_sqrt_angles_clean() {
        let sys = bundled::rotation2d_system();
        let p = ProbabilityVector::uniform(2);
        let xi = DVector::from_vec(vec![3e4, 1e4]);
        let audit = separation_check(
            &sys,
            &p,
            &xi,
            (0, 1),
            1.0,
            0.1,
            0.1,
            SeparationMode::Rotation,
            1_000_000,
        )
        .unwrap();
        assert!(audit.good_cutoff_size > 0);
        assert!(
            audit.violations.is_empty(),
            "violations: {:?}",
            audit.violations.len()
        );
    }

    #[test]
    fn class_cardinality_bound_holds() {
        // with k = 2 there is a single (empty) class
        let sys = bundled::half_third_system();
        let p = ProbabilityVector::uniform(2);
        let xi = DVector::from_vec(vec![1e6]);
        let audit = separation_check(
            &sys,
            &p,
            &xi,
            (0, 1),
            1.0,
            0.1,
            0.1,
            SeparationMode::Ratio,
            1_000_000,
        )
        .unwrap();
        assert_eq!(audit.class_count, 1);
    }
}
