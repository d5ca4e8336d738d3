//! Gibbs potentials, pressure estimation, and normalization to zero pressure.
//!
//! Branch weights follow the transfer-operator convention
//! `w_a(x) = e^{ψ(f_a(x))}`, and word weights are the Birkhoff products
//! `w_α(x) = ∏_i w_{a_i}(f_{a_{i+1}…a_n}(x))`.

use crate::geom::IntervalBox;
use crate::ifs::{IFSSystem, SubshiftMatrix, Word};
use crate::measures::markov::{perron_eigen, MarkovChain};
use crate::{CoreError, Result};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// User-supplied C¹ potential with a gradient accessor.
pub trait PotentialFn: Send + Sync {
    fn eval(&self, x: &DVector<f64>) -> f64;
    fn grad(&self, x: &DVector<f64>) -> DVector<f64>;
}

/// Potential grades: locally constant on 1-cylinders, geometric, or user C¹.
#[derive(Clone)]
pub enum GibbsPotential {
    /// `ψ ≡ values[a]` on `U_a`; one real per symbol.
    LocallyConstant { values: Vec<f64> },
    /// `ψ = s·log|λ_a(x)|` along branches.
    Geometric { s: f64 },
    /// Arbitrary C¹ function with gradient accessor.
    User(Arc<dyn PotentialFn>),
}

impl std::fmt::Debug for GibbsPotential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GibbsPotential::LocallyConstant { values } => {
                write!(f, "LocallyConstant({values:?})")
            }
            GibbsPotential::Geometric { s } => write!(f, "Geometric(s={s})"),
            GibbsPotential::User(_) => write!(f, "User(..)"),
        }
    }
}

impl GibbsPotential {
    /// `log w_a(x) = ψ(f_a(x))`.
    pub fn log_branch_weight(&self, system: &IFSSystem, a: usize, x: &DVector<f64>) -> f64 {
        match self {
            GibbsPotential::LocallyConstant { values } => values[a],
            GibbsPotential::Geometric { s } => s * system.map(a).conformal_factor(x).abs().ln(),
            GibbsPotential::User(p) => p.eval(&system.map(a).apply(x)),
        }
    }

    /// `log w_α(x)`, the Birkhoff sum along the suffix orbit.
    pub fn log_word_weight(&self, system: &IFSSystem, word: &Word, x: &DVector<f64>) -> f64 {
        let n = word.len();
        let mut y = x.clone();
        let mut acc = 0.0;
        for i in (0..n).rev() {
            let a = word.symbol(i);
            acc += self.log_branch_weight(system, a, &y);
            y = system.map(a).apply(&y);
        }
        acc
    }

    /// Checks the user gradient against central finite differences at probes.
    pub fn validate_gradient(&self, system: &IFSSystem, tol: f64) -> Result<()> {
        let GibbsPotential::User(p) = self else {
            return Ok(());
        };
        let d = system.dimension();
        let h = 1e-6;
        for x in crate::ifs::map::sample_cube(d, 16) {
            let g = p.grad(&x);
            for i in 0..d {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let fd = (p.eval(&xp) - p.eval(&xm)) / (2.0 * h);
                if (g[i] - fd).abs() > tol {
                    return Err(CoreError::invalid(format!(
                        "user potential gradient disagrees with finite differences: {} vs {fd}",
                        g[i]
                    )));
                }
            }
        }
        Ok(())
    }

    fn is_effectively_constant(&self, system: &IFSSystem) -> Option<Vec<f64>> {
        match self {
            GibbsPotential::LocallyConstant { values } => Some(values.clone()),
            GibbsPotential::Geometric { s } if system.all_similitudes() => {
                let mid = system.attractor_hull().midpoint();
                Some(
                    (0..system.alphabet_len())
                        .map(|a| s * system.map(a).conformal_factor(&mid).abs().ln())
                        .collect(),
                )
            }
            _ => None,
        }
    }
}

/// `(1/n)·log Σ_{α ∈ W_A ∩ 𝒜ⁿ} sup_x w_α(x)`.
///
/// Exact (transfer-matrix product) for locally constant weights; sup over a
/// probe grid per word otherwise, with a word budget guard.
pub fn pressure_estimate(
    system: &IFSSystem,
    subshift: Option<&SubshiftMatrix>,
    potential: &GibbsPotential,
    n: usize,
) -> Result<f64> {
    assert!(n >= 1, "pressure estimate needs n >= 1");
    let k = system.alphabet_len();
    let shift = subshift
        .cloned()
        .unwrap_or_else(|| SubshiftMatrix::full_shift(k));

    if let Some(values) = potential.is_effectively_constant(system) {
        // Σ over admissible words of ∏ w = 1ᵀ W (A W)^{n-1} 1 in log space
        let w: Vec<f64> = values.iter().map(|v| v.exp()).collect();
        let mut col = DVector::<f64>::from_vec(w.clone());
        let mut log_scale = 0.0f64;
        for _ in 1..n {
            let mut next = DVector::<f64>::zeros(k);
            for a in 0..k {
                let mut acc = 0.0;
                for b in 0..k {
                    if shift.admits(a, b) {
                        acc += col[b];
                    }
                }
                next[a] = w[a] * acc;
            }
            let m = next.max();
            if m == 0.0 {
                return Err(CoreError::EmptyAdmissibleSet(n));
            }
            next /= m;
            log_scale += m.ln();
            col = next;
        }
        let total = col.sum();
        if total == 0.0 {
            return Err(CoreError::EmptyAdmissibleSet(n));
        }
        return Ok((total.ln() + log_scale) / n as f64);
    }

    let words = shift.words_of_length(n, 2_000_000)?;
    let probes = probe_points(system);
    let mut sum = 0.0f64;
    for w in &words {
        let last = w.last().unwrap();
        let mut sup = f64::NEG_INFINITY;
        for (b, x) in &probes {
            if shift.admits(last, *b) {
                sup = sup.max(potential.log_word_weight(system, w, x));
            }
        }
        if sup.is_finite() {
            sum += sup.exp();
        }
    }
    if sum == 0.0 {
        return Err(CoreError::EmptyAdmissibleSet(n));
    }
    Ok(sum.ln() / n as f64)
}

/// Probe points tagged by the 1-cylinder they belong to.
fn probe_points(system: &IFSSystem) -> Vec<(usize, DVector<f64>)> {
    let mut out = Vec::new();
    for b in 0..system.alphabet_len() {
        let w = system.empty_word().child(b);
        let hull = system.cylinder_hull(&w).expect("single symbols are admissible");
        for t in 0..4 {
            let frac = (t as f64 + 0.5) / 4.0;
            let x = DVector::from_iterator(
                system.dimension(),
                hull.coords.iter().map(|c| c.lo + frac * c.width()),
            );
            out.push((b, x));
        }
    }
    out
}

/// Positive eigenfunction data conjugating the transfer operator to fix 1.
#[derive(Clone, Debug)]
enum Conjugation {
    /// Full-shift locally-constant case: `h ≡ 1`.
    Trivial,
    /// `h` constant on 1-cylinders.
    PerSymbol(Vec<f64>),
    /// `h` constant on depth-m cylinders (general C¹ potentials).
    PerCylinder {
        words: Vec<Word>,
        hulls: Vec<IntervalBox>,
        log_values: Vec<f64>,
    },
}

/// A potential together with its zero-pressure conjugation:
/// `w̃_α(x) = w_α(x)·h(f_α(x)) / (ρ^{|α|}·h(x))`.
#[derive(Clone, Debug)]
pub struct NormalizedPotential {
    base: GibbsPotential,
    log_rho: f64,
    conj: Conjugation,
    /// Reported residual: `max_x |Σ_{a⇝x} w̃_a(x) − 1|` over probes.
    pub residual: f64,
}

impl NormalizedPotential {
    pub fn base(&self) -> &GibbsPotential {
        &self.base
    }

    pub fn log_rho(&self) -> f64 {
        self.log_rho
    }

    fn log_h(&self, system: &IFSSystem, x: &DVector<f64>) -> f64 {
        match &self.conj {
            Conjugation::Trivial => 0.0,
            Conjugation::PerSymbol(h) => {
                let b = locate_symbol(system, x);
                h[b].ln()
            }
            Conjugation::PerCylinder {
                words: _,
                hulls,
                log_values,
            } => {
                let mut best = 0usize;
                let mut best_d = f64::INFINITY;
                for (i, hb) in hulls.iter().enumerate() {
                    let d = hb.min_dist_to(x);
                    if d < best_d {
                        best_d = d;
                        best = i;
                        if d == 0.0 {
                            break;
                        }
                    }
                }
                log_values[best]
            }
        }
    }

    /// `log w̃_a(x)`.
    pub fn log_branch_weight(&self, system: &IFSSystem, a: usize, x: &DVector<f64>) -> f64 {
        let fx = system.map(a).apply(x);
        self.base.log_branch_weight(system, a, x) + self.log_h(system, &fx)
            - self.log_rho
            - self.log_h(system, x)
    }

    /// `log w̃_α(x)` via the telescoped conjugation.
    pub fn log_word_weight(&self, system: &IFSSystem, word: &Word, x: &DVector<f64>) -> f64 {
        let fx = system
            .compose_word(word, x)
            .expect("caller checks admissibility");
        self.base.log_word_weight(system, word, x) + self.log_h(system, &fx)
            - word.len() as f64 * self.log_rho
            - self.log_h(system, x)
    }
}

fn locate_symbol(system: &IFSSystem, x: &DVector<f64>) -> usize {
    if let Some(boxes) = system.boxes() {
        for (b, bb) in boxes.iter().enumerate() {
            if bb.contains(x) {
                return b;
            }
        }
    }
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for b in 0..system.alphabet_len() {
        let hull = system
            .cylinder_hull(&system.empty_word().child(b))
            .expect("single symbols admissible");
        let d = hull.min_dist_to(x);
        if d < best_d {
            best_d = d;
            best = b;
        }
    }
    best
}

/// Output of [`normalize_potential`]: the conjugated potential plus the
/// Markov chain realizing the associated Gibbs/Markov measure.
#[derive(Clone, Debug)]
pub struct NormalizedGibbs {
    pub potential: NormalizedPotential,
    /// Markov chain over the chain alphabet (1-cylinders, or depth-m blocks).
    pub chain: MarkovChain,
    /// Block length of the chain alphabet (1 when exact).
    pub block_len: usize,
    /// Log-scale Gibbs bracket inflation for block-approximated potentials.
    pub log_inflation: f64,
}

/// Conjugates `potential` so the untwisted transfer operator fixes constants.
///
/// Locally constant potentials (and geometric potentials of similitude
/// systems) are handled exactly via Perron–Frobenius eigendata of the
/// weighted adjacency matrix; general C¹ potentials are approximated by a
/// locally-constant potential on depth-`depth` cylinders with the residual
/// and bracket inflation reported.
pub fn normalize_potential(
    system: &IFSSystem,
    subshift: Option<&SubshiftMatrix>,
    potential: &GibbsPotential,
    depth: usize,
) -> Result<NormalizedGibbs> {
    let k = system.alphabet_len();
    let shift = subshift
        .cloned()
        .unwrap_or_else(|| SubshiftMatrix::full_shift(k));
    potential.validate_gradient(system, 1e-5)?;

    if let Some(values) = potential.is_effectively_constant(system) {
        // B(a,b) = w_a·A(a,b); h solves Bᵀh = ρh
        let w: Vec<f64> = values.iter().map(|v| v.exp()).collect();
        let bt = DMatrix::from_fn(k, k, |b, a| if shift.admits(a, b) { w[a] } else { 0.0 });
        let (rho, h) = perron_eigen(&bt)?;
        let full_shift = (0..k).all(|a| (0..k).all(|b| shift.admits(a, b)));
        let conj = if full_shift {
            Conjugation::Trivial
        } else {
            Conjugation::PerSymbol(h.iter().cloned().collect())
        };
        let pair = DMatrix::from_fn(k, k, |a, b| {
            if shift.admits(a, b) {
                w[a] * h[a] / (rho * h[b])
            } else {
                0.0
            }
        });
        let chain = MarkovChain::from_pair_weights(pair, &shift)?;
        let normalized = NormalizedPotential {
            base: GibbsPotential::LocallyConstant { values },
            log_rho: rho.ln(),
            conj,
            residual: residual_of(system, &shift, &|a, x| {
                let fx = system.map(a).apply(x);
                let hb = |y: &DVector<f64>| {
                    if full_shift {
                        1.0
                    } else {
                        h[locate_symbol(system, y)]
                    }
                };
                (w[a] * hb(&fx) / (rho * hb(x))).ln()
            }),
        };
        return Ok(NormalizedGibbs {
            potential: normalized,
            chain,
            block_len: 1,
            log_inflation: 0.0,
        });
    }

    // depth-m locally-constant approximation on cylinder blocks
    let m = depth.max(1);
    let blocks = shift.words_of_length(m, 500_000)?;
    let nb = blocks.len();
    let hulls: Vec<IntervalBox> = blocks
        .iter()
        .map(|w| system.cylinder_hull(w))
        .collect::<Result<Vec<_>>>()?;
    let anchors: Vec<DVector<f64>> = blocks
        .iter()
        .map(|w| system.anchor(w))
        .collect::<Result<Vec<_>>>()?;
    // block adjacency u ⇝ v and block weights w_u evaluated at the anchor of v
    let mut bt = DMatrix::<f64>::zeros(nb, nb);
    for (u, wu) in blocks.iter().enumerate() {
        for (v, wv) in blocks.iter().enumerate() {
            if shift.admits(wu.last().unwrap(), wv.first().unwrap()) {
                bt[(v, u)] = potential.log_word_weight(system, wu, &anchors[v]).exp();
            }
        }
    }
    let (rho_m, h) = perron_eigen(&bt)?;
    let pair = DMatrix::from_fn(nb, nb, |u, v| {
        if bt[(v, u)] > 0.0 {
            bt[(v, u)] * h[u] / (rho_m * h[v])
        } else {
            0.0
        }
    });
    let block_shift = SubshiftMatrix::new(
        (0..nb)
            .map(|u| (0..nb).map(|v| pair[(u, v)] > 0.0).collect())
            .collect(),
    )?;
    let chain = MarkovChain::from_pair_weights(pair, &block_shift)?;

    // bracket inflation: variation of log w_u over its entry cylinder,
    // geometrically summed via the strongest contraction at block depth
    let mut var0 = 0.0f64;
    for (u, wu) in blocks.iter().enumerate() {
        for (v, _) in blocks.iter().enumerate() {
            if bt[(v, u)] == 0.0 {
                continue;
            }
            let a = potential.log_word_weight(system, wu, &anchors[v]);
            for corner in crate::ifs::map::box_corners(&hulls[v]).into_iter().take(8) {
                let b = potential.log_word_weight(system, wu, &corner);
                var0 = var0.max((a - b).abs());
            }
        }
    }
    let lam_max = (0..k)
        .map(|a| {
            crate::ifs::map::sample_cube(system.dimension(), 64)
                .iter()
                .map(|x| system.map(a).conformal_factor(x).abs())
                .fold(0.0f64, f64::max)
        })
        .fold(0.0f64, f64::max);
    let lam_block = lam_max.powi(m as i32).min(0.999);
    let log_inflation = var0 / (1.0 - lam_block);

    let log_values: Vec<f64> = (0..nb).map(|u| h[u].ln()).collect();
    let normalized = NormalizedPotential {
        base: potential.clone(),
        log_rho: rho_m.ln() / m as f64,
        conj: Conjugation::PerCylinder {
            words: blocks,
            hulls,
            log_values,
        },
        residual: 0.0,
    };
    let mut out = NormalizedGibbs {
        potential: normalized,
        chain,
        block_len: m,
        log_inflation,
    };
    let shift_ref = &shift;
    let pot_ref = out.potential.clone();
    out.potential.residual = residual_of(system, shift_ref, &|a, x| {
        pot_ref.log_branch_weight(system, a, x)
    });
    Ok(out)
}

/// `max_x |Σ_{a⇝x} w̃_a(x) − 1|` over tagged probes.
fn residual_of(
    system: &IFSSystem,
    shift: &SubshiftMatrix,
    log_branch: &dyn Fn(usize, &DVector<f64>) -> f64,
) -> f64 {
    let mut worst = 0.0f64;
    for (b, x) in probe_points(system) {
        let mut sum = 0.0;
        for a in 0..system.alphabet_len() {
            if shift.admits(a, b) {
                sum += log_branch(a, &x).exp();
            }
        }
        worst = worst.max((sum - 1.0).abs());
    }
    worst
}
