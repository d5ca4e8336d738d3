//! UNI margin computation: the quantitative non-integrability margin
//! `ε₀ = min_e max_{α₁,α₂} |∂_e(log|λ_{α₁}| − log|λ_{α₂}|)|` over admissible
//! word pairs, in the point-wise and ball-uniform variants.

use crate::geom::direction_grid;
use crate::ifs::{IFSSystem, SubshiftMatrix, Word};
use crate::{CoreError, Result};
use nalgebra::DVector;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum UniVariant {
    Point,
    Ball { r: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectionMargin {
    pub direction: Vec<f64>,
    pub margin: f64,
    pub word_hi: String,
    pub word_lo: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct UNIReport {
    pub n: usize,
    pub probe: Vec<f64>,
    pub variant: UniVariant,
    pub per_direction: Vec<DirectionMargin>,
    /// Global margin ε₀ (minimum over the direction grid).
    pub margin: f64,
}

/// Computes the margin at `probe` for admissible words of length `n`.
///
/// The pair maximum of `|⟨v(α₁) − v(α₂), e⟩|` is the spread of the projected
/// gradient values, so the scan is linear in the word count.
pub fn uni_margin(
    system: &IFSSystem,
    shift: Option<&SubshiftMatrix>,
    n: usize,
    probe: &DVector<f64>,
    variant: UniVariant,
    direction_count: usize,
    budget: usize,
) -> Result<UNIReport> {
    let k = system.alphabet_len();
    let full;
    let shift = match shift {
        Some(s) => s,
        None => {
            full = SubshiftMatrix::full_shift(k);
            &full
        }
    };
    let words = shift.words_of_length(n, budget)?;
    let d = system.dimension();
    let dirs = direction_grid(d, direction_count.max(1));

    // evaluation points and, per point, the symbol that admissibility must
    // reach (the 1-cylinder containing the point)
    let points: Vec<DVector<f64>> = match variant {
        UniVariant::Point => vec![probe.clone()],
        UniVariant::Ball { r } => {
            let mut pts = vec![probe.clone()];
            for e in direction_grid(d, (2 * d).max(4)) {
                for &s in &[-1.0f64, -0.5, 0.5, 1.0] {
                    let y = probe + &e * (s * r);
                    if y.iter().all(|&c| (0.0..=1.0).contains(&c)) {
                        pts.push(y);
                    }
                }
            }
            pts
        }
    };
    let symbols: Vec<usize> = points.iter().map(|x| locate_symbol(system, x)).collect();

    // a word participates when admissible toward every evaluation point
    let active: Vec<&Word> = words
        .iter()
        .filter(|w| {
            symbols
                .iter()
                .all(|&s| shift.admits(w.last().unwrap(), s))
        })
        .collect();
    if active.is_empty() {
        return Err(CoreError::EmptyAdmissibleSet(n));
    }

    // gradients per (point, word)
    let mut grads: Vec<Vec<DVector<f64>>> = Vec::with_capacity(points.len());
    for x in &points {
        let mut row = Vec::with_capacity(active.len());
        for w in &active {
            row.push(system.grad_log_lambda_word(w, x, 1e-6)?);
        }
        grads.push(row);
    }

    let labels = system.labels();
    let mut per_direction = Vec::with_capacity(dirs.len());
    let mut global = f64::INFINITY;
    for e in &dirs {
        // margin at each point = spread of projections; variant takes the min
        let mut margin = f64::INFINITY;
        let mut word_hi = String::new();
        let mut word_lo = String::new();
        for row in &grads {
            let mut hi = f64::NEG_INFINITY;
            let mut lo = f64::INFINITY;
            let mut hi_w = 0usize;
            let mut lo_w = 0usize;
            for (i, g) in row.iter().enumerate() {
                let p = g.dot(e);
                if p > hi {
                    hi = p;
                    hi_w = i;
                }
                if p < lo {
                    lo = p;
                    lo_w = i;
                }
            }
            let spread = hi - lo;
            if spread < margin {
                margin = spread;
                word_hi = active[hi_w].display(labels);
                word_lo = active[lo_w].display(labels);
            }
        }
        global = global.min(margin);
        per_direction.push(DirectionMargin {
            direction: e.iter().cloned().collect(),
            margin,
            word_hi,
            word_lo,
        });
    }

    Ok(UNIReport {
        n,
        probe: probe.iter().cloned().collect(),
        variant,
        per_direction,
        margin: global,
    })
}

fn locate_symbol(system: &IFSSystem, x: &DVector<f64>) -> usize {
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for b in 0..system.alphabet_len() {
        let hull = system
            .cylinder_hull(&system.empty_word().child(b))
            .expect("single symbols admissible");
        let dist = hull.min_dist_to(x);
        if dist < best_d {
            best_d = dist;
            best = b;
        }
    }
    best
}
