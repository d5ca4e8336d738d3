//! Norm-decay measurement: tables of `‖𝓛_{ib}ⁿ 1‖` and fitted per-b decay
//! rates ρ̂, the measurable face of the spectral gap.

use crate::ifs::{IFSSystem, SubshiftMatrix};
use crate::measures::NormalizedPotential;
use crate::transfer::grid::FunctionGrid;
use crate::transfer::operator::TwistedOperator;
use crate::Result;
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone, Debug, Serialize)]
pub struct NormDecayRow {
    pub b: f64,
    pub n: usize,
    pub sup_norm: f64,
    pub b_norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormDecayFit {
    pub b: f64,
    /// exp of the log-linear slope of `‖𝓛ⁿ1‖_∞` against n.
    pub rho_hat: f64,
    pub residual: f64,
    pub points_used: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormDecayTable {
    pub rows: Vec<NormDecayRow>,
    pub fits: Vec<NormDecayFit>,
    pub depth: usize,
    pub nodes_per_axis: usize,
    pub max_rho: f64,
}

/// Iterates `𝓛_{ib}ⁿ 1` for each b and fits `log ‖·‖_∞` against n.
///
/// The fit window starts at n = 2 and stops once the norm falls below the
/// discretization floor.
pub fn norm_decay(
    system: Arc<IFSSystem>,
    shift: &SubshiftMatrix,
    potential: &NormalizedPotential,
    b_list: &[f64],
    n_max: usize,
    depth: usize,
    nodes_per_axis: usize,
) -> Result<NormDecayTable> {
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &b in b_list {
        let op = TwistedOperator::new(Arc::clone(&system), shift.clone(), potential.clone(), b);
        let mut grid =
            FunctionGrid::constant_one(Arc::clone(&system), shift, depth, nodes_per_axis, b)?;
        let mut series = Vec::new();
        for n in 1..=n_max {
            grid = op.apply(&grid)?;
            let sup = grid.norm_sup();
            rows.push(NormDecayRow {
                b,
                n,
                sup_norm: sup,
                b_norm: grid.norm_b(),
            });
            series.push((n as f64, sup));
        }
        fits.push(fit_rho(b, &series));
    }
    let max_rho = fits.iter().map(|f| f.rho_hat).fold(0.0, f64::max);
    Ok(NormDecayTable {
        rows,
        fits,
        depth,
        nodes_per_axis,
        max_rho,
    })
}

fn fit_rho(b: f64, series: &[(f64, f64)]) -> NormDecayFit {
    // skip the first step (transient) and anything под the numeric floor
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|&&(n, s)| n >= 2.0 && s > 1e-7)
        .map(|&(n, s)| (n, s.ln()))
        .collect();
    if pts.len() < 2 {
        return NormDecayFit {
            b,
            rho_hat: f64::NAN,
            residual: f64::NAN,
            points_used: pts.len(),
        };
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let residual = (pts
        .iter()
        .map(|&(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum::<f64>()
        / n)
        .sqrt();
    NormDecayFit {
        b,
        rho_hat: slope.exp(),
        residual,
        points_used: pts.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::measures::{normalize_potential, GibbsPotential};

    #[test]
    fn untwisted_norm_stays_one() {
        let sys = bundled::uni_mobius_system_arc();
        let shift = SubshiftMatrix::full_shift(3);
        let ng = normalize_potential(
            &sys,
            Some(&shift),
            &GibbsPotential::LocallyConstant {
                values: vec![(1f64 / 3.0).ln(); 3],
            },
            1,
        )
        .unwrap();
        let table = norm_decay(sys, &shift, &ng.potential, &[0.0], 10, 4, 3).unwrap();
        for r in &table.rows {
            assert!((r.sup_norm - 1.0).abs() < 1e-10, "{r:?}");
        }
    }

    #[test]
    fn similitude_resonance_keeps_norm_one() {
        // homogeneous ratios: |r|^{ib} is a common phase, so 𝓛_{ib}1 has
        // modulus one at every point and every b
        let sys = Arc::new(bundled::similitude_control_system());
        let shift = SubshiftMatrix::full_shift(2);
        let ng = normalize_potential(
            &sys,
            Some(&shift),
            &GibbsPotential::LocallyConstant {
                values: vec![(0.5f64).ln(); 2],
            },
            1,
        )
        .unwrap();
        let table = norm_decay(sys, &shift, &ng.potential, &[10.0, 47.0], 12, 4, 3).unwrap();
        for f in &table.fits {
            assert!(f.rho_hat >= 0.999, "b = {}: rho = {}", f.b, f.rho_hat);
        }
    }

    #[test]
    fn uni_system_decays_at_moderate_twist() {
        let sys = bundled::uni_mobius_system_arc();
        let shift = SubshiftMatrix::full_shift(3);
        let ng = normalize_potential(
            &sys,
            Some(&shift),
            &GibbsPotential::LocallyConstant {
                values: vec![(1f64 / 3.0).ln(); 3],
            },
            1,
        )
        .unwrap();
        let table = norm_decay(sys, &shift, &ng.potential, &[20.0, 60.0], 20, 5, 4).unwrap();
        for f in &table.fits {
            assert!(
                f.rho_hat < 0.98,
                "b = {}: rho = {} ({} pts)",
                f.b,
                f.rho_hat,
                f.points_used
            );
        }
    }
}
