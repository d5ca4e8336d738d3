//! Depth-m cylinder collocation grids with per-cylinder tensor lattices and
//! multilinear interpolation. Derivative norms are carried as certified
//! majorants, which is all the decay measurements need.

use crate::geom::IntervalBox;
use crate::ifs::{IFSSystem, SubshiftMatrix, Word};
use crate::{CoreError, Result};
use nalgebra::DVector;
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Clone)]
pub struct FunctionGrid {
    system: Arc<IFSSystem>,
    pub depth: usize,
    pub nodes_per_axis: usize,
    /// Twist parameter entering the `‖·‖_b` norm.
    pub twist_b: f64,
    cylinders: Vec<Word>,
    index: HashMap<Word, usize>,
    hulls: Vec<IntervalBox>,
    nodes: Vec<DVector<f64>>,
    pub values: Vec<Complex64>,
    /// Certified majorant of `sup ‖Dh‖`.
    pub deriv_bound: f64,
    nodes_per_cyl: usize,
}

impl FunctionGrid {
    /// The constant function 1 on the depth-`m` collocation grid.
    pub fn constant_one(
        system: Arc<IFSSystem>,
        shift: &SubshiftMatrix,
        depth: usize,
        nodes_per_axis: usize,
        twist_b: f64,
    ) -> Result<Self> {
        assert!(nodes_per_axis >= 2, "need at least 2 nodes per axis");
        let cylinders = shift.words_of_length(depth, 2_000_000)?;
        let d = system.dimension();
        let nodes_per_cyl = nodes_per_axis.pow(d as u32);
        let mut hulls = Vec::with_capacity(cylinders.len());
        let mut nodes = Vec::with_capacity(cylinders.len() * nodes_per_cyl);
        let mut index = HashMap::with_capacity(cylinders.len());
        for (i, w) in cylinders.iter().enumerate() {
            let hull = system.cylinder_hull(w)?;
            for flat in 0..nodes_per_cyl {
                nodes.push(lattice_point(&hull, nodes_per_axis, flat));
            }
            hulls.push(hull);
            index.insert(w.clone(), i);
        }
        let n = nodes.len();
        Ok(FunctionGrid {
            system,
            depth,
            nodes_per_axis,
            twist_b,
            cylinders,
            index,
            hulls,
            nodes,
            values: vec![Complex64::new(1.0, 0.0); n],
            deriv_bound: 0.0,
            nodes_per_cyl,
        })
    }

    pub fn system(&self) -> &Arc<IFSSystem> {
        &self.system
    }

    pub fn cylinders(&self) -> &[Word] {
        &self.cylinders
    }

    pub fn cylinder_index(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes_per_cyl(&self) -> usize {
        self.nodes_per_cyl
    }

    pub fn node(&self, cyl: usize, local: usize) -> &DVector<f64> {
        &self.nodes[cyl * self.nodes_per_cyl + local]
    }

    /// Cylinder containing each node block, by construction.
    pub fn cylinder_word(&self, cyl: usize) -> &Word {
        &self.cylinders[cyl]
    }

    pub fn norm_sup(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `‖h‖_b = ‖h‖_∞ + sup‖Dh‖/|b|` (the untwisted norm at b = 0).
    pub fn norm_b(&self) -> f64 {
        if self.twist_b == 0.0 {
            self.norm_sup()
        } else {
            self.norm_sup() + self.deriv_bound / self.twist_b.abs()
        }
    }

    /// Multilinear interpolation inside the given cylinder.
    pub fn eval_in_cylinder(&self, cyl: usize, x: &DVector<f64>) -> Complex64 {
        let hull = &self.hulls[cyl];
        let d = hull.dim();
        let g = self.nodes_per_axis;
        // per-axis cell index and fraction
        let mut idx = vec![0usize; d];
        let mut frac = vec![0.0f64; d];
        for i in 0..d {
            let c = &hull.coords[i];
            let w = c.width();
            let t = if w > 0.0 {
                ((x[i] - c.lo) / w * (g - 1) as f64).clamp(0.0, (g - 1) as f64)
            } else {
                0.0
            };
            let i0 = (t.floor() as usize).min(g - 2);
            idx[i] = i0;
            frac[i] = t - i0 as f64;
        }
        let base = cyl * self.nodes_per_cyl;
        let mut acc = Complex64::new(0.0, 0.0);
        for mask in 0..(1usize << d) {
            let mut weight = 1.0f64;
            let mut flat = 0usize;
            let mut stride = 1usize;
            for i in 0..d {
                let up = (mask >> i) & 1 == 1;
                weight *= if up { frac[i] } else { 1.0 - frac[i] };
                flat += (idx[i] + usize::from(up)) * stride;
                stride *= g;
            }
            if weight != 0.0 {
                acc += self.values[base + flat] * weight;
            }
        }
        acc
    }

    /// Interpolation mesh (largest node spacing), for error estimates.
    pub fn mesh(&self) -> f64 {
        self.hulls
            .iter()
            .map(|h| {
                h.coords
                    .iter()
                    .map(|c| c.width() / (self.nodes_per_axis - 1) as f64)
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max)
    }

    pub fn compatible_with(&self, other: &FunctionGrid) -> bool {
        Arc::ptr_eq(&self.system, &other.system)
            && self.depth == other.depth
            && self.nodes_per_axis == other.nodes_per_axis
    }

    /// Empty clone: same geometry, zero values.
    pub fn zero_like(&self) -> FunctionGrid {
        let mut g = self.clone();
        g.values.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        g.deriv_bound = 0.0;
        g
    }

    pub fn check_compatible(&self, other: &FunctionGrid) -> Result<()> {
        if self.compatible_with(other) {
            Ok(())
        } else {
            Err(CoreError::GridMismatch(format!(
                "depth {} × {} nodes vs depth {} × {}",
                self.depth, self.nodes_per_axis, other.depth, other.nodes_per_axis
            )))
        }
    }
}

fn lattice_point(hull: &IntervalBox, g: usize, flat: usize) -> DVector<f64> {
    let d = hull.dim();
    let mut rem = flat;
    DVector::from_iterator(
        d,
        (0..d).map(|i| {
            let j = rem % g;
            rem /= g;
            let c = &hull.coords[i];
            c.lo + c.width() * j as f64 / (g - 1) as f64
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    #[test]
    fn grid_counts_and_interpolation() {
        let sys = bundled::uni_mobius_system_arc();
        let shift = SubshiftMatrix::full_shift(3);
        let grid = FunctionGrid::constant_one(sys, &shift, 2, 4, 10.0).unwrap();
        assert_eq!(grid.cylinders().len(), 9);
        assert_eq!(grid.node_count(), 36);
        // constant function interpolates exactly
        let x = grid.node(3, 1).clone();
        let v = grid.eval_in_cylinder(3, &x);
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(grid.norm_b(), 1.0);
    }

    #[test]
    fn linear_functions_interpolate_exactly() {
        let sys = bundled::uni_mobius_system_arc();
        let shift = SubshiftMatrix::full_shift(3);
        let mut grid = FunctionGrid::constant_one(sys, &shift, 2, 5, 1.0).unwrap();
        for cyl in 0..grid.cylinders().len() {
            for local in 0..grid.nodes_per_cyl() {
                let x = grid.node(cyl, local)[0];
                grid.values[cyl * grid.nodes_per_cyl() + local] =
                    Complex64::new(2.0 * x - 0.3, 0.0);
            }
        }
        for cyl in 0..grid.cylinders().len() {
            let mid = {
                let a = grid.node(cyl, 1)[0];
                let b = grid.node(cyl, 2)[0];
                0.5 * (a + b)
            };
            let v = grid.eval_in_cylinder(cyl, &DVector::from_vec(vec![mid]));
            assert!((v.re - (2.0 * mid - 0.3)).abs() < 1e-14);
        }
    }
}
