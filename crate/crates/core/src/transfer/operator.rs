//! Twisted transfer operators
//! `𝓛_{ib} h(x) = Σ_{a⇝x} w̃_a(x)·|λ_a(x)|^{ib}·h(f_a(x))` acting on
//! collocation grids, with certified derivative-majorant bookkeeping.

use crate::ifs::map::sample_cube;
use crate::ifs::{IFSSystem, SubshiftMatrix, Word};
use crate::measures::NormalizedPotential;
use crate::transfer::grid::FunctionGrid;
use crate::Result;
use nalgebra::DVector;
use num_complex::Complex64;
use std::sync::Arc;

#[derive(Clone)]
pub struct TwistedOperator {
    pub system: Arc<IFSSystem>,
    pub shift: SubshiftMatrix,
    pub potential: NormalizedPotential,
    pub b: f64,
    /// `sup_a sup_x ‖∇ log w̃_a(x)‖` (0 for locally constant weights).
    c_weight: f64,
    /// `sup_a sup_x ‖∇ log |λ_a(x)|‖`.
    c_lambda: f64,
    /// `sup_a sup_x |λ_a(x)|`.
    lambda_max: f64,
}

impl TwistedOperator {
    pub fn new(
        system: Arc<IFSSystem>,
        shift: SubshiftMatrix,
        potential: NormalizedPotential,
        b: f64,
    ) -> Self {
        let probes = sample_cube(system.dimension(), 64);
        let mut c_lambda = 0.0f64;
        let mut lambda_max = 0.0f64;
        for a in 0..system.alphabet_len() {
            for x in &probes {
                c_lambda = c_lambda.max(system.map(a).grad_log_lambda(x, 1e-6).norm());
                lambda_max = lambda_max.max(system.map(a).conformal_factor(x).abs());
            }
        }
        // weight gradient: finite differences of log w̃_a at probes
        let mut c_weight = 0.0f64;
        let h = 1e-6;
        for a in 0..system.alphabet_len() {
            for x in &probes {
                if x.iter().any(|&v| v < h || v > 1.0 - h) {
                    continue;
                }
                for i in 0..system.dimension() {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += h;
                    xm[i] -= h;
                    let g = (potential.log_branch_weight(&system, a, &xp)
                        - potential.log_branch_weight(&system, a, &xm))
                        / (2.0 * h);
                    c_weight = c_weight.max(g.abs());
                }
            }
        }
        TwistedOperator {
            system,
            shift,
            potential,
            b,
            c_weight,
            c_lambda,
            lambda_max,
        }
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// One application; node-wise with symbolic target-cylinder lookups.
    pub fn apply(&self, grid: &FunctionGrid) -> Result<FunctionGrid> {
        if !Arc::ptr_eq(grid.system(), &self.system) {
            return Err(crate::CoreError::GridMismatch(
                "grid built for a different system".into(),
            ));
        }
        let mut out = grid.zero_like();
        out.twist_b = self.b;
        let m = grid.depth;
        let npc = grid.nodes_per_cyl();
        let k = self.system.alphabet_len();
        let sup_in = grid.norm_sup();
        for cyl in 0..grid.cylinders().len() {
            let word = grid.cylinder_word(cyl).clone();
            let first = word.first().expect("depth >= 1");
            // target cylinder words a·(prefix of length m−1), shared per branch
            let prefix = word.prefix(m - 1);
            for a in 0..k {
                if !self.shift.admits(a, first) {
                    continue;
                }
                let target = {
                    let mut t = self.system.empty_word().child(a);
                    for s in prefix.symbols() {
                        t.push(s);
                    }
                    t
                };
                let Some(tidx) = grid.cylinder_index(&target) else {
                    continue;
                };
                for local in 0..npc {
                    let x = grid.node(cyl, local);
                    let w = self.potential.log_branch_weight(&self.system, a, x).exp();
                    let lam = self.system.map(a).conformal_factor(x).abs();
                    let fx = self.system.map(a).apply(x);
                    let hv = grid.eval_in_cylinder(tidx, &fx);
                    let twist = Complex64::from_polar(1.0, self.b * lam.ln());
                    out.values[cyl * npc + local] += w * twist * hv;
                }
            }
        }
        // chain-rule majorant for the derivative bound
        out.deriv_bound = (self.c_weight + self.b.abs() * self.c_lambda) * sup_in
            + self.lambda_max * grid.deriv_bound;
        Ok(out)
    }

    /// Brute-force word sum `Σ_{α ∈ W_A ∩ 𝒜ⁿ, α ⇝ x} w̃_α(x)·|λ_α(x)|^{ib}`.
    pub fn word_sum(&self, n: usize, x: &DVector<f64>, budget: usize) -> Result<Complex64> {
        let sym = self.locate_symbol(x);
        let words = self.shift.words_of_length(n, budget)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for w in words {
            if !self.shift.admits(w.last().unwrap(), sym) {
                continue;
            }
            acc += self.word_term(&w, x)?;
        }
        Ok(acc)
    }

    /// Single word contribution `w̃_α(x)·|λ_α(x)|^{ib}`.
    pub fn word_term(&self, word: &Word, x: &DVector<f64>) -> Result<Complex64> {
        let lw = self.potential.log_word_weight(&self.system, word, x);
        let lam = self.system.word_contraction(word, x)?;
        Ok(Complex64::from_polar(lw.exp(), self.b * lam.ln()))
    }

    pub fn locate_symbol(&self, x: &DVector<f64>) -> usize {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for b in 0..self.system.alphabet_len() {
            let hull = self
                .system
                .cylinder_hull(&self.system.empty_word().child(b))
                .expect("single symbols admissible");
            let d = hull.min_dist_to(x);
            if d < best_d {
                best_d = d;
                best = b;
            }
        }
        best
    }
}

/// Free-function form of [`TwistedOperator::apply`].
pub fn apply_transfer(op: &TwistedOperator, grid: &FunctionGrid) -> Result<FunctionGrid> {
    op.apply(grid)
}
