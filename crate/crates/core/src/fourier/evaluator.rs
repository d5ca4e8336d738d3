//! Fourier-transform evaluators with controlled error.
//!
//! Three routes: the functional-equation expansion (exact recursion down a
//! stopping family, closed with the barycenter phase), the product formula
//! (homogeneous self-similar systems only), and the empirical characteristic
//! function (Monte Carlo with a 3σ band).

use crate::geom::IntervalBox;
use crate::ifs::map::box_corners;
use crate::measures::{
    sample_points, GibbsMeasure, MassInterval, MeasureOracle, SelfSimilarMeasure,
};
use crate::{CoreError, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// A transform value with a certified (or statistical) absolute error bound.
#[derive(Clone, Copy, Debug)]
pub struct FourierValue {
    pub value: Complex64,
    pub error: f64,
}

/// Evaluator configuration, serializable for the CLI.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvaluatorSpec {
    FunctionalEquation { tol: f64 },
    ProductFormula,
    MonteCarlo { n: usize, seed: u64 },
}

impl Default for EvaluatorSpec {
    fn default() -> Self {
        EvaluatorSpec::FunctionalEquation { tol: 1e-8 }
    }
}

/// Object-safe evaluation interface used by the sweep drivers.
pub trait Evaluate: Send + Sync {
    fn eval(&self, xi: &DVector<f64>) -> Result<FourierValue>;
    fn dim(&self) -> usize;
}

/// Measures the CLI can construct and sweep.
#[derive(Clone, Debug)]
pub enum Measure {
    SelfSimilar(SelfSimilarMeasure),
    Gibbs(GibbsMeasure),
}

impl MeasureOracle for Measure {
    fn system(&self) -> &crate::ifs::IFSSystem {
        match self {
            Measure::SelfSimilar(m) => m.system(),
            Measure::Gibbs(m) => m.system(),
        }
    }

    fn subshift(&self) -> Option<&crate::ifs::SubshiftMatrix> {
        match self {
            Measure::SelfSimilar(m) => m.subshift(),
            Measure::Gibbs(m) => m.subshift(),
        }
    }

    fn cylinder_mass(&self, word: &crate::ifs::Word) -> Result<MassInterval> {
        match self {
            Measure::SelfSimilar(m) => m.cylinder_mass(word),
            Measure::Gibbs(m) => m.cylinder_mass(word),
        }
    }

    fn step_distribution(&self, prev: Option<usize>) -> Vec<f64> {
        match self {
            Measure::SelfSimilar(m) => m.step_distribution(prev),
            Measure::Gibbs(m) => m.step_distribution(prev),
        }
    }

    fn sample_word(&self, rng: &mut rand_chacha::ChaCha8Rng, len: usize) -> crate::ifs::Word {
        match self {
            Measure::SelfSimilar(m) => m.sample_word(rng, len),
            Measure::Gibbs(m) => m.sample_word(rng, len),
        }
    }

    fn barycenter(&self) -> Option<DVector<f64>> {
        match self {
            Measure::SelfSimilar(m) => m.barycenter(),
            Measure::Gibbs(m) => m.barycenter(),
        }
    }
}

impl EvaluatorSpec {
    /// Builds an evaluator for the measure, checking compatibility.
    pub fn build(&self, measure: &Measure) -> Result<Box<dyn Evaluate>> {
        match (self, measure) {
            (EvaluatorSpec::FunctionalEquation { tol }, Measure::SelfSimilar(mu)) => {
                Ok(Box::new(FeSelfSimilar::new(mu, *tol, DEFAULT_STATE_BUDGET)?))
            }
            (EvaluatorSpec::FunctionalEquation { tol }, Measure::Gibbs(mu)) => {
                if mu.is_exact() && mu.system().all_similitudes() {
                    Ok(Box::new(FeMarkov::new(mu, *tol, DEFAULT_STATE_BUDGET)?))
                } else {
                    Ok(Box::new(FeCylinder::new(
                        MeasureRef::Gibbs(mu.clone()),
                        *tol,
                        DEFAULT_WORD_BUDGET,
                    )))
                }
            }
            (EvaluatorSpec::ProductFormula, Measure::SelfSimilar(mu)) => {
                Ok(Box::new(ProductFormula::new(mu)?))
            }
            (EvaluatorSpec::ProductFormula, _) => Err(CoreError::IncompatibleEvaluator(
                "product formula needs a homogeneous self-similar measure".into(),
            )),
            (EvaluatorSpec::MonteCarlo { n, seed }, m) => {
                Ok(Box::new(McEvaluator::new(m, *n, *seed)))
            }
        }
    }
}

pub const DEFAULT_STATE_BUDGET: usize = 4_000_000;
pub const DEFAULT_WORD_BUDGET: usize = 10_000_000;

fn support_radius(hull: &IntervalBox, center: &DVector<f64>) -> f64 {
    box_corners(hull)
        .iter()
        .map(|c| (c - center).norm())
        .fold(0.0, f64::max)
}

fn commuting(parts: &[(f64, DMatrix<f64>, DVector<f64>)]) -> bool {
    for (_, oa, _) in parts {
        for (_, ob, _) in parts {
            let dev = (oa * ob - ob * oa)
                .iter()
                .fold(0.0f64, |m, &v| m.max(v.abs()));
            if dev > 1e-12 {
                return false;
            }
        }
    }
    true
}

/// Functional-equation evaluator for Bernoulli self-similar measures.
///
/// `μ̂(ζ) = Σ_a p_a e^{2πi⟨ζ,t_a⟩} μ̂((r_a O_a)ᵀ ζ)` is expanded down the
/// stopping family where `|r_α|·‖ξ‖·radius ≤ tol/(2π)` and closed with the
/// barycenter phase. Commuting rotation parts let the recursion be memoized
/// on letter-count vectors, collapsing the word tree.
pub struct FeSelfSimilar {
    parts: Vec<(f64, DMatrix<f64>, DVector<f64>)>,
    p: Vec<f64>,
    dim: usize,
    commuting: bool,
    barycenter: DVector<f64>,
    radius: f64,
    tol: f64,
    budget: usize,
}

impl FeSelfSimilar {
    pub fn new(mu: &SelfSimilarMeasure, tol: f64, budget: usize) -> Result<Self> {
        let parts = mu.linear_parts();
        let barycenter = mu.barycenter().expect("self-similar barycenter");
        let radius = support_radius(mu.system().attractor_hull(), &barycenter);
        Ok(FeSelfSimilar {
            commuting: commuting(&parts),
            parts,
            p: mu.weights().as_slice().to_vec(),
            dim: mu.system().dimension(),
            barycenter,
            radius,
            tol,
            budget,
        })
    }

    fn leaf(&self, zeta: &DVector<f64>, rho_norm: f64) -> (Complex64, f64) {
        let phase = TWO_PI * zeta.dot(&self.barycenter);
        (
            Complex64::from_polar(1.0, phase),
            (TWO_PI * rho_norm * self.radius).min(2.0),
        )
    }

    fn eval_commuting(&self, xi: &DVector<f64>) -> Result<FourierValue> {
        let k = self.parts.len();
        // per-letter transpose powers, grown on demand
        let mut pows: Vec<Vec<DMatrix<f64>>> = self
            .parts
            .iter()
            .map(|(_, o, _)| vec![DMatrix::identity(self.dim, self.dim), o.transpose()])
            .collect();
        let log_r: Vec<f64> = self.parts.iter().map(|(r, _, _)| r.abs().ln()).collect();
        let stop = self.tol / TWO_PI;
        let xin = xi.norm();

        struct Ctx<'c> {
            ev: &'c FeSelfSimilar,
            memo: HashMap<Vec<u16>, (Complex64, f64)>,
            pows: &'c mut Vec<Vec<DMatrix<f64>>>,
            log_r: Vec<f64>,
            xi: DVector<f64>,
            xin: f64,
            stop: f64,
            states: usize,
        }

        fn zeta_of(ctx: &mut Ctx, m: &[u16]) -> DVector<f64> {
            let mut z = ctx.xi.clone();
            for (a, &cnt) in m.iter().enumerate() {
                let need = cnt as usize;
                while ctx.pows[a].len() <= need {
                    let last = ctx.pows[a].last().unwrap().clone();
                    let step = ctx.pows[a][1].clone();
                    ctx.pows[a].push(last * step);
                }
                let r_pow = ctx.ev.parts[a].0.abs().powi(need as i32);
                z = &ctx.pows[a][need] * z * r_pow;
            }
            z
        }

        fn go(ctx: &mut Ctx, m: Vec<u16>) -> Result<(Complex64, f64)> {
            if let Some(v) = ctx.memo.get(&m) {
                return Ok(*v);
            }
            ctx.states += 1;
            if ctx.states > ctx.ev.budget {
                return Err(CoreError::TolTooTight(ctx.ev.budget));
            }
            let log_rho: f64 = m
                .iter()
                .enumerate()
                .map(|(a, &c)| c as f64 * ctx.log_r[a])
                .sum();
            let rho = log_rho.exp();
            let zeta = zeta_of(ctx, &m);
            let out = if rho * ctx.xin * ctx.ev.radius <= ctx.stop {
                ctx.ev.leaf(&zeta, rho * ctx.xin)
            } else {
                let mut val = Complex64::new(0.0, 0.0);
                let mut err = 0.0;
                for a in 0..ctx.ev.parts.len() {
                    let phase = TWO_PI * zeta.dot(&ctx.ev.parts[a].2);
                    let mut child = m.clone();
                    child[a] += 1;
                    let (cv, ce) = go(ctx, child)?;
                    let w = ctx.ev.p[a];
                    val += Complex64::from_polar(w, phase) * cv;
                    err += w * ce;
                }
                (val, err)
            };
            ctx.memo.insert(m, out);
            Ok(out)
        }

        let mut ctx = Ctx {
            ev: self,
            memo: HashMap::new(),
            pows: &mut pows,
            log_r,
            xi: xi.clone(),
            xin,
            stop,
            states: 0,
        };
        let (value, error) = go(&mut ctx, vec![0u16; k])?;
        Ok(FourierValue { value, error })
    }

    fn eval_tree(&self, xi: &DVector<f64>) -> Result<FourierValue> {
        let stop = self.tol / TWO_PI;
        let xin = xi.norm();
        let mut count = 0usize;

        fn go(
            ev: &FeSelfSimilar,
            zeta: &DVector<f64>,
            rho: f64,
            xin: f64,
            stop: f64,
            count: &mut usize,
        ) -> Result<(Complex64, f64)> {
            *count += 1;
            if *count > ev.budget {
                return Err(CoreError::TolTooTight(ev.budget));
            }
            if rho * xin * ev.radius <= stop {
                return Ok(ev.leaf(zeta, rho * xin));
            }
            let mut val = Complex64::new(0.0, 0.0);
            let mut err = 0.0;
            for (a, (r, o, t)) in ev.parts.iter().enumerate() {
                let phase = TWO_PI * zeta.dot(t);
                let child = o.transpose() * zeta * r.abs();
                let (cv, ce) = go(ev, &child, rho * r.abs(), xin, stop, count)?;
                val += Complex64::from_polar(ev.p[a], phase) * cv;
                err += ev.p[a] * ce;
            }
            Ok((val, err))
        }

        let (value, error) = go(self, xi, 1.0, xin, stop, &mut count)?;
        Ok(FourierValue { value, error })
    }
}

impl Evaluate for FeSelfSimilar {
    fn eval(&self, xi: &DVector<f64>) -> Result<FourierValue> {
        if xi.iter().all(|&v| v == 0.0) {
            return Ok(FourierValue {
                value: Complex64::new(1.0, 0.0),
                error: 0.0,
            });
        }
        if self.commuting {
            self.eval_commuting(xi)
        } else {
            self.eval_tree(xi)
        }
    }

    fn dim(&self) -> usize {
        self.dim
    }
}

/// Vector functional equation for exact Markov (G0 subshift) measures over
/// similitude maps: conditional transforms per first symbol.
pub struct FeMarkov {
    parts: Vec<(f64, DMatrix<f64>, DVector<f64>)>,
    station: Vec<f64>,
    forward: DMatrix<f64>,
    dim: usize,
    commuting: bool,
    /// Barycenters of the conditional measures ν_a.
    centers: Vec<DVector<f64>>,
    radius: f64,
    tol: f64,
    budget: usize,
}

impl FeMarkov {
    pub fn new(mu: &GibbsMeasure, tol: f64, budget: usize) -> Result<Self> {
        if !(mu.is_exact() && mu.system().all_similitudes()) {
            return Err(CoreError::IncompatibleEvaluator(
                "vector functional equation needs an exact Markov measure on similitudes".into(),
            ));
        }
        let sys = mu.system();
        let d = sys.dimension();
        let k = sys.alphabet_len();
        let parts: Vec<(f64, DMatrix<f64>, DVector<f64>)> = sys
            .maps()
            .iter()
            .map(|m| match m {
                crate::ifs::ConformalMap::Similitude(s) => {
                    (s.ratio, s.rotation.matrix().clone(), s.translation.clone())
                }
                _ => unreachable!(),
            })
            .collect();
        let forward = mu.chain().forward().clone();
        // conditional barycenters solve c_a = Σ_b T(a→b)(r_b O_b c_b + t_b)
        let mut big = DMatrix::<f64>::identity(k * d, k * d);
        let mut rhs = DVector::<f64>::zeros(k * d);
        for a in 0..k {
            for b in 0..k {
                let t = forward[(a, b)];
                if t == 0.0 {
                    continue;
                }
                let lin = &parts[b].1 * parts[b].0 * t;
                for i in 0..d {
                    for j in 0..d {
                        big[(a * d + i, b * d + j)] -= lin[(i, j)];
                    }
                    rhs[a * d + i] += t * parts[b].2[i];
                }
            }
        }
        let sol = big
            .lu()
            .solve(&rhs)
            .ok_or_else(|| CoreError::invalid("conditional barycenter system is singular"))?;
        let centers: Vec<DVector<f64>> = (0..k)
            .map(|a| DVector::from_iterator(d, (0..d).map(|i| sol[a * d + i])))
            .collect();
        let hull = sys.attractor_hull();
        let radius = centers
            .iter()
            .map(|c| support_radius(hull, c))
            .fold(0.0, f64::max);
        Ok(FeMarkov {
            commuting: commuting(&parts),
            parts,
            station: mu.chain().station().iter().cloned().collect(),
            forward,
            dim: d,
            centers,
            radius,
            tol,
            budget,
        })
    }
}

impl Evaluate for FeMarkov {
    fn eval(&self, xi: &DVector<f64>) -> Result<FourierValue> {
        if xi.iter().all(|&v| v == 0.0) {
            return Ok(FourierValue {
                value: Complex64::new(1.0, 0.0),
                error: 0.0,
            });
        }
        if !self.commuting {
            return Err(CoreError::IncompatibleEvaluator(
                "non-commuting Markov systems need the cylinder evaluator".into(),
            ));
        }
        let k = self.parts.len();
        let xin = xi.norm();
        let stop = self.tol / TWO_PI;
        let mut memo: HashMap<(usize, Vec<u16>), (Complex64, f64)> = HashMap::new();
        let mut states = 0usize;

        // ν̂_a(ζ(m)) with ζ(m) recomputed canonically from counts
        fn zeta_of(
            parts: &[(f64, DMatrix<f64>, DVector<f64>)],
            xi: &DVector<f64>,
            m: &[u16],
        ) -> (DVector<f64>, f64) {
            let mut z = xi.clone();
            let mut rho = 1.0f64;
            for (a, &cnt) in m.iter().enumerate() {
                for _ in 0..cnt {
                    z = parts[a].1.transpose() * z * parts[a].0.abs();
                }
                rho *= parts[a].0.abs().powi(cnt as i32);
            }
            (z, rho)
        }

        #[allow(clippy::too_many_arguments)]
        fn nu_hat(
            ev: &FeMarkov,
            a: usize,
            m: Vec<u16>,
            xi: &DVector<f64>,
            xin: f64,
            stop: f64,
            memo: &mut HashMap<(usize, Vec<u16>), (Complex64, f64)>,
            states: &mut usize,
        ) -> Result<(Complex64, f64)> {
            if let Some(v) = memo.get(&(a, m.clone())) {
                return Ok(*v);
            }
            *states += 1;
            if *states > ev.budget {
                return Err(CoreError::TolTooTight(ev.budget));
            }
            let (zeta, rho) = zeta_of(&ev.parts, xi, &m);
            let out = if rho * xin * ev.radius <= stop {
                let phase = TWO_PI * zeta.dot(&ev.centers[a]);
                (
                    Complex64::from_polar(1.0, phase),
                    (TWO_PI * rho * xin * ev.radius).min(2.0),
                )
            } else {
                let mut val = Complex64::new(0.0, 0.0);
                let mut err = 0.0;
                for b in 0..ev.parts.len() {
                    let t = ev.forward[(a, b)];
                    if t == 0.0 {
                        continue;
                    }
                    let phase = TWO_PI * zeta.dot(&ev.parts[b].2);
                    let mut child = m.clone();
                    child[b] += 1;
                    let (cv, ce) = nu_hat(ev, b, child, xi, xin, stop, memo, states)?;
                    val += Complex64::from_polar(t, phase) * cv;
                    err += t * ce;
                }
                (val, err)
            };
            memo.insert((a, m), out);
            Ok(out)
        }

        let mut value = Complex64::new(0.0, 0.0);
        let mut error = 0.0;
        for a in 0..k {
            let phase = TWO_PI * xi.dot(&self.parts[a].2);
            let mut m = vec![0u16; k];
            m[a] += 1;
            let (cv, ce) = nu_hat(self, a, m, xi, xin, stop, &mut memo, &mut states)?;
            value += Complex64::from_polar(self.station[a], phase) * cv;
            error += self.station[a] * ce;
        }
        Ok(FourierValue { value, error })
    }

    fn dim(&self) -> usize {
        self.dim
    }
}

#[derive(Clone)]
enum MeasureRef {
    Gibbs(GibbsMeasure),
}

impl MeasureRef {
    fn oracle(&self) -> &dyn MeasureOracle {
        match self {
            MeasureRef::Gibbs(m) => m,
        }
    }
}

/// Cylinder-expansion evaluator for general (conformal, bracketed-mass)
/// measures: expands to cylinders of diameter below `tol/(2π‖ξ‖)` and sums
/// anchor phases; the returned error covers truncation and mass brackets.
pub struct FeCylinder {
    measure: MeasureRef,
    tol: f64,
    budget: usize,
}

impl FeCylinder {
    fn new(measure: MeasureRef, tol: f64, budget: usize) -> Self {
        FeCylinder {
            measure,
            tol,
            budget,
        }
    }

    pub fn for_gibbs(mu: &GibbsMeasure, tol: f64, budget: usize) -> Self {
        FeCylinder::new(MeasureRef::Gibbs(mu.clone()), tol, budget)
    }
}

impl Evaluate for FeCylinder {
    fn eval(&self, xi: &DVector<f64>) -> Result<FourierValue> {
        cylinder_expansion_eval(self.measure.oracle(), xi, self.tol, self.budget)
    }

    fn dim(&self) -> usize {
        self.measure.oracle().system().dimension()
    }
}

/// Shared cylinder-expansion kernel.
pub fn cylinder_expansion_eval(
    oracle: &dyn MeasureOracle,
    xi: &DVector<f64>,
    tol: f64,
    budget: usize,
) -> Result<FourierValue> {
    let sys = oracle.system();
    let x0 = sys.reference_point();
    let norm = xi.norm();
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0f64;
    let mut visited = 0usize;
    let mut stack = vec![sys.empty_word()];
    while let Some(w) = stack.pop() {
        visited += 1;
        if visited > budget {
            return Err(CoreError::TolTooTight(budget));
        }
        let hull = sys.cylinder_hull(&w)?;
        let diam = hull.diameter();
        let mass = oracle.cylinder_mass(&w)?;
        if TWO_PI * norm * diam <= tol || mass.hi < 1e-18 {
            let anchor = sys.compose_word(&w, &x0)?;
            let phase = TWO_PI * xi.dot(&anchor);
            value += Complex64::from_polar(mass.mid(), phase);
            error += mass.mid() * (TWO_PI * norm * diam).min(2.0) + mass.width();
            continue;
        }
        for a in 0..sys.alphabet_len() {
            let ok = match (sys.subshift(), w.last()) {
                (Some(m), Some(last)) => m.admits(last, a),
                _ => true,
            };
            if ok {
                stack.push(w.child(a));
            }
        }
    }
    Ok(FourierValue { value, error })
}

/// Product-formula evaluator: requires all `(r_a, O_a)` equal, in which case
/// `μ̂(ξ) = ∏_j g(((rO)ᵀ)^j ξ)` with `g(ζ) = Σ_a p_a e^{2πi⟨ζ,t_a⟩}`.
pub struct ProductFormula {
    linear_t: DMatrix<f64>,
    ratio: f64,
    translations: Vec<DVector<f64>>,
    p: Vec<f64>,
    barycenter: DVector<f64>,
    radius: f64,
    dim: usize,
    tol: f64,
}

impl ProductFormula {
    pub fn new(mu: &SelfSimilarMeasure) -> Result<Self> {
        let parts = mu.linear_parts();
        let (r0, o0, _) = &parts[0];
        for (r, o, _) in &parts {
            let dev = (o - o0).iter().fold(0.0f64, |m, &v| m.max(v.abs()));
            if (r - r0).abs() > 1e-12 || dev > 1e-12 {
                return Err(CoreError::IncompatibleEvaluator(
                    "product formula needs equal ratios and rotations".into(),
                ));
            }
        }
        let barycenter = mu.barycenter().unwrap();
        Ok(ProductFormula {
            linear_t: (o0 * *r0).transpose(),
            ratio: r0.abs(),
            translations: parts.iter().map(|(_, _, t)| t.clone()).collect(),
            p: mu.weights().as_slice().to_vec(),
            radius: support_radius(mu.system().attractor_hull(), &barycenter),
            barycenter,
            dim: mu.system().dimension(),
            tol: 1e-10,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

impl Evaluate for ProductFormula {
    fn eval(&self, xi: &DVector<f64>) -> Result<FourierValue> {
        let mut zeta = xi.clone();
        let mut rho = 1.0f64;
        let xin = xi.norm();
        let mut value = Complex64::new(1.0, 0.0);
        let stop = self.tol / TWO_PI;
        let mut steps = 0usize;
        while rho * xin * self.radius > stop && steps < 20_000 {
            let mut g = Complex64::new(0.0, 0.0);
            for (a, t) in self.translations.iter().enumerate() {
                g += Complex64::from_polar(self.p[a], TWO_PI * zeta.dot(t));
            }
            value *= g;
            zeta = &self.linear_t * zeta;
            rho *= self.ratio;
            steps += 1;
        }
        let phase = TWO_PI * zeta.dot(&self.barycenter);
        value *= Complex64::from_polar(1.0, phase);
        Ok(FourierValue {
            value,
            error: (TWO_PI * rho * xin * self.radius).min(2.0),
        })
    }

    fn dim(&self) -> usize {
        self.dim
    }
}

/// Empirical characteristic function over a cached sample cloud.
pub struct McEvaluator {
    samples: Vec<DVector<f64>>,
    dim: usize,
}

impl McEvaluator {
    pub fn new<M: MeasureOracle + ?Sized>(measure: &M, n: usize, seed: u64) -> Self {
        let samples = sample_points(measure, seed, n);
        McEvaluator {
            dim: measure.system().dimension(),
            samples,
        }
    }

    pub fn from_samples(samples: Vec<DVector<f64>>) -> Self {
        McEvaluator {
            dim: samples[0].len(),
            samples,
        }
    }
}

impl Evaluate for McEvaluator {
    fn eval(&self, xi: &DVector<f64>) -> Result<FourierValue> {
        let n = self.samples.len() as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sum_sq_re = 0.0f64;
        let mut sum_sq_im = 0.0f64;
        for x in &self.samples {
            let phase = TWO_PI * xi.dot(x);
            let (s, c) = phase.sin_cos();
            sum += Complex64::new(c, s);
            sum_sq_re += c * c;
            sum_sq_im += s * s;
        }
        let mean = sum / n;
        let var_re = (sum_sq_re / n - mean.re * mean.re).max(0.0);
        let var_im = (sum_sq_im / n - mean.im * mean.im).max(0.0);
        Ok(FourierValue {
            value: mean,
            error: 3.0 * ((var_re + var_im) / n).sqrt(),
        })
    }

    fn dim(&self) -> usize {
        self.dim
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use approx::assert_abs_diff_eq;

    fn v1(x: f64) -> DVector<f64> {
        DVector::from_vec(vec![x])
    }

    #[test]
    fn zero_frequency_gives_total_mass() {
        let mu = bundled::cantor_measure();
        let ev = FeSelfSimilar::new(&mu, 1e-10, DEFAULT_STATE_BUDGET).unwrap();
        let v = ev.eval(&v1(0.0)).unwrap();
        assert_abs_diff_eq!(v.value.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.value.im, 0.0, epsilon = 1e-15);
    }

    // independent oracle: truncated infinite product ∏_{j≥1} |cos(2π ξ / 3^j)|
    fn cantor_abs_oracle(xi: f64) -> f64 {
        let mut prod = 1.0f64;
        for j in 1..200 {
            prod *= (TWO_PI * xi / 3f64.powi(j)).cos().abs();
        }
        prod
    }

    #[test]
    fn cantor_powers_of_three_match_product_oracle() {
        let mu = bundled::cantor_measure();
        let ev = FeSelfSimilar::new(&mu, 1e-10, DEFAULT_STATE_BUDGET).unwrap();
        let base = ev.eval(&v1(1.0)).unwrap().value.norm();
        for k in 0..=10 {
            let xi = 3f64.powi(k);
            let v = ev.eval(&v1(xi)).unwrap();
            assert!(
                (v.value.norm() - base).abs() < 1e-9,
                "k = {k}: {} vs {}",
                v.value.norm(),
                base
            );
            assert!(
                (v.value.norm() - cantor_abs_oracle(xi)).abs() < 1e-9,
                "k = {k} oracle mismatch"
            );
        }
    }

    #[test]
    fn lebesgue_integer_frequencies_vanish() {
        let mu = bundled::lebesgue_measure();
        let ev = FeSelfSimilar::new(&mu, 1e-10, DEFAULT_STATE_BUDGET).unwrap();
        for k in [1.0, 2.0, 5.0, 17.0] {
            let v = ev.eval(&v1(k)).unwrap();
            // closed form (e^{2πik} − 1)/(2πik) = 0 at nonzero integers
            assert!(v.value.norm() <= v.error + 1e-10, "k = {k}: {}", v.value.norm());
        }
    }

    #[test]
    fn product_formula_agrees_with_functional_equation() {
        let mu = bundled::cantor_measure();
        let fe = FeSelfSimilar::new(&mu, 1e-12, DEFAULT_STATE_BUDGET).unwrap();
        let pf = ProductFormula::new(&mu).unwrap().with_tol(1e-12);
        for xi in [0.7, 3.1, 27.0, 113.0] {
            let a = fe.eval(&v1(xi)).unwrap().value;
            let b = pf.eval(&v1(xi)).unwrap().value;
            assert!((a - b).norm() < 1e-10, "xi = {xi}: {a} vs {b}");
        }
    }

    #[test]
    fn product_formula_requires_homogeneous() {
        let mu = bundled::half_third_measure();
        assert!(matches!(
            ProductFormula::new(&mu),
            Err(CoreError::IncompatibleEvaluator(_))
        ));
    }

    #[test]
    fn conjugate_symmetry_and_modulus_bound() {
        let mu = bundled::half_third_measure();
        let ev = FeSelfSimilar::new(&mu, 1e-10, DEFAULT_STATE_BUDGET).unwrap();
        for xi in [0.3, 4.7, 91.2] {
            let a = ev.eval(&v1(xi)).unwrap();
            let b = ev.eval(&v1(-xi)).unwrap();
            assert!((a.value - b.value.conj()).norm() < 2.0 * (a.error + b.error) + 1e-12);
            assert!(a.value.norm() <= 1.0 + a.error + 1e-12);
        }
    }

    #[test]
    fn monte_carlo_brackets_functional_equation() {
        let mu = bundled::half_third_measure();
        let fe = FeSelfSimilar::new(&mu, 1e-9, DEFAULT_STATE_BUDGET).unwrap();
        let mc = McEvaluator::new(&mu, 200_000, 7);
        for xi in [0.9, 6.3, 41.0] {
            let a = fe.eval(&v1(xi)).unwrap();
            let b = mc.eval(&v1(xi)).unwrap();
            assert!(
                (a.value - b.value).norm() <= a.error + b.error,
                "xi = {xi}: |Δ| = {} > {}",
                (a.value - b.value).norm(),
                a.error + b.error
            );
        }
    }

    #[test]
    fn one_step_functional_equation_identity() {
        // rotation covariance: μ̂(ξ) = Σ_a p_a e^{2πi⟨ξ,t_a⟩} μ̂((r_a O_a)ᵀ ξ)
        let mu = bundled::rotation2d_measure();
        let ev = FeSelfSimilar::new(&mu, 1e-11, DEFAULT_STATE_BUDGET).unwrap();
        let xi = DVector::from_vec(vec![13.0, -4.0]);
        let lhs = ev.eval(&xi).unwrap();
        let parts = mu.linear_parts();
        let mut rhs = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for (a, (r, o, t)) in parts.iter().enumerate() {
            let child = o.transpose() * &xi * r.abs();
            let v = ev.eval(&child).unwrap();
            rhs += Complex64::from_polar(mu.weights().get(a), TWO_PI * xi.dot(t)) * v.value;
            err += v.error;
        }
        assert!(
            (lhs.value - rhs).norm() <= lhs.error + err + 1e-10,
            "|Δ| = {}",
            (lhs.value - rhs).norm()
        );
    }

    #[test]
    fn markov_evaluator_matches_cylinder_expansion() {
        let mu = bundled::golden_mean_measure();
        let fe = FeMarkov::new(&mu, 1e-9, DEFAULT_STATE_BUDGET).unwrap();
        let cyl = FeCylinder::for_gibbs(&mu, 1e-6, DEFAULT_WORD_BUDGET);
        for xi in [0.8, 5.2, 33.0] {
            let a = fe.eval(&v1(xi)).unwrap();
            let b = cyl.eval(&v1(xi)).unwrap();
            assert!(
                (a.value - b.value).norm() <= a.error + b.error + 1e-9,
                "xi = {xi}: {} vs {}",
                a.value,
                b.value
            );
        }
    }

    #[test]
    fn tolerance_budget_error_path() {
        let mu = bundled::half_third_measure();
        let ev = FeSelfSimilar::new(&mu, 1e-14, 50).unwrap();
        assert!(matches!(
            ev.eval(&v1(1e8)),
            Err(CoreError::TolTooTight(_))
        ));
    }
}
