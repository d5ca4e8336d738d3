//! Conformal contractions of the unit cube: similitudes, Möbius involution
//! maps, and user-supplied maps with a conformal-derivative accessor.

use crate::geom::{operator_norm, Interval, IntervalBox};
use crate::{CoreError, Result};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// Orthogonality tolerance for constructed matrices.
pub const ORTHO_TOL_STRICT: f64 = 1e-12;
/// Looser tolerance for user-supplied conformal derivatives (finite-difference noise).
pub const ORTHO_TOL_USER: f64 = 1e-8;

/// A validated d×d orthogonal matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalMatrix {
    entries: DMatrix<f64>,
}

impl OrthogonalMatrix {
    /// Validates `‖OᵀO − I‖_max ≤ tol` and `|det O| = 1 ± tol`.
    pub fn new_with_tol(entries: DMatrix<f64>, tol: f64) -> Result<Self> {
        if !entries.is_square() {
            return Err(CoreError::invalid("rotation matrix must be square"));
        }
        let d = entries.nrows();
        let gram = entries.transpose() * &entries;
        let dev = (&gram - DMatrix::<f64>::identity(d, d))
            .iter()
            .fold(0.0f64, |m, &v| m.max(v.abs()));
        if dev > tol {
            return Err(CoreError::invalid(format!(
                "matrix is not orthogonal: max |OᵀO - I| = {dev:.3e} > {tol:.0e}"
            )));
        }
        let det = entries.determinant();
        if (det.abs() - 1.0).abs() > tol {
            return Err(CoreError::invalid(format!(
                "matrix determinant {det} has modulus away from 1"
            )));
        }
        Ok(OrthogonalMatrix { entries })
    }

    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        Self::new_with_tol(entries, ORTHO_TOL_STRICT)
    }

    pub fn identity(d: usize) -> Self {
        OrthogonalMatrix {
            entries: DMatrix::identity(d, d),
        }
    }

    /// Planar rotation by `2π·theta`, only for d = 2.
    pub fn rotation2(theta: f64) -> Self {
        let a = 2.0 * std::f64::consts::PI * theta;
        OrthogonalMatrix {
            entries: DMatrix::from_row_slice(2, 2, &[a.cos(), -a.sin(), a.sin(), a.cos()]),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }
}

/// Affine similitude `x ↦ r·O·x + t` with `0 < |r| < 1`.
#[derive(Clone, Debug)]
pub struct Similitude {
    pub ratio: f64,
    pub rotation: OrthogonalMatrix,
    pub translation: DVector<f64>,
    /// Rotation angle `θ` (fraction of a full turn) when d = 2 and O ∈ SO(2).
    pub theta: Option<f64>,
}

impl Similitude {
    pub fn new(ratio: f64, rotation: OrthogonalMatrix, translation: DVector<f64>) -> Result<Self> {
        if !(ratio.abs() > 0.0 && ratio.abs() < 1.0) {
            return Err(CoreError::invalid(format!(
                "similitude ratio {ratio} must satisfy 0 < |r| < 1"
            )));
        }
        if rotation.dim() != translation.len() {
            return Err(CoreError::invalid("rotation/translation dimension mismatch"));
        }
        let theta = if rotation.dim() == 2 && rotation.matrix().determinant() > 0.0 {
            let m = rotation.matrix();
            Some(m[(1, 0)].atan2(m[(0, 0)]) / (2.0 * std::f64::consts::PI))
        } else {
            None
        };
        Ok(Similitude {
            ratio,
            rotation,
            translation,
            theta,
        })
    }

    /// 1-D shorthand `x ↦ r·x + t`. The sign of `r` goes into the O(1) part,
    /// so `ratio` stays positive and the rotation carries the orientation.
    pub fn line(ratio: f64, t: f64) -> Result<Self> {
        let rot = if ratio >= 0.0 {
            OrthogonalMatrix::identity(1)
        } else {
            OrthogonalMatrix::new(DMatrix::from_element(1, 1, -1.0))?
        };
        Similitude::new(ratio.abs(), rot, DVector::from_element(1, t))
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        self.rotation.matrix() * x * self.ratio + &self.translation
    }

    /// The linear part `r·O` as a matrix.
    pub fn linear(&self) -> DMatrix<f64> {
        self.rotation.matrix() * self.ratio
    }
}

/// Möbius involution contraction `x ↦ t + λ·O·(x−u)/|x−u|²` with `u ∉ [0,1]^d`.
#[derive(Clone, Debug)]
pub struct MobiusInvolutionMap {
    pub t: DVector<f64>,
    pub lambda: f64,
    pub o: OrthogonalMatrix,
    pub u: DVector<f64>,
}

impl MobiusInvolutionMap {
    pub fn new(t: DVector<f64>, lambda: f64, o: OrthogonalMatrix, u: DVector<f64>) -> Result<Self> {
        // λ = 1 is admitted for Gauss-map-like branches x ↦ 1/(x+i); the
        // sampled contraction bound below is the binding constraint.
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(CoreError::invalid(format!(
                "mobius lambda {lambda} must lie in (0,1]"
            )));
        }
        if u.iter().all(|&c| (0.0..=1.0).contains(&c)) {
            return Err(CoreError::invalid(
                "mobius pole u must lie outside [0,1]^d (coordinate-wise check)",
            ));
        }
        let map = MobiusInvolutionMap { t, lambda, o, u };
        // sampled contraction bound; equality 1 admitted only on the boundary
        let d = map.u.len();
        let mut sup: f64 = 0.0;
        for x in sample_cube(d, 1000) {
            sup = sup.max(map.conformal_factor(&x).abs());
        }
        if sup > 1.0 + 1e-9 {
            return Err(CoreError::invalid(format!(
                "mobius map does not contract [0,1]^d: sampled ‖Df‖ up to {sup}"
            )));
        }
        Ok(map)
    }

    pub fn dim(&self) -> usize {
        self.t.len()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        let z = x - &self.u;
        let n2 = z.norm_squared();
        &self.t + self.o.matrix() * z * (self.lambda / n2)
    }

    /// `λ(x) = λ/|x−u|²`, the conformal scalar of the Jacobian.
    pub fn conformal_factor(&self, x: &DVector<f64>) -> f64 {
        self.lambda / (x - &self.u).norm_squared()
    }

    /// Rotation part of the Jacobian: `O·(I − 2ẑẑᵀ)` with `ẑ = (x−u)/|x−u|`.
    pub fn rotation_part(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim();
        let z = (x - &self.u).normalize();
        let house = DMatrix::identity(d, d) - 2.0 * &z * z.transpose();
        self.o.matrix() * house
    }

    /// `∂_e log λ(x) = −2⟨x−u, e⟩/|x−u|²` (closed form).
    pub fn grad_log_lambda(&self, x: &DVector<f64>) -> DVector<f64> {
        let z = x - &self.u;
        -2.0 / z.norm_squared() * z
    }
}

/// User-supplied conformal map: point evaluation plus a derivative accessor.
pub trait UserConformalMap: Send + Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &DVector<f64>) -> DVector<f64>;
    /// Full Jacobian at `x`; it must factor as `λ(x)·O(x)` within [`ORTHO_TOL_USER`].
    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64>;
}

/// Tagged union over the supported conformal map kinds.
#[derive(Clone)]
pub enum ConformalMap {
    Similitude(Similitude),
    Mobius(MobiusInvolutionMap),
    User(Arc<dyn UserConformalMap>),
}

impl std::fmt::Debug for ConformalMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConformalMap::Similitude(s) => write!(f, "Similitude(r={}, d={})", s.ratio, s.dim()),
            ConformalMap::Mobius(m) => write!(f, "Mobius(λ={}, d={})", m.lambda, m.dim()),
            ConformalMap::User(u) => write!(f, "User(d={})", u.dim()),
        }
    }
}

impl ConformalMap {
    pub fn dim(&self) -> usize {
        match self {
            ConformalMap::Similitude(s) => s.dim(),
            ConformalMap::Mobius(m) => m.dim(),
            ConformalMap::User(u) => u.dim(),
        }
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            ConformalMap::Similitude(s) => s.apply(x),
            ConformalMap::Mobius(m) => m.apply(x),
            ConformalMap::User(u) => u.apply(x),
        }
    }

    /// Conformal factor `λ(x)` with `D_x f = λ(x)·O(x)` (signed for d = 1).
    pub fn conformal_factor(&self, x: &DVector<f64>) -> f64 {
        match self {
            ConformalMap::Similitude(s) => s.ratio,
            ConformalMap::Mobius(m) => m.conformal_factor(x),
            ConformalMap::User(u) => {
                let j = u.jacobian(x);
                operator_norm(&j)
            }
        }
    }

    /// Rotation part `O(x)` of the Jacobian.
    pub fn rotation_part(&self, x: &DVector<f64>) -> DMatrix<f64> {
        match self {
            ConformalMap::Similitude(s) => s.rotation.matrix().clone(),
            ConformalMap::Mobius(m) => m.rotation_part(x),
            ConformalMap::User(u) => {
                let j = u.jacobian(x);
                let lam = operator_norm(&j);
                j / lam
            }
        }
    }

    /// Gradient of `log |λ(·)|` at `x`.
    ///
    /// Analytic for similitudes (zero) and Möbius maps; central finite
    /// differences with step `h` otherwise.
    pub fn grad_log_lambda(&self, x: &DVector<f64>, h: f64) -> DVector<f64> {
        match self {
            ConformalMap::Similitude(s) => DVector::zeros(s.dim()),
            ConformalMap::Mobius(m) => m.grad_log_lambda(x),
            ConformalMap::User(u) => {
                let d = u.dim();
                let mut g = DVector::zeros(d);
                for i in 0..d {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += h;
                    xm[i] -= h;
                    let lp = operator_norm(&u.jacobian(&xp)).abs().ln();
                    let lm = operator_norm(&u.jacobian(&xm)).abs().ln();
                    g[i] = (lp - lm) / (2.0 * h);
                }
                g
            }
        }
    }

    pub fn is_similitude(&self) -> bool {
        matches!(self, ConformalMap::Similitude(_))
    }

    /// Sound interval image of a box (similitude and Möbius); for user maps a
    /// sampled hull inflated by a first-order margin.
    pub fn map_box(&self, b: &IntervalBox) -> IntervalBox {
        match self {
            ConformalMap::Similitude(s) => {
                let d = s.dim();
                let lin = s.linear();
                let coords = (0..d)
                    .map(|i| {
                        let mut acc = Interval::point(s.translation[i]);
                        for j in 0..d {
                            acc = acc.add(&b.coords[j].scale(lin[(i, j)]));
                        }
                        acc
                    })
                    .collect();
                IntervalBox::new(coords)
            }
            ConformalMap::Mobius(m) => {
                let d = m.dim();
                let z: Vec<Interval> = (0..d).map(|i| b.coords[i].offset(-m.u[i])).collect();
                let mut n2 = Interval::point(0.0);
                for zi in &z {
                    n2 = n2.add(&zi.square());
                }
                let inv = n2
                    .recip()
                    .expect("mobius pole inside the box; u must avoid cylinder hulls");
                let o = m.o.matrix();
                let coords = (0..d)
                    .map(|i| {
                        let mut acc = Interval::point(0.0);
                        for j in 0..d {
                            acc = acc.add(&z[j].scale(o[(i, j)]));
                        }
                        acc.mul(&inv).scale(m.lambda).offset(m.t[i])
                    })
                    .collect();
                IntervalBox::new(coords)
            }
            ConformalMap::User(u) => {
                let d = u.dim();
                let corners = box_corners(b);
                let mut hull: Option<IntervalBox> = None;
                let mut sup_norm: f64 = 0.0;
                for c in &corners {
                    let y = u.apply(c);
                    sup_norm = sup_norm.max(operator_norm(&u.jacobian(c)));
                    let pb = IntervalBox::point(&y);
                    hull = Some(match hull {
                        None => pb,
                        Some(h) => h.hull(&pb),
                    });
                }
                let mut h = hull.unwrap_or_else(|| IntervalBox::unit(d));
                // inflate by the first-order sweep of the box interior
                let margin = sup_norm * b.diameter();
                for c in h.coords.iter_mut() {
                    *c = Interval::new(c.lo - margin, c.hi + margin);
                }
                h
            }
        }
    }

    /// Validates that the Jacobian factors as `λ(x)·O(x)` at sampled probes.
    pub fn validate_conformal(&self, probes: usize) -> Result<()> {
        let d = self.dim();
        let tol = match self {
            ConformalMap::User(_) => ORTHO_TOL_USER,
            _ => 1e-10,
        };
        for x in sample_cube(d, probes) {
            let lam = self.conformal_factor(&x);
            if lam.abs() >= 1.0 + 1e-9 || lam == 0.0 {
                return Err(CoreError::invalid(format!(
                    "conformal factor |λ(x)| = {} outside (0,1] at a probe",
                    lam.abs()
                )));
            }
            let o = self.rotation_part(&x);
            OrthogonalMatrix::new_with_tol(o, tol)?;
        }
        Ok(())
    }
}

/// Deterministic low-discrepancy-ish probe points in `[0,1]^d`.
pub(crate) fn sample_cube(d: usize, n: usize) -> Vec<DVector<f64>> {
    // corners plus a Kronecker (golden-ratio) sequence
    let mut pts = Vec::with_capacity(n + (1 << d.min(10)));
    if d <= 10 {
        pts.extend(box_corners(&IntervalBox::unit(d)));
    }
    let alphas: Vec<f64> = (0..d)
        .map(|i| (2.0 + i as f64).sqrt().fract())
        .collect();
    for k in 0..n {
        let v: Vec<f64> = (0..d).map(|i| ((k as f64 + 1.0) * alphas[i]).fract()).collect();
        pts.push(DVector::from_vec(v));
    }
    pts
}

pub(crate) fn box_corners(b: &IntervalBox) -> Vec<DVector<f64>> {
    let d = b.dim();
    let mut out = Vec::with_capacity(1 << d);
    for mask in 0..(1u32 << d) {
        let v: Vec<f64> = (0..d)
            .map(|i| {
                if mask >> i & 1 == 0 {
                    b.coords[i].lo
                } else {
                    b.coords[i].hi
                }
            })
            .collect();
        out.push(DVector::from_vec(v));
    }
    out
}
