//! The IFS container: alphabet, maps, optional subshift and separation
//! metadata, plus word composition and the derivative cocycle.

use crate::geom::IntervalBox;
use crate::ifs::map::{box_corners, sample_cube, ConformalMap};
use crate::ifs::{SubshiftMatrix, Word};
use crate::{CoreError, Result};
use nalgebra::{DMatrix, DVector};

/// An iterated function system of conformal contractions of `[0,1]^d`.
#[derive(Clone, Debug)]
pub struct IFSSystem {
    dimension: usize,
    labels: Vec<String>,
    maps: Vec<ConformalMap>,
    subshift: Option<SubshiftMatrix>,
    /// Optional open-cover metadata `U_a` (axis-aligned boxes).
    boxes: Option<Vec<IntervalBox>>,
    /// Cached hull of the attractor.
    attractor_hull: IntervalBox,
}

impl IFSSystem {
    pub fn new(
        labels: Vec<String>,
        maps: Vec<ConformalMap>,
        subshift: Option<SubshiftMatrix>,
        boxes: Option<Vec<IntervalBox>>,
    ) -> Result<Self> {
        if maps.is_empty() {
            return Err(CoreError::invalid("an IFS needs at least one map"));
        }
        let dimension = maps[0].dim();
        if maps.iter().any(|m| m.dim() != dimension) {
            return Err(CoreError::invalid("all maps must share one dimension"));
        }
        if labels.len() != maps.len() {
            return Err(CoreError::invalid("labels must match maps one-to-one"));
        }
        if let Some(a) = &subshift {
            if a.len() != maps.len() {
                return Err(CoreError::invalid("subshift matrix size must match alphabet"));
            }
        }
        if let Some(bs) = &boxes {
            if bs.len() != maps.len() {
                return Err(CoreError::invalid("need one box U_a per symbol"));
            }
        }
        for m in &maps {
            m.validate_conformal(64)?;
        }
        let attractor_hull = compute_attractor_hull(&maps, dimension);
        let sys = IFSSystem {
            dimension,
            labels,
            maps,
            subshift,
            boxes,
            attractor_hull,
        };
        sys.validate_boxes()?;
        Ok(sys)
    }

    /// Separation metadata check: `U_a` pairwise disjoint and `f_a(U) ⊂ U_a`
    /// (interval arithmetic on the boxes plus sampled probes).
    fn validate_boxes(&self) -> Result<()> {
        let Some(bs) = &self.boxes else { return Ok(()) };
        for (i, a) in bs.iter().enumerate() {
            for b in bs.iter().skip(i + 1) {
                if a.intersects(b) {
                    return Err(CoreError::invalid(format!(
                        "separation boxes U_{} and U_* intersect",
                        self.labels[i]
                    )));
                }
            }
        }
        for (a, map) in self.maps.iter().enumerate() {
            for u in bs {
                let img = map.map_box(u);
                let inside = img
                    .coords
                    .iter()
                    .zip(&bs[a].coords)
                    .all(|(c, t)| c.lo >= t.lo - 1e-12 && c.hi <= t.hi + 1e-12);
                if !inside {
                    return Err(CoreError::invalid(format!(
                        "f_{}(U) does not map into U_{}",
                        self.labels[a], self.labels[a]
                    )));
                }
                for x in sample_cube(self.dimension, 32) {
                    let p = DVector::from_iterator(
                        self.dimension,
                        u.coords
                            .iter()
                            .zip(x.iter())
                            .map(|(c, t)| c.lo + t * c.width()),
                    );
                    if !bs[a].contains(&map.apply(&p)) {
                        return Err(CoreError::invalid(format!(
                            "sampled point of f_{}(U) escapes U_{}",
                            self.labels[a], self.labels[a]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn alphabet_len(&self) -> usize {
        self.maps.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn map(&self, a: usize) -> &ConformalMap {
        &self.maps[a]
    }

    pub fn maps(&self) -> &[ConformalMap] {
        &self.maps
    }

    pub fn subshift(&self) -> Option<&SubshiftMatrix> {
        self.subshift.as_ref()
    }

    pub fn boxes(&self) -> Option<&[IntervalBox]> {
        self.boxes.as_deref()
    }

    /// Box hull of the attractor `X_Φ` (fixed point of the box-hull refinement).
    pub fn attractor_hull(&self) -> &IntervalBox {
        &self.attractor_hull
    }

    pub fn empty_word(&self) -> Word {
        Word::empty(self.alphabet_len())
    }

    pub fn word(&self, symbols: &[usize]) -> Word {
        Word::from_symbols(symbols, self.alphabet_len())
    }

    pub fn is_admissible(&self, word: &Word) -> bool {
        match &self.subshift {
            Some(a) => a.is_admissible(word),
            None => true,
        }
    }

    fn require_admissible(&self, word: &Word) -> Result<()> {
        if self.is_admissible(word) {
            Ok(())
        } else {
            Err(CoreError::InadmissibleWord(word.display(&self.labels)))
        }
    }

    /// `f_α = f_{a_1} ∘ ⋯ ∘ f_{a_n}` applied to `x` (right-to-left).
    pub fn compose_word(&self, word: &Word, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.require_admissible(word)?;
        let mut y = x.clone();
        for a in word.symbols().rev() {
            y = self.maps[a].apply(&y);
        }
        Ok(y)
    }

    /// Derivative cocycle: returns `(λ_α(x), O_α(x))` with
    /// `λ_α(x) = ∏ λ_{a_i}(f_{a_{i+1},…,a_n}(x))` and the matching rotation
    /// product, so that `D_x f_α = λ·O`.
    pub fn word_derivative(&self, word: &Word, x: &DVector<f64>) -> Result<(f64, DMatrix<f64>)> {
        self.require_admissible(word)?;
        let d = self.dimension;
        // suffix orbit: y_i = f_{a_{i+1}..a_n}(x), filled back-to-front
        let n = word.len();
        let mut orbit = vec![x.clone(); n];
        for i in (0..n.saturating_sub(1)).rev() {
            let a_next = word.symbol(i + 1);
            orbit[i] = self.maps[a_next].apply(&orbit[i + 1]);
        }
        let mut lambda = 1.0f64;
        let mut rot = DMatrix::<f64>::identity(d, d);
        for i in 0..n {
            let a = word.symbol(i);
            lambda *= self.maps[a].conformal_factor(&orbit[i]);
            rot *= self.maps[a].rotation_part(&orbit[i]);
        }
        Ok((lambda, rot))
    }

    /// `|λ_α(x)|` only, skipping the rotation product.
    pub fn word_contraction(&self, word: &Word, x: &DVector<f64>) -> Result<f64> {
        self.require_admissible(word)?;
        let n = word.len();
        let mut y = x.clone();
        let mut lams = Vec::with_capacity(n);
        for i in (0..n).rev() {
            let a = word.symbol(i);
            lams.push(self.maps[a].conformal_factor(&y));
            y = self.maps[a].apply(&y);
        }
        Ok(lams.iter().map(|l| l.abs()).product())
    }

    /// Gradient of `x ↦ log|λ_α(x)|` (chain rule over the suffix orbit).
    pub fn grad_log_lambda_word(&self, word: &Word, x: &DVector<f64>, fd_step: f64) -> Result<DVector<f64>> {
        self.require_admissible(word)?;
        let d = self.dimension;
        let n = word.len();
        let mut orbit = vec![x.clone(); n];
        for i in (0..n.saturating_sub(1)).rev() {
            let a_next = word.symbol(i + 1);
            orbit[i] = self.maps[a_next].apply(&orbit[i + 1]);
        }
        // v = Σ_i (D_x f_{suffix_i})ᵀ ∇(log|λ_{a_i}|)(y_i); build suffix Jacobians
        // front-to-back: J_i = D_x f_{a_{i+1}..a_n}.
        let mut grad = DVector::<f64>::zeros(d);
        let mut jac = DMatrix::<f64>::identity(d, d); // suffix Jacobian, starts with i = n
        for i in (0..n).rev() {
            let a = word.symbol(i);
            let g = self.maps[a].grad_log_lambda(&orbit[i], fd_step);
            grad += jac.transpose() * g;
            let lam = self.maps[a].conformal_factor(&orbit[i]);
            let o = self.maps[a].rotation_part(&orbit[i]);
            jac = o * jac * lam;
        }
        Ok(grad)
    }

    /// Interval hull of the cylinder `X_α` (image of the attractor hull).
    pub fn cylinder_hull(&self, word: &Word) -> Result<IntervalBox> {
        self.require_admissible(word)?;
        let mut b = self.attractor_hull.clone();
        for a in word.symbols().rev() {
            b = self.maps[a].map_box(&b);
        }
        Ok(b)
    }

    /// Sampled diameter of `f_α([0,1]^d)` (probe points, pairwise distances).
    pub fn sampled_cylinder_diameter(&self, word: &Word, probes: usize) -> Result<f64> {
        self.require_admissible(word)?;
        let pts: Vec<DVector<f64>> = sample_cube(self.dimension, probes)
            .into_iter()
            .map(|x| {
                let mut y = x;
                for a in word.symbols().rev() {
                    y = self.maps[a].apply(&y);
                }
                y
            })
            .collect();
        let mut diam: f64 = 0.0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                diam = diam.max((&pts[i] - &pts[j]).norm());
            }
        }
        Ok(diam)
    }

    /// Fixed point of a single map, by iteration.
    pub fn map_fixed_point(&self, a: usize) -> DVector<f64> {
        let mut x = self.attractor_hull.midpoint();
        for _ in 0..400 {
            let y = self.maps[a].apply(&x);
            if (&y - &x).norm() < 1e-15 {
                return y;
            }
            x = y;
        }
        x
    }

    /// Lexicographically smallest fixed point among the alphabet maps; serves
    /// as the deterministic reference point for cylinder anchors.
    pub fn reference_point(&self) -> DVector<f64> {
        let mut best: Option<DVector<f64>> = None;
        for a in 0..self.alphabet_len() {
            let fp = self.map_fixed_point(a);
            let better = match &best {
                None => true,
                Some(b) => lex_less(&fp, b),
            };
            if better {
                best = Some(fp);
            }
        }
        best.expect("non-empty alphabet")
    }

    /// Anchor point `x_α = f_α(reference)` inside the cylinder.
    pub fn anchor(&self, word: &Word) -> Result<DVector<f64>> {
        self.compose_word(word, &self.reference_point())
    }

    /// True when every map is a similitude.
    pub fn all_similitudes(&self) -> bool {
        self.maps.iter().all(|m| m.is_similitude())
    }

    /// Supremum of `‖D f_α‖` over probes (exact for similitude words).
    pub fn sup_word_derivative(&self, word: &Word, probes: usize) -> Result<f64> {
        if self.all_similitudes() {
            return self.word_contraction(word, &self.attractor_hull.midpoint());
        }
        let mut sup: f64 = 0.0;
        for x in sample_cube(self.dimension, probes) {
            sup = sup.max(self.word_contraction(word, &x)?.abs());
        }
        Ok(sup)
    }
}

fn lex_less(a: &DVector<f64>, b: &DVector<f64>) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

fn compute_attractor_hull(maps: &[ConformalMap], d: usize) -> IntervalBox {
    let mut hull = IntervalBox::unit(d);
    // box-hull refinement converges geometrically; 200 rounds is far past f64 resolution
    for _ in 0..200 {
        let mut next: Option<IntervalBox> = None;
        for m in maps {
            let img = m.map_box(&hull);
            next = Some(match next {
                None => img,
                Some(h) => h.hull(&img),
            });
        }
        let next = next.expect("non-empty alphabet");
        let delta: f64 = hull
            .coords
            .iter()
            .zip(&next.coords)
            .map(|(a, b)| (a.lo - b.lo).abs().max((a.hi - b.hi).abs()))
            .fold(0.0, f64::max);
        hull = next;
        if delta < 1e-14 {
            break;
        }
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use approx::assert_abs_diff_eq;

    #[test]
    fn empty_word_is_identity() {
        let sys = bundled::cantor_system();
        let x = DVector::from_vec(vec![0.37]);
        let y = sys.compose_word(&sys.empty_word(), &x).unwrap();
        assert_eq!(y, x);
        let (l, o) = sys.word_derivative(&sys.empty_word(), &x).unwrap();
        assert_eq!(l, 1.0);
        assert_eq!(o, DMatrix::identity(1, 1));
    }

    #[test]
    fn cantor_hand_composition() {
        // maps {x/3, x/3 + 2/3}; word "ab" at 0 gives f_a(f_b(0)) = 2/9
        let sys = bundled::cantor_system();
        let w = sys.word(&[0, 1]);
        let y = sys.compose_word(&w, &DVector::from_vec(vec![0.0])).unwrap();
        assert_abs_diff_eq!(y[0], 2.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn mobius_word_composition_matches_stepwise() {
        let sys = bundled::uni_mobius_system();
        let w = sys.word(&[0, 1, 2, 0, 1]);
        let x = DVector::from_vec(vec![0.3]);
        let composed = sys.compose_word(&w, &x).unwrap();
        let mut y = x.clone();
        for a in [1usize, 0, 2, 1, 0] {
            y = sys.map(a).apply(&y);
        }
        assert_abs_diff_eq!(composed[0], y[0], epsilon = 1e-12);
    }

    #[test]
    fn similitude_word_derivative_is_ratio_product() {
        let sys = bundled::half_third_system();
        let w = sys.word(&[0, 1, 0]);
        for xv in [0.0, 0.4, 1.0] {
            let x = DVector::from_vec(vec![xv]);
            let (l, _) = sys.word_derivative(&w, &x).unwrap();
            assert_abs_diff_eq!(l, 0.5 * (1.0 / 3.0) * 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn mobius_word_derivative_matches_finite_differences() {
        let sys = bundled::uni_mobius_system();
        let w = sys.word(&[0, 1, 1, 0]);
        let x = DVector::from_vec(vec![0.45]);
        let (l, o) = sys.word_derivative(&w, &x).unwrap();
        let h = 1e-6;
        let xp = DVector::from_vec(vec![0.45 + h]);
        let xm = DVector::from_vec(vec![0.45 - h]);
        let fp = sys.compose_word(&w, &xp).unwrap();
        let fm = sys.compose_word(&w, &xm).unwrap();
        let fd = (fp[0] - fm[0]) / (2.0 * h);
        assert_abs_diff_eq!(l * o[(0, 0)], fd, epsilon = 1e-6);
    }

    #[test]
    fn inadmissible_word_rejected() {
        let sys = bundled::golden_mean_system();
        let bad = sys.word(&[1, 1]);
        let x = DVector::from_vec(vec![0.2]);
        assert!(matches!(
            sys.compose_word(&bad, &x),
            Err(CoreError::InadmissibleWord(_))
        ));
    }

    #[test]
    fn cocycle_property_randomized() {
        let sys = bundled::half_third_system();
        let alpha = sys.word(&[0, 1]);
        let beta = sys.word(&[1, 0, 0]);
        let joined = alpha.concat(&beta);
        for xv in [0.1, 0.5, 0.9] {
            let x = DVector::from_vec(vec![xv]);
            let direct = sys.compose_word(&joined, &x).unwrap();
            let fb = sys.compose_word(&beta, &x).unwrap();
            let two = sys.compose_word(&alpha, &fb).unwrap();
            assert!((direct - two).norm() <= 1e-12);
        }
    }

    #[test]
    fn derivative_multiplicative_along_orbit() {
        let sys = bundled::uni_mobius_system();
        let alpha = sys.word(&[0, 2]);
        let beta = sys.word(&[1, 0]);
        let joined = alpha.concat(&beta);
        let x = DVector::from_vec(vec![0.5]);
        let (l_ab, _) = sys.word_derivative(&joined, &x).unwrap();
        let fb = sys.compose_word(&beta, &x).unwrap();
        let (l_a, _) = sys.word_derivative(&alpha, &fb).unwrap();
        let (l_b, _) = sys.word_derivative(&beta, &x).unwrap();
        assert!((l_ab - l_a * l_b).abs() / l_ab.abs() < 1e-10);
    }
}
