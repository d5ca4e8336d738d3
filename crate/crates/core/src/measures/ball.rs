//! Ball-mass brackets by cylinder covering.

use crate::measures::{MassInterval, MeasureOracle};
use crate::Result;
use nalgebra::DVector;

#[derive(Clone, Debug)]
pub struct BallMass {
    pub mass: MassInterval,
    /// Set when the refinement hit the depth cap and the bracket stayed loose.
    pub depth_capped: bool,
    pub depth_used: usize,
}

/// Brackets `μ(B(x,r))` by summing cylinder masses of cylinders inside /
/// meeting the closed ball, refining until the bracket width is below 10%
/// of the upper bound or the depth cap is reached.
pub fn ball_mass_estimate<M: MeasureOracle + ?Sized>(
    oracle: &M,
    x: &DVector<f64>,
    r: f64,
    depth_cap: usize,
) -> Result<BallMass> {
    assert!(r > 0.0, "ball radius must be positive");
    let sys = oracle.system();
    let mut lo = 0.0f64;
    let mut hi = 0.0f64;
    let mut queue = vec![sys.empty_word()];
    let mut depth = 0usize;
    loop {
        let mut next = Vec::new();
        let mut unresolved_hi = 0.0f64;
        for w in &queue {
            let hull = sys.cylinder_hull(w)?;
            if hull.min_dist_to(x) > r {
                continue;
            }
            let mass = oracle.cylinder_mass(w)?;
            if hull.max_dist_to(x) <= r {
                lo += mass.lo;
                hi += mass.hi;
                continue;
            }
            unresolved_hi += mass.hi;
            for a in 0..sys.alphabet_len() {
                let ok = match (sys.subshift(), w.last()) {
                    (Some(m), Some(last)) => m.admits(last, a),
                    _ => true,
                };
                if ok {
                    next.push(w.child(a));
                }
            }
        }
        let total_hi = hi + unresolved_hi;
        let width = (hi - lo) + unresolved_hi;
        if next.is_empty() || (total_hi > 0.0 && width <= 0.10 * total_hi) {
            return Ok(BallMass {
                mass: MassInterval::new(lo, total_hi),
                depth_capped: false,
                depth_used: depth,
            });
        }
        if depth >= depth_cap || next.len() > 2_000_000 {
            return Ok(BallMass {
                mass: MassInterval::new(lo, total_hi),
                depth_capped: true,
                depth_used: depth,
            });
        }
        queue = next;
        depth += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    #[test]
    fn lebesgue_ball_mass() {
        let mu = bundled::lebesgue_measure();
        let res = ball_mass_estimate(&mu, &DVector::from_vec(vec![0.5]), 0.25, 40).unwrap();
        assert!(res.mass.lo <= 0.5 + 1e-9 && res.mass.hi >= 0.5 - 1e-9);
        assert!(res.mass.width() <= 0.10 * res.mass.hi + 1e-12);
    }

    #[test]
    fn cantor_dyadic_ball_is_exact() {
        let mu = bundled::cantor_measure();
        for k in 1..8 {
            let r = 3f64.powi(-k);
            let res = ball_mass_estimate(&mu, &DVector::from_vec(vec![0.0]), r, 60).unwrap();
            let expect = 2f64.powi(-k);
            assert!(
                (res.mass.lo - expect).abs() < 1e-12 && (res.mass.hi - expect).abs() < 1e-12,
                "k={k}: [{}, {}]",
                res.mass.lo,
                res.mass.hi
            );
        }
    }

    #[test]
    fn monotone_in_radius() {
        let mu = bundled::cantor_measure();
        let x = DVector::from_vec(vec![1.0 / 3.0]);
        let mut prev_hi = 0.0;
        for r in [0.02, 0.05, 0.1, 0.3, 0.8] {
            let res = ball_mass_estimate(&mu, &x, r, 40).unwrap();
            assert!(res.mass.hi + 1e-12 >= prev_hi);
            prev_hi = res.mass.hi;
        }
    }

    #[test]
    fn depth_cap_flags_loose_bracket() {
        let mu = bundled::lebesgue_measure();
        // boundary-heavy ball with a tiny cap
        let res = ball_mass_estimate(&mu, &DVector::from_vec(vec![0.31]), 0.1, 1).unwrap();
        assert!(res.depth_capped);
        assert!(res.mass.lo <= res.mass.hi);
    }
}
