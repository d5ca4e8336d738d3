//! Empirical bounded-distortion constants.
//!
//! Two ratios are tracked over sampled words and probe points:
//! `‖D_xf_α − D_yf_α‖ / (sup_z ‖D_zf_α‖ · ‖x−y‖)` (linearization constant)
//! and the two-sided comparison of `‖D_xf_α‖` with the cylinder diameter.

use crate::ifs::map::sample_cube;
use crate::ifs::{IFSSystem, Word};
use crate::Result;

#[derive(Clone, Copy, Debug)]
pub struct DistortionConstants {
    /// Supremum of the linearization ratio (0 for exactly affine systems).
    pub c_lin: f64,
    /// Supremum of `max(‖Df_α‖/diam, diam/‖Df_α‖)` over sampled words/points.
    pub c_diam: f64,
}

/// Samples all admissible words up to `depth` (with an internal budget) and
/// returns the empirical suprema. Monotone non-decreasing in `depth`.
pub fn distortion_constants(system: &IFSSystem, depth: usize) -> Result<DistortionConstants> {
    let d = system.dimension();
    let probes = sample_cube(d, 24);
    let mut c_lin: f64 = 0.0;
    let mut c_diam: f64 = 0.0;

    let mut words: Vec<Word> = Vec::new();
    let mut frontier = vec![system.empty_word()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &frontier {
            for a in 0..system.alphabet_len() {
                let ok = match (system.subshift(), w.last()) {
                    (Some(m), Some(last)) => m.admits(last, a),
                    _ => true,
                };
                if ok {
                    next.push(w.child(a));
                }
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
        if words.len() > 100_000 {
            break;
        }
    }

    for w in &words {
        let mut sup_d: f64 = 0.0;
        let mut jacs = Vec::with_capacity(probes.len());
        for x in &probes {
            let (lam, rot) = system.word_derivative(w, x)?;
            let j = rot * lam;
            sup_d = sup_d.max(lam.abs());
            jacs.push((x.clone(), j));
        }
        let diam = system.sampled_cylinder_diameter(w, 16)?;
        for (x, jx) in &jacs {
            let lam_x = crate::geom::operator_norm(jx);
            if diam > 0.0 && lam_x > 0.0 {
                c_diam = c_diam.max(lam_x / diam).max(diam / lam_x);
            }
            for (y, jy) in &jacs {
                let dist = (x - y).norm();
                if dist > 1e-9 {
                    let num = crate::geom::operator_norm(&(jx - jy));
                    c_lin = c_lin.max(num / (sup_d * dist));
                }
            }
        }
    }
    Ok(DistortionConstants { c_lin, c_diam })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    #[test]
    fn affine_systems_have_zero_linearization_constant() {
        let sys = bundled::half_third_system();
        let c = distortion_constants(&sys, 3).unwrap();
        assert!(c.c_lin < 1e-12, "c_lin = {}", c.c_lin);
        // d = 1: diameter of an interval equals |Df|·diam([0,1]) so the ratio is 1
        assert!((c.c_diam - 1.0).abs() < 1e-9, "c_diam = {}", c.c_diam);
    }

    #[test]
    fn depth_monotonicity() {
        let sys = bundled::uni_mobius_system();
        let c1 = distortion_constants(&sys, 1).unwrap();
        let c2 = distortion_constants(&sys, 2).unwrap();
        assert!(c2.c_lin >= c1.c_lin - 1e-15);
        assert!(c2.c_diam >= c1.c_diam - 1e-15);
    }

    #[test]
    fn mobius_constants_stabilize() {
        let sys = bundled::uni_mobius_system();
        let c6 = distortion_constants(&sys, 5).unwrap();
        let c8 = distortion_constants(&sys, 6).unwrap();
        assert!(c6.c_lin > 0.0);
        assert!((c8.c_lin - c6.c_lin).abs() <= 0.10 * c6.c_lin + 1e-12);
        assert!((c8.c_diam - c6.c_diam).abs() <= 0.10 * c6.c_diam + 1e-12);
    }
}
