//! Finite-range Diophantine certificates via continued-fraction convergents.
//!
//! The certified quantity is `c = min_{1 ≤ q ≤ Q} q^l·|x − p/q|`
//! (equivalently `q^{l−1}·dist(qx, ℤ)`), so that `|x − p/q| ≥ c/q^l` holds for
//! every rational with denominator up to `Q`.

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct DiophantineCertificate {
    pub x: f64,
    pub l: f64,
    pub q_max: u64,
    /// `min q^l·|x − p/q|` over the searched range (0 for rationals).
    pub value: f64,
    pub argmin_q: u64,
}

/// Exact minimization over `q ≤ Q` using the classical fact that only
/// continued-fraction convergent denominators can improve `dist(qx, ℤ)`,
/// hence (for `l ≥ 1`) only they can minimize `q^{l−1}·dist(qx, ℤ)`.
pub fn diophantine_lower_bound(x: f64, l: f64, q_max: u64) -> DiophantineCertificate {
    assert!(q_max >= 2, "need Q >= 2");
    assert!(l >= 1.0, "the certificate is monotone only for l >= 1");
    let mut best = f64::INFINITY;
    let mut best_q = 1u64;
    for q in convergent_denominators(x, q_max) {
        let d = dist_to_int(q as f64 * x);
        let v = (q as f64).powf(l - 1.0) * d;
        if v < best {
            best = v;
            best_q = q;
        }
    }
    DiophantineCertificate {
        x,
        l,
        q_max,
        value: best,
        argmin_q: best_q,
    }
}

/// Two-variable form: `min max(|p|,|q|)^l · dist(pθ₁ + qθ₂, ℤ)` over the
/// lattice box `0 < max(|p|,|q|) ≤ Q` (used for planar rotation pairs).
pub fn diophantine_lower_bound_pair(
    theta: (f64, f64),
    l: f64,
    q_max: u64,
) -> DiophantineCertificate {
    assert!(q_max >= 2);
    let mut best = f64::INFINITY;
    let mut best_q = 1u64;
    let qm = q_max as i64;
    for p in -qm..=qm {
        for q in -qm..=qm {
            let h = p.unsigned_abs().max(q.unsigned_abs());
            if h == 0 {
                continue;
            }
            let d = dist_to_int(p as f64 * theta.0 + q as f64 * theta.1);
            let v = (h as f64).powf(l) * d;
            if v < best {
                best = v;
                best_q = h;
            }
        }
    }
    DiophantineCertificate {
        x: theta.0,
        l,
        q_max,
        value: best,
        argmin_q: best_q,
    }
}

fn dist_to_int(t: f64) -> f64 {
    (t - t.round()).abs()
}

/// Denominators of the continued-fraction convergents of `x` up to `q_max`
/// (always includes 1).
pub fn convergent_denominators(x: f64, q_max: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    let mut frac = x.fract().abs();
    let (mut q_prev, mut q_curr) = (0u64, 1u64);
    for _ in 0..64 {
        if frac < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        if !(a >= 1.0) || a > 1e18 {
            break;
        }
        let next = (a as u64)
            .checked_mul(q_curr)
            .and_then(|v| v.checked_add(q_prev));
        let Some(next) = next else { break };
        if next > q_max {
            break;
        }
        q_prev = q_curr;
        q_curr = next;
        out.push(q_curr);
        frac = inv - a;
    }
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle scanning every denominator.
    fn brute(x: f64, l: f64, q_max: u64) -> f64 {
        (1..=q_max)
            .map(|q| (q as f64).powf(l - 1.0) * dist_to_int(q as f64 * x))
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn golden_ratio_certificate() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let cert = diophantine_lower_bound(phi, 2.0, 10_000);
        let oracle = brute(phi, 2.0, 10_000);
        assert!((cert.value - oracle).abs() < 1e-12, "{} vs {}", cert.value, oracle);
        // the classical 1/√5 scale: the finite-range constant sits just below
        assert!(cert.value >= 1.0 / 5f64.sqrt() - 0.07);
        assert!(cert.value > 0.0);
    }

    #[test]
    fn rationals_certify_zero() {
        let cert = diophantine_lower_bound(3.0 / 7.0, 2.0, 7);
        assert_eq!(cert.value, 0.0);
        assert_eq!(cert.argmin_q, 7);
        for l in [1.0, 2.0, 3.5] {
            assert_eq!(diophantine_lower_bound(3.0 / 7.0, l, 100).value, 0.0);
        }
    }

    #[test]
    fn log2_log3_certificate_positive() {
        let x = 2f64.ln() / 3f64.ln();
        let cert = diophantine_lower_bound(x, 2.0, 1_000_000);
        assert!(cert.value > 0.0, "certificate {}", cert.value);
        let oracle = brute(x, 2.0, 20_000);
        let cert_small = diophantine_lower_bound(x, 2.0, 20_000);
        assert!((cert_small.value - oracle).abs() < 1e-12);
    }

    #[test]
    fn monotone_nonincreasing_in_q() {
        let x = 2f64.ln() / 3f64.ln();
        let mut prev = f64::INFINITY;
        for q in [10, 100, 1_000, 10_000, 100_000, 1_000_000] {
            let c = diophantine_lower_bound(x, 2.0, q).value;
            assert!(c <= prev + 1e-15);
            prev = c;
        }
    }

    #[test]
    fn pair_certificate_for_sqrt_angles() {
        let cert =
            diophantine_lower_bound_pair((2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0), 2.0, 200);
        assert!(cert.value > 0.0);
    }
}
