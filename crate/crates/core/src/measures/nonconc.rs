//! Affine non-concentration profiling.
//!
//! Estimates `δ̂(ε) = max mass(W^{(εr)} ∩ B(x,r)) / mass(B(x,cr))` over
//! sampled support points x, dyadic radii r, and hyperplanes W through
//! sampled support points with random unit normals. `c ≥ 1` selects the
//! expanded-ball relaxation.

use crate::measures::{sample_points, MeasureOracle};
use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Debug)]
pub struct NonConcParams {
    pub eps_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Ball-expansion factor `c ≥ 1` in the denominator `μ(B(x, cr))`.
    pub expansion_c: f64,
    pub sample_count: usize,
    /// Dyadic radius exponents: r = 2^{-j}, j = 1..=max_scale.
    pub max_scale: u32,
}

impl Default for NonConcParams {
    fn default() -> Self {
        NonConcParams {
            eps_grid: vec![0.025, 0.05, 0.1, 0.2, 0.4],
            trials: 400,
            seed: 1,
            expansion_c: 1.0,
            sample_count: 20_000,
            max_scale: 5,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerLawFit {
    pub c: f64,
    pub alpha: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonConcProfile {
    /// (ε, δ̂(ε)) rows, ε ascending.
    pub rows: Vec<(f64, f64)>,
    pub fit: PowerLawFit,
    /// Raised when the profile saturates near 1 (measure concentrated on a
    /// hyperplane; the non-concentration hypothesis fails).
    pub concentrated: bool,
}

/// Monte Carlo profile of the measure oracle.
pub fn affine_nonconcentration_profile<M: MeasureOracle + ?Sized>(
    oracle: &M,
    params: &NonConcParams,
) -> NonConcProfile {
    let cloud = sample_points(oracle, params.seed, params.sample_count);
    profile_from_samples(&cloud, params)
}

/// Same estimator on a pre-drawn point cloud (used by the rescaled-restriction
/// sweeps where the cloud lives in a scaled frame).
pub fn profile_from_samples(cloud: &[DVector<f64>], params: &NonConcParams) -> NonConcProfile {
    assert!(params.trials >= 1);
    assert!(params.expansion_c >= 1.0);
    let d = cloud[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0x5eed_0001);
    let mut eps = params.eps_grid.clone();
    eps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut delta = vec![0.0f64; eps.len()];

    for _ in 0..params.trials {
        let x = &cloud[rng.random_range(0..cloud.len())];
        let w = &cloud[rng.random_range(0..cloud.len())];
        let normal = random_unit(&mut rng, d);
        let j = rng.random_range(1..=params.max_scale);
        let r = 2f64.powi(-(j as i32));
        let cr = params.expansion_c * r;

        let mut denom = 0usize;
        let mut proj_in_ball: Vec<f64> = Vec::new();
        for y in cloud {
            let dist = (y - x).norm();
            if dist <= cr {
                denom += 1;
            }
            if dist <= r {
                proj_in_ball.push((y - w).dot(&normal).abs());
            }
        }
        if denom == 0 {
            continue;
        }
        for (i, &e) in eps.iter().enumerate() {
            let slab = e * r;
            let num = proj_in_ball.iter().filter(|&&p| p <= slab).count();
            let ratio = num as f64 / denom as f64;
            if ratio > delta[i] {
                delta[i] = ratio;
            }
        }
    }

    let rows: Vec<(f64, f64)> = eps.iter().cloned().zip(delta.iter().cloned()).collect();
    let fit = fit_power_law(&rows);
    let concentrated = rows.first().map(|&(_, d0)| d0 > 0.9).unwrap_or(false);
    NonConcProfile {
        rows,
        fit,
        concentrated,
    }
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_iterator(d, (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0));
        let n = v.norm();
        if n > 1e-6 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Least-squares `log δ = log C + α·log ε` over rows with δ > 0.
pub fn fit_power_law(rows: &[(f64, f64)]) -> PowerLawFit {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|&&(_, d)| d > 0.0)
        .map(|&(e, d)| (e.ln(), d.ln()))
        .collect();
    if pts.len() < 2 {
        return PowerLawFit {
            c: f64::NAN,
            alpha: f64::NAN,
            residual: f64::NAN,
        };
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let alpha = (n * sxy - sx * sy) / denom;
    let intercept = (sy - alpha * sx) / n;
    let residual = (pts
        .iter()
        .map(|&(x, y)| {
            let e = y - (intercept + alpha * x);
            e * e
        })
        .sum::<f64>()
        / n)
        .sqrt();
    PowerLawFit {
        c: intercept.exp(),
        alpha,
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    #[test]
    fn lebesgue_profile_is_linear_in_eps() {
        let mu = bundled::lebesgue_measure();
        let params = NonConcParams {
            trials: 300,
            sample_count: 20_000,
            ..Default::default()
        };
        let prof = affine_nonconcentration_profile(&mu, &params);
        assert!(!prof.concentrated);
        assert!(
            (prof.fit.alpha - 1.0).abs() <= 0.1,
            "alpha = {} rows {:?}",
            prof.fit.alpha,
            prof.rows
        );
    }

    #[test]
    fn cantor_profile_below_dimension_power_law() {
        // exact tree oracle: mass of an interval [a,b] under the Cantor measure
        fn cantor_interval_mass(a: f64, b: f64, depth: u32) -> f64 {
            if b <= 0.0 || a >= 1.0 || b <= a {
                return 0.0;
            }
            if depth == 0 || (a <= 0.0 && b >= 1.0) {
                return 1.0_f64.min((b - a).max(0.0).powf(2f64.ln() / 3f64.ln()) * 2.0);
            }
            // children supported on [0,1/3] and [2/3,1], each of mass 1/2
            0.5 * cantor_interval_mass(3.0 * a, 3.0 * b, depth - 1)
                + 0.5 * cantor_interval_mass(3.0 * a - 2.0, 3.0 * b - 2.0, depth - 1)
        }
        // the exact bound: δ(ε) ≤ C ε^{log2/log3}; the sampled profile must
        // stay below the exact-oracle envelope at each ε within MC slack
        let mu = bundled::cantor_measure();
        let params = NonConcParams {
            trials: 200,
            sample_count: 10_000,
            ..Default::default()
        };
        let prof = affine_nonconcentration_profile(&mu, &params);
        assert!(!prof.concentrated);
        let s = 2f64.ln() / 3f64.ln();
        for &(e, d) in &prof.rows {
            // oracle envelope: worst slab/ball ratio across dyadic balls
            let mut envelope = 0.0f64;
            for j in 1..=5 {
                let r = 2f64.powi(-j);
                for &x in &[0.0, 1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0] {
                    let ball = cantor_interval_mass(x - r, x + r, 40);
                    if ball > 1e-9 {
                        let slab = cantor_interval_mass(x - e * r, x + e * r, 40);
                        envelope = envelope.max(slab / ball);
                    }
                }
            }
            let bound = (2.1 * e.powf(s)).max(envelope * 1.5) + 0.05;
            assert!(d <= bound, "eps {e}: delta {d} > bound {bound}");
        }
    }

    #[test]
    fn hyperplane_measure_flagged_concentrated() {
        let mu = bundled::degenerate_plane_measure();
        let params = NonConcParams {
            trials: 200,
            sample_count: 4_000,
            ..Default::default()
        };
        let prof = affine_nonconcentration_profile(&mu, &params);
        assert!(prof.concentrated, "rows {:?}", prof.rows);
    }
}
