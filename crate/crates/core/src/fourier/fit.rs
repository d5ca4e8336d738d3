//! Least-squares decay-exponent fits.

use crate::fourier::profile::DecayProfile;
use crate::{CoreError, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FitModel {
    /// `max ≈ C·T^{−κ}`.
    Poly,
    /// `max ≈ C·(log T)^{−κ}`.
    PolyLog,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub intercept: f64,
    /// RMS residual of the linear fit in log coordinates.
    pub residual: f64,
}

/// Fits `log(max)` against `−κ·log T` (poly) or `−κ·log log T` (polylog).
pub fn fit_decay_exponent(profile: &DecayProfile, model: FitModel) -> Result<DecayFit> {
    let pts = profile.fit_points();
    if pts.len() < 4 {
        return Err(CoreError::invalid("need at least 4 bands to fit"));
    }
    let maxima: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let spread = maxima.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - maxima.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread <= 1e-15 {
        return Err(CoreError::DegenerateFit("all band maxima equal".into()));
    }
    let xy: Vec<(f64, f64)> = pts
        .iter()
        .filter(|&&(t, m)| m > 0.0 && t > 1.0)
        .map(|&(t, m)| {
            let u = match model {
                FitModel::Poly => t.ln(),
                FitModel::PolyLog => t.ln().ln(),
            };
            (u, m.ln())
        })
        .collect();
    linear_fit_neg_slope(&xy)
}

/// Growth fit `log y = intercept + exponent·log x`.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<DecayFit> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    let fit = linear_fit_neg_slope(&xy)?;
    Ok(DecayFit {
        exponent: -fit.exponent,
        intercept: fit.intercept,
        residual: fit.residual,
    })
}

fn linear_fit_neg_slope(xy: &[(f64, f64)]) -> Result<DecayFit> {
    if xy.len() < 2 {
        return Err(CoreError::DegenerateFit("not enough positive points".into()));
    }
    let n = xy.len() as f64;
    let sx: f64 = xy.iter().map(|p| p.0).sum();
    let sy: f64 = xy.iter().map(|p| p.1).sum();
    let sxx: f64 = xy.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = xy.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Err(CoreError::DegenerateFit("collinear abscissae".into()));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let residual = (xy
        .iter()
        .map(|&(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DecayFit {
        exponent: -slope,
        intercept,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::profile::BandStats;

    fn synthetic_profile(f: impl Fn(f64) -> f64) -> DecayProfile {
        let bands = (1..=8)
            .map(|j| {
                let lo = 10f64.powi(j);
                let hi = 10f64.powi(j + 1);
                let t = (lo * hi).sqrt();
                BandStats {
                    band_lo: lo,
                    band_hi: hi,
                    max_abs: f(t),
                    mean_abs: f(t),
                    argmax: vec![t],
                    grid_points: 1,
                }
            })
            .collect();
        DecayProfile {
            bands,
            grid_step: 1.0,
            directions: 1,
        }
    }

    #[test]
    fn exact_poly_model_recovered() {
        let prof = synthetic_profile(|t| t.powf(-0.3));
        let fit = fit_decay_exponent(&prof, FitModel::Poly).unwrap();
        assert!((fit.exponent - 0.3).abs() < 1e-6, "{fit:?}");
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn exact_polylog_model_recovered() {
        let prof = synthetic_profile(|t| 1.0 / t.ln());
        let fit = fit_decay_exponent(&prof, FitModel::PolyLog).unwrap();
        assert!((fit.exponent - 1.0).abs() < 1e-6, "{fit:?}");
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn constant_profile_is_degenerate() {
        let prof = synthetic_profile(|_| 0.4);
        assert!(matches!(
            fit_decay_exponent(&prof, FitModel::Poly),
            Err(CoreError::DegenerateFit(_))
        ));
    }
}
