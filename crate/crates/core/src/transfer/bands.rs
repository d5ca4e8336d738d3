//! Frequency-band non-concentration: the mass the weights place on words
//! whose rescaled frequency modulus `|λ_α(x_β)|·‖ξ‖^{1/3}` lands in a unit
//! band, by the direct indicator sum and by the mollified transfer-operator
//! route.

use crate::measures::GibbsMeasure;
use crate::transfer::operator::TwistedOperator;
use crate::{CoreError, Result};
use crate::ifs::Word;
use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BandRoute {
    Direct,
    Mollified,
}

#[derive(Clone, Debug, Serialize)]
pub struct BandMass {
    pub band: i64,
    pub direct: f64,
    pub mollified: Option<f64>,
    pub discrepancy: Option<f64>,
    /// Bound the discrepancy must respect: widened-band mass + quadrature
    /// tail of the mollifier route.
    pub bound: Option<f64>,
    /// Whether the chosen `c` keeps every frequency above `‖ξ‖^{1/6}`.
    pub c_valid: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BandTable {
    pub n_xi: usize,
    pub xi_norm: f64,
    pub c: f64,
    pub rows: Vec<(i64, f64)>,
    pub total: f64,
    pub max_band_mass: f64,
    pub c_valid: bool,
}

/// Per-word data for the band computations at anchor `x_β`.
fn word_data(
    measure: &GibbsMeasure,
    beta: &Word,
    n_words: usize,
    budget: usize,
) -> Result<(Vec<(f64, f64)>, DVector<f64>)> {
    let sys = measure.system();
    if !measure.shift().is_admissible(beta) {
        return Err(CoreError::InadmissibleWord(beta.display(sys.labels())));
    }
    let x_beta = sys.anchor(beta)?;
    let first = beta
        .first()
        .ok_or_else(|| CoreError::invalid("beta must be a non-empty cylinder word"))?;
    let words = measure.shift().words_of_length(n_words, budget)?;
    let pot = measure.normalized_potential();
    let mut out = Vec::new();
    for w in &words {
        if !measure.shift().admits(w.last().unwrap(), first) {
            continue;
        }
        let weight = pot.log_word_weight(sys, w, &x_beta).exp();
        let lam = sys.word_contraction(w, &x_beta)?;
        out.push((weight, lam));
    }
    Ok((out, x_beta))
}

/// Full band table: direct masses for every hit band, plus the partition
/// total (which must equal 1 for normalized weights).
pub fn band_mass_table(
    measure: &GibbsMeasure,
    beta: &Word,
    xi_norm: f64,
    c: f64,
    budget: usize,
) -> Result<BandTable> {
    let n_xi = (c * xi_norm.ln()).floor() as usize;
    if n_xi < 1 {
        return Err(CoreError::invalid(format!(
            "c·log‖ξ‖ = {} < 1: no words to average",
            c * xi_norm.ln()
        )));
    }
    let (data, _) = word_data(measure, beta, n_xi, budget)?;
    let scale = xi_norm.powf(1.0 / 3.0);
    let floor_freq = xi_norm.powf(1.0 / 6.0);
    let mut rows: std::collections::BTreeMap<i64, f64> = std::collections::BTreeMap::new();
    let mut c_valid = true;
    for &(w, lam) in &data {
        let freq = lam * scale;
        if freq < floor_freq {
            c_valid = false;
        }
        *rows.entry(freq.floor() as i64).or_insert(0.0) += w;
    }
    let total: f64 = rows.values().sum();
    let max_band_mass = rows.values().cloned().fold(0.0, f64::max);
    Ok(BandTable {
        n_xi,
        xi_norm,
        c,
        rows: rows.into_iter().collect(),
        total,
        max_band_mass,
        c_valid,
    })
}

/// Single-band mass with the spec's admitted range `‖ξ‖^{1/6} ≤ n ≤ ‖ξ‖^{1/3}`.
pub fn frequency_band_mass(
    measure: &GibbsMeasure,
    beta: &Word,
    xi_norm: f64,
    band: i64,
    c: f64,
    route: BandRoute,
    budget: usize,
) -> Result<BandMass> {
    let lo = xi_norm.powf(1.0 / 6.0);
    let hi = xi_norm.powf(1.0 / 3.0);
    if (band as f64) < lo || band as f64 > hi {
        return Err(CoreError::BandOutOfRange(band, lo, hi));
    }
    let n_xi = (c * xi_norm.ln()).floor() as usize;
    if n_xi < 1 {
        return Err(CoreError::invalid("c·log‖ξ‖ < 1"));
    }
    let (data, x_beta) = word_data(measure, beta, n_xi, budget)?;
    let scale = xi_norm.powf(1.0 / 3.0);
    let mut direct = 0.0f64;
    let mut c_valid = true;
    for &(w, lam) in &data {
        let freq = lam * scale;
        if freq < lo {
            c_valid = false;
        }
        if freq >= band as f64 && freq < band as f64 + 1.0 {
            direct += w;
        }
    }
    if route == BandRoute::Direct {
        return Ok(BandMass {
            band,
            direct,
            mollified: None,
            discrepancy: None,
            bound: None,
            c_valid,
        });
    }

    // mollified route: indicator of I = [log(n/ξ^{1/3}), log((n+1)/ξ^{1/3})]
    // replaced by h = χ_J * hann_w with J = I widened by w, evaluated through
    // Fourier inversion against the twisted word sums (the 𝓛ⁿ orbit values).
    let i_lo = (band as f64 / scale).ln();
    let i_hi = ((band as f64 + 1.0) / scale).ln();
    let width = (i_hi - i_lo).max(1e-12);
    let w_moll = width; // mollifier width of the same order as the band
    let j_lo = i_lo - w_moll;
    let j_hi = i_hi + w_moll;
    let j_len = j_hi - j_lo;
    let j_mid = 0.5 * (j_lo + j_hi);

    // ĥ(η) = |J| sinc(π|J|η) e^{−2πiη·mid(J)} · hann_hat(wη)
    let h_hat = |eta: f64| -> Complex64 {
        let sinc = |x: f64| if x.abs() < 1e-12 { 1.0 } else { x.sin() / x };
        let rect = j_len * sinc(std::f64::consts::PI * j_len * eta);
        let u = w_moll * eta;
        let hann = if (1.0 - u * u).abs() < 1e-9 {
            0.5 // removable singularity of sinc(πu)/(1−u²) at u = ±1
        } else {
            sinc(std::f64::consts::PI * u) / (1.0 - u * u)
        };
        Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * eta * j_mid) * (rect * hann)
    };

    // S(η) = Σ_α w̃_α e^{2πiη log λ_α} = (𝓛_{2πη i}^{n(ξ)} 1)(x_β)
    let _ = &x_beta;
    let big_h = 40.0 / w_moll;
    let d_eta = (0.002f64).min(0.05 / j_len.max(1e-9));
    let steps = (2.0 * big_h / d_eta).ceil() as usize;
    let mut mollified = 0.0f64;
    for s in 0..=steps {
        let eta = -big_h + s as f64 * d_eta;
        let mut sum = Complex64::new(0.0, 0.0);
        for &(wt, lam) in &data {
            sum += Complex64::from_polar(wt, 2.0 * std::f64::consts::PI * eta * lam.ln());
        }
        let trap = if s == 0 || s == steps { 0.5 } else { 1.0 };
        mollified += trap * (h_hat(eta) * sum).re * d_eta;
    }

    // bound: extra mass the widened support can pick up + quadrature slack
    let mut widened_extra = 0.0f64;
    for &(wt, lam) in &data {
        let t = lam.ln();
        let inside_i = t >= i_lo && t < i_hi;
        let inside_supp = t >= j_lo - w_moll && t <= j_hi + w_moll;
        if inside_supp && !inside_i {
            widened_extra += wt;
        }
    }
    let h2_l1 = 8.0 / w_moll; // ‖h″‖₁ of the widened bump
    let tail = h2_l1 / (2.0 * std::f64::consts::PI.powi(2) * big_h);
    let quad = 0.01 * (1.0 + j_len);
    let bound = widened_extra + tail + quad;

    Ok(BandMass {
        band,
        direct,
        mollified: Some(mollified),
        discrepancy: Some((mollified - direct).abs()),
        bound: Some(bound),
        c_valid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    #[test]
    fn band_masses_partition_unity() {
        let mu = bundled::uni_mobius_gibbs();
        let beta = mu.system().word(&[0]);
        let table = band_mass_table(&mu, &beta, 1e5, 1.0, 10_000_000).unwrap();
        assert!(
            (table.total - 1.0).abs() <= 1e-10,
            "total = {}",
            table.total
        );
    }

    #[test]
    fn similitude_system_concentrates_on_few_bands() {
        // two ratios: |λ_α| takes at most n+1 values; the table must flag the
        // non-decay through a large max band mass
        let mu = crate::measures::GibbsMeasure::new(
            bundled::half_third_system_arc(),
            &crate::measures::GibbsPotential::LocallyConstant {
                values: vec![(0.5f64).ln(); 2],
            },
            1,
        )
        .unwrap();
        let beta = mu.system().word(&[0]);
        let table = band_mass_table(&mu, &beta, 2e4, 1.0, 1_000_000).unwrap();
        let n = table.n_xi;
        assert!(table.rows.len() <= n + 1, "{} rows", table.rows.len());
        assert!(table.max_band_mass >= 1.0 / (n as f64 + 1.0));
    }

    #[test]
    fn direct_and_mollified_agree_within_bound() {
        let mu = bundled::uni_mobius_gibbs();
        let beta = mu.system().word(&[1]);
        let xi_norm = 1e5;
        let table = band_mass_table(&mu, &beta, xi_norm, 1.0, 1_000_000).unwrap();
        // pick the heaviest band inside the admitted range
        let lo = xi_norm.powf(1.0 / 6.0);
        let hi = xi_norm.powf(1.0 / 3.0);
        let band = table
            .rows
            .iter()
            .filter(|(b, _)| (*b as f64) >= lo && (*b as f64) <= hi)
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .map(|&(b, _)| b)
            .expect("some band in range");
        let bm = frequency_band_mass(
            &mu,
            &beta,
            xi_norm,
            band,
            1.0,
            BandRoute::Mollified,
            1_000_000,
        )
        .unwrap();
        let m = bm.mollified.unwrap();
        // h ≥ χ_I: mollified dominates direct (up to quadrature slack)
        assert!(m >= bm.direct - 0.02, "mollified {m} < direct {}", bm.direct);
        assert!(
            bm.discrepancy.unwrap() <= bm.bound.unwrap(),
            "discrepancy {} > bound {}",
            bm.discrepancy.unwrap(),
            bm.bound.unwrap()
        );
    }

    #[test]
    fn out_of_range_band_rejected() {
        let mu = bundled::uni_mobius_gibbs();
        let beta = mu.system().word(&[0]);
        assert!(matches!(
            frequency_band_mass(&mu, &beta, 1e5, 2, 1.0, BandRoute::Direct, 100_000),
            Err(CoreError::BandOutOfRange(..))
        ));
    }
}
