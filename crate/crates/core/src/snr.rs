//! Strong-light moments and signal-to-noise ratios at arbitrary ε.
//!
//! Heterodyne uses the statistic `w = μν*`, direct detection `w = n − m`.
//! In both cases the signal is `S = |⟨w⟩|²` and the noise is the per-shot
//! variance of `w`. These ratios are meaningful as figures of merit once
//! many measurements are combined; for `ε ≪ 1` the Fisher matrix is the
//! better yardstick.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::povm::Scheme;

/// First and second moments of direct-detection photon counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentReport {
    pub mean_n: f64,
    pub mean_m: f64,
    pub var_n: f64,
    pub var_m: f64,
    pub cov_nm: f64,
}

/// Which averaging protocol produced an [`SnrReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    SingleDelta,
    /// Signal and noise averaged over phases `δ₁` and `δ₁ + π/2`.
    TwoDelta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnrReport {
    pub scheme: Scheme,
    pub protocol: Protocol,
    pub signal: f64,
    pub noise: f64,
    pub ratio: f64,
}

impl SnrReport {
    fn new(scheme: Scheme, protocol: Protocol, signal: f64, noise: f64) -> Self {
        let ratio = if signal == 0.0 { 0.0 } else { signal / noise };
        Self { scheme, protocol, signal, noise, ratio }
    }
}

/// Heterodyne fourth-order moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeterodyneMoments {
    /// `⟨|μν*|²⟩ = (1 + ε/2)² + ε²|g|²/4`
    pub fourth_moment: f64,
    /// `S = |⟨μν*⟩|² = ε²|g|²/4`
    pub signal: f64,
    /// `N = (1 + ε/2)²`
    pub noise: f64,
}

fn check(epsilon: f64, g_abs: f64) -> Result<()> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(domain(format!("epsilon must be finite and >= 0, got {epsilon}")));
    }
    if !(0.0..=1.0).contains(&g_abs) {
        return Err(domain(format!("|g| must lie in [0, 1], got {g_abs}")));
    }
    Ok(())
}

pub fn heterodyne_moments(epsilon: f64, g: Complex64) -> Result<HeterodyneMoments> {
    check(epsilon, g.norm())?;
    let noise = (1.0 + 0.5 * epsilon).powi(2);
    let signal = 0.25 * epsilon * epsilon * g.norm_sqr();
    Ok(HeterodyneMoments { fourth_moment: noise + signal, signal, noise })
}

/// `S/N = ε²|g|²/(2 + ε)²`
pub fn heterodyne_snr(epsilon: f64, g_abs: f64) -> Result<SnrReport> {
    let m = heterodyne_moments(epsilon, Complex64::from(g_abs))?;
    Ok(SnrReport::new(Scheme::Heterodyne, Protocol::SingleDelta, m.signal, m.noise))
}

/// Photon-count moments behind a beam splitter with phase `δ`:
/// thermal (Bose) statistics per port, correlated through `Im(ge^{−iδ})`.
pub fn direct_moments(epsilon: f64, g: Complex64, delta: f64) -> Result<MomentReport> {
    check(epsilon, g.norm())?;
    let rotated = g * Complex64::from_polar(1.0, -delta);
    let (re, im) = (rotated.re, rotated.im);
    let mean_n = 0.5 * epsilon * (1.0 + re);
    let mean_m = 0.5 * epsilon * (1.0 - re);
    Ok(MomentReport {
        mean_n,
        mean_m,
        var_n: mean_n + mean_n * mean_n,
        var_m: mean_m + mean_m * mean_m,
        cov_nm: 0.25 * epsilon * epsilon * im * im,
    })
}

/// Single-phase direct detection with `w = n − m`:
/// `S = ε² Re(ge^{−iδ})²`, `N = ε + (ε²/2)(1 + Re² − Im²)`.
pub fn direct_snr(epsilon: f64, g: Complex64, delta: f64) -> Result<SnrReport> {
    let m = direct_moments(epsilon, g, delta)?;
    let signal = (m.mean_n - m.mean_m).powi(2);
    let noise = m.var_n + m.var_m - 2.0 * m.cov_nm;
    Ok(SnrReport::new(Scheme::Direct, Protocol::SingleDelta, signal, noise))
}

/// Two-phase average: `S̄ = ε²|g|²/2`, `N̄ = ε + ε²/2`, so
/// `S̄/N̄ = ε|g|²/(2 + ε)`.
pub fn direct_snr_avg(epsilon: f64, g_abs: f64) -> Result<SnrReport> {
    check(epsilon, g_abs)?;
    let signal = 0.5 * epsilon * epsilon * g_abs * g_abs;
    let noise = epsilon + 0.5 * epsilon * epsilon;
    Ok(SnrReport::new(Scheme::Direct, Protocol::TwoDelta, signal, noise))
}

/// One row of [`regime_compare`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeRow {
    pub epsilon: f64,
    pub direct: f64,
    pub heterodyne: f64,
    /// `direct / heterodyne = (2 + ε)/ε`, independent of `|g|` and reported
    /// as that closed form even when both ratios vanish; infinite at ε = 0.
    pub ratio: f64,
}

/// Two-phase direct detection against heterodyne across an ε grid.
pub fn regime_compare(epsilons: &[f64], g_abs: f64) -> Result<Vec<RegimeRow>> {
    epsilons
        .iter()
        .map(|&epsilon| {
            let direct = direct_snr_avg(epsilon, g_abs)?.ratio;
            let heterodyne = heterodyne_snr(epsilon, g_abs)?.ratio;
            Ok(RegimeRow { epsilon, direct, heterodyne, ratio: (2.0 + epsilon) / epsilon })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn heterodyne_values() {
        let m = heterodyne_moments(2.0, Complex64::from(1.0)).unwrap();
        assert_eq!((m.fourth_moment, m.noise, m.signal), (5.0, 4.0, 1.0));
        let vac = heterodyne_moments(0.0, Complex64::from(0.5)).unwrap();
        assert_eq!((vac.noise, vac.signal), (1.0, 0.0));
        assert_eq!(heterodyne_snr(2.0, 1.0).unwrap().ratio, 0.25);
        assert_eq!(heterodyne_snr(0.3, 0.0).unwrap().ratio, 0.0);
        assert_relative_eq!(heterodyne_snr(0.1, 0.6).unwrap().ratio, 0.01 * 0.36 / 4.41, max_relative = 1e-14);
    }

    #[test]
    fn direct_moment_values() {
        let m = direct_moments(4.0, Complex64::from(0.8), 0.0).unwrap();
        assert_relative_eq!(m.mean_n, 3.6, max_relative = 1e-15);
        assert_relative_eq!(m.mean_m, 0.4, max_relative = 1e-14);
        assert_eq!(m.cov_nm, 0.0);

        let eps = 0.7;
        let m = direct_moments(eps, Complex64::from(0.0), 1.0).unwrap();
        assert_eq!(m.mean_n, eps / 2.0);
        assert_eq!(m.mean_m, eps / 2.0);
        assert_eq!(m.cov_nm, 0.0);
        assert_relative_eq!(m.var_n, eps / 2.0 + eps * eps / 4.0, max_relative = 1e-15);

        let m = direct_moments(1.0, Complex64::new(0.0, 0.6), 0.0).unwrap();
        assert_relative_eq!(m.cov_nm, 0.09, max_relative = 1e-14);
    }

    #[test]
    fn averaged_direct_values() {
        assert_eq!(direct_snr_avg(2.0, 1.0).unwrap().ratio, 0.5);
        assert_relative_eq!(direct_snr_avg(0.1, 1.0).unwrap().ratio, 0.1 / 2.1, max_relative = 1e-14);
        assert!((direct_snr_avg(1e6, 0.7).unwrap().ratio - 0.49).abs() < 1e-5);
    }

    #[test]
    fn two_delta_average_of_single_delta_reports() {
        let g = Complex64::from_polar(0.9, 0.4);
        for eps in [0.1, 1.0, 2.0, 10.0] {
            let a = direct_snr(eps, g, 0.3).unwrap();
            let b = direct_snr(eps, g, 0.3 + FRAC_PI_2).unwrap();
            let avg = direct_snr_avg(eps, g.norm()).unwrap();
            assert_relative_eq!(0.5 * (a.signal + b.signal), avg.signal, max_relative = 1e-12);
            assert_relative_eq!(0.5 * (a.noise + b.noise), avg.noise, max_relative = 1e-12);
        }
    }

    #[test]
    fn regime_table() {
        let rows = regime_compare(&[0.01, 2.0, 1e9], 1.0).unwrap();
        assert_relative_eq!(rows[0].ratio, 201.0, max_relative = 1e-10);
        assert_eq!((rows[1].direct, rows[1].heterodyne, rows[1].ratio), (0.5, 0.25, 2.0));
        assert!((rows[2].ratio - 1.0).abs() < 1e-8);
        let zero = regime_compare(&[2.0], 0.0).unwrap();
        assert_eq!((zero[0].direct, zero[0].heterodyne, zero[0].ratio), (0.0, 0.0, 2.0));
    }

    #[test]
    fn limits() {
        let eps = 1e-3;
        let small = heterodyne_snr(eps, 0.8).unwrap().ratio / (eps * eps * 0.64 / 4.0);
        assert!((small - 1.0).abs() < 0.02);
        for g in [0.3, 1.0] {
            assert!((heterodyne_snr(100.0, g).unwrap().ratio / (g * g) - 1.0).abs() < 0.05);
            assert!((direct_snr_avg(100.0, g).unwrap().ratio / (g * g) - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(heterodyne_snr(-1.0, 0.5).is_err());
        assert!(direct_snr_avg(1.0, 1.5).is_err());
        assert!(direct_moments(f64::NAN, Complex64::from(0.0), 0.0).is_err());
    }

    proptest! {
        #[test]
        fn moment_cauchy_schwarz(eps in 0.0..200.0f64, r in 0.0..=1.0f64, phi in -3.2..3.2f64, delta in -3.2..3.2f64) {
            let m = direct_moments(eps, Complex64::from_polar(r, phi), delta).unwrap();
            prop_assert!(m.var_n >= 0.0 && m.var_m >= 0.0);
            prop_assert!(m.cov_nm.abs() <= (m.var_n * m.var_m).sqrt() * (1.0 + 1e-12) + 1e-300);
        }
    }
}
