use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use nlinterf::simulate::{direct_moments_mc, empirical_snr, heterodyne_moments_mc, Estimate, SnrStatistic};
use nlinterf::snr::{direct_moments, direct_snr, direct_snr_avg, heterodyne_moments, heterodyne_snr};
use nlinterf::{CoherenceParams, Complex64, StreamId};

const SHOTS: usize = 1_000_000;

fn two_delta() -> SnrStatistic {
    SnrStatistic::CountDifference { deltas: vec![0.0, FRAC_PI_2] }
}

fn close(e: Estimate, target: f64, what: &str) {
    assert!(e.z_score(target) <= 5.0, "{what}: {} ± {} vs {target}", e.value, e.se);
}

#[test]
fn closed_form_moments_match_samplers() {
    let gs = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.6, 0.0),
        Complex64::new(0.8, 0.3),
        Complex64::from_polar(1.0, FRAC_PI_4),
    ];
    let delta = 0.7;
    let mut stream = 0;
    for eps in [0.1, 1.0, 2.0, 10.0] {
        for g in gs {
            let p = CoherenceParams::from_complex(eps, g).unwrap();
            stream += 1;
            let (mc, se) = direct_moments_mc(&p, delta, SHOTS, StreamId::new(100, stream)).unwrap();
            let cf = direct_moments(eps, g, delta).unwrap();
            let label = format!("eps {eps}, g {g}");
            close(Estimate { value: mc.mean_n, se: se.mean_n }, cf.mean_n, &format!("{label} mean_n"));
            close(Estimate { value: mc.mean_m, se: se.mean_m }, cf.mean_m, &format!("{label} mean_m"));
            close(Estimate { value: mc.var_n, se: se.var_n }, cf.var_n, &format!("{label} var_n"));
            close(Estimate { value: mc.var_m, se: se.var_m }, cf.var_m, &format!("{label} var_m"));
            close(Estimate { value: mc.cov_nm, se: se.cov_nm }, cf.cov_nm, &format!("{label} cov_nm"));

            let ([re, im], fourth) = heterodyne_moments_mc(&p, SHOTS, StreamId::new(200, stream)).unwrap();
            let h = heterodyne_moments(eps, g).unwrap();
            close(re, 0.5 * eps * g.re, &format!("{label} Re<mu nu*>"));
            close(im, 0.5 * eps * g.im, &format!("{label} Im<mu nu*>"));
            close(fourth, h.fourth_moment, &format!("{label} <|mu nu*|^2>"));
        }
    }
}

#[test]
fn heterodyne_fourth_moment_within_one_percent() {
    let p = CoherenceParams::new(2.0, 1.0, 0.0).unwrap();
    let (_, fourth) = heterodyne_moments_mc(&p, SHOTS, StreamId::new(300, 0)).unwrap();
    assert!((fourth.value / 5.0 - 1.0).abs() < 0.01, "{fourth:?}");
}

#[test]
fn strong_light_ratios() {
    let p = CoherenceParams::new(2.0, 1.0, 0.0).unwrap();
    let het = empirical_snr(&p, &SnrStatistic::CrossProduct, SHOTS, StreamId::new(400, 0)).unwrap();
    assert!((het.ratio.value / 0.25 - 1.0).abs() < 0.02, "{het:?}");
    close(het.signal, 1.0, "heterodyne signal");
    close(het.noise, 4.0, "heterodyne noise");

    let dir = empirical_snr(&p, &two_delta(), SHOTS, StreamId::new(400, 1)).unwrap();
    assert!((dir.ratio.value / 0.5 - 1.0).abs() < 0.02, "{dir:?}");
    close(dir.signal, 2.0, "direct signal");
    close(dir.noise, 4.0, "direct noise");
}

#[test]
fn incoherent_light_has_no_signal() {
    let p = CoherenceParams::new(2.0, 0.0, 0.0).unwrap();
    for (k, stat) in [SnrStatistic::CrossProduct, two_delta()].into_iter().enumerate() {
        let r = empirical_snr(&p, &stat, 200_000, StreamId::new(500, k as u64)).unwrap();
        close(r.ratio, 0.0, "ratio at g = 0");
    }
}

#[test]
fn single_phase_direct_matches_closed_form() {
    let g = Complex64::from_polar(0.9, 0.5);
    let p = CoherenceParams::from_complex(1.0, g).unwrap();
    let stat = SnrStatistic::CountDifference { deltas: vec![0.2] };
    let r = empirical_snr(&p, &stat, SHOTS, StreamId::new(600, 0)).unwrap();
    let cf = direct_snr(1.0, g, 0.2).unwrap();
    close(r.signal, cf.signal, "signal");
    close(r.noise, cf.noise, "noise");
    close(r.ratio, cf.ratio, "ratio");
}

#[test]
fn sampled_ratios_follow_closed_forms_at_large_and_small_epsilon() {
    let mut stream = 0;
    for eps in [0.01, 10.0, 50.0] {
        for g_abs in [0.6, 1.0] {
            let p = CoherenceParams::new(eps, g_abs, 0.0).unwrap();
            stream += 1;
            let het = empirical_snr(&p, &SnrStatistic::CrossProduct, SHOTS, StreamId::new(700, stream)).unwrap();
            close(het.ratio, heterodyne_snr(eps, g_abs).unwrap().ratio, &format!("heterodyne eps {eps}"));
            let dir = empirical_snr(&p, &two_delta(), SHOTS, StreamId::new(800, stream)).unwrap();
            close(dir.ratio, direct_snr_avg(eps, g_abs).unwrap().ratio, &format!("direct eps {eps}"));
        }
    }
}

#[test]
fn saturation_at_very_strong_light() {
    for g_abs in [0.5, 0.8, 1.0] {
        let target = g_abs * g_abs;
        assert!((heterodyne_snr(100.0, g_abs).unwrap().ratio / target - 1.0).abs() <= 0.05);
        assert!((direct_snr_avg(100.0, g_abs).unwrap().ratio / target - 1.0).abs() <= 0.05);
    }
    // Short of saturation the closed forms sit well below |g|².
    assert!(heterodyne_snr(10.0, 1.0).unwrap().ratio < 0.7);
    assert!(direct_snr_avg(10.0, 1.0).unwrap().ratio < 0.84);
}
