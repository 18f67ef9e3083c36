use std::f64::consts::FRAC_PI_2;

use nlinterf::fisher::{
    adaptive_fisher_bound, cramer_rao, fisher_analytic, fisher_numeric, fisher_numeric_scheme, locc_bound,
    locc_bound_from_povm, trace_norm, AdaptivePolicy, AdaptiveTree, FD_STEP,
};
use nlinterf::povm::{direct_detection_povm, discrete_povm, gjc_entangled_povm, Measurement};
use nlinterf::{Complex64, FisherMatrix, GridSpec, Scheme};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Coarser than the default grid; converged far beyond the tolerances used
/// here.
const FAST_GRID: GridSpec = GridSpec { extent: 6.0, points: 101 };

fn random_tuple(rng: &mut ChaCha20Rng, max_eps: f64) -> (f64, Complex64, f64) {
    let eps = rng.random_range(1e-4..=max_eps);
    let g = Complex64::from_polar(rng.random_range(0.0..0.9), rng.random_range(-3.2..3.2));
    (eps, g, rng.random_range(-3.2..3.2))
}

fn assert_entrywise(numeric: &FisherMatrix, analytic: &FisherMatrix, slack: f64) {
    for (a, b) in numeric.matrix().iter().zip(analytic.matrix().iter()) {
        let tol = 1e-6f64.max(0.02 * b.abs()) + slack;
        assert!((a - b).abs() <= tol, "numeric {numeric:?} vs analytic {analytic:?}");
    }
}

#[test]
fn numeric_matches_closed_forms_for_all_schemes() {
    let mut rng = ChaCha20Rng::seed_from_u64(17);
    for scheme in Scheme::ALL {
        for _ in 0..50 {
            let (eps, g, delta) = random_tuple(&mut rng, 0.05);
            let numeric = fisher_numeric_scheme(scheme, eps, g, delta, FAST_GRID).unwrap();
            let analytic = fisher_analytic(scheme, eps, g, delta).unwrap();
            let slack = if scheme.is_local() { 10.0 * eps.powi(3) } else { 0.0 };
            assert_entrywise(&numeric, &analytic, slack);
        }
    }
}

#[test]
fn every_fisher_matrix_is_psd() {
    let mut rng = ChaCha20Rng::seed_from_u64(18);
    for scheme in Scheme::ALL {
        for _ in 0..10 {
            let (eps, g, delta) = random_tuple(&mut rng, 1.0);
            let f = fisher_numeric_scheme(scheme, eps, g, delta, GridSpec { extent: 6.0, points: 41 }).unwrap();
            assert!(f.is_psd(), "{scheme}: {f:?}");
        }
    }
}

#[test]
fn separation_between_nonlocal_and_local() {
    let mut rng = ChaCha20Rng::seed_from_u64(19);
    for _ in 0..10 {
        let (eps, g, delta) = random_tuple(&mut rng, 0.1);
        let bound = locc_bound(eps).unwrap() + 10.0 * eps.powi(3);
        let direct = trace_norm(&fisher_numeric_scheme(Scheme::Direct, eps, g, delta, FAST_GRID).unwrap());
        assert!(direct >= eps * (1.0 - 1e-9));
        for scheme in [Scheme::Heterodyne, Scheme::Homodyne] {
            let local = trace_norm(&fisher_numeric_scheme(scheme, eps, g, delta, FAST_GRID).unwrap());
            assert!(local <= bound, "{scheme} at eps {eps}: {local} > {bound}");
            assert!(direct / local >= (1.0 - eps) / eps);
        }
    }
}

#[test]
fn bound_reports() {
    let g = Complex64::new(0.6, 0.0);
    let direct = direct_detection_povm(0.0);
    let r = locc_bound_from_povm(Measurement::Discrete(&direct), 0.1, g).unwrap();
    assert!(!r.ppt);
    assert!(!r.satisfied);
    assert!((r.fisher_trace_norm - 0.15625).abs() < 1e-9);

    let r = locc_bound_from_povm(Measurement::Discrete(&gjc_entangled_povm(0.0)), 0.1, g).unwrap();
    assert!(!r.ppt);
    assert!((r.fisher_trace_norm - 0.078125).abs() < 1e-9);

    assert_eq!(locc_bound(0.0).unwrap(), 0.0);
    assert!((locc_bound(0.1).unwrap() - 0.011111111111111112).abs() < 1e-17);
    assert!(locc_bound(1.0).is_err());
}

#[test]
fn cramer_rao_examples() {
    let f = fisher_analytic(Scheme::Direct, 0.1, Complex64::new(0.6, 0.0), 0.0).unwrap();
    let crb = cramer_rao(&f, 10_000).unwrap();
    assert!((crb.variance(0) - 6.4e-4).abs() < 1e-15);
    assert!(crb.variance(1).is_infinite());

    let het = fisher_analytic(Scheme::Heterodyne, 0.01, Complex64::new(0.0, 0.0), 0.0).unwrap();
    let crb = cramer_rao(&het, 1_000_000).unwrap();
    assert!((crb.variance(0) - 0.02).abs() < 1e-12);
    assert!((crb.variance(1) - 0.02).abs() < 1e-12);
}

#[test]
fn adaptive_identical_steps() {
    let step = fisher_analytic(Scheme::Heterodyne, 0.01, Complex64::new(0.0, 0.0), 0.0).unwrap();
    let steps: Vec<Vec<FisherMatrix>> = (0..7).map(|_| vec![step]).collect();
    assert!((adaptive_fisher_bound(&steps) - 7e-4).abs() < 1e-15);
    assert_eq!(adaptive_fisher_bound(&[]), 0.0);
}

#[test]
fn adaptive_tree_joint_information_is_subadditive() {
    // Each history selects its own random phase and scheme at step two.
    let mut rng = ChaCha20Rng::seed_from_u64(23);
    for _ in 0..20 {
        let phases: Vec<f64> = (0..4).map(|_| rng.random_range(-3.2..3.2)).collect();
        let scheme = if rng.random_bool(0.5) { Scheme::Direct } else { Scheme::Entangled };
        let policy: Box<AdaptivePolicy> = Box::new(move |h: &[usize]| {
            let delta = match h.first() {
                None => phases[3],
                Some(&y) => phases[y.min(2)],
            };
            discrete_povm(scheme, delta).unwrap()
        });
        let arity = discrete_povm(scheme, 0.0).unwrap().len();
        let tree = AdaptiveTree { epsilon: rng.random_range(0.01..0.5), depth: 2, arity, policy: policy.as_ref() };
        let g = Complex64::from_polar(rng.random_range(0.0..0.9), rng.random_range(-3.2..3.2));
        let joint = trace_norm(&fisher_numeric(&tree, g, FD_STEP).unwrap());
        let bound = adaptive_fisher_bound(&tree.conditional_fishers(g).unwrap());
        assert!(joint <= bound + 1e-9, "{joint} > {bound}");
    }
}

#[test]
fn two_step_switching_phase() {
    let policy: &AdaptivePolicy = &|h: &[usize]| match h.first() {
        Some(&y) if y > 0 => direct_detection_povm(FRAC_PI_2),
        _ => direct_detection_povm(0.0),
    };
    let tree = AdaptiveTree { epsilon: 0.1, depth: 2, arity: 3, policy };
    let g = Complex64::new(0.3, -0.2);
    let joint = fisher_numeric(&tree, g, FD_STEP).unwrap();
    // Step one always δ = 0; step two δ = π/2 with probability ε.
    let f0 = fisher_analytic(Scheme::Direct, 0.1, g, 0.0).unwrap();
    let f1 = fisher_analytic(Scheme::Direct, 0.1, g, FRAC_PI_2).unwrap();
    let expected = f0.scaled(1.9) + f1.scaled(0.1);
    assert!(joint.max_abs_diff(&expected) < 1e-7, "{joint:?} vs {expected:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn direct_trace_norm_at_least_epsilon(eps in 1e-4..1.0f64, r in 0.0..0.999f64, phi in -3.2..3.2f64, delta in -3.2..3.2f64) {
        let f = fisher_analytic(Scheme::Direct, eps, Complex64::from_polar(r, phi), delta).unwrap();
        prop_assert!(trace_norm(&f) >= eps * (1.0 - 1e-12));
        prop_assert!(f.is_psd());
    }

    #[test]
    fn entangled_is_half_of_direct(eps in 0.0..1.0f64, r in 0.0..0.95f64, phi in -3.2..3.2f64, delta in -3.2..3.2f64) {
        let g = Complex64::from_polar(r, phi);
        let d = fisher_numeric_scheme(Scheme::Direct, eps, g, delta, GridSpec::default()).unwrap();
        let e = fisher_numeric_scheme(Scheme::Entangled, eps, g, delta, GridSpec::default()).unwrap();
        prop_assert!(e.max_abs_diff(&d.scaled(0.5)) <= 1e-12);
    }
}
