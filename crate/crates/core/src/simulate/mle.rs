//! Maximum-likelihood estimation of `g` and trial ensembles.

use std::f64::consts::PI;

use nalgebra::{Matrix2, SymmetricEigen, Vector2};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::record::{DeltaSchedule, MeasurementRecord, Outcome};
use super::sampling::sample_record;
use crate::error::{domain, Result};
use crate::fisher::{
    cramer_rao_total, fisher_analytic, gaussian_fisher, heterodyne_covariance_family, homodyne_covariance_family,
    CramerRaoBound, FisherMatrix,
};
use crate::povm::{discrete_povm, Scheme};
use crate::rng::StreamId;
use crate::thermal::CoherenceParams;

/// Estimates are kept inside `|g| ≤ 1 − BOUNDARY_MARGIN`.
pub const BOUNDARY_MARGIN: f64 = 1e-9;
/// Convergence threshold on the log-likelihood gradient, per shot.
pub const GRADIENT_TOLERANCE: f64 = 1e-9;
/// Seed grid points per axis on `[−1, 1]`.
pub const SEED_GRID: usize = 41;
const MAX_ITERATIONS: usize = 200;
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimationResult {
    pub g_hat: Complex64,
    pub loglik: f64,
    pub converged: bool,
    /// The likelihood is flat in `g` (no shots, or only uninformative
    /// outcomes); `g_hat` is then 0.
    pub degenerate: bool,
    pub iterations: usize,
}

/// Log-likelihood with gradient and a negative-semidefinite curvature.
trait LogLikelihood {
    fn value(&self, g: Vector2<f64>) -> f64;
    fn derivatives(&self, g: Vector2<f64>) -> (Vector2<f64>, Matrix2<f64>);
    fn is_flat(&self) -> bool;
}

/// Discrete outcomes: `P(y|δ,g) = a + b·g` exactly, so gradient and Hessian
/// are analytic.
struct AffineLikelihood {
    terms: Vec<(f64, f64, Vector2<f64>)>,
}

impl AffineLikelihood {
    fn new(record: &MeasurementRecord) -> Result<Self> {
        let mut counts: Vec<(u64, usize, f64)> = Vec::new();
        for s in &record.shots {
            let Outcome::Discrete(k) = s.outcome else {
                return Err(domain("discrete likelihood needs discrete outcomes"));
            };
            match counts.iter_mut().find(|(b, kk, _)| *b == s.delta.to_bits() && *kk == k) {
                Some(c) => c.2 += 1.0,
                None => counts.push((s.delta.to_bits(), k, 1.0)),
            }
        }
        let eps = record.epsilon;
        let terms = counts
            .into_iter()
            .map(|(bits, k, n)| {
                let e = discrete_povm(record.scheme, f64::from_bits(bits))?.fock_elements()[k];
                let [b1, b2] = e.born_gradient(eps);
                Ok((n, e.born_probability(eps, Complex64::from(0.0)), Vector2::new(b1, b2)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { terms })
    }
}

impl LogLikelihood for AffineLikelihood {
    fn value(&self, g: Vector2<f64>) -> f64 {
        let mut total = 0.0;
        for (n, a, b) in &self.terms {
            let p = a + b.dot(&g);
            if p <= 0.0 {
                return f64::NEG_INFINITY;
            }
            total += n * p.ln();
        }
        total
    }

    fn derivatives(&self, g: Vector2<f64>) -> (Vector2<f64>, Matrix2<f64>) {
        let mut grad = Vector2::zeros();
        let mut hess = Matrix2::zeros();
        for (n, a, b) in &self.terms {
            let p = a + b.dot(&g);
            grad += b * (n / p);
            hess -= b * b.transpose() * (n / (p * p));
        }
        (grad, hess)
    }

    fn is_flat(&self) -> bool {
        self.terms.iter().all(|(_, _, b)| b.norm() == 0.0)
    }
}

/// Zero-mean Gaussian outcomes grouped by phase, each summarized by its
/// count and mean outer product. Curvature is the expected (Fisher) one.
struct GaussianLikelihood {
    epsilon: f64,
    real: bool,
    groups: Vec<(f64, f64, Matrix2<Complex64>)>,
}

impl GaussianLikelihood {
    fn new(record: &MeasurementRecord) -> Result<Self> {
        let real = record.scheme == Scheme::Homodyne;
        let mut groups: Vec<(f64, f64, Matrix2<Complex64>)> = Vec::new();
        for s in &record.shots {
            let (v, key) = match s.outcome {
                Outcome::Heterodyne { mu, nu } => (nalgebra::Vector2::new(mu, nu), 0.0),
                Outcome::Homodyne { x, y } => (nalgebra::Vector2::new(Complex64::from(x), Complex64::from(y)), s.delta),
                Outcome::Discrete(_) => return Err(domain("Gaussian likelihood needs continuous outcomes")),
            };
            let outer = v * v.adjoint();
            match groups.iter_mut().find(|(d, _, _)| d.to_bits() == key.to_bits()) {
                Some(grp) => {
                    grp.1 += 1.0;
                    grp.2 += outer;
                }
                None => groups.push((key, 1.0, outer)),
            }
        }
        for grp in &mut groups {
            grp.2 /= Complex64::from(grp.1);
        }
        Ok(Self { epsilon: record.epsilon, real, groups })
    }

    fn family(&self, g: Vector2<f64>, delta: f64) -> [Matrix2<Complex64>; 3] {
        let g = Complex64::new(g[0], g[1]);
        if self.real {
            homodyne_covariance_family(self.epsilon, g, delta)
        } else {
            heterodyne_covariance_family(self.epsilon, g)
        }
    }

    /// Per-shot weight of `ln det C + tr(C⁻¹S)` and the normalization constant.
    fn scale(&self) -> (f64, f64) {
        if self.real {
            (0.5, (2.0 * PI).ln())
        } else {
            (1.0, 2.0 * PI.ln())
        }
    }
}

impl LogLikelihood for GaussianLikelihood {
    fn value(&self, g: Vector2<f64>) -> f64 {
        let (k, norm) = self.scale();
        let mut total = 0.0;
        for (delta, n, s) in &self.groups {
            let [c, _, _] = self.family(g, *delta);
            let det = c.determinant().re;
            let Some(inv) = c.try_inverse() else {
                return f64::NEG_INFINITY;
            };
            if det <= 0.0 {
                return f64::NEG_INFINITY;
            }
            total -= n * (k * (det.ln() + (inv * s).trace().re) + norm);
        }
        total
    }

    fn derivatives(&self, g: Vector2<f64>) -> (Vector2<f64>, Matrix2<f64>) {
        let (k, _) = self.scale();
        let mut grad = Vector2::zeros();
        let mut curv = Matrix2::zeros();
        for (delta, n, s) in &self.groups {
            let [c, d1, d2] = self.family(g, *delta);
            let Some(inv) = c.try_inverse() else {
                continue;
            };
            let resid = Matrix2::identity() - inv * s;
            grad[0] -= n * k * (inv * d1 * resid).trace().re;
            grad[1] -= n * k * (inv * d2 * resid).trace().re;
            if let Ok(f) = gaussian_fisher(&c, [&d1, &d2], self.real) {
                curv -= f.matrix() * *n;
            }
        }
        (grad, curv)
    }

    fn is_flat(&self) -> bool {
        self.epsilon == 0.0
    }
}

fn project(g: Vector2<f64>) -> Vector2<f64> {
    let r = g.norm();
    let limit = 1.0 - BOUNDARY_MARGIN;
    if r > limit {
        g * (limit / r)
    } else {
        g
    }
}

/// `(−H)⁺ ∇` with an eigenvalue cutoff relative to the largest curvature.
fn newton_direction(grad: Vector2<f64>, curv: Matrix2<f64>) -> Vector2<f64> {
    let eig = SymmetricEigen::new(-curv);
    let largest = eig.eigenvalues.amax();
    let mut dir = Vector2::zeros();
    for j in 0..2 {
        let lambda = eig.eigenvalues[j];
        if largest > 0.0 && lambda > 1e-12 * largest {
            let v: Vector2<f64> = eig.eigenvectors.column(j).into_owned();
            dir += v * (v.dot(&grad) / lambda);
        }
    }
    dir
}

fn maximize(l: &dyn LogLikelihood, shots: f64) -> EstimationResult {
    let limit = 1.0 - BOUNDARY_MARGIN;
    let mut g = Vector2::zeros();
    let mut best = l.value(g);
    for i in 0..SEED_GRID {
        for j in 0..SEED_GRID {
            let step = 2.0 / (SEED_GRID - 1) as f64;
            let cand = Vector2::new(-1.0 + i as f64 * step, -1.0 + j as f64 * step);
            if cand.norm() > limit {
                continue;
            }
            let v = l.value(cand);
            if v > best {
                best = v;
                g = cand;
            }
        }
    }

    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        let (grad, curv) = l.derivatives(g);
        if grad.norm() / shots < GRADIENT_TOLERANCE {
            converged = true;
            break;
        }
        iterations += 1;
        let dir = newton_direction(grad, curv);
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..MAX_HALVINGS {
            let cand = project(g + dir * t);
            let v = l.value(cand);
            if v > best {
                g = cand;
                best = v;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            // Stalled: optimal on the boundary, or at the optimum to rounding.
            let r = g.norm();
            let tangential = if r >= limit * (1.0 - 1e-12) {
                let n = g / r;
                (grad - n * grad.dot(&n)).norm()
            } else {
                grad.norm()
            };
            converged = tangential / shots < GRADIENT_TOLERANCE.sqrt();
            break;
        }
    }
    EstimationResult { g_hat: Complex64::new(g[0], g[1]), loglik: best, converged, degenerate: false, iterations }
}

/// Joint maximum-likelihood estimate of `g` over `|g| ≤ 1` with known ε.
///
/// A 41×41 grid seeds damped Newton refinement. Discrete schemes use the
/// exact Hessian; Gaussian schemes use Fisher scoring.
pub fn mle_estimate(record: &MeasurementRecord) -> Result<EstimationResult> {
    let flat = |loglik| EstimationResult {
        g_hat: Complex64::from(0.0),
        loglik,
        converged: false,
        degenerate: true,
        iterations: 0,
    };
    if record.shots.is_empty() {
        return Ok(flat(0.0));
    }
    let l: Box<dyn LogLikelihood> = if record.scheme.is_discrete() {
        Box::new(AffineLikelihood::new(record)?)
    } else {
        Box::new(GaussianLikelihood::new(record)?)
    };
    if l.is_flat() {
        return Ok(flat(l.value(Vector2::zeros())));
    }
    Ok(maximize(l.as_ref(), record.len() as f64))
}

/// Expected total Fisher matrix of a schedule: discrete schemes use the
/// weak-light closed forms, continuous ones the exact Gaussian laws that
/// [`sample_record`] draws from.
pub fn schedule_fisher(
    params: &CoherenceParams,
    scheme: Scheme,
    schedule: &DeltaSchedule,
    shots: usize,
) -> Result<FisherMatrix> {
    schedule.check(shots)?;
    let (eps, g) = (params.epsilon(), params.g());
    let per_delta = |delta: f64| -> Result<FisherMatrix> {
        match scheme {
            Scheme::Direct | Scheme::Entangled => fisher_analytic(scheme, eps, g, delta),
            Scheme::Heterodyne => {
                let [c, d1, d2] = heterodyne_covariance_family(eps, g);
                gaussian_fisher(&c, [&d1, &d2], false)
            }
            Scheme::Homodyne => {
                let [c, d1, d2] = homodyne_covariance_family(eps, g, delta);
                gaussian_fisher(&c, [&d1, &d2], true)
            }
        }
    };
    schedule.multiplicities(shots).into_iter().map(|(d, n)| Ok(per_delta(d)?.scaled(n as f64))).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSpec {
    pub scheme: Scheme,
    pub epsilon: f64,
    pub g: Complex64,
    pub schedule: DeltaSchedule,
    pub shots: usize,
    pub trials: usize,
    pub master_seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialResult {
    pub stream: StreamId,
    pub estimate: EstimationResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleSummary {
    /// Non-degenerate trials entering the statistics.
    pub trials: usize,
    pub degenerate: usize,
    pub not_converged: usize,
    pub mean: Complex64,
    /// Standard error of `mean` per component.
    pub mean_se: [f64; 2],
    /// Unbiased covariance of `ĝ` over trials.
    pub empirical_cov: Matrix2<f64>,
    /// Per-record Cramér–Rao bound for the schedule.
    pub crb: CramerRaoBound,
    pub crb_diag: [f64; 2],
    /// `empirical variance / CRB` per component; NaN where the bound is
    /// unbounded.
    pub ratio: [f64; 2],
    pub results: Vec<TrialResult>,
}

/// Runs `trials` independent records (trial `k` uses stream `k`) and compares
/// the spread of the estimates with the Cramér–Rao bound.
pub fn run_ensemble(spec: &EnsembleSpec) -> Result<EnsembleSummary> {
    if spec.trials == 0 {
        return Err(domain("ensemble needs at least one trial"));
    }
    let params = CoherenceParams::from_complex(spec.epsilon, spec.g)?;
    spec.schedule.check(spec.shots)?;
    let results = (0..spec.trials as u64)
        .into_par_iter()
        .map(|k| {
            let stream = StreamId::new(spec.master_seed, k);
            let record = sample_record(&params, spec.scheme, &spec.schedule, spec.shots, stream)?;
            Ok(TrialResult { stream, estimate: mle_estimate(&record)? })
        })
        .collect::<Result<Vec<_>>>()?;

    let used: Vec<Vector2<f64>> = results
        .iter()
        .filter(|r| !r.estimate.degenerate)
        .map(|r| Vector2::new(r.estimate.g_hat.re, r.estimate.g_hat.im))
        .collect();
    let n = used.len();
    let mean = if n > 0 { used.iter().sum::<Vector2<f64>>() / n as f64 } else { Vector2::zeros() };
    let mut cov = Matrix2::zeros();
    if n > 1 {
        for v in &used {
            let d = v - mean;
            cov += d * d.transpose();
        }
        cov /= (n - 1) as f64;
    }
    let total = if spec.shots > 0 {
        schedule_fisher(&params, spec.scheme, &spec.schedule, spec.shots)?
    } else {
        FisherMatrix::zero()
    };
    let crb = cramer_rao_total(&total)?;
    let crb_diag = [crb.variance(0), crb.variance(1)];
    let ratio = [0, 1].map(|i| if crb_diag[i].is_finite() && n > 1 { cov[(i, i)] / crb_diag[i] } else { f64::NAN });
    let se = |i: usize| if n > 1 { (cov[(i, i)] / n as f64).sqrt() } else { f64::NAN };
    Ok(EnsembleSummary {
        trials: n,
        degenerate: spec.trials - n,
        not_converged: results.iter().filter(|r| !r.estimate.degenerate && !r.estimate.converged).count(),
        mean: Complex64::new(mean[0], mean[1]),
        mean_se: [se(0), se(1)],
        empirical_cov: cov,
        crb,
        crb_diag,
        ratio,
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::record::Shot;
    use std::f64::consts::FRAC_PI_2;

    fn direct_record(counts: &[(f64, usize, usize)], eps: f64) -> MeasurementRecord {
        let shots = counts
            .iter()
            .flat_map(|&(delta, k, n)| std::iter::repeat_n(Shot { delta, outcome: Outcome::Discrete(k) }, n))
            .collect();
        MeasurementRecord { scheme: Scheme::Direct, epsilon: eps, g_truth: None, stream: StreamId::new(0, 0), shots }
    }

    #[test]
    fn empty_and_vacuum_records_are_degenerate() {
        let r = direct_record(&[], 0.1);
        let e = mle_estimate(&r).unwrap();
        assert!(e.degenerate && !e.converged);
        assert_eq!(e.g_hat, Complex64::from(0.0));

        let r = direct_record(&[(0.0, 0, 50), (FRAC_PI_2, 0, 50)], 0.1);
        let e = mle_estimate(&r).unwrap();
        assert!(e.degenerate);
        assert!((e.loglik - 100.0 * 0.9f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn closed_form_optimum_from_counts() {
        // With counts n10, n01 at each phase the maximizer solves
        // (1 + q)/(1 − q) = n10/n01 per quadrature.
        let r = direct_record(
            &[(0.0, 0, 900), (0.0, 1, 80), (0.0, 2, 20), (FRAC_PI_2, 0, 900), (FRAC_PI_2, 1, 65), (FRAC_PI_2, 2, 35)],
            0.1,
        );
        let e = mle_estimate(&r).unwrap();
        assert!(e.converged && !e.degenerate);
        assert!((e.g_hat.re - 0.6).abs() < 1e-9, "{e:?}");
        // δ = π/2 observes Re(g e^{−iπ/2}) = g2.
        assert!((e.g_hat.im - 0.3).abs() < 1e-9, "{e:?}");
    }

    #[test]
    fn boundary_optimum_is_projected() {
        let r = direct_record(&[(0.0, 1, 30), (FRAC_PI_2, 0, 10)], 0.1);
        let e = mle_estimate(&r).unwrap();
        assert!((e.g_hat.norm() - (1.0 - BOUNDARY_MARGIN)).abs() < 1e-12);
        assert!(e.g_hat.re > 0.999);
        assert!(e.converged);
    }

    #[test]
    fn single_phase_leaves_other_quadrature_at_seed() {
        let r = direct_record(&[(0.0, 0, 900), (0.0, 1, 80), (0.0, 2, 20)], 0.1);
        let e = mle_estimate(&r).unwrap();
        assert!((e.g_hat.re - 0.6).abs() < 1e-9);
        assert!(e.g_hat.norm() <= 1.0);
    }

    #[test]
    fn gaussian_estimates_are_deterministic_and_inside_disk() {
        for scheme in [Scheme::Heterodyne, Scheme::Homodyne] {
            let p = CoherenceParams::new(0.5, 0.6, 0.3).unwrap();
            let r = sample_record(&p, scheme, &DeltaSchedule::default(), 20_000, StreamId::new(3, 1)).unwrap();
            let a = mle_estimate(&r).unwrap();
            let b = mle_estimate(&r).unwrap();
            assert_eq!(a, b);
            assert!(a.converged && a.g_hat.norm() < 1.0);
            assert!((a.g_hat - p.g()).norm() < 0.2, "{scheme}: {a:?}");
        }
    }

    #[test]
    fn heterodyne_gradient_matches_finite_difference() {
        let p = CoherenceParams::new(0.4, 0.2, -0.5).unwrap();
        let r = sample_record(&p, Scheme::Heterodyne, &DeltaSchedule::default(), 500, StreamId::new(8, 0)).unwrap();
        let l = GaussianLikelihood::new(&r).unwrap();
        let g = Vector2::new(0.1, 0.3);
        let (grad, _) = l.derivatives(g);
        let h = 1e-6;
        for i in 0..2 {
            let mut e = Vector2::zeros();
            e[i] = h;
            let fd = (l.value(g + e) - l.value(g - e)) / (2.0 * h);
            assert!((grad[i] - fd).abs() < 1e-5 * fd.abs().max(1.0), "{i}: {} vs {fd}", grad[i]);
        }
        let r = sample_record(&p, Scheme::Homodyne, &DeltaSchedule::default(), 500, StreamId::new(8, 0)).unwrap();
        let l = GaussianLikelihood::new(&r).unwrap();
        let (grad, _) = l.derivatives(g);
        for i in 0..2 {
            let mut e = Vector2::zeros();
            e[i] = h;
            let fd = (l.value(g + e) - l.value(g - e)) / (2.0 * h);
            assert!((grad[i] - fd).abs() < 1e-5 * fd.abs().max(1.0));
        }
    }

    #[test]
    fn schedule_fisher_counts_phases() {
        let p = CoherenceParams::new(0.1, 0.6, 0.3).unwrap();
        let f = schedule_fisher(&p, Scheme::Direct, &DeltaSchedule::default(), 3).unwrap();
        assert!((f.f11() - 2.0 * 0.15625).abs() < 1e-12);
        assert!((f.f22() - 0.1 / 0.91).abs() < 1e-12);
        assert!(f.f12().abs() < 1e-12);
    }

    #[test]
    fn tiny_ensemble() {
        let spec = EnsembleSpec {
            scheme: Scheme::Direct,
            epsilon: 0.1,
            g: Complex64::new(0.6, 0.3),
            schedule: DeltaSchedule::default(),
            shots: 1,
            trials: 1,
            master_seed: 0,
        };
        let s = run_ensemble(&spec).unwrap();
        assert_eq!(s.trials + s.degenerate, 1);
        assert_eq!(s.results[0].stream, StreamId::new(0, 0));
    }
}
