//! Fisher information about `(g1, g2)`: numeric assembly from any outcome
//! model, closed forms for the catalogued schemes, Cramér–Rao bounds, the
//! LOCC trace-norm bound and the adaptive-measurement accumulation bound.

use nalgebra::{Matrix2, SymmetricEigen, Vector2};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::povm::{
    discrete_povm, min_ppt_slack_discrete, min_ppt_slack_kernel, ContinuousPovmKernel, DiscretePovm, GridSpec,
    Measurement, OutcomeDistribution, Scheme,
};
use crate::thermal::{weak_density_matrix, CoherenceParams, PSD_TOLERANCE};

/// Central-difference step on `g1`, `g2`.
pub const FD_STEP: f64 = 1e-5;
/// Outcomes below this probability are candidates for exclusion.
pub const PROBABILITY_FLOOR: f64 = 1e-15;
/// An excluded outcome must also have derivatives below this.
pub const DERIVATIVE_FLOOR: f64 = 1e-12;
/// PSD tolerance on assembled Fisher eigenvalues.
pub const FISHER_PSD_TOLERANCE: f64 = 1e-10;
/// Relative eigenvalue cutoff for the Cramér–Rao pseudo-inverse.
pub const PINV_CUTOFF: f64 = 1e-12;

const CHUNK: usize = 1 << 15;

/// 2×2 real symmetric Fisher information matrix over `(g1, g2)`, per
/// measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FisherMatrix(Matrix2<f64>);

impl FisherMatrix {
    /// Symmetrizes `m`.
    pub fn new(m: Matrix2<f64>) -> Self {
        Self((m + m.transpose()) * 0.5)
    }

    pub fn zero() -> Self {
        Self(Matrix2::zeros())
    }

    pub fn from_entries(f11: f64, f12: f64, f22: f64) -> Self {
        Self(Matrix2::new(f11, f12, f12, f22))
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.0
    }

    pub fn f11(&self) -> f64 {
        self.0[(0, 0)]
    }

    pub fn f12(&self) -> f64 {
        self.0[(0, 1)]
    }

    pub fn f22(&self) -> f64 {
        self.0[(1, 1)]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let half_tr = 0.5 * (self.f11() + self.f22());
        let half_diff = 0.5 * (self.f11() - self.f22());
        let r = half_diff.hypot(self.f12());
        (half_tr - r, half_tr + r)
    }

    pub fn is_psd(&self) -> bool {
        self.eigenvalues().0 >= -FISHER_PSD_TOLERANCE
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0 * factor)
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &FisherMatrix) -> f64 {
        (self.0 - other.0).amax()
    }
}

impl std::ops::Add for FisherMatrix {
    type Output = FisherMatrix;

    fn add(self, rhs: FisherMatrix) -> FisherMatrix {
        FisherMatrix(self.0 + rhs.0)
    }
}

impl std::iter::Sum for FisherMatrix {
    fn sum<I: Iterator<Item = FisherMatrix>>(iter: I) -> Self {
        iter.fold(FisherMatrix::zero(), |a, b| a + b)
    }
}

/// Trace norm (sum of absolute eigenvalues); the trace for PSD matrices.
pub fn trace_norm(f: &FisherMatrix) -> f64 {
    let (a, b) = f.eigenvalues();
    a.abs() + b.abs()
}

/// `g ↦ P(y|g)` over a fixed, indexable outcome set. Implementations must
/// accept `g` slightly outside the unit disk, since finite-difference stencils
/// step there.
pub trait ProbabilityModel: Sync {
    fn outcome_count(&self) -> usize;

    /// Writes `P(start + k | g)` into `out[k]`.
    fn probabilities(&self, g: Complex64, start: usize, out: &mut [f64]) -> Result<()>;

    /// Probabilities at `g` plus central-difference derivatives along `g1`
    /// (`d1`) and `g2` (`d2`) with half-width `step`.
    fn probabilities_and_slopes(
        &self,
        g: Complex64,
        step: f64,
        start: usize,
        p: &mut [f64],
        d1: &mut [f64],
        d2: &mut [f64],
    ) -> Result<()> {
        let mut plus = vec![0.0; p.len()];
        let mut minus = vec![0.0; p.len()];
        self.probabilities(g, start, p)?;
        for (shift, out) in [(Complex64::new(step, 0.0), d1), (Complex64::new(0.0, step), d2)] {
            self.probabilities(g + shift, start, &mut plus)?;
            self.probabilities(g - shift, start, &mut minus)?;
            for k in 0..out.len() {
                out[k] = (plus[k] - minus[k]) / (2.0 * step);
            }
        }
        Ok(())
    }
}

/// Weak-light Born model for one discrete POVM at known `epsilon`.
#[derive(Debug, Clone)]
pub struct DiscreteModel {
    pub epsilon: f64,
    pub povm: DiscretePovm,
}

impl ProbabilityModel for DiscreteModel {
    fn outcome_count(&self) -> usize {
        self.povm.len()
    }

    fn probabilities(&self, g: Complex64, start: usize, out: &mut [f64]) -> Result<()> {
        let rho = weak_density_matrix(self.epsilon, g);
        for (k, p) in out.iter_mut().enumerate() {
            *p = (self.povm.elements[start + k].matrix * rho).trace().re;
        }
        Ok(())
    }
}

/// Weak-light Born model for a continuous kernel, one outcome per grid node
/// (probability mass = weight × density).
#[derive(Debug, Clone)]
pub struct KernelModel {
    pub epsilon: f64,
    pub kernel: ContinuousPovmKernel,
}

impl ProbabilityModel for KernelModel {
    fn outcome_count(&self) -> usize {
        self.kernel.node_count()
    }

    fn probabilities(&self, g: Complex64, start: usize, out: &mut [f64]) -> Result<()> {
        self.kernel.for_each_node(start..start + out.len(), |i, w, e| {
            out[i - start] = w * e.born_probability(self.epsilon, g);
        });
        Ok(())
    }

    fn probabilities_and_slopes(
        &self,
        g: Complex64,
        step: f64,
        start: usize,
        p: &mut [f64],
        d1: &mut [f64],
        d2: &mut [f64],
    ) -> Result<()> {
        let eps = self.epsilon;
        let (s1, s2) = (Complex64::new(step, 0.0), Complex64::new(0.0, step));
        self.kernel.for_each_node(start..start + p.len(), |i, w, e| {
            let k = i - start;
            p[k] = w * e.born_probability(eps, g);
            d1[k] = w * (e.born_probability(eps, g + s1) - e.born_probability(eps, g - s1)) / (2.0 * step);
            d2[k] = w * (e.born_probability(eps, g + s2) - e.born_probability(eps, g - s2)) / (2.0 * step);
        });
        Ok(())
    }
}

/// Adapts a closure returning whole distributions.
pub struct FnModel<F> {
    count: usize,
    f: F,
}

impl<F> FnModel<F>
where
    F: Fn(Complex64) -> Result<OutcomeDistribution> + Sync,
{
    pub fn new(count: usize, f: F) -> Self {
        Self { count, f }
    }
}

impl<F> ProbabilityModel for FnModel<F>
where
    F: Fn(Complex64) -> Result<OutcomeDistribution> + Sync,
{
    fn outcome_count(&self) -> usize {
        self.count
    }

    fn probabilities(&self, g: Complex64, start: usize, out: &mut [f64]) -> Result<()> {
        let dist = (self.f)(g)?;
        if dist.probabilities.len() != self.count {
            return Err(domain("distribution length changed between evaluations"));
        }
        out.copy_from_slice(&dist.probabilities[start..start + out.len()]);
        Ok(())
    }
}

/// Numeric Fisher matrix `Σ_y D(y|g)/P(y|g)` with central-difference
/// derivatives.
///
/// Outcomes with `P < PROBABILITY_FLOOR` are skipped when both derivatives are
/// below `DERIVATIVE_FLOOR`, otherwise the sum diverges and
/// [`Error::SingularSupport`] is returned. The outcome set is processed in
/// fixed chunks whose partial sums are reduced in chunk order, so the result
/// does not depend on the thread count.
pub fn fisher_numeric<M: ProbabilityModel + ?Sized>(model: &M, g: Complex64, step: f64) -> Result<FisherMatrix> {
    if step.is_nan() || step <= 0.0 {
        return Err(domain("finite-difference step must be positive"));
    }
    let n = model.outcome_count();
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<Result<Matrix2<f64>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let len = CHUNK.min(n - start);
            let mut p0 = vec![0.0; len];
            let mut d1 = vec![0.0; len];
            let mut d2 = vec![0.0; len];
            model.probabilities_and_slopes(g, step, start, &mut p0, &mut d1, &mut d2)?;
            let mut acc = Matrix2::zeros();
            for k in 0..len {
                let p = p0[k];
                if p < -PROBABILITY_FLOOR || !p.is_finite() {
                    return Err(Error::NegativeProbability { index: start + k, value: p });
                }
                let (a, b) = (d1[k], d2[k]);
                if p < PROBABILITY_FLOOR {
                    let deriv = a.abs().max(b.abs());
                    if deriv < DERIVATIVE_FLOOR {
                        continue;
                    }
                    return Err(Error::SingularSupport { index: start + k, probability: p, derivative: deriv });
                }
                acc += Matrix2::new(a * a, a * b, a * b, b * b) / p;
            }
            Ok(acc)
        })
        .collect();
    let mut total = Matrix2::zeros();
    for part in partials {
        total += part?;
    }
    Ok(FisherMatrix::new(total))
}

/// `[[cos²δ, sinδ cosδ], [sinδ cosδ, sin²δ]]`
fn quadrature_projector(delta: f64) -> Matrix2<f64> {
    let (s, c) = delta.sin_cos();
    Matrix2::new(c * c, s * c, s * c, s * s)
}

/// `Re(g e^{−iδ})`
pub fn observed_quadrature(g: Complex64, delta: f64) -> f64 {
    (g * Complex64::from_polar(1.0, -delta)).re
}

/// Direct detection: `ε/(1 − Re(ge^{−iδ})²)` times the quadrature projector.
pub fn fisher_direct_analytic(epsilon: f64, g: Complex64, delta: f64) -> Result<FisherMatrix> {
    let q = observed_quadrature(g, delta);
    if q.abs() >= 1.0 {
        return Err(Error::Divergent(q.abs()));
    }
    Ok(FisherMatrix(quadrature_projector(delta) * (epsilon / (1.0 - q * q))))
}

/// Shared-entanglement detection: half of direct detection.
pub fn fisher_gjc_analytic(epsilon: f64, g: Complex64, delta: f64) -> Result<FisherMatrix> {
    Ok(fisher_direct_analytic(epsilon, g, delta)?.scaled(0.5))
}

/// Heterodyne leading order `(ε²/2) I`, valid for `ε ≪ 1`.
pub fn fisher_heterodyne_analytic(epsilon: f64) -> FisherMatrix {
    FisherMatrix(Matrix2::identity() * (0.5 * epsilon * epsilon))
}

/// Homodyne leading order `ε²` times the quadrature projector at
/// `δ = δa − δb`, valid for `ε ≪ 1`.
pub fn fisher_homodyne_analytic(epsilon: f64, delta: f64) -> FisherMatrix {
    FisherMatrix(quadrature_projector(delta) * (epsilon * epsilon))
}

/// Closed-form Fisher matrix of a scheme (leading order for the local ones).
pub fn fisher_analytic(scheme: Scheme, epsilon: f64, g: Complex64, delta: f64) -> Result<FisherMatrix> {
    match scheme {
        Scheme::Direct => fisher_direct_analytic(epsilon, g, delta),
        Scheme::Entangled => fisher_gjc_analytic(epsilon, g, delta),
        Scheme::Heterodyne => Ok(fisher_heterodyne_analytic(epsilon)),
        Scheme::Homodyne => Ok(fisher_homodyne_analytic(epsilon, delta)),
    }
}

/// Numeric Fisher matrix of a scheme in the weak-light model. `delta` is the
/// direct-detection phase or the homodyne `δa − δb`; heterodyne ignores it.
pub fn fisher_numeric_scheme(
    scheme: Scheme,
    epsilon: f64,
    g: Complex64,
    delta: f64,
    grid: GridSpec,
) -> Result<FisherMatrix> {
    match scheme {
        Scheme::Direct | Scheme::Entangled => {
            let model = DiscreteModel { epsilon, povm: discrete_povm(scheme, delta)? };
            fisher_numeric(&model, g, FD_STEP)
        }
        Scheme::Heterodyne => {
            let model = KernelModel { epsilon, kernel: ContinuousPovmKernel::heterodyne(grid)? };
            fisher_numeric(&model, g, FD_STEP)
        }
        Scheme::Homodyne => {
            let model = KernelModel { epsilon, kernel: ContinuousPovmKernel::homodyne(delta, 0.0, grid)? };
            fisher_numeric(&model, g, FD_STEP)
        }
    }
}

/// Fisher matrix of a zero-mean Gaussian whose covariance is affine in `g`:
/// `C(g) = C₀ + g1·C₁ + g2·C₂`. Circular complex Gaussians give
/// `tr(C⁻¹CⱼC⁻¹Cₖ)`, real Gaussians half of it.
pub fn gaussian_fisher(cov: &Matrix2<Complex64>, dcov: [&Matrix2<Complex64>; 2], real: bool) -> Result<FisherMatrix> {
    let inv = cov.try_inverse().ok_or(Error::SingularCoherence { det: cov.determinant().re })?;
    let a = inv * dcov[0];
    let b = inv * dcov[1];
    let factor = if real { 0.5 } else { 1.0 };
    let f11 = (a * a).trace().re * factor;
    let f12 = (a * b).trace().re * factor;
    let f22 = (b * b).trace().re * factor;
    Ok(FisherMatrix::from_entries(f11, f12, f22))
}

/// Heterodyne covariance `Γ'(g)` and its derivatives along `g1`, `g2`.
pub fn heterodyne_covariance_family(epsilon: f64, g: Complex64) -> [Matrix2<Complex64>; 3] {
    let h = 0.5 * epsilon;
    let d = Complex64::from(1.0 + h);
    let off = g * h;
    let z = Complex64::from(0.0);
    [
        Matrix2::new(d, off, off.conj(), d),
        Matrix2::new(z, Complex64::from(h), Complex64::from(h), z),
        Matrix2::new(z, Complex64::new(0.0, h), Complex64::new(0.0, -h), z),
    ]
}

/// Real covariance of homodyne quadratures `(x, y)` for the full thermal
/// state, with derivatives along `g1`, `g2`. Off-diagonal is
/// `(ε/2) Re(g e^{−iδ})`.
pub fn homodyne_covariance_family(epsilon: f64, g: Complex64, delta: f64) -> [Matrix2<Complex64>; 3] {
    let var = Complex64::from(0.5 * (1.0 + epsilon));
    let h = 0.5 * epsilon;
    let (s, c) = delta.sin_cos();
    let off = Complex64::from(h * observed_quadrature(g, delta));
    let z = Complex64::from(0.0);
    [
        Matrix2::new(var, off, off, var),
        Matrix2::new(z, Complex64::from(h * c), Complex64::from(h * c), z),
        Matrix2::new(z, Complex64::from(h * s), Complex64::from(h * s), z),
    ]
}

/// Exact per-shot Fisher matrix of heterodyne detection on the full thermal
/// state (any ε). Reduces to `(ε²/2) I` at leading order.
pub fn fisher_heterodyne_gaussian(params: &CoherenceParams) -> Result<FisherMatrix> {
    let [c, d1, d2] = heterodyne_covariance_family(params.epsilon(), params.g());
    gaussian_fisher(&c, [&d1, &d2], false)
}

/// Exact per-shot Fisher matrix of homodyne detection on the full thermal
/// state (any ε).
pub fn fisher_homodyne_gaussian(params: &CoherenceParams, delta: f64) -> Result<FisherMatrix> {
    let [c, d1, d2] = homodyne_covariance_family(params.epsilon(), params.g(), delta);
    gaussian_fisher(&c, [&d1, &d2], true)
}

/// Lower bound on estimator covariance from `M` measurements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CramerRaoBound {
    /// Pseudo-inverse of the total Fisher matrix.
    pub covariance: Matrix2<f64>,
    /// Unit vectors along which the total Fisher matrix carries no
    /// information; variance along them is unbounded.
    pub null_directions: Vec<Vector2<f64>>,
}

impl CramerRaoBound {
    /// Variance bound on parameter `i` (0 → g1, 1 → g2); infinite when a null
    /// direction has a component along that axis.
    pub fn variance(&self, i: usize) -> f64 {
        if self.null_directions.iter().any(|v| v[i].abs() > 1e-9) {
            f64::INFINITY
        } else {
            self.covariance[(i, i)]
        }
    }
}

/// Cramér–Rao bound `Σ ≥ (M F)⁺` via an eigendecomposition pseudo-inverse.
pub fn cramer_rao(f: &FisherMatrix, measurements: u64) -> Result<CramerRaoBound> {
    if measurements == 0 {
        return Err(domain("Cramér–Rao bound needs at least one measurement"));
    }
    cramer_rao_total(&f.scaled(measurements as f64))
}

/// Pseudo-inverse bound for an already-accumulated Fisher matrix.
pub fn cramer_rao_total(total: &FisherMatrix) -> Result<CramerRaoBound> {
    let eig = SymmetricEigen::new(*total.matrix());
    let largest = eig.eigenvalues.amax();
    let mut covariance = Matrix2::zeros();
    let mut null_directions = Vec::new();
    for j in 0..2 {
        let lambda = eig.eigenvalues[j];
        let v: Vector2<f64> = eig.eigenvectors.column(j).into_owned();
        if largest > 0.0 && lambda > PINV_CUTOFF * largest {
            covariance += v * v.transpose() / lambda;
        } else {
            null_directions.push(v);
        }
    }
    Ok(CramerRaoBound { covariance, null_directions })
}

/// `ε²/(1−ε)`: the largest Fisher trace norm any PPT (hence any LOCC)
/// measurement can reach on the weak-light state.
pub fn locc_bound(epsilon: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(domain(format!("LOCC bound needs 0 <= epsilon < 1, got {epsilon}")));
    }
    Ok(epsilon * epsilon / (1.0 - epsilon))
}

/// Result of comparing a scheme's Fisher trace norm with the LOCC bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub fisher_trace_norm: f64,
    /// `ε²/(1−ε)`
    pub locc_bound_value: f64,
    /// `ε²/(1−ε) Σ_y |E₁₀,₀₁|²/E₀₀,₀₀`; infinite when some element has
    /// `E₀₀,₀₀ = 0` but `E₁₀,₀₁ ≠ 0`.
    pub povm_specific_bound: f64,
    /// Every element satisfies the PPT Cauchy–Schwarz inequality.
    pub ppt: bool,
    pub satisfied: bool,
    /// `locc_bound_value − fisher_trace_norm`
    pub margin: f64,
}

fn ratio_term(cross_sq: f64, vacuum: f64) -> f64 {
    if cross_sq == 0.0 {
        0.0
    } else if vacuum <= 0.0 {
        f64::INFINITY
    } else {
        cross_sq / vacuum
    }
}

/// Evaluates the scheme-specific sum `Σ_y |E₁₀,₀₁|²/E₀₀,₀₀` (grid integral
/// for kernels) without the `ε²/(1−ε)` prefactor.
pub fn cross_over_vacuum_sum(povm: Measurement<'_>) -> f64 {
    match povm {
        Measurement::Discrete(p) => p.fock_elements().iter().map(|e| ratio_term(e.e10_01.norm_sqr(), e.e00_00)).sum(),
        Measurement::Continuous(k) => {
            let mut total = 0.0;
            k.for_each_node(0..k.node_count(), |_, w, e| total += w * ratio_term(e.e10_01.norm_sqr(), e.e00_00));
            total
        }
    }
}

/// Numeric Fisher trace norm of `povm` at `(ε, g)` compared with the LOCC
/// bound and with the scheme-specific bound.
pub fn locc_bound_from_povm(povm: Measurement<'_>, epsilon: f64, g: Complex64) -> Result<BoundReport> {
    let bound = locc_bound(epsilon)?;
    let (fisher, ppt) = match povm {
        Measurement::Discrete(p) => {
            let model = DiscreteModel { epsilon, povm: p.clone() };
            (fisher_numeric(&model, g, FD_STEP)?, min_ppt_slack_discrete(p) >= -PSD_TOLERANCE)
        }
        Measurement::Continuous(k) => {
            let model = KernelModel { epsilon, kernel: *k };
            (fisher_numeric(&model, g, FD_STEP)?, min_ppt_slack_kernel(k) >= -PSD_TOLERANCE)
        }
    };
    let sum = cross_over_vacuum_sum(povm);
    let specific = if sum.is_infinite() { f64::INFINITY } else { bound * sum };
    let norm = trace_norm(&fisher);
    let slack = 1e-9 * bound.max(f64::MIN_POSITIVE);
    Ok(BoundReport {
        fisher_trace_norm: norm,
        locc_bound_value: bound,
        povm_specific_bound: specific,
        ppt,
        satisfied: norm <= bound + slack && norm <= specific + slack,
        margin: bound - norm,
    })
}

/// `Σ_m max_h ‖F_m(h)‖`: the upper bound on the total Fisher trace norm of
/// an adaptive sequence, where `conditional_fishers[m]` lists the step-`m`
/// conditional Fisher matrices over all histories `h`.
pub fn adaptive_fisher_bound(conditional_fishers: &[Vec<FisherMatrix>]) -> f64 {
    conditional_fishers.iter().map(|step| step.iter().map(trace_norm).fold(0.0, f64::max)).sum()
}

/// Chooses the POVM of the next step from the previous outcome indices.
pub type AdaptivePolicy = dyn Fn(&[usize]) -> DiscretePovm + Sync;

/// Joint outcome distribution of `depth` adaptive discrete measurements on
/// independent copies of the weak-light state. Outcome index `i` encodes the
/// history in base `arity`, first step most significant.
pub struct AdaptiveTree<'a> {
    pub epsilon: f64,
    pub depth: usize,
    pub arity: usize,
    pub policy: &'a AdaptivePolicy,
}

impl AdaptiveTree<'_> {
    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.depth];
        for slot in digits.iter_mut().rev() {
            *slot = index % self.arity;
            index /= self.arity;
        }
        digits
    }

    /// All histories of length `len`, in lexicographic order.
    pub fn histories(&self, len: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|h| {
                    (0..self.arity).map(move |y| {
                        let mut next = h.clone();
                        next.push(y);
                        next
                    })
                })
                .collect();
        }
        out
    }

    /// Conditional Fisher matrices of each step over all preceding histories.
    pub fn conditional_fishers(&self, g: Complex64) -> Result<Vec<Vec<FisherMatrix>>> {
        (0..self.depth)
            .map(|m| {
                self.histories(m)
                    .iter()
                    .map(|h| {
                        let model = DiscreteModel { epsilon: self.epsilon, povm: (self.policy)(h) };
                        fisher_numeric(&model, g, FD_STEP)
                    })
                    .collect()
            })
            .collect()
    }
}

impl ProbabilityModel for AdaptiveTree<'_> {
    fn outcome_count(&self) -> usize {
        self.arity.pow(self.depth as u32)
    }

    fn probabilities(&self, g: Complex64, start: usize, out: &mut [f64]) -> Result<()> {
        let rho = weak_density_matrix(self.epsilon, g);
        for (k, p) in out.iter_mut().enumerate() {
            let history = self.decode(start + k);
            let mut prob = 1.0;
            for m in 0..self.depth {
                let povm = (self.policy)(&history[..m]);
                if povm.len() != self.arity {
                    return Err(domain("adaptive policy changed outcome count"));
                }
                prob *= (povm.elements[history[m]].matrix * rho).trace().re;
            }
            *p = prob;
        }
        Ok(())
    }
}
