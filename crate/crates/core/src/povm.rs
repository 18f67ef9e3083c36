//! Measurement catalog: direct detection, shared-entanglement detection,
//! heterodyne and homodyne detection, as POVMs on the truncated two-mode Fock
//! basis.
//!
//! Discrete schemes carry explicit 4×4 element matrices. Continuous schemes
//! carry closed-form matrix-element kernels plus a quadrature grid; the grid
//! node weights fold in the integration measure so that a probability mass is
//! `weight × density`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::thermal::{basis, ComplexFieldSample, FockDensityOperator, PSD_TOLERANCE};

/// Completeness and Hermiticity tolerance for discrete POVMs.
pub const POVM_TOLERANCE: f64 = 1e-12;
/// Normalization tolerance for discrete outcome distributions.
pub const DISCRETE_MASS_TOLERANCE: f64 = 1e-9;
/// Normalization tolerance for grid-integrated outcome distributions.
pub const GRID_MASS_TOLERANCE: f64 = 1e-6;

/// The measurement schemes known to the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Beam-splitter interference followed by photon counting.
    Direct,
    /// Shared-entanglement (path-entangled ancilla) detection.
    Entangled,
    Heterodyne,
    Homodyne,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Direct, Scheme::Entangled, Scheme::Heterodyne, Scheme::Homodyne];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Direct => "direct",
            Scheme::Entangled => "entangled",
            Scheme::Heterodyne => "heterodyne",
            Scheme::Homodyne => "homodyne",
        }
    }

    /// Whether the scheme is implementable with local operations and
    /// classical communication between the two sites.
    pub fn is_local(&self) -> bool {
        matches!(self, Scheme::Heterodyne | Scheme::Homodyne)
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Scheme::Direct | Scheme::Entangled)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "direct" => Ok(Scheme::Direct),
            "entangled" | "gjc" | "shared-entanglement" => Ok(Scheme::Entangled),
            "heterodyne" => Ok(Scheme::Heterodyne),
            "homodyne" => Ok(Scheme::Homodyne),
            other => Err(domain(format!("unknown scheme '{other}'"))),
        }
    }
}

/// The matrix elements of one POVM element (or one kernel evaluation) that
/// enter the weak-light Born rule and the LOCC inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockElements {
    pub e00_00: f64,
    pub e01_01: f64,
    pub e10_10: f64,
    pub e11_11: f64,
    /// `⟨1,0|E|0,1⟩`
    pub e10_01: Complex64,
}

impl FockElements {
    pub fn from_matrix(m: &Matrix4<Complex64>) -> Self {
        use basis::*;
        Self {
            e00_00: m[(VACUUM, VACUUM)].re,
            e01_01: m[(ONE_B, ONE_B)].re,
            e10_10: m[(ONE_A, ONE_A)].re,
            e11_11: m[(BOTH, BOTH)].re,
            e10_01: m[(ONE_A, ONE_B)],
        }
    }

    /// `⟨0,1|E|1,0⟩ = ⟨1,0|E|0,1⟩*`
    pub fn e01_10(&self) -> Complex64 {
        self.e10_01.conj()
    }

    /// Weak-light Born probability
    /// `(1−ε)E₀₀,₀₀ + (ε/2)(E₀₁,₀₁ + E₁₀,₁₀) + ε Re(E₁₀,₀₁ g*)`.
    pub fn born_probability(&self, epsilon: f64, g: Complex64) -> f64 {
        (1.0 - epsilon) * self.e00_00
            + 0.5 * epsilon * (self.e01_01 + self.e10_10)
            + epsilon * (self.e10_01 * g.conj()).re
    }

    /// Gradient of [`Self::born_probability`] with respect to `(g1, g2)`.
    /// The probability is affine in `g`, so this is exact and independent of g.
    pub fn born_gradient(&self, epsilon: f64) -> [f64; 2] {
        [epsilon * self.e10_01.re, epsilon * self.e10_01.im]
    }

    /// `tr(Eρ)` restricted to the entries carried here. Exact for any state
    /// supported on the truncated basis without vacuum/one-photon coherences.
    pub fn trace_with(&self, rho: &Matrix4<Complex64>) -> f64 {
        use basis::*;
        self.e00_00 * rho[(VACUUM, VACUUM)].re
            + self.e01_01 * rho[(ONE_B, ONE_B)].re
            + self.e10_10 * rho[(ONE_A, ONE_A)].re
            + self.e11_11 * rho[(BOTH, BOTH)].re
            + 2.0 * (self.e10_01 * rho[(ONE_B, ONE_A)]).re
    }
}

/// A labelled POVM element on the shared Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    pub label: String,
    pub matrix: Matrix4<Complex64>,
}

/// Finite-outcome POVM.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePovm {
    pub elements: Vec<PovmElement>,
    /// Leading block of the Fock basis on which completeness holds.
    pub subspace_dim: usize,
}

impl DiscretePovm {
    pub fn labels(&self) -> Vec<String> {
        self.elements.iter().map(|e| e.label.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn fock_elements(&self) -> Vec<FockElements> {
        self.elements.iter().map(|e| FockElements::from_matrix(&e.matrix)).collect()
    }

    /// Checks Hermiticity, positivity and completeness to [`POVM_TOLERANCE`].
    pub fn validate(&self) -> Result<()> {
        let mut sum = Matrix4::<Complex64>::zeros();
        for e in &self.elements {
            let m = &e.matrix;
            if (m - m.adjoint()).iter().any(|z| z.norm() > POVM_TOLERANCE) {
                return Err(domain(format!("POVM element {} is not Hermitian", e.label)));
            }
            let lo = m.symmetric_eigenvalues().min();
            if lo < -PSD_TOLERANCE {
                return Err(domain(format!("POVM element {} not PSD (min eigenvalue {lo:e})", e.label)));
            }
            sum += m;
        }
        let d = self.subspace_dim;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { 1.0 } else { 0.0 };
                if (sum[(i, j)] - target).norm() > POVM_TOLERANCE {
                    return Err(domain(format!("POVM incomplete at ({i},{j}): {}", sum[(i, j)])));
                }
            }
        }
        Ok(())
    }
}

fn projector(ket: &[Complex64; 4], scale: f64) -> Matrix4<Complex64> {
    let mut m = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] = ket[i] * ket[j].conj() * scale;
        }
    }
    m
}

/// `|1,0⟩ ± e^{−iδ}|0,1⟩` (unnormalized).
fn interference_ket(delta: f64, sign: f64) -> [Complex64; 4] {
    let mut ket = [Complex64::from(0.0); 4];
    ket[basis::ONE_A] = Complex64::from(1.0);
    ket[basis::ONE_B] = Complex64::from_polar(sign, -delta);
    ket
}

fn vacuum_projector() -> Matrix4<Complex64> {
    let mut m = Matrix4::zeros();
    m[(basis::VACUUM, basis::VACUUM)] = Complex64::from(1.0);
    m
}

fn number_projector(index: usize, scale: f64) -> Matrix4<Complex64> {
    let mut m = Matrix4::zeros();
    m[(index, index)] = Complex64::from(scale);
    m
}

/// Direct detection with phase shift `delta` on mode b:
/// `E(0,0) = |0,0⟩⟨0,0|`, `E(1,0)`, `E(0,1)` the projectors onto
/// `(|1,0⟩ ± e^{−iδ}|0,1⟩)/√2`.
pub fn direct_detection_povm(delta: f64) -> DiscretePovm {
    DiscretePovm {
        elements: vec![
            PovmElement { label: "0,0".into(), matrix: vacuum_projector() },
            PovmElement { label: "1,0".into(), matrix: projector(&interference_ket(delta, 1.0), 0.5) },
            PovmElement { label: "0,1".into(), matrix: projector(&interference_ket(delta, -1.0), 0.5) },
        ],
        subspace_dim: basis::SINGLE_PHOTON_DIM,
    }
}

/// Shared-entanglement scheme: five outcome classes `y0..y4`, where the two
/// informative ones are half of the direct-detection clicks.
pub fn gjc_entangled_povm(delta: f64) -> DiscretePovm {
    DiscretePovm {
        elements: vec![
            PovmElement { label: "y0".into(), matrix: vacuum_projector() },
            PovmElement { label: "y1".into(), matrix: number_projector(basis::ONE_B, 0.5) },
            PovmElement { label: "y2".into(), matrix: number_projector(basis::ONE_A, 0.5) },
            PovmElement { label: "y3".into(), matrix: projector(&interference_ket(delta, 1.0), 0.25) },
            PovmElement { label: "y4".into(), matrix: projector(&interference_ket(delta, -1.0), 0.25) },
        ],
        subspace_dim: basis::SINGLE_PHOTON_DIM,
    }
}

/// Discrete POVM for a discrete scheme.
pub fn discrete_povm(scheme: Scheme, delta: f64) -> Result<DiscretePovm> {
    match scheme {
        Scheme::Direct => Ok(direct_detection_povm(delta)),
        Scheme::Entangled => Ok(gjc_entangled_povm(delta)),
        other => Err(domain(format!("{other} is not a discrete scheme"))),
    }
}

/// Heterodyne kernels for `E(μ,ν) = |μ,ν⟩⟨μ,ν|/π²`.
pub fn heterodyne_matrix_elements(mu: Complex64, nu: Complex64) -> FockElements {
    let (m2, n2) = (mu.norm_sqr(), nu.norm_sqr());
    let base = (-m2 - n2).exp() / (PI * PI);
    FockElements {
        e00_00: base,
        e01_01: base * n2,
        e10_10: base * m2,
        e11_11: base * m2 * n2,
        e10_01: mu * nu.conj() * base,
    }
}

/// Homodyne kernels for quadrature outcomes `(x, y)` with local-oscillator
/// phases `delta_a`, `delta_b`.
pub fn homodyne_matrix_elements(x: f64, y: f64, delta_a: f64, delta_b: f64) -> FockElements {
    let base = (-x * x - y * y).exp() / PI;
    FockElements {
        e00_00: base,
        e01_01: 2.0 * base * y * y,
        e10_10: 2.0 * base * x * x,
        e11_11: 4.0 * base * x * x * y * y,
        e10_01: Complex64::from_polar(2.0 * base * x * y, delta_a - delta_b),
    }
}

/// Quadrature grid: `extent` in natural outcome units and `points` nodes per
/// axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub extent: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { extent: 6.0, points: 201 }
    }
}

/// Continuous-outcome measurement families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ContinuousScheme {
    Heterodyne,
    Homodyne { delta_a: f64, delta_b: f64 },
}

/// A continuous-outcome point, in the scheme's natural coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContinuousOutcome {
    Heterodyne { mu: Complex64, nu: Complex64 },
    Homodyne { x: f64, y: f64 },
}

/// Closed-form kernel plus quadrature grid.
///
/// Heterodyne outcomes are integrated in reduced coordinates
/// `(|μ|, |ν|, arg(μν*))`: the weak-light likelihood depends on nothing else,
/// and the common phase contributes a factor 2π. Radial axes use composite
/// Simpson weights on `[0, extent]`; the relative phase uses the periodic
/// trapezoid rule. Homodyne uses the trapezoid rule on `[−extent, extent]²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousPovmKernel {
    pub scheme: ContinuousScheme,
    pub grid: GridSpec,
    weights: AxisWeights,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct AxisWeights {
    step: f64,
}

impl ContinuousPovmKernel {
    pub fn heterodyne(grid: GridSpec) -> Result<Self> {
        Self::new(ContinuousScheme::Heterodyne, grid)
    }

    pub fn homodyne(delta_a: f64, delta_b: f64, grid: GridSpec) -> Result<Self> {
        Self::new(ContinuousScheme::Homodyne { delta_a, delta_b }, grid)
    }

    pub fn new(scheme: ContinuousScheme, grid: GridSpec) -> Result<Self> {
        if !(grid.extent > 0.0 && grid.extent.is_finite()) {
            return Err(domain("grid extent must be positive"));
        }
        if grid.points < 3 || grid.points.is_multiple_of(2) {
            return Err(domain("grid needs an odd number of points >= 3 per axis"));
        }
        let step = match scheme {
            ContinuousScheme::Heterodyne => grid.extent / (grid.points - 1) as f64,
            ContinuousScheme::Homodyne { .. } => 2.0 * grid.extent / (grid.points - 1) as f64,
        };
        Ok(Self { scheme, grid, weights: AxisWeights { step } })
    }

    /// `δ` such that the cross element carries phase `e^{iδ}` (homodyne only;
    /// heterodyne integrates over all phases).
    pub fn relative_phase(&self) -> f64 {
        match self.scheme {
            ContinuousScheme::Heterodyne => 0.0,
            ContinuousScheme::Homodyne { delta_a, delta_b } => delta_a - delta_b,
        }
    }

    pub fn elements_at(&self, outcome: ContinuousOutcome) -> Result<FockElements> {
        match (self.scheme, outcome) {
            (ContinuousScheme::Heterodyne, ContinuousOutcome::Heterodyne { mu, nu }) => {
                Ok(heterodyne_matrix_elements(mu, nu))
            }
            (ContinuousScheme::Homodyne { delta_a, delta_b }, ContinuousOutcome::Homodyne { x, y }) => {
                Ok(homodyne_matrix_elements(x, y, delta_a, delta_b))
            }
            _ => Err(domain("outcome does not match kernel scheme")),
        }
    }

    pub fn node_count(&self) -> usize {
        let p = self.grid.points;
        match self.scheme {
            ContinuousScheme::Heterodyne => p * p * p,
            ContinuousScheme::Homodyne { .. } => p * p,
        }
    }

    fn simpson(&self, i: usize) -> f64 {
        let h = self.weights.step;
        let last = self.grid.points - 1;
        if i == 0 || i == last {
            h / 3.0
        } else if i % 2 == 1 {
            4.0 * h / 3.0
        } else {
            2.0 * h / 3.0
        }
    }

    fn trapezoid(&self, i: usize) -> f64 {
        let h = self.weights.step;
        if i == 0 || i == self.grid.points - 1 {
            0.5 * h
        } else {
            h
        }
    }

    /// Representative outcome of node `index`.
    pub fn node_outcome(&self, index: usize) -> ContinuousOutcome {
        let p = self.grid.points;
        let h = self.weights.step;
        match self.scheme {
            ContinuousScheme::Heterodyne => {
                let (ia, ib, k) = (index / (p * p), (index / p) % p, index % p);
                let phi = 2.0 * PI * k as f64 / p as f64;
                ContinuousOutcome::Heterodyne {
                    mu: Complex64::from(ia as f64 * h),
                    nu: Complex64::from_polar(ib as f64 * h, -phi),
                }
            }
            ContinuousScheme::Homodyne { .. } => {
                let (ix, iy) = (index / p, index % p);
                ContinuousOutcome::Homodyne {
                    x: -self.grid.extent + ix as f64 * h,
                    y: -self.grid.extent + iy as f64 * h,
                }
            }
        }
    }

    /// Quadrature weight of node `index`, including the integration measure.
    pub fn node_weight(&self, index: usize) -> f64 {
        let p = self.grid.points;
        let h = self.weights.step;
        match self.scheme {
            ContinuousScheme::Heterodyne => {
                let (ia, ib) = (index / (p * p), (index / p) % p);
                let (ra, rb) = (ia as f64 * h, ib as f64 * h);
                let phase_weight = 2.0 * PI / p as f64;
                self.simpson(ia) * self.simpson(ib) * ra * rb * phase_weight * 2.0 * PI
            }
            ContinuousScheme::Homodyne { .. } => {
                let (ix, iy) = (index / p, index % p);
                self.trapezoid(ix) * self.trapezoid(iy)
            }
        }
    }

    /// Weight and kernel elements of node `index`.
    pub fn node(&self, index: usize) -> (f64, FockElements) {
        let outcome = self.node_outcome(index);
        let elements = match outcome {
            ContinuousOutcome::Heterodyne { mu, nu } => heterodyne_matrix_elements(mu, nu),
            ContinuousOutcome::Homodyne { x, y } => {
                let ContinuousScheme::Homodyne { delta_a, delta_b } = self.scheme else { unreachable!() };
                homodyne_matrix_elements(x, y, delta_a, delta_b)
            }
        };
        (self.node_weight(index), elements)
    }

    /// Visits nodes `range` in index order with `(index, weight, elements)`.
    /// Equivalent to calling [`Self::node`] per index, with per-axis factors
    /// tabulated once.
    pub fn for_each_node<F>(&self, range: std::ops::Range<usize>, mut f: F)
    where
        F: FnMut(usize, f64, &FockElements),
    {
        let p = self.grid.points;
        let h = self.weights.step;
        match self.scheme {
            ContinuousScheme::Heterodyne => {
                let radial: Vec<(f64, f64, f64)> = (0..p)
                    .map(|i| {
                        let r = i as f64 * h;
                        (r, (-r * r).exp(), self.simpson(i) * r)
                    })
                    .collect();
                let phase: Vec<Complex64> =
                    (0..p).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / p as f64)).collect();
                let measure = 2.0 * PI / p as f64 * 2.0 * PI / (PI * PI);
                for index in range {
                    let (ia, ib, k) = (index / (p * p), (index / p) % p, index % p);
                    let (ra, ea, wa) = radial[ia];
                    let (rb, eb, wb) = radial[ib];
                    let base = ea * eb / (PI * PI);
                    let (m2, n2) = (ra * ra, rb * rb);
                    let e = FockElements {
                        e00_00: base,
                        e01_01: base * n2,
                        e10_10: base * m2,
                        e11_11: base * m2 * n2,
                        e10_01: phase[k] * (base * ra * rb),
                    };
                    f(index, wa * wb * measure * PI * PI, &e);
                }
            }
            ContinuousScheme::Homodyne { .. } => {
                for index in range {
                    let (w, e) = self.node(index);
                    f(index, w, &e);
                }
            }
        }
    }

    /// Grid integral of `E₀₀,₀₀`; one for an adequate grid.
    pub fn vacuum_mass(&self) -> f64 {
        let mut total = 0.0;
        self.for_each_node(0..self.node_count(), |_, w, e| total += w * e.e00_00);
        total
    }
}

/// Support of an [`OutcomeDistribution`].
#[derive(Debug, Clone, PartialEq)]
pub enum Support {
    Labels(Vec<String>),
    Grid(ContinuousPovmKernel),
}

/// Outcome probabilities (discrete) or grid-node masses (continuous).
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    pub support: Support,
    pub probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn total_mass(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn probability_of(&self, label: &str) -> Option<f64> {
        match &self.support {
            Support::Labels(labels) => labels.iter().position(|l| l == label).map(|i| self.probabilities[i]),
            Support::Grid(_) => None,
        }
    }
}

/// Either kind of measurement accepted by [`born_distribution`].
#[derive(Debug, Clone, Copy)]
pub enum Measurement<'a> {
    Discrete(&'a DiscretePovm),
    Continuous(&'a ContinuousPovmKernel),
}

/// Born rule `P(y) = tr[E(y) ρ]`. Discrete POVMs use exact matrix traces;
/// continuous kernels are evaluated node by node on their grid.
pub fn born_distribution(rho: &FockDensityOperator, povm: Measurement<'_>) -> Result<OutcomeDistribution> {
    let m = rho.matrix();
    let (support, probabilities, tolerance) = match povm {
        Measurement::Discrete(p) => {
            let probs = p.elements.iter().map(|e| (e.matrix * m).trace().re).collect();
            (Support::Labels(p.labels()), probs, DISCRETE_MASS_TOLERANCE)
        }
        Measurement::Continuous(k) => {
            let mut probs = Vec::with_capacity(k.node_count());
            k.for_each_node(0..k.node_count(), |_, w, e| probs.push(w * e.trace_with(m)));
            (Support::Grid(*k), probs, GRID_MASS_TOLERANCE)
        }
    };
    let dist = OutcomeDistribution { support, probabilities };
    let total = dist.total_mass();
    if (total - 1.0).abs() > tolerance {
        return Err(Error::NotNormalized { total, tolerance });
    }
    Ok(dist)
}

/// Sides of `|E₁₀,₀₁|² ≤ E₀₀,₀₀ E₁₁,₁₁`, a consequence of the positive
/// partial transpose condition satisfied by every LOCC POVM element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`; negative certifies the element is not PPT.
    pub slack: f64,
}

impl PptReport {
    pub fn holds(&self) -> bool {
        self.slack >= -PSD_TOLERANCE
    }
}

pub fn check_ppt_cauchy_schwarz(elements: &FockElements) -> PptReport {
    let lhs = elements.e10_01.norm_sqr();
    let rhs = elements.e00_00 * elements.e11_11;
    PptReport { lhs, rhs, slack: rhs - lhs }
}

/// Smallest PPT slack over all elements of a discrete POVM.
pub fn min_ppt_slack_discrete(povm: &DiscretePovm) -> f64 {
    povm.fock_elements().iter().map(|e| check_ppt_cauchy_schwarz(e).slack).fold(f64::INFINITY, f64::min)
}

/// Smallest PPT slack over every node of a kernel grid.
pub fn min_ppt_slack_kernel(kernel: &ContinuousPovmKernel) -> f64 {
    let mut lowest = f64::INFINITY;
    kernel.for_each_node(0..kernel.node_count(), |_, _, e| {
        lowest = lowest.min(check_ppt_cauchy_schwarz(e).slack);
    });
    lowest
}

/// Outcome for the coherent-state sandwich `⟨α,β|E(y)|α,β⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HusimiOutcome {
    Heterodyne {
        mu: Complex64,
        nu: Complex64,
    },
    /// Photon counts at the two beam-splitter outputs with phase `delta`.
    Direct {
        n: u32,
        m: u32,
        delta: f64,
    },
}

/// Beam-splitter output fields `(u, v) = V (α, β)` with
/// `V = [[1, e^{iδ}], [1, −e^{iδ}]]/√2`.
pub fn rotate_fields(sample: &ComplexFieldSample, delta: f64) -> (Complex64, Complex64) {
    let shifted = sample.beta * Complex64::from_polar(1.0, delta);
    ((sample.alpha + shifted) * FRAC_1_SQRT_2, (sample.alpha - shifted) * FRAC_1_SQRT_2)
}

fn poisson_pmf(mean: f64, k: u32) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let log_fact: f64 = (1..=k).map(|j| (j as f64).ln()).sum();
    (k as f64 * mean.ln() - mean - log_fact).exp()
}

/// Husimi kernel `Π(y|α,β)`: the semiclassical likelihood of outcome `y` for
/// classical fields `(α, β)`.
pub fn husimi_kernel(outcome: &HusimiOutcome, sample: &ComplexFieldSample) -> f64 {
    match *outcome {
        HusimiOutcome::Heterodyne { mu, nu } => {
            (-(mu - sample.alpha).norm_sqr() - (nu - sample.beta).norm_sqr()).exp() / (PI * PI)
        }
        HusimiOutcome::Direct { n, m, delta } => {
            let (u, v) = rotate_fields(sample, delta);
            poisson_pmf(u.norm_sqr(), n) * poisson_pmf(v.norm_sqr(), m)
        }
    }
}
