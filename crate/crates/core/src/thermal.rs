//! Bipartite thermal light: the Gaussian coherence description, the
//! weak-light Fock truncation, and classical field sampling.
//!
//! All two-mode Fock matrices share the ordered basis
//! `{|0,0⟩, |0,1⟩, |1,0⟩, |1,1⟩}` (see [`basis`]). The `|1,1⟩` row and column
//! are kept even though the truncated state has no support there, because the
//! LOCC matrix-element inequality needs `⟨1,1|E|1,1⟩`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{Matrix2, Matrix4, Vector2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Absolute tolerance on eigenvalues when checking positive semidefiniteness.
pub const PSD_TOLERANCE: f64 = 1e-12;

/// Indices of the shared two-mode Fock basis. The first photon number refers
/// to mode `a`, the second to mode `b`.
pub mod basis {
    /// `|0,0⟩`
    pub const VACUUM: usize = 0;
    /// `|0,1⟩`: one photon in mode b.
    pub const ONE_B: usize = 1;
    /// `|1,0⟩`: one photon in mode a.
    pub const ONE_A: usize = 2;
    /// `|1,1⟩`
    pub const BOTH: usize = 3;
    /// Dimension of the at-most-one-photon subspace spanned by the first three
    /// basis vectors.
    pub const SINGLE_PHOTON_DIM: usize = 3;
}

/// Physical parameters under estimation: mean photon number `epsilon` per
/// temporal mode pair and the complex degree of coherence `g = g1 + i g2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceParams {
    epsilon: f64,
    g: Complex64,
}

impl CoherenceParams {
    pub fn new(epsilon: f64, g1: f64, g2: f64) -> Result<Self> {
        Self::from_complex(epsilon, Complex64::new(g1, g2))
    }

    pub fn from_complex(epsilon: f64, g: Complex64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(domain(format!("epsilon must be finite and >= 0, got {epsilon}")));
        }
        if !g.re.is_finite() || !g.im.is_finite() {
            return Err(domain("g must be finite"));
        }
        if g.norm_sqr() > 1.0 + PSD_TOLERANCE {
            return Err(domain(format!("|g| must be <= 1, got {}", g.norm())));
        }
        Ok(Self { epsilon, g })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn g(&self) -> Complex64 {
        self.g
    }

    pub fn g1(&self) -> f64 {
        self.g.re
    }

    pub fn g2(&self) -> f64 {
        self.g.im
    }
}

/// 2×2 Hermitian positive-semidefinite matrix of second-order field moments,
/// rows and columns indexed by modes `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutualCoherenceMatrix(Matrix2<Complex64>);

impl MutualCoherenceMatrix {
    /// Wraps an arbitrary 2×2 matrix after checking it is Hermitian PSD.
    pub fn from_matrix(m: Matrix2<Complex64>) -> Result<Self> {
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if (m - m.adjoint()).iter().any(|z| z.norm() > 1e-12 * scale) {
            return Err(domain("coherence matrix must be Hermitian"));
        }
        let out = Self(m);
        let (lo, _) = out.eigenvalues();
        if lo < -PSD_TOLERANCE {
            return Err(domain(format!("coherence matrix not PSD (min eigenvalue {lo:e})")));
        }
        Ok(out)
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    pub fn aa(&self) -> f64 {
        self.0[(0, 0)].re
    }

    pub fn bb(&self) -> f64 {
        self.0[(1, 1)].re
    }

    /// `Γ_ab = ⟨b†a⟩`
    pub fn ab(&self) -> Complex64 {
        self.0[(0, 1)]
    }

    pub fn trace(&self) -> f64 {
        self.aa() + self.bb()
    }

    pub fn det(&self) -> f64 {
        self.aa() * self.bb() - self.ab().norm_sqr()
    }

    /// Eigenvalues in ascending order (closed form for 2×2 Hermitian).
    pub fn eigenvalues(&self) -> (f64, f64) {
        let half_tr = 0.5 * self.trace();
        let half_diff = 0.5 * (self.aa() - self.bb());
        let r = (half_diff * half_diff + self.ab().norm_sqr()).sqrt();
        (half_tr - r, half_tr + r)
    }

    /// Factor `L` with `L L† = Γ`, built from the eigendecomposition with
    /// eigenvalues below [`PSD_TOLERANCE`] set to exactly zero.
    pub fn square_root_factor(&self) -> Matrix2<Complex64> {
        let eig = self.0.symmetric_eigen();
        let mut factor = eig.eigenvectors;
        for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
            let s = if lambda > PSD_TOLERANCE { lambda.sqrt() } else { 0.0 };
            factor.column_mut(j).scale_mut(s);
        }
        factor
    }
}

/// Weak-light density operator on the truncated two-mode Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityOperator {
    matrix: Matrix4<Complex64>,
    /// Records that O(ε²) terms (the `|1,1⟩` and two-photon blocks) are dropped.
    pub truncated: bool,
}

impl FockDensityOperator {
    /// Truncated matrix for arbitrary `(ε, g)` without domain checks.
    /// Finite-difference stencils need it just outside `|g| ≤ 1`.
    pub fn from_unchecked(epsilon: f64, g: Complex64) -> Self {
        Self { matrix: weak_density_matrix(epsilon, g), truncated: true }
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut ev: Vec<f64> = self.matrix.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2], ev[3]]
    }
}

/// Pair of classical complex field amplitudes for modes a and b.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexFieldSample {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl ComplexFieldSample {
    pub fn new(alpha: Complex64, beta: Complex64) -> Self {
        Self { alpha, beta }
    }

    pub fn as_vector(&self) -> Vector2<Complex64> {
        Vector2::new(self.alpha, self.beta)
    }
}

/// `Γ = [[ε/2, εg/2], [εg*/2, ε/2]]`.
pub fn build_coherence_matrix(params: &CoherenceParams) -> MutualCoherenceMatrix {
    let half = 0.5 * params.epsilon;
    let off = params.g * half;
    MutualCoherenceMatrix(Matrix2::new(Complex64::from(half), off, off.conj(), Complex64::from(half)))
}

/// Glauber–Sudarshan P function `Φ(α,β) = exp(−v†Γ⁻¹v) / (π² det Γ)`.
pub fn evaluate_p_function(gamma: &MutualCoherenceMatrix, sample: &ComplexFieldSample) -> Result<f64> {
    let det = gamma.det();
    if det <= PSD_TOLERANCE * PSD_TOLERANCE * gamma.trace().max(1.0).powi(2) {
        return Err(Error::SingularCoherence { det });
    }
    // Γ⁻¹ = adj(Γ)/det for 2×2.
    let (a, b) = (sample.alpha, sample.beta);
    let quad = gamma.bb() * a.norm_sqr() + gamma.aa() * b.norm_sqr() - 2.0 * (a.conj() * gamma.ab() * b).re;
    Ok((-quad / det).exp() / (PI * PI * det))
}

/// Truncated density operator
/// `(1−ε)|0,0⟩⟨0,0| + (ε/2)[|0,1⟩⟨0,1| + |1,0⟩⟨1,0| + g*|0,1⟩⟨1,0| + g|1,0⟩⟨0,1|]`.
pub fn weak_density_operator(params: &CoherenceParams) -> Result<FockDensityOperator> {
    if params.epsilon > 1.0 {
        return Err(domain(format!("weak-light truncation needs epsilon <= 1, got {}", params.epsilon)));
    }
    Ok(FockDensityOperator { matrix: weak_density_matrix(params.epsilon, params.g), truncated: true })
}

/// Same matrix as [`weak_density_operator`] without domain checks. Probability
/// models use it for finite-difference stencils that step outside `|g| ≤ 1`.
pub(crate) fn weak_density_matrix(epsilon: f64, g: Complex64) -> Matrix4<Complex64> {
    use basis::*;
    let mut rho = Matrix4::zeros();
    let half = 0.5 * epsilon;
    rho[(VACUUM, VACUUM)] = Complex64::from(1.0 - epsilon);
    rho[(ONE_B, ONE_B)] = Complex64::from(half);
    rho[(ONE_A, ONE_A)] = Complex64::from(half);
    rho[(ONE_B, ONE_A)] = g.conj() * half;
    rho[(ONE_A, ONE_B)] = g * half;
    rho
}

/// Draws circularly symmetric complex Gaussian pairs with covariance Γ.
#[derive(Debug, Clone, Copy)]
pub struct FieldSampler {
    factor: Matrix2<Complex64>,
}

impl FieldSampler {
    pub fn new(gamma: &MutualCoherenceMatrix) -> Self {
        Self { factor: gamma.square_root_factor() }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexFieldSample {
        let z = Vector2::new(standard_complex_normal(rng), standard_complex_normal(rng));
        let v = self.factor * z;
        ComplexFieldSample::new(v[0], v[1])
    }
}

/// One draw from Φ. For repeated draws build a [`FieldSampler`] once.
pub fn sample_fields<R: Rng + ?Sized>(gamma: &MutualCoherenceMatrix, rng: &mut R) -> ComplexFieldSample {
    FieldSampler::new(gamma).sample(rng)
}

/// `z` with `E|z|² = 1`, independent real and imaginary parts.
pub(crate) fn standard_complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

/// Heterodyne output covariance `Γ' = Γ + I`; the identity is detection noise.
pub fn heterodyne_output_covariance(gamma: &MutualCoherenceMatrix) -> MutualCoherenceMatrix {
    MutualCoherenceMatrix(gamma.0 + Matrix2::identity())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn coherence_matrix_entries() {
        let p = CoherenceParams::new(0.1, 0.6, 0.0).unwrap();
        let gamma = build_coherence_matrix(&p);
        let m = gamma.matrix();
        assert_abs_diff_eq!(m[(0, 0)].re, 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 1)].re, 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(0, 1)].re, 0.03, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 0)].re, 0.03, epsilon = 1e-15);
    }

    #[test]
    fn vacuum_and_full_coherence() {
        let zero = build_coherence_matrix(&CoherenceParams::new(0.0, 0.3, -0.2).unwrap());
        assert!(zero.matrix().iter().all(|z| *z == Complex64::from(0.0)));

        let full = build_coherence_matrix(&CoherenceParams::new(0.1, 1.0, 0.0).unwrap());
        assert_abs_diff_eq!(full.det(), 0.0, epsilon = 1e-18);
        let (lo, hi) = full.eigenvalues();
        assert_abs_diff_eq!(lo, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(hi, 0.1, epsilon = 1e-15);
    }

    #[test]
    fn rejects_out_of_domain() {
        assert!(matches!(CoherenceParams::new(-0.1, 0.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(CoherenceParams::new(0.1, 0.8, 0.8), Err(Error::Domain(_))));
        assert!(CoherenceParams::new(f64::NAN, 0.0, 0.0).is_err());
        let p = CoherenceParams::new(1.5, 0.0, 0.0).unwrap();
        assert!(weak_density_operator(&p).is_err());
    }

    #[test]
    fn p_function_peak_and_symmetry() {
        let gamma = build_coherence_matrix(&CoherenceParams::new(0.1, 0.0, 0.0).unwrap());
        let peak = evaluate_p_function(&gamma, &ComplexFieldSample::new(c(0.0, 0.0), c(0.0, 0.0))).unwrap();
        assert_abs_diff_eq!(peak, 1.0 / (PI * PI * 0.0025), epsilon = 1e-9);
        assert_abs_diff_eq!(peak, 40.528473456935, epsilon = 1e-9);

        let gamma = build_coherence_matrix(&CoherenceParams::new(0.3, 0.4, -0.5).unwrap());
        let s = ComplexFieldSample::new(c(0.1, -0.2), c(0.05, 0.3));
        let neg = ComplexFieldSample::new(-s.alpha, -s.beta);
        assert_eq!(evaluate_p_function(&gamma, &s).unwrap(), evaluate_p_function(&gamma, &neg).unwrap());
    }

    #[test]
    fn p_function_rejects_singular() {
        let gamma = build_coherence_matrix(&CoherenceParams::new(0.1, 1.0, 0.0).unwrap());
        let s = ComplexFieldSample::new(c(0.0, 0.0), c(0.0, 0.0));
        assert!(matches!(evaluate_p_function(&gamma, &s), Err(Error::SingularCoherence { .. })));
        let vac = build_coherence_matrix(&CoherenceParams::new(0.0, 0.0, 0.0).unwrap());
        assert!(evaluate_p_function(&vac, &s).is_err());
    }

    /// Midpoint quadrature over a 4-real-dimensional box of half-width
    /// `6·sqrt(ε/2)`, the oracle for normalization of Φ.
    #[test]
    fn p_function_integrates_to_one() {
        let p = CoherenceParams::new(0.1, 0.6, 0.0).unwrap();
        let gamma = build_coherence_matrix(&p);
        let radius = 6.0 * (0.05f64).sqrt();
        let n = 40;
        let h = 2.0 * radius / n as f64;
        let node = |i: usize| -radius + (i as f64 + 0.5) * h;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let s = ComplexFieldSample::new(c(node(i), node(j)), c(node(k), node(l)));
                        total += evaluate_p_function(&gamma, &s).unwrap();
                    }
                }
            }
        }
        total *= h.powi(4);
        assert!((total - 1.0).abs() < 1e-3, "integral = {total}");
    }

    #[test]
    fn weak_density_operator_entries() {
        let p = CoherenceParams::new(0.1, 0.6, 0.0).unwrap();
        let rho = weak_density_operator(&p).unwrap();
        let m = rho.matrix();
        use basis::*;
        assert_abs_diff_eq!(m[(VACUUM, VACUUM)].re, 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(ONE_B, ONE_B)].re, 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(ONE_A, ONE_A)].re, 0.05, epsilon = 1e-15);
        assert_eq!(m[(BOTH, BOTH)], Complex64::from(0.0));
        assert_abs_diff_eq!(m[(ONE_A, ONE_B)].re, 0.03, epsilon = 1e-15);
        assert!(rho.truncated);

        let q = CoherenceParams::new(0.1, 0.2, 0.7).unwrap();
        let m = weak_density_operator(&q).unwrap().matrix().clone_owned();
        assert_eq!(m[(ONE_B, ONE_A)], q.g().conj() * 0.05);
        assert_eq!(m[(ONE_A, ONE_B)], q.g() * 0.05);
        for k in 0..4 {
            assert_eq!(m[(BOTH, k)], Complex64::from(0.0));
            assert_eq!(m[(k, BOTH)], Complex64::from(0.0));
        }
    }

    #[test]
    fn vacuum_density_operator() {
        let rho = weak_density_operator(&CoherenceParams::new(0.0, 0.5, 0.5).unwrap()).unwrap();
        let mut expected = Matrix4::zeros();
        expected[(0, 0)] = Complex64::from(1.0);
        assert_eq!(*rho.matrix(), expected);
    }

    #[test]
    fn density_eigenvalues_full_coherence() {
        let rho = weak_density_operator(&CoherenceParams::new(0.1, 1.0, 0.0).unwrap()).unwrap();
        let ev = rho.eigenvalues();
        let expected = [0.0, 0.0, 0.1, 0.9];
        for (a, b) in ev.iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn heterodyne_covariance() {
        let gamma = build_coherence_matrix(&CoherenceParams::new(2.0, 1.0, 0.0).unwrap());
        let gp = heterodyne_output_covariance(&gamma);
        let expected = Matrix2::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0));
        assert_eq!(*gp.matrix(), expected);

        let vac = build_coherence_matrix(&CoherenceParams::new(0.0, 0.0, 0.0).unwrap());
        assert_eq!(*heterodyne_output_covariance(&vac).matrix(), Matrix2::identity());

        let gamma = build_coherence_matrix(&CoherenceParams::new(0.1, 0.6, 0.0).unwrap());
        let d = heterodyne_output_covariance(&gamma).det();
        // (1 + 0.05)^2 - 0.03^2
        assert_abs_diff_eq!(d, 1.1016, epsilon = 1e-12);
    }

    #[test]
    fn vacuum_sampler_is_exactly_zero() {
        let gamma = build_coherence_matrix(&CoherenceParams::new(0.0, 0.0, 0.0).unwrap());
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..100 {
            let s = sample_fields(&gamma, &mut rng);
            assert_eq!(s.alpha, Complex64::from(0.0));
            assert_eq!(s.beta, Complex64::from(0.0));
        }
    }

    #[test]
    fn degenerate_sampler_stays_on_range() {
        // g = 1 ⇒ β = α exactly up to roundoff.
        let gamma = build_coherence_matrix(&CoherenceParams::new(0.4, 1.0, 0.0).unwrap());
        let sampler = FieldSampler::new(&gamma);
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let s = sampler.sample(&mut rng);
            assert!((s.alpha - s.beta).norm() < 1e-12 * (1.0 + s.alpha.norm()));
        }
    }
}
