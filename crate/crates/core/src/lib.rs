//! Estimation of the mutual coherence of bipartite thermal light.
//!
//! The crate compares nonlocal measurements (beam-splitter direct detection,
//! shared-entanglement detection) with local ones (heterodyne, homodyne) in
//! terms of Fisher information about the complex degree of coherence
//! `g = g1 + i g2`, given a known mean photon number `ε` per mode pair.
//!
//! | module | contents |
//! |--------|----------|
//! | [`thermal`] | coherence matrix Γ, P function, weak-light density operator, field sampling |
//! | [`povm`] | measurement catalog, Born rule, PPT matrix-element check, Husimi kernels |
//! | [`fisher`] | numeric and closed-form Fisher matrices, Cramér–Rao, LOCC and adaptive bounds |
//! | [`simulate`] | measurement records, maximum-likelihood estimation, semiclassical samplers, empirical SNR |
//! | [`snr`] | strong-light moments and signal-to-noise ratios at arbitrary ε |
//!
//! At weak flux the local schemes reach at most `‖F‖ ≈ ε²` per measurement
//! while direct detection reaches `‖F‖ ≥ ε`; for `ε ≫ 1` both SNRs saturate
//! to `|g|²`.

pub mod error;
pub mod fisher;
pub mod povm;
pub mod rng;
pub mod simulate;
pub mod snr;
pub mod thermal;

pub use error::{Error, Result};
pub use fisher::{BoundReport, CramerRaoBound, FisherMatrix};
pub use povm::{ContinuousPovmKernel, DiscretePovm, GridSpec, OutcomeDistribution, Scheme};
pub use rng::StreamId;
pub use thermal::{CoherenceParams, ComplexFieldSample, FockDensityOperator, MutualCoherenceMatrix};

pub use num_complex::Complex64;
