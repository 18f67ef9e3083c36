//! Monte Carlo measurement records, maximum-likelihood estimation and
//! strong-light sampling.
//!
//! Every stochastic entry point takes a [`StreamId`](crate::rng::StreamId);
//! identical inputs give bit-identical outputs.

mod empirical;
mod mle;
mod record;
mod sampling;

pub use empirical::{
    direct_moments_mc, empirical_snr, heterodyne_moments_mc, EmpiricalSnr, Estimate, SnrStatistic, JACKKNIFE_BLOCKS,
    MIN_SHOTS,
};
pub use mle::{
    mle_estimate, run_ensemble, schedule_fisher, EnsembleSpec, EnsembleSummary, EstimationResult, TrialResult,
    BOUNDARY_MARGIN, GRADIENT_TOLERANCE, SEED_GRID,
};
pub use record::{DeltaSchedule, MeasurementRecord, Outcome, Shot};
pub use sampling::{sample_homodyne, sample_record, semiclassical_direct_sampler, DirectCountSampler};
