//! Outcome samplers.

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use super::record::{DeltaSchedule, MeasurementRecord, Outcome, Shot};
use crate::error::{domain, Result};
use crate::fisher::observed_quadrature;
use crate::povm::{born_distribution, discrete_povm, rotate_fields, Measurement, Scheme};
use crate::rng::StreamId;
use crate::thermal::{
    build_coherence_matrix, heterodyne_output_covariance, weak_density_operator, CoherenceParams, FieldSampler,
    MutualCoherenceMatrix,
};

/// Draws `shots` i.i.d. outcomes, one per scheduled phase.
///
/// Discrete schemes sample the weak-light Born distribution. Heterodyne and
/// homodyne sample the exact Gaussian outcome laws of the full thermal state:
/// complex `(μ, ν)` with covariance `Γ + I`, and real `(x, y)` with variances
/// `(1 + ε)/2` and covariance `(ε/2) Re(ge^{−iδ})`.
pub fn sample_record(
    params: &CoherenceParams,
    scheme: Scheme,
    schedule: &DeltaSchedule,
    shots: usize,
    stream: StreamId,
) -> Result<MeasurementRecord> {
    schedule.check(shots)?;
    let mut rng = stream.rng();
    let mut out = Vec::with_capacity(shots);
    match scheme {
        Scheme::Direct | Scheme::Entangled => {
            let rho = weak_density_operator(params)?;
            let mut tables: Vec<(u64, WeightedIndex<f64>)> = Vec::new();
            for i in 0..shots {
                let delta = schedule.delta(i);
                let pos = match tables.iter().position(|(b, _)| *b == delta.to_bits()) {
                    Some(p) => p,
                    None => {
                        let povm = discrete_povm(scheme, delta)?;
                        let dist = born_distribution(&rho, Measurement::Discrete(&povm))?;
                        let weights = dist.probabilities.iter().map(|p| p.max(0.0));
                        let index = WeightedIndex::new(weights).map_err(|e| domain(e.to_string()))?;
                        tables.push((delta.to_bits(), index));
                        tables.len() - 1
                    }
                };
                out.push(Shot { delta, outcome: Outcome::Discrete(tables[pos].1.sample(&mut rng)) });
            }
        }
        Scheme::Heterodyne => {
            let sampler = FieldSampler::new(&heterodyne_output_covariance(&build_coherence_matrix(params)));
            for i in 0..shots {
                let s = sampler.sample(&mut rng);
                out.push(Shot { delta: schedule.delta(i), outcome: Outcome::Heterodyne { mu: s.alpha, nu: s.beta } });
            }
        }
        Scheme::Homodyne => {
            for i in 0..shots {
                let delta = schedule.delta(i);
                let (x, y) = sample_homodyne(params, delta, &mut rng);
                out.push(Shot { delta, outcome: Outcome::Homodyne { x, y } });
            }
        }
    }
    Ok(MeasurementRecord { scheme, epsilon: params.epsilon(), g_truth: Some(params.g()), stream, shots: out })
}

/// One homodyne quadrature pair at relative phase `δ`.
pub fn sample_homodyne<R: Rng + ?Sized>(params: &CoherenceParams, delta: f64, rng: &mut R) -> (f64, f64) {
    let var = 0.5 * (1.0 + params.epsilon());
    let rho = 0.5 * params.epsilon() * observed_quadrature(params.g(), delta) / var;
    let sd = var.sqrt();
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    (sd * z1, sd * (rho * z1 + (1.0 - rho * rho).sqrt() * z2))
}

/// Photon-count pair behind a beam splitter with phase `delta`, drawn from the
/// classical-field picture: fields from Φ, rotated to the output ports, then
/// independent Poisson counts with means `|u|²` and `|v|²`. Valid at any ε.
pub fn semiclassical_direct_sampler<R: Rng + ?Sized>(
    gamma: &MutualCoherenceMatrix,
    delta: f64,
    rng: &mut R,
) -> Result<(u64, u64)> {
    DirectCountSampler::new(gamma, delta).sample(rng)
}

/// Reusable form of [`semiclassical_direct_sampler`].
#[derive(Debug, Clone, Copy)]
pub struct DirectCountSampler {
    fields: FieldSampler,
    delta: f64,
}

impl DirectCountSampler {
    pub fn new(gamma: &MutualCoherenceMatrix, delta: f64) -> Self {
        Self { fields: FieldSampler::new(gamma), delta }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(u64, u64)> {
        let (u, v) = rotate_fields(&self.fields.sample(rng), self.delta);
        Ok((poisson(u.norm_sqr(), rng)?, poisson(v.norm_sqr(), rng)?))
    }
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if mean <= 0.0 {
        return Ok(0);
    }
    let d = Poisson::new(mean).map_err(|e| domain(format!("Poisson mean {mean}: {e}")))?;
    Ok(d.sample(rng) as u64)
}
