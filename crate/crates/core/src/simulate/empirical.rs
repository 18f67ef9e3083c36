//! Monte Carlo moments and signal-to-noise ratios with block-jackknife
//! standard errors.

use num_complex::Complex64;
use serde::Serialize;

use super::sampling::DirectCountSampler;
use crate::error::{domain, Result};
use crate::rng::StreamId;
use crate::snr::MomentReport;
use crate::thermal::{build_coherence_matrix, heterodyne_output_covariance, CoherenceParams, FieldSampler};

/// Jackknife blocks per run.
pub const JACKKNIFE_BLOCKS: usize = 100;
/// Fewest shots per phase accepted by [`empirical_snr`].
pub const MIN_SHOTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    /// `|value − target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.value - target).abs() / self.se
    }
}

/// Statistic whose mean defines the signal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SnrStatistic {
    /// Heterodyne `μν*`.
    CrossProduct,
    /// Direct detection `n − m`, averaged over the listed phases
    /// (`[δ₁, δ₁ + π/2]` is the two-phase protocol).
    CountDifference { deltas: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalSnr {
    pub signal: Estimate,
    pub noise: Estimate,
    pub ratio: Estimate,
    pub shots: usize,
}

/// Delete-one-block jackknife. `blocks[k]` holds additive sums (last entry
/// the shot count); `stat` maps totals to statistics.
fn jackknife<F>(blocks: &[Vec<f64>], stat: F) -> Vec<Estimate>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let dim = blocks[0].len();
    let total: Vec<f64> = (0..dim).map(|i| blocks.iter().map(|b| b[i]).sum()).collect();
    let full = stat(&total);
    let b = blocks.len() as f64;
    let loo: Vec<Vec<f64>> =
        blocks.iter().map(|blk| stat(&total.iter().zip(blk).map(|(t, x)| t - x).collect::<Vec<_>>())).collect();
    (0..full.len())
        .map(|j| {
            let mean = loo.iter().map(|v| v[j]).sum::<f64>() / b;
            let var = (b - 1.0) / b * loo.iter().map(|v| (v[j] - mean).powi(2)).sum::<f64>();
            Estimate { value: full[j], se: var.sqrt() }
        })
        .collect()
}

fn block_bounds(shots: usize) -> Vec<(usize, usize)> {
    let blocks = JACKKNIFE_BLOCKS.min(shots.max(1));
    (0..blocks).map(|k| (k * shots / blocks, (k + 1) * shots / blocks)).collect()
}

/// Sums `[Re w, Im w, |w|²]` per block for each group, concatenated, plus
/// the shot count per group.
fn snr_from_sums(sums: &[f64], groups: usize) -> Vec<f64> {
    let (mut s, mut nse) = (0.0, 0.0);
    for g in 0..groups {
        let x = &sums[4 * g..4 * g + 4];
        let n = x[3];
        let mean = Complex64::new(x[0] / n, x[1] / n);
        let var = (x[2] - n * mean.norm_sqr()) / (n - 1.0);
        s += mean.norm_sqr() - var / n;
        nse += var;
    }
    let (s, nse) = (s / groups as f64, nse / groups as f64);
    vec![s, nse, s / nse]
}

/// Empirical `S = |⟨w⟩|²` (bias-corrected) and `N = Var(w)` from `shots`
/// draws per phase.
///
/// Heterodyne draws `(μ, ν)` from `Γ + I`; direct detection uses the
/// semiclassical count sampler. For several phases the signal and noise are
/// averaged before forming the ratio.
pub fn empirical_snr(
    params: &CoherenceParams,
    statistic: &SnrStatistic,
    shots: usize,
    stream: StreamId,
) -> Result<EmpiricalSnr> {
    if shots < MIN_SHOTS {
        return Err(domain(format!("empirical SNR needs at least {MIN_SHOTS} shots per phase, got {shots}")));
    }
    let gamma = build_coherence_matrix(params);
    let mut rng = stream.rng();
    let bounds = block_bounds(shots);
    let mut blocks = vec![Vec::new(); bounds.len()];
    let groups = match statistic {
        SnrStatistic::CrossProduct => {
            let sampler = FieldSampler::new(&heterodyne_output_covariance(&gamma));
            for (blk, &(lo, hi)) in blocks.iter_mut().zip(&bounds) {
                let mut acc = [0.0, 0.0, 0.0, (hi - lo) as f64];
                for _ in lo..hi {
                    let s = sampler.sample(&mut rng);
                    let w = s.alpha * s.beta.conj();
                    acc[0] += w.re;
                    acc[1] += w.im;
                    acc[2] += w.norm_sqr();
                }
                blk.extend_from_slice(&acc);
            }
            1
        }
        SnrStatistic::CountDifference { deltas } => {
            if deltas.is_empty() {
                return Err(domain("count-difference statistic needs at least one phase"));
            }
            for &delta in deltas {
                let sampler = DirectCountSampler::new(&gamma, delta);
                for (blk, &(lo, hi)) in blocks.iter_mut().zip(&bounds) {
                    let mut acc = [0.0, 0.0, 0.0, (hi - lo) as f64];
                    for _ in lo..hi {
                        let (n, m) = sampler.sample(&mut rng)?;
                        let w = n as f64 - m as f64;
                        acc[0] += w;
                        acc[2] += w * w;
                    }
                    blk.extend_from_slice(&acc);
                }
            }
            deltas.len()
        }
    };
    let est = jackknife(&blocks, |s| snr_from_sums(s, groups));
    Ok(EmpiricalSnr { signal: est[0], noise: est[1], ratio: est[2], shots: shots * groups })
}

/// Sample moments of semiclassical direct-detection counts at phase `delta`,
/// each with a jackknife standard error.
pub fn direct_moments_mc(
    params: &CoherenceParams,
    delta: f64,
    shots: usize,
    stream: StreamId,
) -> Result<(MomentReport, MomentReport)> {
    if shots < 2 {
        return Err(domain("moments need at least two shots"));
    }
    let sampler = DirectCountSampler::new(&build_coherence_matrix(params), delta);
    let mut rng = stream.rng();
    let mut blocks = Vec::new();
    for (lo, hi) in block_bounds(shots) {
        let mut acc = vec![0.0; 6];
        for _ in lo..hi {
            let (n, m) = sampler.sample(&mut rng)?;
            let (n, m) = (n as f64, m as f64);
            acc[0] += n;
            acc[1] += m;
            acc[2] += n * n;
            acc[3] += m * m;
            acc[4] += n * m;
        }
        acc[5] = (hi - lo) as f64;
        blocks.push(acc);
    }
    let est = jackknife(&blocks, |s| {
        let k = s[5];
        let (mn, mm) = (s[0] / k, s[1] / k);
        let c = k / (k - 1.0);
        vec![mn, mm, c * (s[2] / k - mn * mn), c * (s[3] / k - mm * mm), c * (s[4] / k - mn * mm)]
    });
    let pick = |f: fn(&Estimate) -> f64| MomentReport {
        mean_n: f(&est[0]),
        mean_m: f(&est[1]),
        var_n: f(&est[2]),
        var_m: f(&est[3]),
        cov_nm: f(&est[4]),
    };
    Ok((pick(|e| e.value), pick(|e| e.se)))
}

/// Sample `⟨μν*⟩` and `⟨|μν*|²⟩` of heterodyne outcomes, with jackknife
/// standard errors. The complex mean is returned as `[Re, Im]`.
pub fn heterodyne_moments_mc(
    params: &CoherenceParams,
    shots: usize,
    stream: StreamId,
) -> Result<([Estimate; 2], Estimate)> {
    if shots < 2 {
        return Err(domain("moments need at least two shots"));
    }
    let sampler = FieldSampler::new(&heterodyne_output_covariance(&build_coherence_matrix(params)));
    let mut rng = stream.rng();
    let mut blocks = Vec::new();
    for (lo, hi) in block_bounds(shots) {
        let mut acc = vec![0.0, 0.0, 0.0, (hi - lo) as f64];
        for _ in lo..hi {
            let s = sampler.sample(&mut rng);
            let w = s.alpha * s.beta.conj();
            acc[0] += w.re;
            acc[1] += w.im;
            acc[2] += w.norm_sqr();
        }
        blocks.push(acc);
    }
    let est = jackknife(&blocks, |s| vec![s[0] / s[3], s[1] / s[3], s[2] / s[3]]);
    Ok(([est[0], est[1]], est[2]))
}
