//! Univariate estimates with bootstrap spread.

use alloc::vec::Vec;

use super::summary;
use crate::error::Result;
use crate::exec::Executor;
use crate::model::symmetrize_values;
use crate::rng::{derive_seed, seeded};
use crate::stable::{estimate_alpha, estimate_gamma, estimate_theta};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleEstimate {
    pub alpha: f64,
    pub theta: f64,
    /// Generator scale: the symmetrized estimate halved.
    pub gamma: f64,
}

/// `alpha` and `gamma` from the pairwise-differenced sample, `theta` from
/// the raw one. `gamma` uses `p = alpha_hat / p_divisor`.
pub fn estimate_sample(values: &[f64], p_divisor: f64) -> Result<SampleEstimate> {
    let sym = symmetrize_values(values);
    let alpha = estimate_alpha(&sym)?;
    let gamma = estimate_gamma(&sym, alpha, alpha / p_divisor)? / 2.0;
    Ok(SampleEstimate { alpha, theta: estimate_theta(values, alpha), gamma })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapSummary {
    pub point: SampleEstimate,
    pub replicates: Vec<SampleEstimate>,
    pub alpha: (f64, f64),
    pub theta: (f64, f64),
    pub gamma: (f64, f64),
}

/// Point estimate plus `n_boot` estimates on rows resampled with
/// replacement; replicate `b` draws from its own derived seed.
pub fn bootstrap<E: Executor>(
    values: &[f64],
    n_boot: usize,
    seed: u64,
    p_divisor: f64,
    exec: &E,
) -> Result<BootstrapSummary> {
    let point = estimate_sample(values, p_divisor)?;
    let n = values.len();
    let replicates = exec
        .map(n_boot, |b| {
            let mut rng = seeded(derive_seed(seed, b as u64));
            let resample: Vec<f64> = (0..n).map(|_| values[rand::Rng::random_range(&mut rng, 0..n)]).collect();
            estimate_sample(&resample, p_divisor)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let stat = |f: fn(&SampleEstimate) -> f64| summary(&replicates.iter().map(f).collect::<Vec<_>>());
    Ok(BootstrapSummary {
        point,
        alpha: stat(|e| e.alpha),
        theta: stat(|e| e.theta),
        gamma: stat(|e| e.gamma),
        replicates,
    })
}
