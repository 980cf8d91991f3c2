//! Moment-based estimators: log statistics for `alpha`, zeroth-order signed
//! moments for `theta`, fractional lower-order moments (FLOM) for `gamma`.

use core::f64::consts::{FRAC_PI_2, PI};

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::math::{gamma as gamma_fn, mean_abs_power, sign, PSI1};

/// Lower clamp for `alpha_hat`; the estimate lives in `(0.1, 2]`.
pub const ALPHA_MIN: f64 = 0.1;
pub const ALPHA_MAX: f64 = 2.0;

/// FLOM constant `C(p, alpha)` with `E|Z|^p = C(p, alpha) gamma^(p/alpha)`
/// for symmetric `Z ~ S_alpha(0, gamma, 0)`.
///
/// The denominator `Gamma(1-p) cos(p pi/2)` has a removable singularity at
/// odd integers; away from `p = 0` it is evaluated through the reflection
/// formula as `pi / (2 Gamma(p) sin(p pi/2))`.
pub fn flom_constant(p: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::InvalidParams(alloc::format!("alpha = {alpha} not in (0, 2]")));
    }
    if !(p > -1.0 && p < alpha) {
        return Err(Error::ExponentOutOfRange { p, range: "(-1, alpha)" });
    }
    let numerator = gamma_fn(1.0 - p / alpha);
    let denominator = if p.abs() < 0.5 {
        gamma_fn(1.0 - p) * (p * FRAC_PI_2).cos()
    } else {
        PI / (2.0 * gamma_fn(p) * (p * FRAC_PI_2).sin())
    };
    Ok(numerator / denominator)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogStatistics {
    /// Sample variance of `ln|x|` over nonzero entries.
    pub l2: f64,
    pub n_used: usize,
    /// Exact zeros skipped; nonzero counts point at degenerate data.
    pub n_dropped: usize,
}

pub fn log_statistics(values: &[f64]) -> Result<LogStatistics> {
    let logs: alloc::vec::Vec<f64> = values.iter().filter(|v| **v != 0.0).map(|v| v.abs().ln()).collect();
    if logs.len() < 2 {
        return Err(Error::Degenerate(alloc::format!(
            "log statistics need at least two nonzero values, got {}",
            logs.len()
        )));
    }
    if logs.iter().any(|l| !l.is_finite()) {
        return Err(Error::Degenerate("non-finite value in log statistics".into()));
    }
    Ok(LogStatistics { l2: crate::math::variance(&logs), n_used: logs.len(), n_dropped: values.len() - logs.len() })
}

/// `alpha_hat = (L2 / psi1 - 1/2)^(-1/2)` on centro-symmetric data.
pub fn estimate_alpha(values: &[f64]) -> Result<f64> {
    Ok(alpha_from_l2(log_statistics(values)?.l2))
}

pub(crate) fn alpha_from_l2(l2: f64) -> f64 {
    let excess = l2 / PSI1 - 0.5;
    if excess <= 0.0 {
        return ALPHA_MAX;
    }
    (1.0 / excess.sqrt()).clamp(ALPHA_MIN.next_up(), ALPHA_MAX)
}

/// `theta_hat = (alpha pi / 2n) sum sign(x)`.
pub fn estimate_theta(values: &[f64], alpha: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let signs: f64 = values.iter().map(|v| sign(*v)).sum();
    (alpha * PI / (2.0 * values.len() as f64) * signs).clamp(-FRAC_PI_2, FRAC_PI_2)
}

/// Inverts the FLOM relation: `gamma = (mean|x|^p / C(p, alpha))^(alpha/p)`.
pub fn estimate_gamma(values: &[f64], alpha: f64, p: f64) -> Result<f64> {
    let constant = flom_constant(p, alpha)?;
    if p == 0.0 {
        return Err(Error::ExponentOutOfRange { p, range: "(-1, alpha) excluding 0" });
    }
    let moment = mean_abs_power(values, p);
    if !(moment > 0.0 && moment.is_finite()) {
        return Err(Error::Degenerate(alloc::format!("mean absolute power {moment} is not positive and finite")));
    }
    Ok((moment / constant).powf(alpha / p))
}

pub fn theta_from_beta(alpha: f64, beta: f64) -> f64 {
    (beta * (alpha * FRAC_PI_2).tan()).atan()
}

/// Inverse of [`theta_from_beta`], clamped to `[-1, 1]`. Returns 0 where the
/// map is not invertible (`alpha = 1`, `alpha = 2`).
pub fn beta_from_theta(alpha: f64, theta: f64) -> f64 {
    let t = (alpha * FRAC_PI_2).tan();
    if !t.is_finite() || t.abs() < 1e-12 || t.abs() > 1e12 {
        return 0.0;
    }
    (theta.tan() / t).clamp(-1.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorReport {
    pub alpha_hat: f64,
    pub theta_hat: f64,
    pub gamma_hat: f64,
    pub n_used: usize,
}

/// All three estimates from one centro-symmetric sample, with `gamma`
/// evaluated at `p = alpha_hat / p_divisor`.
pub fn estimate(values: &[f64], p_divisor: f64) -> Result<EstimatorReport> {
    let stats = log_statistics(values)?;
    let alpha_hat = alpha_from_l2(stats.l2);
    let gamma_hat = estimate_gamma(values, alpha_hat, alpha_hat / p_divisor)?;
    Ok(EstimatorReport { alpha_hat, theta_hat: estimate_theta(values, alpha_hat), gamma_hat, n_used: stats.n_used })
}
