//! Chambers-Mallows-Stuck sampling.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use super::{is_cauchy_branch, StableParams};
use crate::error::Result;
use crate::rng::{open_unit, seeded, SeededRng};

/// One draw from the standard law `S_alpha(beta, 1, 0)`.
pub fn sample_standard(alpha: f64, beta: f64, rng: &mut SeededRng) -> f64 {
    let v = PI * (open_unit(rng) - 0.5);
    let w = -open_unit(rng).ln();
    if is_cauchy_branch(alpha) {
        let shifted = FRAC_PI_2 + beta * v;
        2.0 / PI * (shifted * v.tan() - beta * ((FRAC_PI_2 * w * v.cos()) / shifted).ln())
    } else {
        let zeta = beta * (alpha * FRAC_PI_2).tan();
        let b = zeta.atan() / alpha;
        let s = (1.0 + zeta * zeta).powf(1.0 / (2.0 * alpha));
        let arg = alpha * (v + b);
        s * arg.sin() / v.cos().powf(1.0 / alpha) * ((v - arg).cos() / w).powf((1.0 - alpha) / alpha)
    }
}

/// `n` i.i.d. draws from `params`, consuming `rng`.
pub fn sample_with(params: &StableParams, n: usize, rng: &mut SeededRng) -> Result<Vec<f64>> {
    params.validate()?;
    // X ~ S(beta, 1, 0) maps to the target law through c X + d with
    // c = gamma^(1/alpha) and d the inverse of the standardizing offset.
    let c = params.gamma.powf(1.0 / params.alpha);
    let d = params.standard_offset() * c;
    Ok((0..n).map(|_| c * sample_standard(params.alpha, params.beta, rng) + d).collect())
}

/// `n` i.i.d. draws, deterministic in `seed`.
pub fn sample(params: &StableParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = seeded(seed);
    sample_with(params, n, &mut rng)
}
