//! The three stable laws with closed-form densities, plus the Pareto tail
//! asymptote. These serve as test oracles for the sampler.

use core::f64::consts::PI;

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use super::StableParams;
use crate::error::{Error, Result};
use crate::math::gamma as gamma_fn;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `S_0.5(1, gamma, mu)`
    Levy,
    /// `S_1(0, gamma, mu)`
    Cauchy,
    /// `S_2(0, gamma, mu)`, variance `2 gamma`
    Normal,
}

impl Family {
    fn check(&self, params: &StableParams) -> Result<()> {
        let (alpha, beta) = match self {
            Family::Levy => (0.5, 1.0),
            Family::Cauchy => (1.0, 0.0),
            Family::Normal => (2.0, 0.0),
        };
        if params.alpha != alpha || params.beta != beta {
            return Err(Error::InvalidParams(alloc::format!("{self:?} requires alpha = {alpha}, beta = {beta}")));
        }
        params.validate()
    }
}

pub fn closed_form_pdf(family: Family, x: f64, params: &StableParams) -> Result<f64> {
    family.check(params)?;
    let g = params.gamma;
    let z = x - params.mu;
    Ok(match family {
        Family::Levy => {
            if z <= 0.0 {
                0.0
            } else {
                g / (2.0 * PI).sqrt() * z.powf(-1.5) * (-g * g / (2.0 * z)).exp()
            }
        }
        Family::Cauchy => g / (PI * (g * g + z * z)),
        Family::Normal => (-z * z / (4.0 * g)).exp() / (2.0 * (PI * g).sqrt()),
    })
}

pub fn closed_form_cdf(family: Family, x: f64, params: &StableParams) -> Result<f64> {
    family.check(params)?;
    let g = params.gamma;
    let z = x - params.mu;
    Ok(match family {
        Family::Levy => {
            if z <= 0.0 {
                0.0
            } else {
                libm::erfc(g / (2.0 * z).sqrt())
            }
        }
        Family::Cauchy => 0.5 + (z / g).atan() / PI,
        Family::Normal => 0.5 * libm::erfc(-z / (2.0 * g.sqrt())),
    })
}

/// `C_alpha = Gamma(alpha) sin(alpha pi / 2) / pi`.
pub fn tail_constant(alpha: f64) -> f64 {
    gamma_fn(alpha) * (alpha * PI / 2.0).sin() / PI
}

/// Leading term of `Pr(X > x)` for large `x`: `(1 + beta) gamma C_alpha x^-alpha`.
pub fn tail_asymptote(params: &StableParams, x: f64) -> Result<f64> {
    params.validate()?;
    if params.alpha >= 2.0 {
        return Err(Error::InvalidParams("no Pareto tail at alpha = 2".into()));
    }
    if x <= 0.0 {
        return Err(Error::InvalidParams("tail asymptote needs x > 0".into()));
    }
    Ok((1.0 + params.beta) * params.gamma * tail_constant(params.alpha) * x.powf(-params.alpha))
}
