//! Univariate alpha-stable laws `S_alpha(beta, gamma, mu)`.
//!
//! Parametrized by the characteristic function
//! `exp(i mu q - gamma |q|^alpha [1 - i beta sign(q) r(q, alpha)])` with
//! `r = tan(alpha pi / 2)` for `alpha != 1` and `r = -(2/pi) ln|q|` at
//! `alpha = 1`. `gamma` is the dispersion (for the Gaussian, `sigma^2 / 2`).

mod closed_form;
mod estimate;
mod sampler;

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

pub use closed_form::{closed_form_cdf, closed_form_pdf, tail_asymptote, tail_constant, Family};
pub use estimate::{
    beta_from_theta, estimate, estimate_alpha, estimate_gamma, estimate_theta, flom_constant, log_statistics,
    theta_from_beta, EstimatorReport, LogStatistics, ALPHA_MAX, ALPHA_MIN,
};
pub use sampler::{sample, sample_standard, sample_with};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub mu: f64,
}

/// True when `alpha` should take the `alpha = 1` branch of the
/// parametrization.
#[inline]
pub(crate) fn is_cauchy_branch(alpha: f64) -> bool {
    alpha == 1.0
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, mu: f64) -> Result<Self> {
        let params = StableParams { alpha, beta, gamma, mu };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::InvalidParams(format!("alpha = {} not in (0, 2]", self.alpha)));
        }
        if !(-1.0..=1.0).contains(&self.beta) {
            return Err(Error::InvalidParams(format!("beta = {} not in [-1, 1]", self.beta)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParams(format!("gamma = {} must be positive", self.gamma)));
        }
        if !self.mu.is_finite() {
            return Err(Error::InvalidParams(format!("mu = {} must be finite", self.mu)));
        }
        Ok(())
    }

    /// Law of `c X + d`.
    pub fn scale_shift(&self, c: f64, d: f64) -> Result<StableParams> {
        self.validate()?;
        if c == 0.0 {
            return Err(Error::ZeroScale);
        }
        let abs_c = c.abs();
        let beta = crate::math::sign(c) * self.beta;
        let out = if is_cauchy_branch(self.alpha) {
            StableParams {
                alpha: self.alpha,
                beta,
                gamma: abs_c * self.gamma,
                mu: c * (self.mu - 2.0 * self.gamma * self.beta * abs_c.ln() / PI) + d,
            }
        } else {
            StableParams { alpha: self.alpha, beta, gamma: abs_c.powf(self.alpha) * self.gamma, mu: c * self.mu + d }
        };
        Ok(out)
    }

    /// Law of the sum of two independent variables with a common exponent.
    pub fn aggregate(&self, other: &StableParams) -> Result<StableParams> {
        self.validate()?;
        other.validate()?;
        if self.alpha != other.alpha {
            return Err(Error::AlphaMismatch(self.alpha, other.alpha));
        }
        let gamma = self.gamma + other.gamma;
        Ok(StableParams {
            alpha: self.alpha,
            beta: (self.beta * self.gamma + other.beta * other.gamma) / gamma,
            gamma,
            mu: self.mu + other.mu,
        })
    }

    /// Location offset `mu~` removed after dividing by `gamma^(1/alpha)`.
    pub fn standard_offset(&self) -> f64 {
        if is_cauchy_branch(self.alpha) {
            self.mu / self.gamma + 2.0 * self.beta * self.gamma.ln() / PI
        } else {
            self.mu / self.gamma.powf(1.0 / self.alpha)
        }
    }

    pub fn characteristic_function(&self, q: f64) -> Complex64 {
        char_exponent(q, self.alpha, self.beta, self.gamma, self.mu).exp()
    }

    /// `theta = arctan(beta tan(alpha pi / 2))`.
    pub fn theta(&self) -> f64 {
        theta_from_beta(self.alpha, self.beta)
    }
}

/// `r(q, alpha)` from the characteristic function.
pub(crate) fn skew_factor(u: f64, alpha: f64) -> f64 {
    if is_cauchy_branch(alpha) {
        -2.0 / PI * u.abs().ln()
    } else {
        (alpha * PI / 2.0).tan()
    }
}

/// `psi(u | alpha) = |u|^alpha (1 - i sign(u) r(u, alpha))`, zero at `u = 0`.
pub(crate) fn psi(u: f64, alpha: f64) -> Complex64 {
    if u == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let mag = u.abs().powf(alpha);
    Complex64::new(mag, -mag * crate::math::sign(u) * skew_factor(u, alpha))
}

/// Log of the univariate characteristic function.
pub(crate) fn char_exponent(q: f64, alpha: f64, beta: f64, gamma: f64, mu: f64) -> Complex64 {
    if q == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let mag = gamma * q.abs().powf(alpha);
    let skew = beta * crate::math::sign(q) * skew_factor(q, alpha);
    Complex64::new(-mag, mu * q + mag * skew)
}

/// Values mapped to the standard law `S_alpha(beta, 1, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedSample {
    pub values: Vec<f64>,
    pub source: StableParams,
}

/// `Y -> Y / gamma^(1/alpha) - mu~`.
pub fn standardize(values: &[f64], params: &StableParams) -> Result<StandardizedSample> {
    params.validate()?;
    let scale = params.gamma.powf(1.0 / params.alpha);
    let offset = params.standard_offset();
    Ok(StandardizedSample { values: values.iter().map(|y| y / scale - offset).collect(), source: *params })
}

impl StandardizedSample {
    /// Maps the standardized values back onto the source law's scale.
    pub fn invert(&self) -> Vec<f64> {
        let scale = self.source.gamma.powf(1.0 / self.source.alpha);
        let offset = self.source.standard_offset();
        self.values.iter().map(|z| (z + offset) * scale).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::E;
    use proptest::prelude::*;

    fn p(alpha: f64, beta: f64, gamma: f64, mu: f64) -> StableParams {
        StableParams::new(alpha, beta, gamma, mu).unwrap()
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(StableParams::new(0.0, 0.0, 1.0, 0.0).is_err());
        assert!(StableParams::new(2.1, 0.0, 1.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 1.2, 1.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 0.0, 0.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 0.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn scale_shift_identity() {
        let a = p(1.5, 0.5, 2.0, 1.0);
        assert_eq!(a.scale_shift(1.0, 0.0).unwrap(), a);
    }

    #[test]
    fn scale_shift_sign_flip() {
        let a = p(1.5, 0.5, 2.0, 1.0);
        assert_eq!(a.scale_shift(-1.0, 0.0).unwrap(), p(1.5, -0.5, 2.0, -1.0));
    }

    #[test]
    fn scale_shift_cauchy_branch_location_correction() {
        let out = p(1.0, 1.0, 1.0, 0.0).scale_shift(E, 0.0).unwrap();
        assert_eq!(out.beta, 1.0);
        assert!((out.gamma - E).abs() < 1e-15);
        // e * (0 - 2/pi), evaluated independently at 30 digits
        assert!((out.mu - (-1.730_511_958_864_530_2)).abs() < 1e-14);
    }

    #[test]
    fn scale_shift_rejects_zero() {
        assert_eq!(p(1.5, 0.0, 1.0, 0.0).scale_shift(0.0, 1.0), Err(Error::ZeroScale));
    }

    #[test]
    fn aggregate_examples() {
        let s = p(1.2, 0.0, 1.0, 0.0).aggregate(&p(1.2, 0.0, 1.0, 0.0)).unwrap();
        assert_eq!((s.beta, s.gamma, s.mu), (0.0, 2.0, 0.0));
        let s = p(1.2, 1.0, 1.0, 2.0).aggregate(&p(1.2, -1.0, 1.0, 3.0)).unwrap();
        assert_eq!((s.beta, s.gamma, s.mu), (0.0, 2.0, 5.0));
        let s = p(1.2, 1.0, 3.0, 0.0).aggregate(&p(1.2, 0.0, 1.0, 0.0)).unwrap();
        assert_eq!((s.beta, s.gamma, s.mu), (0.75, 4.0, 0.0));
    }

    #[test]
    fn aggregate_rejects_mismatched_alpha() {
        assert!(matches!(p(1.2, 0.0, 1.0, 0.0).aggregate(&p(1.3, 0.0, 1.0, 0.0)), Err(Error::AlphaMismatch(_, _))));
    }

    #[test]
    fn standardize_examples() {
        let std_law = p(1.3, 0.4, 1.0, 0.0);
        let vals = [-1.5, 0.0, 2.5];
        assert_eq!(standardize(&vals, &std_law).unwrap().values, vals.to_vec());

        let out = standardize(&[8.0], &p(2.0, 0.0, 4.0, 8.0)).unwrap();
        assert_eq!(out.values, alloc::vec![0.0]);

        let out = standardize(&[0.0], &p(1.0, 1.0, E, 0.0)).unwrap();
        assert!((out.values[0] + 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn characteristic_function_at_origin_is_one() {
        let cf = p(0.7, 0.3, 2.0, 1.0).characteristic_function(0.0);
        assert_eq!(cf, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn gaussian_characteristic_function() {
        // S_2(0, gamma, mu) is Normal(mu, 2 gamma)
        let law = p(2.0, 0.0, 0.5, 1.0);
        let q = 0.8;
        let cf = law.characteristic_function(q);
        let expect = Complex64::new(0.0, q).exp() * (-0.5 * q * q).exp();
        assert!((cf - expect).norm() < 1e-15);
    }

    fn arb_params() -> impl Strategy<Value = StableParams> {
        (prop_oneof![Just(1.0), 0.2f64..2.0], -1.0f64..=1.0, 0.01f64..50.0, -100.0f64..100.0)
            .prop_map(|(a, b, g, m)| p(a, b, g, m))
    }

    proptest! {
        #[test]
        fn standardize_round_trip(params in arb_params(), vals in proptest::collection::vec(-1e3f64..1e3, 1..20)) {
            let st = standardize(&vals, &params).unwrap();
            for (x, y) in vals.iter().zip(st.invert()) {
                prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
            }
        }

        #[test]
        fn scale_shift_inverse(params in arb_params(), c in prop_oneof![-20.0f64..-0.05, 0.05f64..20.0], d in -10.0f64..10.0) {
            let there = params.scale_shift(c, d).unwrap();
            let back = there.scale_shift(1.0 / c, -d / c).unwrap();
            prop_assert_eq!(back.alpha, params.alpha);
            prop_assert_eq!(back.beta, params.beta);
            prop_assert!((back.gamma - params.gamma).abs() <= 1e-12 * params.gamma);
            let scale = 1.0 + params.mu.abs() + params.gamma * c.abs().ln().abs() + (d / c).abs();
            prop_assert!((back.mu - params.mu).abs() <= 1e-12 * scale);
        }

        #[test]
        fn aggregate_commutative_associative(a in arb_params(), b in arb_params(), c in arb_params()) {
            let b = StableParams { alpha: a.alpha, ..b };
            let c = StableParams { alpha: a.alpha, ..c };
            let ab = a.aggregate(&b).unwrap();
            let ba = b.aggregate(&a).unwrap();
            prop_assert_eq!(ab.gamma, ba.gamma);
            prop_assert!((ab.beta - ba.beta).abs() < 1e-15);
            let l = ab.aggregate(&c).unwrap();
            let r = a.aggregate(&b.aggregate(&c).unwrap()).unwrap();
            prop_assert!((l.gamma - r.gamma).abs() <= 1e-12 * l.gamma);
            prop_assert!((l.beta - r.beta).abs() < 1e-12);
        }
    }
}
