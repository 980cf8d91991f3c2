//! Least-l_p linear regression through iteratively re-weighted least squares.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::math::median;

pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_MAX_ITERATIONS: usize = 100;
/// Residual magnitudes are floored at this multiple of the median absolute
/// response before being raised to `p - 2`.
pub const RESIDUAL_FLOOR: f64 = 1e-8;

/// `min_w ||response - design w||_p` for a design given as borrowed columns.
#[derive(Debug, Clone)]
pub struct RegressionProblem<'a> {
    pub design: Vec<&'a [f64]>,
    pub response: &'a [f64],
    pub p: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionResult {
    pub coefficients: Vec<f64>,
    /// `(sum |y - X w|^p)^(1/p)` at `coefficients`.
    pub lp_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl<'a> RegressionProblem<'a> {
    pub fn new(design: Vec<&'a [f64]>, response: &'a [f64], p: f64) -> Self {
        RegressionProblem { design, response, p, tolerance: DEFAULT_TOLERANCE, max_iterations: DEFAULT_MAX_ITERATIONS }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.response.len();
        let m = self.design.len();
        if m == 0 || n <= m {
            return Err(Error::InvalidProblem(format!("need N > M >= 1, got N = {n}, M = {m}")));
        }
        if self.design.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidProblem("design columns and response differ in length".into()));
        }
        if !(self.p > 0.0 && self.p <= 2.0) {
            return Err(Error::ExponentOutOfRange { p: self.p, range: "(0, 2]" });
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidProblem(format!("tolerance {} must be positive", self.tolerance)));
        }
        Ok(())
    }

    /// `y - X w`.
    pub fn residuals(&self, coefficients: &[f64]) -> Vec<f64> {
        let mut r = self.response.to_vec();
        for (col, w) in self.design.iter().zip(coefficients) {
            for (ri, xi) in r.iter_mut().zip(col.iter()) {
                *ri -= w * xi;
            }
        }
        r
    }

    fn result(&self, coefficients: Vec<f64>, iterations: usize, converged: bool) -> RegressionResult {
        let lp = lp_norm(&self.residuals(&coefficients), self.p);
        RegressionResult { coefficients, lp_norm: lp, iterations, converged }
    }
}

/// `(sum |x|^p)^(1/p)`.
pub fn lp_norm(residuals: &[f64], p: f64) -> f64 {
    residuals.iter().map(|r| r.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

fn lp_objective(residuals: &[f64], p: f64) -> f64 {
    residuals.iter().map(|r| r.abs().powf(p)).sum()
}

/// Ordinary least squares, the `p = 2` minimizer.
pub fn ols_solve(problem: &RegressionProblem<'_>) -> Result<RegressionResult> {
    problem.validate()?;
    let w = least_squares(&problem.design, problem.response, None)?;
    Ok(problem.result(w, 0, true))
}

/// Weighted least squares with strictly positive weights.
pub fn wls_solve(problem: &RegressionProblem<'_>, weights: &[f64]) -> Result<RegressionResult> {
    problem.validate()?;
    if weights.len() != problem.response.len() {
        return Err(Error::InvalidProblem("one weight per row required".into()));
    }
    if let Some(bad) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return Err(Error::InvalidProblem(format!("weight {bad} is not positive and finite")));
    }
    let w = least_squares(&problem.design, problem.response, Some(weights))?;
    Ok(problem.result(w, 0, true))
}

/// Least-l_p coefficients by IRLS, started from OLS.
///
/// Each pass solves a weighted least-squares problem with weights
/// `max(|r|, floor)^(p-2)`. Iteration stops once the coefficient change
/// drops below the tolerance. The iterate with the smallest l_p objective is
/// returned, which matters for `p < 1` where the updates can oscillate.
pub fn irls(problem: &RegressionProblem<'_>) -> Result<RegressionResult> {
    problem.validate()?;
    let p = problem.p;
    let mut w = least_squares(&problem.design, problem.response, None)?;
    if p == 2.0 {
        return Ok(problem.result(w, 1, true));
    }

    let scale = {
        let abs: Vec<f64> = problem.response.iter().map(|y| y.abs()).collect();
        let m = median(&abs);
        if m > 0.0 {
            m
        } else {
            abs.iter().fold(0.0f64, |a, b| a.max(*b)).max(1.0)
        }
    };
    let floor = RESIDUAL_FLOOR * scale;

    let mut residuals = problem.residuals(&w);
    let mut best_objective = lp_objective(&residuals, p);
    let mut best = w.clone();
    let mut weights = vec![0.0; residuals.len()];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < problem.max_iterations {
        iterations += 1;
        for (wt, r) in weights.iter_mut().zip(&residuals) {
            *wt = r.abs().max(floor).powf(p - 2.0);
        }
        let next = least_squares(&problem.design, problem.response, Some(&weights))?;
        let change = next.iter().zip(&w).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        w = next;
        residuals = problem.residuals(&w);
        let objective = lp_objective(&residuals, p);
        if objective < best_objective {
            best_objective = objective;
            best.clone_from(&w);
        }
        if change < problem.tolerance {
            converged = true;
            break;
        }
    }
    // near the optimum objective differences sink below rounding, so a settled iterate wins
    let chosen = if converged { w } else { best };
    Ok(problem.result(chosen, iterations, converged))
}
