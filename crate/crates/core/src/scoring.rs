//! Model-selection and goodness-of-fit scores.
//!
//! Every score decomposes over families (a node together with its parent
//! set). A family contributes a signed log-dispersion term and a BIC-style
//! penalty `|Pa|/2 ln N`; the total is `sum(dispersion_term - penalty_term)`.
//!
//! * `mdc`: `-(N/p) ln mean|Z|^p`, the minimum dispersion criterion with the
//!   FLOM constant dropped (it is shared by every candidate).
//! * `ols`: `-ln ||Z - mean(Z)||_2`.
//! * `lflom`: `(1/p) ln mean|Z|^p` on held-out rows, no penalty. Lower is
//!   better for this one.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::math::{mean, mean_abs_power};
use crate::model::{linear_residuals, DataMatrix, SGModel};
use crate::regression::{irls, ols_solve, RegressionProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScoreKind {
    Mdc,
    Ols,
    Lflom,
}

impl ScoreKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScoreKind::Mdc => "mdc",
            ScoreKind::Ols => "ols",
            ScoreKind::Lflom => "lflom",
        }
    }
}

impl fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScoreKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mdc" => Ok(ScoreKind::Mdc),
            "ols" => Ok(ScoreKind::Ols),
            "lflom" => Ok(ScoreKind::Lflom),
            other => Err(Error::InvalidConfig(format!("unknown score kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyTerms {
    pub dispersion_term: f64,
    pub penalty_term: f64,
}

impl FamilyTerms {
    pub fn value(&self) -> f64 {
        self.dispersion_term - self.penalty_term
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub kind: ScoreKind,
    pub total: f64,
    /// Indexed by model node.
    pub per_family: Vec<FamilyTerms>,
    pub p_used: f64,
    pub n: usize,
}

impl ScoreReport {
    fn from_families(kind: ScoreKind, per_family: Vec<FamilyTerms>, p_used: f64, n: usize) -> Self {
        let total = per_family.iter().map(FamilyTerms::value).sum();
        ScoreReport { kind, total, per_family, p_used, n }
    }
}

pub fn penalty(n_parents: usize, n: usize) -> f64 {
    n_parents as f64 / 2.0 * (n as f64).ln()
}

fn positive_finite(value: f64, what: &str) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Degenerate(format!("{what} is {value}; the family fits perfectly or overflows")))
    }
}

fn check_rows(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidData("no rows to score".into()));
    }
    Ok(())
}

/// MDC family terms from residuals already computed at exponent `p`.
pub fn mdc_terms(residuals: &[f64], n_parents: usize, p: f64) -> Result<FamilyTerms> {
    check_rows(residuals.len())?;
    let n = residuals.len();
    let moment = positive_finite(mean_abs_power(residuals, p), "mean |Z|^p")?;
    Ok(FamilyTerms { dispersion_term: -(n as f64 / p) * moment.ln(), penalty_term: penalty(n_parents, n) })
}

pub fn ols_terms(residuals: &[f64], n_parents: usize) -> Result<FamilyTerms> {
    check_rows(residuals.len())?;
    let m = mean(residuals);
    let norm = residuals.iter().map(|z| (z - m) * (z - m)).sum::<f64>().sqrt();
    let norm = positive_finite(norm, "centered residual norm")?;
    Ok(FamilyTerms { dispersion_term: -norm.ln(), penalty_term: penalty(n_parents, residuals.len()) })
}

/// `(1/p) ln mean|Z|^p`.
pub fn lflom_term(residuals: &[f64], p: f64) -> Result<f64> {
    check_rows(residuals.len())?;
    let moment = positive_finite(mean_abs_power(residuals, p), "mean |Z|^p")?;
    Ok(moment.ln() / p)
}

fn check_exponent(p: f64, alpha: f64) -> Result<()> {
    if !(p > 0.0 && p < alpha) {
        return Err(Error::ExponentOutOfRange { p, range: "(0, alpha)" });
    }
    Ok(())
}

/// Residuals below this fraction of the largest response count as an exact fit.
const PERFECT_FIT: f64 = 1e-12;

/// Fitted weights and score of one family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyFit {
    pub weights: Vec<f64>,
    pub terms: FamilyTerms,
}

impl FamilyFit {
    pub fn score(&self) -> f64 {
        self.terms.value()
    }
}

/// Fits `child ~ parents` and scores the family.
///
/// `Mdc` fits by IRLS at exponent `p`; `Ols` fits by least squares and
/// ignores `p`. An empty parent set uses the raw column as the residual.
/// Collinear parent sets come back as [`Error::RankDeficient`].
pub fn fit_family(
    data: &DataMatrix,
    child: usize,
    parents: &[usize],
    kind: ScoreKind,
    p: f64,
    tolerance: f64,
) -> Result<FamilyFit> {
    check_rows(data.n_rows())?;
    let y = data.column(child);
    let design: Vec<&[f64]> = parents.iter().map(|&k| data.column(k)).collect();
    let weights = if parents.is_empty() {
        Vec::new()
    } else {
        let problem = RegressionProblem::new(design.clone(), y, p).with_tolerance(tolerance);
        match kind {
            ScoreKind::Mdc => irls(&problem)?.coefficients,
            ScoreKind::Ols => ols_solve(&RegressionProblem { p: 2.0, ..problem })?.coefficients,
            ScoreKind::Lflom => {
                return Err(Error::InvalidConfig("lflom is not a search score".into()));
            }
        }
    };
    let residuals = linear_residuals(y, &design, &weights);
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !parents.is_empty() && residuals.iter().all(|r| r.abs() <= PERFECT_FIT * scale) {
        return Err(Error::Degenerate("parents reproduce the child exactly".into()));
    }
    let terms = match kind {
        ScoreKind::Mdc => mdc_terms(&residuals, parents.len(), p)?,
        _ => ols_terms(&residuals, parents.len())?,
    };
    Ok(FamilyFit { weights, terms })
}

/// `FS = -(N/alpha) ln gamma_hat - (|Pa|/2) ln N` with `gamma_hat` the FLOM
/// plug-in without its constant, i.e. `-(N/p) ln mean|Z|^p - (|Pa|/2) ln N`.
pub fn family_score(child: usize, parents: &[usize], data: &DataMatrix, alpha: f64, p: f64) -> Result<f64> {
    check_exponent(p, alpha)?;
    Ok(fit_family(data, child, parents, ScoreKind::Mdc, p, crate::regression::DEFAULT_TOLERANCE)?.score())
}

fn model_residuals(model: &SGModel, data: &DataMatrix) -> Result<Vec<Vec<f64>>> {
    let cols = model.align(data)?;
    check_rows(data.n_rows())?;
    Ok((0..model.n_nodes()).map(|j| model.residuals_aligned(data, &cols, j)).collect())
}

/// Minimum dispersion criterion at the model's weights (no refit).
pub fn s_mdc(model: &SGModel, data: &DataMatrix, p: f64) -> Result<ScoreReport> {
    check_exponent(p, model.alpha)?;
    let residuals = model_residuals(model, data)?;
    let per_family = residuals
        .iter()
        .enumerate()
        .map(|(j, z)| mdc_terms(z, model.dag.parents(j).len(), p))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScoreReport::from_families(ScoreKind::Mdc, per_family, p, data.n_rows()))
}

/// `-sum(ln ||Z_i - mean(Z_i)||_2 + (|Pa_i|/2) ln N)` at the model's weights.
pub fn s_ols(model: &SGModel, data: &DataMatrix) -> Result<ScoreReport> {
    let residuals = model_residuals(model, data)?;
    let per_family = residuals
        .iter()
        .enumerate()
        .map(|(j, z)| ols_terms(z, model.dag.parents(j).len()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScoreReport::from_families(ScoreKind::Ols, per_family, 2.0, data.n_rows()))
}

/// Per-node `(1/p) ln mean|Z|^p` on test rows, as a report with zero penalties.
pub fn lflom_report(model: &SGModel, test: &DataMatrix, p: f64) -> Result<ScoreReport> {
    check_exponent(p, model.alpha)?;
    let residuals = model_residuals(model, test)?;
    let per_family = residuals
        .iter()
        .map(|z| Ok(FamilyTerms { dispersion_term: lflom_term(z, p)?, penalty_term: 0.0 }))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScoreReport::from_families(ScoreKind::Lflom, per_family, p, test.n_rows()))
}

pub fn lflom(model: &SGModel, test: &DataMatrix, p: f64) -> Result<f64> {
    Ok(lflom_report(model, test, p)?.total)
}

/// Gaussian BIC of a linear model at its weights:
/// `sum(-(N/2) ln(mean Z^2) - (|Pa|/2) ln N)`, dropping terms shared by all
/// structures.
pub fn gaussian_bic(model: &SGModel, data: &DataMatrix) -> Result<f64> {
    let residuals = model_residuals(model, data)?;
    let n = data.n_rows();
    let mut total = 0.0;
    for (j, z) in residuals.iter().enumerate() {
        let ms = positive_finite(mean_abs_power(z, 2.0), "mean squared residual")?;
        total += -(n as f64 / 2.0) * ms.ln() - penalty(model.dag.parents(j).len(), n);
    }
    Ok(total)
}
