//! k-fold cross-validation of learned models against the empty network,
//! scored by LFLOM on the held-out rows.
//!
//! Rows are shuffled once with a seeded permutation and cut into `k`
//! contiguous blocks whose sizes differ by at most one. Test residuals of
//! both the learned and the empty model are centered by the median of the
//! corresponding training residuals, since learned models carry no
//! intercept and the raw data may have a nonzero location.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exec::{Executor, Serial};
use crate::math::median;
use crate::model::{DataMatrix, SGModel};
use crate::rng::{derive_seed, permutation, seeded};
use crate::scoring::lflom_term;
use crate::search::{stable_learn, SearchConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub fold_lflom_model: Vec<f64>,
    pub fold_lflom_null: Vec<f64>,
    pub fold_sizes: Vec<usize>,
    pub fold_alpha: Vec<f64>,
    pub fold_edges: Vec<usize>,
}

impl CvReport {
    /// `model - null` per fold; negative favours the learned model.
    pub fn differences(&self) -> Vec<f64> {
        self.fold_lflom_model.iter().zip(&self.fold_lflom_null).map(|(m, n)| m - n).collect()
    }
}

/// Fold index of every row.
pub fn fold_assignment(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let order = permutation(&mut seeded(derive_seed(seed, 0)), n);
    let mut fold = vec![0; n];
    let (base, extra) = (n / k, n % k);
    let mut start = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        for &row in &order[start..start + size] {
            fold[row] = f;
        }
        start += size;
    }
    fold
}

fn centered_lflom(train_residuals: &[f64], test_residuals: &[f64], p: f64) -> Result<f64> {
    let center = median(train_residuals);
    let shifted: Vec<f64> = test_residuals.iter().map(|z| z - center).collect();
    lflom_term(&shifted, p)
}

fn total_lflom(model: &SGModel, train: &DataMatrix, test: &DataMatrix, p: f64) -> Result<f64> {
    let mut total = 0.0;
    for j in 0..model.n_nodes() {
        total += centered_lflom(&model.residuals(train, j)?, &model.residuals(test, j)?, p)?;
    }
    Ok(total)
}

pub fn crossval(data: &DataMatrix, k: usize, config: &SearchConfig) -> Result<CvReport> {
    crossval_with(data, k, config, &Serial)
}

/// Learns on `k - 1` blocks and scores the held-out block, for every block.
/// LFLOM uses the exponent the search used, `alpha_hat / irls_p_divisor`.
pub fn crossval_with<E: Executor>(data: &DataMatrix, k: usize, config: &SearchConfig, exec: &E) -> Result<CvReport> {
    config.validate()?;
    let n = data.n_rows();
    if k < 2 {
        return Err(Error::InvalidConfig(alloc::format!("need at least 2 folds, got {k}")));
    }
    // every training set needs four rows for symmetrization and alpha
    let enough = |m: usize| m >= k && m - m.div_ceil(k) >= 4;
    if !enough(n) {
        let needed = (k..).find(|&m| enough(m)).unwrap_or(usize::MAX);
        return Err(Error::TooFewRows { needed, got: n });
    }
    let fold = fold_assignment(n, k, config.seed);

    let results = exec.map(k, |f| -> Result<(f64, f64, usize, f64, usize)> {
        let test_rows: Vec<usize> = (0..n).filter(|&i| fold[i] == f).collect();
        let train_rows: Vec<usize> = (0..n).filter(|&i| fold[i] != f).collect();
        let train = data.select_rows(&train_rows);
        let test = data.select_rows(&test_rows);
        let fold_config = SearchConfig { seed: derive_seed(config.seed, f as u64 + 1), ..config.clone() };
        let (learned, trace) = stable_learn(&train, &fold_config)?;
        let null = SGModel::independent(learned.names().to_vec(), learned.alpha, learned.noise.clone())?;
        let p = trace.p_used;
        Ok((
            total_lflom(&learned, &train, &test, p)?,
            total_lflom(&null, &train, &test, p)?,
            test_rows.len(),
            learned.alpha,
            learned.dag.n_edges(),
        ))
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(CvReport {
        fold_lflom_model: results.iter().map(|r| r.0).collect(),
        fold_lflom_null: results.iter().map(|r| r.1).collect(),
        fold_sizes: results.iter().map(|r| r.2).collect(),
        fold_alpha: results.iter().map(|r| r.3).collect(),
        fold_edges: results.iter().map(|r| r.4).collect(),
    })
}
