//! Differential dispersion between held-out groups and the remaining rows.
//!
//! For each group a model is learned on all other rows. Both the group and
//! the remainder are symmetrized separately, and every variable gets
//! `dLD = (1/p) [ln mean_test |Z|^p - ln mean_train |Z|^p]` with the
//! training `alpha_hat` and `p = alpha_hat / irls_p_divisor`. A node whose
//! dispersion is multiplied by `k` in the group scores about `ln(k) / alpha`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exec::{Executor, Serial};
use crate::model::{symmetrize, DataMatrix};
use crate::rng::derive_seed;
use crate::scoring::lflom_term;
use crate::search::{stable_learn, SearchConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct DeMatrix {
    pub groups: Vec<String>,
    pub variables: Vec<String>,
    /// One row per group, one entry per variable.
    pub delta_ld: Vec<Vec<f64>>,
    pub alpha: Vec<f64>,
    pub p_used: Vec<f64>,
}

/// Groups in order of first appearance with their row indices.
fn group_rows(labels: &[String]) -> Vec<(String, Vec<usize>)> {
    let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
    for (i, label) in labels.iter().enumerate() {
        match groups.iter_mut().find(|(g, _)| g == label) {
            Some((_, rows)) => rows.push(i),
            None => groups.push((label.clone(), alloc::vec![i])),
        }
    }
    groups
}

/// Per-variable `dLD` of `test` against `train`, given the model's
/// residual exponent `p`.
pub(crate) fn delta_ld(
    model: &crate::model::SGModel,
    train: &DataMatrix,
    test: &DataMatrix,
    p: f64,
) -> Result<Vec<f64>> {
    let train = symmetrize(train)?;
    let test = symmetrize(test)?;
    (0..model.n_nodes())
        .map(|j| Ok(lflom_term(&model.residuals(&test, j)?, p)? - lflom_term(&model.residuals(&train, j)?, p)?))
        .collect()
}

pub fn sgex(data: &DataMatrix, labels: &[String], config: &SearchConfig) -> Result<DeMatrix> {
    sgex_with(data, labels, config, &Serial)
}

pub fn sgex_with<E: Executor>(
    data: &DataMatrix,
    labels: &[String],
    config: &SearchConfig,
    exec: &E,
) -> Result<DeMatrix> {
    config.validate()?;
    if labels.len() != data.n_rows() {
        return Err(Error::InvalidData(alloc::format!("{} group labels for {} rows", labels.len(), data.n_rows())));
    }
    let groups = group_rows(labels);
    if groups.len() < 2 {
        return Err(Error::InvalidData("need at least two groups".into()));
    }
    if let Some((g, rows)) = groups.iter().find(|(_, rows)| rows.len() < 4) {
        return Err(Error::InvalidData(alloc::format!("group `{g}` has {} rows, need at least 4", rows.len())));
    }

    let rows = exec.map(groups.len(), |g| -> Result<(Vec<f64>, f64, f64)> {
        let test_rows = &groups[g].1;
        let train_rows: Vec<usize> = (0..data.n_rows()).filter(|i| !test_rows.contains(i)).collect();
        let train = data.select_rows(&train_rows);
        let test = data.select_rows(test_rows);
        let group_config = SearchConfig { seed: derive_seed(config.seed, g as u64), ..config.clone() };
        let (model, trace) = stable_learn(&train, &group_config)?;
        Ok((delta_ld(&model, &train, &test, trace.p_used)?, model.alpha, trace.p_used))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(DeMatrix {
        groups: groups.into_iter().map(|(g, _)| g).collect(),
        variables: data.names().to_vec(),
        delta_ld: rows.iter().map(|r| r.0.clone()).collect(),
        alpha: rows.iter().map(|r| r.1).collect(),
        p_used: rows.iter().map(|r| r.2).collect(),
    })
}
