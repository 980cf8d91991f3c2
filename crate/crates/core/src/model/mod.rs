//! The alpha-stable graphical model: each node is a linear function of its
//! parents plus an independent `S_alpha(beta_j, gamma_j, mu_j)` noise term,
//! with one exponent `alpha` shared by every node.

mod dag;
mod data;
mod spectral;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::stable::{char_exponent, sample_with, StableParams};

pub use dag::{topological_order, Dag};
pub use data::DataMatrix;
pub use spectral::{spectral_characteristic_function, SpectralAtom};

/// Per-node noise law; `alpha` lives on the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseLaw {
    pub beta: f64,
    pub gamma: f64,
    pub mu: f64,
}

impl NoiseLaw {
    pub fn symmetric(gamma: f64) -> Self {
        NoiseLaw { beta: 0.0, gamma, mu: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SGModel {
    pub dag: Dag,
    pub alpha: f64,
    /// Regression weights aligned with `dag.parents(j)`.
    pub weights: Vec<Vec<f64>>,
    pub noise: Vec<NoiseLaw>,
}

impl SGModel {
    pub fn new(dag: Dag, alpha: f64, weights: Vec<Vec<f64>>, noise: Vec<NoiseLaw>) -> Result<Self> {
        let model = SGModel { dag, alpha, weights, noise };
        model.validate()?;
        Ok(model)
    }

    /// Graph with no edges and the given noise laws.
    pub fn independent(names: Vec<String>, alpha: f64, noise: Vec<NoiseLaw>) -> Result<Self> {
        let d = names.len();
        SGModel::new(Dag::empty(names)?, alpha, vec![Vec::new(); d], noise)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dag.n_nodes();
        if self.weights.len() != d || self.noise.len() != d {
            return Err(Error::InvalidGraph("weights and noise must have one entry per node".into()));
        }
        for j in 0..d {
            if self.weights[j].len() != self.dag.parents(j).len() {
                return Err(Error::InvalidGraph(alloc::format!(
                    "node `{}` has {} parents but {} weights",
                    self.dag.names()[j],
                    self.dag.parents(j).len(),
                    self.weights[j].len()
                )));
            }
            if self.weights[j].iter().any(|w| !w.is_finite()) {
                return Err(Error::InvalidGraph("non-finite weight".into()));
            }
            self.node_params(j).validate()?;
        }
        Ok(())
    }

    pub fn n_nodes(&self) -> usize {
        self.dag.n_nodes()
    }

    pub fn names(&self) -> &[String] {
        self.dag.names()
    }

    pub fn node_params(&self, j: usize) -> StableParams {
        let n = self.noise[j];
        StableParams { alpha: self.alpha, beta: n.beta, gamma: n.gamma, mu: n.mu }
    }

    /// Draws noise per node in topological order, then propagates
    /// `X_j = Z_j + sum_k w_jk X_k`.
    pub fn simulate(&self, n: usize, seed: u64) -> Result<DataMatrix> {
        self.validate()?;
        let mut rng = seeded(seed);
        let d = self.n_nodes();
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); d];
        for j in self.dag.topological_order() {
            let mut col = sample_with(&self.node_params(j), n, &mut rng)?;
            for (&p, &w) in self.dag.parents(j).iter().zip(&self.weights[j]) {
                for (x, xp) in col.iter_mut().zip(&columns[p]) {
                    *x += w * xp;
                }
            }
            columns[j] = col;
        }
        DataMatrix::new(self.names().to_vec(), columns)
    }

    /// Column index in `data` of every model node.
    pub fn align(&self, data: &DataMatrix) -> Result<Vec<usize>> {
        data.align(self.names())
    }

    /// `Z_j = X_j - sum_k w_jk X_k` for each sample.
    pub fn residuals(&self, data: &DataMatrix, node: usize) -> Result<Vec<f64>> {
        if node >= self.n_nodes() {
            return Err(Error::InvalidGraph(alloc::format!("node index {node} out of range")));
        }
        let cols = self.align(data)?;
        Ok(self.residuals_aligned(data, &cols, node))
    }

    pub(crate) fn residuals_aligned(&self, data: &DataMatrix, cols: &[usize], node: usize) -> Vec<f64> {
        let parents: Vec<&[f64]> = self.dag.parents(node).iter().map(|&p| data.column(cols[p])).collect();
        linear_residuals(data.column(cols[node]), &parents, &self.weights[node])
    }

    /// Columns `c_k` of `(I - W)^-1`, so that `q.X = sum_k (c_k . q) Z_k`.
    ///
    /// Solved by substitution in topological order, one unit vector at a
    /// time.
    pub fn noise_map_columns(&self) -> Vec<Vec<f64>> {
        let d = self.n_nodes();
        let order = self.dag.topological_order();
        (0..d)
            .map(|k| {
                let mut a = vec![0.0; d];
                for &j in &order {
                    let mut v = if j == k { 1.0 } else { 0.0 };
                    for (&p, &w) in self.dag.parents(j).iter().zip(&self.weights[j]) {
                        v += w * a[p];
                    }
                    a[j] = v;
                }
                a
            })
            .collect()
    }

    /// Determinant of `I - W` taken in topological order. The permuted
    /// matrix is unit lower triangular, so the value is exactly one.
    pub fn noise_map_determinant(&self) -> f64 {
        let order = self.dag.topological_order();
        let mut position = vec![0; order.len()];
        for (pos, &node) in order.iter().enumerate() {
            position[node] = pos;
        }
        let parent_sets = self.dag.parent_sets();
        let lower = parent_sets.iter().enumerate().all(|(j, pa)| pa.iter().all(|&p| position[p] < position[j]));
        assert!(lower, "noise map is not triangular in topological order");
        parent_sets
            .iter()
            .enumerate()
            .zip(&self.weights)
            .map(|((j, pa), w)| {
                let self_weight = pa.iter().zip(w).find(|(p, _)| **p == j).map_or(0.0, |(_, w)| *w);
                1.0 - self_weight
            })
            .product()
    }

    /// `E[exp(i q.X)]` as the product of univariate characteristic
    /// functions at `c_k . q`.
    pub fn characteristic_function(&self, q: &[f64]) -> Complex64 {
        assert_eq!(q.len(), self.n_nodes(), "q must have one entry per node");
        debug_assert_eq!(self.noise_map_determinant(), 1.0);
        let mut log_cf = Complex64::new(0.0, 0.0);
        for (k, c) in self.noise_map_columns().iter().enumerate() {
            let u = crate::math::dot(c, q);
            let law = self.noise[k];
            log_cf += char_exponent(u, self.alpha, law.beta, law.gamma, law.mu);
        }
        log_cf.exp()
    }
}

/// `child - sum_k weights_k parents_k`.
pub fn linear_residuals(child: &[f64], parents: &[&[f64]], weights: &[f64]) -> Vec<f64> {
    let mut r = child.to_vec();
    for (col, w) in parents.iter().zip(weights) {
        for (ri, xi) in r.iter_mut().zip(col.iter()) {
            *ri -= w * xi;
        }
    }
    r
}

/// Pairwise differences `x[2l+1] - x[2l]`; an odd trailing sample is dropped.
pub fn symmetrize_values(values: &[f64]) -> Vec<f64> {
    values.chunks_exact(2).map(|pair| pair[1] - pair[0]).collect()
}

/// Differences consecutive sample pairs, giving a model with the same graph
/// and weights, zero skew and doubled dispersion.
pub fn symmetrize(data: &DataMatrix) -> Result<DataMatrix> {
    if data.n_rows() < 2 {
        return Err(Error::TooFewRows { needed: 2, got: data.n_rows() });
    }
    DataMatrix::new(data.names().to_vec(), data.columns().iter().map(|c| symmetrize_values(c)).collect())
}
