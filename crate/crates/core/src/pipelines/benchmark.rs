//! Synthetic structure-recovery benchmark.
//!
//! Each replicate draws fresh edge weights from `U[-rho/2, rho/2]` on a fixed
//! topology, simulates `n_samples` rows with `S_alpha(beta, gamma, 0)` noise
//! at every node and learns a model. Learned directed edges are tallied
//! across replicates into confidence curves: an edge's confidence is the
//! percentage of replicates that contain it, and the curve at threshold `t`
//! counts distinct edges with confidence at least `t` (and at least one
//! occurrence).

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use super::summary;
use crate::error::{Error, Result};
use crate::exec::{Executor, Serial};
use crate::model::{Dag, NoiseLaw, SGModel};
use crate::rng::{derive_seed, seeded, uniform};
use crate::scoring::ScoreKind;
use crate::search::{stable_learn, SearchConfig};
use crate::stable::{theta_from_beta, StableParams};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSpec {
    pub topology: Dag,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Width of the weight distribution.
    pub rho: f64,
    pub n_samples: usize,
    pub n_replicates: usize,
    pub seed: u64,
}

impl BenchmarkSpec {
    pub fn new(topology: Dag, alpha: f64) -> Self {
        BenchmarkSpec { topology, alpha, beta: 0.9, gamma: 1.0, rho: 1.0, n_samples: 2000, n_replicates: 100, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        StableParams::new(self.alpha, self.beta, self.gamma, 0.0)?;
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(Error::InvalidConfig(alloc::format!("rho = {} must be finite and >= 0", self.rho)));
        }
        if self.n_replicates == 0 {
            return Err(Error::InvalidConfig("need at least one replicate".into()));
        }
        if self.n_samples < 4 {
            return Err(Error::TooFewRows { needed: 4, got: self.n_samples });
        }
        Ok(())
    }

    /// Generator of replicate `r`: weights drawn from their own stream.
    pub fn generator(&self, replicate: usize) -> Result<SGModel> {
        let mut rng = seeded(derive_seed(self.seed, 3 * replicate as u64));
        let weights: Vec<Vec<f64>> = (0..self.topology.n_nodes())
            .map(|j| {
                self.topology.parents(j).iter().map(|_| uniform(&mut rng, -self.rho / 2.0, self.rho / 2.0)).collect()
            })
            .collect();
        let noise = NoiseLaw { beta: self.beta, gamma: self.gamma, mu: 0.0 };
        SGModel::new(self.topology.clone(), self.alpha, weights, vec![noise; self.topology.n_nodes()])
    }

    /// Edges counted as true positives; none when `rho = 0`, since every
    /// weight is then zero.
    fn true_edges(&self) -> Vec<(usize, usize)> {
        if self.rho > 0.0 {
            self.topology.edges()
        } else {
            Vec::new()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateOutcome {
    pub edges: Vec<(usize, usize)>,
    pub tp: usize,
    pub fp: usize,
    pub skeleton_tp: usize,
    pub skeleton_fp: usize,
    /// `w_hat - w` on directed true positives.
    pub weight_errors: Vec<f64>,
    pub alpha_hat: f64,
    pub theta_hat: Vec<f64>,
    pub gamma_hat: Vec<f64>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub score_kind: ScoreKind,
    pub n_replicates: usize,
    pub n_true_edges: usize,
    /// Indexed by confidence threshold `0..=100`.
    pub tp_at_confidence: Vec<usize>,
    pub fp_at_confidence: Vec<usize>,
    pub skeleton_tp_at_confidence: Vec<usize>,
    pub skeleton_fp_at_confidence: Vec<usize>,
    pub mean_tp: f64,
    pub mean_fp: f64,
    pub mean_skeleton_tp: f64,
    /// Signed mean of `w_hat - w` over all directed true positives.
    pub weight_bias: f64,
    pub weight_std: f64,
    pub alpha_stats: (f64, f64),
    pub theta_true: f64,
    pub theta_stats: (f64, f64),
    /// `ln gamma_hat` at generator scale.
    pub log_gamma_stats: (f64, f64),
    /// `ln gamma_hat` of the symmetrized data, i.e. `ln 2 gamma_hat`.
    pub log_gamma_symmetrized_stats: (f64, f64),
    pub replicates: Vec<ReplicateOutcome>,
}

fn undirected(e: (usize, usize)) -> (usize, usize) {
    (e.0.min(e.1), e.0.max(e.1))
}

fn replicate(spec: &BenchmarkSpec, config: &SearchConfig, r: usize) -> Result<ReplicateOutcome> {
    let generator = spec.generator(r)?;
    let data = generator.simulate(spec.n_samples, derive_seed(spec.seed, 3 * r as u64 + 1))?;
    let config = SearchConfig { seed: derive_seed(spec.seed, 3 * r as u64 + 2), ..config.clone() };
    let (learned, trace) = stable_learn(&data, &config)?;

    let truth = spec.true_edges();
    let true_skeleton: Vec<(usize, usize)> = truth.iter().map(|&e| undirected(e)).collect();
    let edges = learned.dag.edges();
    let mut out = ReplicateOutcome {
        edges: edges.clone(),
        tp: 0,
        fp: 0,
        skeleton_tp: 0,
        skeleton_fp: 0,
        weight_errors: Vec::new(),
        alpha_hat: learned.alpha,
        theta_hat: learned.noise.iter().map(|n| theta_from_beta(learned.alpha, n.beta)).collect(),
        gamma_hat: learned.noise.iter().map(|n| n.gamma).collect(),
        score: trace.best_score(),
    };
    for &(p, c) in &edges {
        if truth.contains(&(p, c)) {
            out.tp += 1;
            let k = learned.dag.parents(c).iter().position(|&q| q == p).expect("edge parent");
            let g = generator.dag.parents(c).iter().position(|&q| q == p).expect("true parent");
            out.weight_errors.push(learned.weights[c][k] - generator.weights[c][g]);
        } else {
            out.fp += 1;
        }
        if true_skeleton.contains(&undirected((p, c))) {
            out.skeleton_tp += 1;
        } else {
            out.skeleton_fp += 1;
        }
    }
    Ok(out)
}

/// Counts at thresholds `0..=100` of edges whose replicate percentage
/// reaches the threshold, split by membership in `truth`.
fn confidence_curves(
    counts: &BTreeMap<(usize, usize), usize>,
    truth: &[(usize, usize)],
    n_replicates: usize,
) -> (Vec<usize>, Vec<usize>) {
    let mut tp = vec![0; 101];
    let mut fp = vec![0; 101];
    for (edge, &count) in counts {
        // count * 100 >= t * R, in integers so thresholds are exact
        for t in 0..=100usize {
            if count * 100 >= t * n_replicates {
                if truth.contains(edge) {
                    tp[t] += 1;
                } else {
                    fp[t] += 1;
                }
            }
        }
    }
    (tp, fp)
}

pub fn run_benchmark(spec: &BenchmarkSpec, config: &SearchConfig) -> Result<BenchmarkReport> {
    run_benchmark_with(spec, config, &Serial)
}

/// Runs every replicate with `config` (its seed is replaced by a per-replicate
/// seed) and aggregates the outcomes.
pub fn run_benchmark_with<E: Executor>(
    spec: &BenchmarkSpec,
    config: &SearchConfig,
    exec: &E,
) -> Result<BenchmarkReport> {
    spec.validate()?;
    config.validate()?;
    let replicates =
        exec.map(spec.n_replicates, |r| replicate(spec, config, r)).into_iter().collect::<Result<Vec<_>>>()?;

    let truth = spec.true_edges();
    let true_skeleton: Vec<(usize, usize)> = truth.iter().map(|&e| undirected(e)).collect();
    let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut skeleton: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for rep in &replicates {
        for &e in &rep.edges {
            *directed.entry(e).or_default() += 1;
            *skeleton.entry(undirected(e)).or_default() += 1;
        }
    }
    let (tp_at_confidence, fp_at_confidence) = confidence_curves(&directed, &truth, spec.n_replicates);
    let (skeleton_tp_at_confidence, skeleton_fp_at_confidence) =
        confidence_curves(&skeleton, &true_skeleton, spec.n_replicates);

    let per_rep = |f: fn(&ReplicateOutcome) -> usize| {
        replicates.iter().map(|r| f(r) as f64).sum::<f64>() / replicates.len() as f64
    };
    let weight_errors: Vec<f64> = replicates.iter().flat_map(|r| r.weight_errors.iter().copied()).collect();
    let (weight_bias, weight_std) = summary(&weight_errors);
    let alphas: Vec<f64> = replicates.iter().map(|r| r.alpha_hat).collect();
    let thetas: Vec<f64> = replicates.iter().flat_map(|r| r.theta_hat.iter().copied()).collect();
    let log_gammas: Vec<f64> = replicates.iter().flat_map(|r| r.gamma_hat.iter().map(|g| g.ln())).collect();
    let log_gammas_sym: Vec<f64> = log_gammas.iter().map(|l| l + core::f64::consts::LN_2).collect();

    Ok(BenchmarkReport {
        score_kind: config.score_kind,
        n_replicates: spec.n_replicates,
        n_true_edges: truth.len(),
        tp_at_confidence,
        fp_at_confidence,
        skeleton_tp_at_confidence,
        skeleton_fp_at_confidence,
        mean_tp: per_rep(|r| r.tp),
        mean_fp: per_rep(|r| r.fp),
        mean_skeleton_tp: per_rep(|r| r.skeleton_tp),
        weight_bias,
        weight_std,
        alpha_stats: summary(&alphas),
        theta_true: theta_from_beta(spec.alpha, spec.beta),
        theta_stats: summary(&thetas),
        log_gamma_stats: summary(&log_gammas),
        log_gamma_symmetrized_stats: summary(&log_gammas_sym),
        replicates,
    })
}
