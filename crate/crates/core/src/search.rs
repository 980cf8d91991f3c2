//! Structure search: greedy K2 parent selection under a fixed ordering,
//! ordering-based search by adjacent swaps, and the restart driver.
//!
//! Family fits and per-node K2 results are cached by
//! `(child, sorted parent or predecessor set)`. Every cached value is a pure
//! function of its key, so the cache can be shared between concurrently
//! running restarts without affecting results.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use spin::Mutex;

use crate::error::{Error, Result};
use crate::exec::{Executor, Serial};
use crate::model::{symmetrize, Dag, DataMatrix, NoiseLaw, SGModel};
use crate::rng::{derive_seed, permutation, seeded};
use crate::scoring::{fit_family, FamilyFit, FamilyTerms, ScoreKind};
use crate::stable::{beta_from_theta, estimate_alpha, estimate_gamma, estimate_theta};

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub n_restarts: usize,
    pub max_parents: Option<usize>,
    /// Fitting and scoring use `p = alpha / irls_p_divisor`.
    pub irls_p_divisor: f64,
    /// Reported dispersions use `p = alpha / report_p_divisor`.
    pub report_p_divisor: f64,
    pub tolerance: f64,
    pub seed: u64,
    pub score_kind: ScoreKind,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            n_restarts: 10,
            max_parents: None,
            irls_p_divisor: 1.01,
            report_p_divisor: 10.0,
            tolerance: crate::regression::DEFAULT_TOLERANCE,
            seed: 0,
            score_kind: ScoreKind::Mdc,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_restarts == 0 {
            return Err(Error::InvalidConfig("n_restarts must be at least 1".into()));
        }
        if !(self.irls_p_divisor > 1.0 && self.report_p_divisor > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "exponent divisors must exceed 1, got {} and {}",
                self.irls_p_divisor, self.report_p_divisor
            )));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig(format!("tolerance {} must be positive", self.tolerance)));
        }
        if self.score_kind == ScoreKind::Lflom {
            return Err(Error::InvalidConfig("search scores are mdc or ols".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchTrace {
    pub restart_scores: Vec<f64>,
    pub best_restart: usize,
    pub alpha_hat: f64,
    pub p_used: f64,
    /// Accepted swaps plus one initial ordering per restart.
    pub orderings_visited: usize,
    /// Family score requests, cached or not.
    pub families_scored: usize,
}

impl SearchTrace {
    pub fn best_score(&self) -> f64 {
        self.restart_scores[self.best_restart]
    }
}

/// Greedy K2 outcome for one node.
#[derive(Debug, Clone, PartialEq)]
struct NodeFit {
    parents: Vec<usize>,
    weights: Vec<f64>,
    terms: FamilyTerms,
}

impl NodeFit {
    fn score(&self) -> f64 {
        self.terms.value()
    }
}

type Key = (usize, Vec<usize>);

struct Scorer<'a> {
    data: &'a DataMatrix,
    kind: ScoreKind,
    p: f64,
    tolerance: f64,
    max_parents: usize,
    families: Mutex<BTreeMap<Key, Option<FamilyFit>>>,
    nodes: Mutex<BTreeMap<Key, NodeFit>>,
}

#[derive(Debug, Default, Clone, Copy)]
struct Counters {
    families: usize,
    orderings: usize,
}

impl<'a> Scorer<'a> {
    fn new(data: &'a DataMatrix, p: f64, config: &SearchConfig) -> Result<Self> {
        config.validate()?;
        if data.n_cols() == 0 {
            return Err(Error::InvalidData("no variables".into()));
        }
        if data.n_rows() < 2 {
            return Err(Error::TooFewRows { needed: 2, got: data.n_rows() });
        }
        Ok(Scorer {
            data,
            kind: config.score_kind,
            p,
            tolerance: config.tolerance,
            max_parents: config.max_parents.unwrap_or(usize::MAX),
            families: Mutex::new(BTreeMap::new()),
            nodes: Mutex::new(BTreeMap::new()),
        })
    }

    /// `None` for parent sets that cannot be fitted (collinear, exact fit).
    fn family(&self, child: usize, parents: Vec<usize>, counters: &mut Counters) -> Result<Option<FamilyFit>> {
        counters.families += 1;
        let key = (child, parents);
        if let Some(hit) = self.families.lock().get(&key) {
            return Ok(hit.clone());
        }
        let fit = match fit_family(self.data, child, &key.1, self.kind, self.p, self.tolerance) {
            Ok(fit) => Some(fit),
            Err(Error::RankDeficient { .. } | Error::Degenerate(_)) if !key.1.is_empty() => None,
            Err(e) => return Err(e),
        };
        self.families.lock().insert(key, fit.clone());
        Ok(fit)
    }

    /// Greedy parent selection for `child` among `predecessors` (sorted).
    fn node(&self, child: usize, predecessors: &[usize], counters: &mut Counters) -> Result<NodeFit> {
        let key = (child, predecessors.to_vec());
        if let Some(hit) = self.nodes.lock().get(&key) {
            return Ok(hit.clone());
        }
        let base = self.family(child, Vec::new(), counters)?.expect("empty parent sets always fit or fail");
        let mut current = NodeFit { parents: Vec::new(), weights: base.weights, terms: base.terms };
        while current.parents.len() < self.max_parents {
            let mut best: Option<(Vec<usize>, FamilyFit)> = None;
            let mut best_score = current.score();
            for &candidate in predecessors {
                if current.parents.contains(&candidate) {
                    continue;
                }
                let mut set = current.parents.clone();
                let at = set.partition_point(|&k| k < candidate);
                set.insert(at, candidate);
                if let Some(fit) = self.family(child, set.clone(), counters)? {
                    if fit.score() > best_score {
                        best_score = fit.score();
                        best = Some((set, fit));
                    }
                }
            }
            match best {
                Some((parents, fit)) => current = NodeFit { parents, weights: fit.weights, terms: fit.terms },
                None => break,
            }
        }
        self.nodes.lock().insert(key, current.clone());
        Ok(current)
    }

    fn node_at(&self, ordering: &[usize], position: usize, counters: &mut Counters) -> Result<NodeFit> {
        let mut predecessors = ordering[..position].to_vec();
        predecessors.sort_unstable();
        self.node(ordering[position], &predecessors, counters)
    }
}

/// Learned structure before noise parameters are attached.
#[derive(Debug, Clone)]
struct Assembly {
    ordering: Vec<usize>,
    /// Indexed by node.
    fits: Vec<NodeFit>,
    score: f64,
}

fn assemble(ordering: Vec<usize>, by_position: Vec<NodeFit>) -> Assembly {
    let mut fits: Vec<Option<NodeFit>> = vec![None; ordering.len()];
    for (&node, fit) in ordering.iter().zip(by_position) {
        fits[node] = Some(fit);
    }
    let fits: Vec<NodeFit> = fits.into_iter().map(|f| f.expect("ordering is a permutation")).collect();
    // Summed in node order, as the model scores do.
    let score = fits.iter().map(|f| f.score()).sum();
    Assembly { ordering, fits, score }
}

fn check_ordering(ordering: &[usize], d: usize) -> Result<()> {
    let mut seen = vec![false; d];
    if ordering.len() != d {
        return Err(Error::InvalidConfig(format!("ordering has {} entries for {d} variables", ordering.len())));
    }
    for &j in ordering {
        if j >= d || seen[j] {
            return Err(Error::InvalidConfig(format!("ordering is not a permutation of 0..{d}")));
        }
        seen[j] = true;
    }
    Ok(())
}

fn k2_run(scorer: &Scorer<'_>, ordering: &[usize], counters: &mut Counters) -> Result<Assembly> {
    let fits = (0..ordering.len()).map(|i| scorer.node_at(ordering, i, counters)).collect::<Result<Vec<_>>>()?;
    Ok(assemble(ordering.to_vec(), fits))
}

fn obs_run(scorer: &Scorer<'_>, initial: Vec<usize>, counters: &mut Counters) -> Result<Assembly> {
    let d = initial.len();
    let mut ordering = initial;
    let mut fits = (0..d).map(|i| scorer.node_at(&ordering, i, counters)).collect::<Result<Vec<_>>>()?;
    counters.orderings += 1;
    if d < 2 {
        return Ok(assemble(ordering, fits));
    }

    // Swapping positions i and i+1 only changes the predecessor sets of
    // those two nodes.
    let swapped = |ordering: &[usize], i: usize, counters: &mut Counters| -> Result<(NodeFit, NodeFit)> {
        let mut preds = ordering[..i].to_vec();
        preds.sort_unstable();
        let moved_up = scorer.node(ordering[i + 1], &preds, counters)?;
        let at = preds.partition_point(|&k| k < ordering[i + 1]);
        preds.insert(at, ordering[i + 1]);
        let moved_down = scorer.node(ordering[i], &preds, counters)?;
        Ok((moved_up, moved_down))
    };
    let delta = |ordering: &[usize], fits: &[NodeFit], i: usize, counters: &mut Counters| -> Result<f64> {
        let (up, down) = swapped(ordering, i, counters)?;
        Ok((up.score() + down.score()) - (fits[i].score() + fits[i + 1].score()))
    };

    let mut ds = (0..d - 1).map(|i| delta(&ordering, &fits, i, counters)).collect::<Result<Vec<_>>>()?;
    let max_swaps = 100 * d * d;
    for _ in 0..max_swaps {
        let mut best: Option<usize> = None;
        for (i, &v) in ds.iter().enumerate() {
            if v > 0.0 && best.is_none_or(|b| v > ds[b]) {
                best = Some(i);
            }
        }
        let Some(a) = best else { break };
        let (up, down) = swapped(&ordering, a, counters)?;
        ordering.swap(a, a + 1);
        fits[a] = up;
        fits[a + 1] = down;
        counters.orderings += 1;
        let (lo, hi) = (a.saturating_sub(1), (a + 1).min(d - 2));
        for (i, slot) in ds.iter_mut().enumerate().take(hi + 1).skip(lo) {
            *slot = delta(&ordering, &fits, i, counters)?;
        }
    }
    Ok(assemble(ordering, fits))
}

fn to_model(data: &DataMatrix, assembly: &Assembly, alpha: f64, noise: Vec<NoiseLaw>) -> Result<SGModel> {
    let parents: Vec<Vec<usize>> = assembly.fits.iter().map(|f| f.parents.clone()).collect();
    let weights: Vec<Vec<f64>> = assembly.fits.iter().map(|f| f.weights.clone()).collect();
    let dag = Dag::new(data.names().to_vec(), parents)?;
    SGModel::new(dag, alpha, weights, noise)
}

/// Symmetric noise laws with `gamma` estimated at the report exponent.
fn report_noise(data: &DataMatrix, assembly: &Assembly, alpha: f64, config: &SearchConfig) -> Result<Vec<NoiseLaw>> {
    let provisional = to_model(data, assembly, alpha, vec![NoiseLaw::symmetric(1.0); data.n_cols()])?;
    let p = alpha / config.report_p_divisor;
    (0..data.n_cols())
        .map(|j| {
            let z = provisional.residuals(data, j)?;
            Ok(NoiseLaw::symmetric(estimate_gamma(&z, alpha, p)?))
        })
        .collect()
}

fn finish(data: &DataMatrix, assembly: &Assembly, alpha: f64, config: &SearchConfig) -> Result<SGModel> {
    let noise = report_noise(data, assembly, alpha, config)?;
    to_model(data, assembly, alpha, noise)
}

/// Greedy parent selection under a fixed ordering. `data` is scored as
/// given (symmetrize it first for `mdc`); reported dispersions are those of
/// `data`.
pub fn k2_search(data: &DataMatrix, ordering: &[usize], alpha: f64, config: &SearchConfig) -> Result<SGModel> {
    let scorer = Scorer::new(data, alpha / config.irls_p_divisor, config)?;
    check_ordering(ordering, data.n_cols())?;
    let assembly = k2_run(&scorer, ordering, &mut Counters::default())?;
    finish(data, &assembly, alpha, config)
}

/// Ordering-based search from `initial`, applying the best strictly
/// improving adjacent swap until none is left.
pub fn obs(data: &DataMatrix, alpha: f64, initial: &[usize], config: &SearchConfig) -> Result<SGModel> {
    Ok(obs_scored(data, alpha, initial, config)?.0)
}

/// [`obs`] together with the final ordering and its score.
pub fn obs_scored(
    data: &DataMatrix,
    alpha: f64,
    initial: &[usize],
    config: &SearchConfig,
) -> Result<(SGModel, Vec<usize>, f64)> {
    let scorer = Scorer::new(data, alpha / config.irls_p_divisor, config)?;
    check_ordering(initial, data.n_cols())?;
    let assembly = obs_run(&scorer, initial.to_vec(), &mut Counters::default())?;
    let model = finish(data, &assembly, alpha, config)?;
    Ok((model, assembly.ordering, assembly.score))
}

/// Initial ordering of restart `r`.
pub fn restart_ordering(seed: u64, restart: usize, d: usize) -> Vec<usize> {
    permutation(&mut seeded(derive_seed(seed, restart as u64)), d)
}

/// The full driver on serial execution. See [`stable_learn_with`].
pub fn stable_learn(raw: &DataMatrix, config: &SearchConfig) -> Result<(SGModel, SearchTrace)> {
    stable_learn_with(raw, config, &Serial)
}

/// Symmetrizes `raw`, estimates `alpha` once from the row sums, runs
/// [`obs`] from `n_restarts` seeded orderings and keeps the best (lowest
/// restart index on ties).
///
/// The returned model carries generator-scale parameters: `gamma` from the
/// symmetrized residuals at the report exponent, halved; `beta` from the
/// skewness of the raw residuals; `mu = 0`. Its `mdc` (or `ols`) score on
/// the symmetrized data equals `trace.best_score()`.
pub fn stable_learn_with<E: Executor>(
    raw: &DataMatrix,
    config: &SearchConfig,
    exec: &E,
) -> Result<(SGModel, SearchTrace)> {
    config.validate()?;
    if raw.n_rows() < 4 {
        return Err(Error::TooFewRows { needed: 4, got: raw.n_rows() });
    }
    let sym = symmetrize(raw)?;
    let alpha = estimate_alpha(&sym.row_sums())?;
    let p = alpha / config.irls_p_divisor;
    let scorer = Scorer::new(&sym, p, config)?;
    let d = sym.n_cols();

    let runs = exec.map(config.n_restarts, |r| {
        let mut counters = Counters::default();
        obs_run(&scorer, restart_ordering(config.seed, r, d), &mut counters).map(|a| (a, counters))
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;

    let mut best = 0;
    for (r, (a, _)) in runs.iter().enumerate() {
        if a.score > runs[best].0.score {
            best = r;
        }
    }
    let assembly = &runs[best].0;
    let trace = SearchTrace {
        restart_scores: runs.iter().map(|(a, _)| a.score).collect(),
        best_restart: best,
        alpha_hat: alpha,
        p_used: p,
        orderings_visited: runs.iter().map(|(_, c)| c.orderings).sum(),
        families_scored: runs.iter().map(|(_, c)| c.families).sum(),
    };

    let symmetric = report_noise(&sym, assembly, alpha, config)?;
    let provisional = to_model(raw, assembly, alpha, symmetric.clone())?;
    let noise = symmetric
        .iter()
        .enumerate()
        .map(|(j, law)| {
            let z = provisional.residuals(raw, j)?;
            let beta = beta_from_theta(alpha, estimate_theta(&z, alpha));
            Ok(NoiseLaw { beta, gamma: law.gamma / 2.0, mu: 0.0 })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((to_model(raw, assembly, alpha, noise)?, trace))
}
