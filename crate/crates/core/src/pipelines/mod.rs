//! Experiment drivers built on the search stack.
//!
//! Each driver splits its work into independent items (replicates, folds,
//! held-out groups) with their own derived seeds and runs them through an
//! [`Executor`](crate::Executor); aggregation walks the items in index order.

mod benchmark;
mod bootstrap;
mod crossval;
mod normalize;
mod sgex;

pub use benchmark::{run_benchmark, run_benchmark_with, BenchmarkReport, BenchmarkSpec, ReplicateOutcome};
pub use bootstrap::{bootstrap, estimate_sample, BootstrapSummary, SampleEstimate};
pub use crossval::{crossval, crossval_with, fold_assignment, CvReport};
pub use normalize::normalize_expression;
pub use sgex::{sgex, sgex_with, DeMatrix};

use crate::math::{mean, std_dev};

/// Mean and sample standard deviation; the deviation is 0 for fewer than two
/// values.
pub fn summary(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let sd = if values.len() < 2 { 0.0 } else { std_dev(values) };
    (mean(values), sd)
}
