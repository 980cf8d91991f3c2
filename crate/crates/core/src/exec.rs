//! Work-item execution.
//!
//! Pipelines split their work into independent items (restarts,
//! replicates, folds, held-out groups) and hand them to an [`Executor`].
//! Results come back in item order, so aggregation is identical whichever
//! executor ran the items.

use alloc::vec::Vec;

pub trait Executor: Sync {
    fn map<R, F>(&self, n_items: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send;
}

/// Runs items one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Executor for Serial {
    fn map<R, F>(&self, n_items: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        (0..n_items).map(f).collect()
    }
}
