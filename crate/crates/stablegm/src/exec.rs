use rayon::prelude::*;
use stablegm_core::Executor;

use crate::error::{Error, Result};

/// Runs work items on a dedicated rayon pool. Results keep item order.
pub struct Parallel {
    pool: rayon::ThreadPool,
}

impl Parallel {
    /// `None` lets rayon pick the worker count.
    pub fn new(threads: Option<usize>) -> Result<Self> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            if n == 0 {
                return Err(Error::Config("--threads must be at least 1".into()));
            }
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        Ok(Parallel { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for Parallel {
    fn map<R, F>(&self, n_items: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        self.pool.install(|| (0..n_items).into_par_iter().map(f).collect())
    }
}
