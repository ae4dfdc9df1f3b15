//! Order-preserving map over independent work items, serial or on rayon.
//!
//! Results always come back in index order, so anything computed from them
//! is identical whichever way the work was scheduled.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum Execution {
    Serial,
    /// Rayon's global pool, or a dedicated pool with `threads` workers.
    #[default]
    Parallel,
    Threads {
        threads: usize,
    },
}

impl Execution {
    /// `Parallel` when built with the `parallel` feature, otherwise `Serial`.
    pub fn default_available() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Serial
        }
    }
}

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_indexed<T, F>(n: u64, execution: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match execution {
        Execution::Serial => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        #[cfg(feature = "parallel")]
        Execution::Threads { threads } => {
            use rayon::prelude::*;
            match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                Ok(pool) => pool.install(|| (0..n).into_par_iter().map(f).collect()),
                Err(_) => (0..n).map(f).collect(),
            }
        }
        #[cfg(not(feature = "parallel"))]
        Execution::Parallel | Execution::Threads { .. } => (0..n).map(f).collect(),
    }
}
