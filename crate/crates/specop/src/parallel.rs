//! Order-preserving parallel map over independent indexed work items.
//!
//! Every item is a pure function of its index, so output does not depend on
//! the worker count.

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::{CliError, CliResult};

/// Pool with `workers` threads; `0` lets rayon choose.
pub fn pool(workers: usize) -> CliResult<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {workers} worker threads: {e}")))
}

pub fn map_indexed<T, E, F>(pool: &ThreadPool, n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(u64) -> Result<T, E> + Sync,
{
    pool.install(|| (0..n as u64).into_par_iter().map(&f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        for workers in [1, 3] {
            let out: Vec<u64> = map_indexed::<_, (), _>(&pool(workers).unwrap(), 100, |i| Ok(i * i)).unwrap();
            assert_eq!(out, (0..100u64).map(|i| i * i).collect::<Vec<_>>());
        }
    }
}
