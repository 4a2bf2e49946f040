//! Batch mapping over independent work items.
//!
//! With the `parallel` feature (default) batches run on the rayon pool; the
//! sequential fallback compiles the same call sites without it. The explicit
//! `map_batch_seq` stays available either way so benchmarks can compare.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map the default execution lane over a batch.
#[cfg(feature = "parallel")]
pub fn map_batch<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Send + Sync,
{
    items.par_iter().map(f).collect()
}

/// Map the default execution lane over a batch (sequential build).
#[cfg(not(feature = "parallel"))]
pub fn map_batch<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Always-sequential mapping, for baselines.
pub fn map_batch_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
