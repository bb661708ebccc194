//! Batch evaluation over independent samples.
//!
//! With the `parallel` feature (default) `map` fans out over rayon; without it
//! the same call runs sequentially. `map_seq` is always sequential and exists
//! so benchmarks can compare both paths in one build. Output order matches
//! input order in every case, and reductions over the results are done
//! sequentially by callers, so enabling the feature never changes results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Sequential reference path, kept for benchmark comparison.
pub fn map_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
