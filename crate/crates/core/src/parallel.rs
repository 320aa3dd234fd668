//! Chunked map/reduce used by every data-parallel loop in the crate.
//!
//! Work is split into chunks whose boundaries depend only on the input
//! length and the chunk size, never on the thread count. Chunk results are
//! combined with a fixed pairwise tree, so parallel and sequential execution
//! produce bit-identical output.

use serde::{Deserialize, Serialize};

/// Execution strategy for data-parallel loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    /// Use rayon when the `parallel` feature is enabled, otherwise sequential.
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `f` over fixed-size chunks of `items`, preserving chunk order.
pub fn map_chunks<T, R, F>(exec: Execution, items: &[T], chunk: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &[T]) -> R + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items
            .par_chunks(chunk)
            .enumerate()
            .map(|(i, c)| f(i * chunk, c))
            .collect();
    }
    let _ = exec;
    items
        .chunks(chunk)
        .enumerate()
        .map(|(i, c)| f(i * chunk, c))
        .collect()
}

/// Maps `f` over every element, preserving order.
pub fn map_each<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Pairwise tree reduction with a shape fixed by `parts.len()` alone.
pub fn tree_reduce<R, F>(mut parts: Vec<R>, combine: F) -> Option<R>
where
    F: Fn(R, R) -> R,
{
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(combine(a, b)),
                None => next.push(a),
            }
        }
        parts = next;
    }
    parts.pop()
}
