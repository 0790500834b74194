//! Sequential/parallel execution switch.
//!
//! Hot loops (line parsing, matrix accumulation, t-SNE pair sums) run on
//! rayon when the `parallel` feature is enabled, and fall back to plain
//! iteration otherwise. Both paths group partial results per index and merge
//! them in index order, so outputs are bit-identical either way; tests and
//! the bench suite rely on that.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Which path an operation should take. [`Execution::Parallel`] silently
/// degrades to sequential when the crate is built without the `parallel`
/// feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Map `f` over `0..n`, collecting results in index order. The parallel
/// path hands out indices in chunks so fine-grained rows (t-SNE pair sums)
/// amortize the scheduling overhead; each row's arithmetic is
/// self-contained, so chunking cannot change the result.
pub(crate) fn map_indexed_chunked<T, F>(exec: Execution, n: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        Execution::Sequential => (0..n).map(f).collect(),
        Execution::Parallel => {
            #[cfg(feature = "parallel")]
            {
                let starts: Vec<usize> = (0..n).step_by(chunk.max(1)).collect();
                let chunks: Vec<Vec<T>> = starts
                    .par_iter()
                    .map(|&start| (start..(start + chunk.max(1)).min(n)).map(&f).collect())
                    .collect();
                chunks.into_iter().flatten().collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                let _ = chunk;
                (0..n).map(f).collect()
            }
        }
    }
}

/// Map `f` over the items of a slice, collecting results in input order.
pub(crate) fn map_slice<'a, I, T, F>(exec: Execution, items: &'a [I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&'a I) -> T + Sync + Send,
{
    match exec {
        Execution::Sequential => items.iter().map(f).collect(),
        Execution::Parallel => {
            #[cfg(feature = "parallel")]
            {
                items.par_iter().map(f).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                items.iter().map(f).collect()
            }
        }
    }
}
