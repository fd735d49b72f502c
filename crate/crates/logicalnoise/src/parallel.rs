//! Dispatch point for data-parallel loops.
//!
//! With the `parallel` feature the closures run on the rayon pool; without it
//! they run sequentially. Results are collected in index order either way, so
//! output is identical across thread counts.

#[cfg(feature = "parallel")]
pub fn map_indices<R, F>(count: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indices<R, F>(count: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    (0..count).map(f).collect()
}
