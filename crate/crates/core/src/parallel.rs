//! Data-parallel execution with a sequential fallback.
//!
//! With the default `parallel` feature the hot loops (Monte-Carlo samples,
//! path enumeration, sweep cells) fan out over rayon. Without it the same
//! entry points run sequentially. Work items are always collected back in
//! index order and reduced sequentially, so results are identical across
//! feature settings and thread counts.

/// Applies `f` to `0..n` and collects results in index order.
#[cfg(feature = "parallel")]
pub(crate) fn indexed_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn indexed_map<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Fallible variant; the first error wins.
#[cfg(feature = "parallel")]
pub(crate) fn try_indexed_map<T, F>(n: usize, f: F) -> crate::error::Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> crate::error::Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn try_indexed_map<T, F>(n: usize, f: F) -> crate::error::Result<Vec<T>>
where
    F: Fn(usize) -> crate::error::Result<T>,
{
    (0..n).map(f).collect()
}

/// Caps the global worker pool. Call once, before any parallel work; later
/// calls fail once the pool exists. A no-op without the `parallel` feature.
#[cfg(feature = "parallel")]
pub fn set_max_threads(threads: usize) -> std::result::Result<(), String> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

#[cfg(not(feature = "parallel"))]
pub fn set_max_threads(_threads: usize) -> std::result::Result<(), String> {
    Ok(())
}

/// Whether this build fans work out over rayon.
pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}
