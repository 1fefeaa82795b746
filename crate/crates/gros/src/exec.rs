//! Replicate-level execution: map a function over replicate indices,
//! in parallel when the `parallel` feature is enabled.
//!
//! Results are collected in replicate order, so output never depends on the
//! scheduling; callers derive one random stream per replicate and stay
//! deterministic at any worker count.

/// Maps `f` over `0..n`, using up to `workers` threads when built with the
/// `parallel` feature. `workers <= 1` always runs sequentially.
#[cfg(feature = "parallel")]
pub fn map_replicates<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;

    if workers <= 1 {
        return (0..n).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("failed to build worker pool");
    pool.install(|| (0..n).into_par_iter().map(f).collect())
}

/// Sequential fallback used when the `parallel` feature is off; `workers`
/// is accepted for interface parity and ignored.
#[cfg(not(feature = "parallel"))]
pub fn map_replicates<T, F>(n: usize, _workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}
