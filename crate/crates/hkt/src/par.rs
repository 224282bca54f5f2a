//! Data-parallel helpers. With the `parallel` feature (default) index sweeps
//! run on the rayon pool; without it they run sequentially. Results are
//! always returned in index order, so both paths are bit-for-bit identical.

/// Evaluates `f(i)` for `i in 0..n` and collects the results in order.
#[cfg(feature = "parallel")]
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Evaluates `f(i)` for `i in 0..n` and collects the results in order.
#[cfg(not(feature = "parallel"))]
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Maps `f` over a slice, preserving order.
pub fn map_slice<A, T, F>(items: &[A], f: F) -> Vec<T>
where
    A: Sync,
    T: Send,
    F: Fn(&A) -> T + Sync + Send,
{
    map_range(items.len(), |i| f(&items[i]))
}

/// Runs `f` inside a pool limited to `jobs` worker threads (ignored in the
/// sequential build or when `jobs == 0`).
pub fn with_jobs<R: Send, F: FnOnce() -> R + Send>(jobs: usize, f: F) -> R {
    #[cfg(feature = "parallel")]
    {
        if jobs > 0 {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
                return pool.install(f);
            }
        }
    }
    let _ = jobs;
    f()
}

/// Whether this build evaluates sweeps in parallel.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
