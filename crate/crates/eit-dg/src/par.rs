//! Execution policy for the data-parallel loops.
//!
//! Every parallel phase in this crate produces one value per index (cell,
//! edge, measurement, ...) and writes it into its own slot; reductions over
//! those slots always run sequentially in index order. Results are therefore
//! bit-identical whether a loop runs on one thread or many, which is what
//! makes the CSV outputs reproducible independent of `--threads`.
//!
//! With the `parallel` feature disabled rayon is not compiled in at all and
//! every loop runs sequentially. With the feature enabled, parallelism can
//! still be switched off at runtime (used by the benchmarks to compare both
//! paths in a single run, and by `--threads 1`).

#[cfg(feature = "parallel")]
use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
static PARALLEL_ENABLED: AtomicBool = AtomicBool::new(true);

/// Globally enables or disables the rayon code path at runtime.
#[cfg(feature = "parallel")]
pub fn set_parallel(enabled: bool) {
    PARALLEL_ENABLED.store(enabled, Ordering::Relaxed);
}

/// Reports whether the rayon code path is active.
#[cfg(feature = "parallel")]
pub fn parallel_enabled() -> bool {
    PARALLEL_ENABLED.load(Ordering::Relaxed)
}

/// Caps the rayon worker count (first call wins process-wide) and turns the
/// parallel path off entirely for `threads == 1`.
#[cfg(feature = "parallel")]
pub fn configure_threads(threads: usize) {
    if threads <= 1 {
        set_parallel(false);
        return;
    }
    set_parallel(true);
    // Only the first global-pool initialization can take effect; a pool
    // already built (e.g. by an earlier call) keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
}

/// Without the `parallel` feature every loop is sequential regardless.
#[cfg(not(feature = "parallel"))]
pub fn configure_threads(_threads: usize) {}

/// No-op without the `parallel` feature.
#[cfg(not(feature = "parallel"))]
pub fn set_parallel(_enabled: bool) {}

/// Always false without the `parallel` feature.
#[cfg(not(feature = "parallel"))]
pub fn parallel_enabled() -> bool {
    false
}

/// Maps `f` over `0..n`, collecting results in index order.
#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if parallel_enabled() {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}
