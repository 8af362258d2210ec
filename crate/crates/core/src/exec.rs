//! Data-parallel helpers for the pair and slice sweeps.
//!
//! With the `parallel` feature the sweeps run on rayon's global pool; the
//! sequential path is always compiled so both can be benchmarked from the
//! same build. Results are collected in index order either way, so output
//! never depends on scheduling.

use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    Parallel,
}

const SEQ: u8 = 0;
const PAR: u8 = 1;

static MODE: AtomicU8 = AtomicU8::new(if cfg!(feature = "parallel") { PAR } else { SEQ });

/// Current execution mode. Always `Sequential` without the `parallel` feature.
pub fn mode() -> Mode {
    if cfg!(feature = "parallel") && MODE.load(Ordering::Relaxed) == PAR {
        Mode::Parallel
    } else {
        Mode::Sequential
    }
}

/// Select the execution mode for subsequent sweeps. Requesting `Parallel`
/// without the feature is a no-op.
pub fn set_mode(mode: Mode) {
    let v = match mode {
        Mode::Sequential => SEQ,
        Mode::Parallel => PAR,
    };
    MODE.store(v, Ordering::Relaxed);
}

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode() == Mode::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// `items.iter().map(f).collect()`, possibly in parallel.
pub fn map_slice<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode() == Mode::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Unordered pairs `(i, j)` with `i < j < n`, lexicographic.
pub fn unordered_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}
