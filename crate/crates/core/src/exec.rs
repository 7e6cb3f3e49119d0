//! Execution policy for the data-parallel loops (strategy enumeration and
//! trial generation).
//!
//! Every reduction routed through here must be order-independent: either
//! an exact `max`/`min` or integer addition. That is what makes results
//! bit-identical between [`Exec::Sequential`], [`Exec::Parallel`] and any
//! worker count.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Folds `fold` over every index of `range`, combining partial results with
/// `combine`. `combine` must be associative and commutative.
pub fn fold_range<T, I, F, C>(exec: Exec, range: Range<u64>, identity: I, fold: F, combine: C) -> T
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    F: Fn(T, u64) -> T + Sync + Send,
    C: Fn(T, T) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => range
            .into_par_iter()
            .fold(&identity, &fold)
            .reduce(&identity, &combine),
        _ => {
            let _ = &combine;
            range.fold(identity(), fold)
        }
    }
}

/// Maps every index of `range` through `f`, keeping index order.
pub fn map_range<T, F>(exec: Exec, range: Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => range.into_par_iter().map(f).collect(),
        _ => range.map(f).collect(),
    }
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the global pool
/// when `workers` is `None`.
pub fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if let Some(k) = workers {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .expect("thread pool construction failed");
        return pool.install(f);
    }
    let _ = workers;
    f()
}
