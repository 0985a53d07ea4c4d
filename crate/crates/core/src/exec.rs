//! Sequential/parallel execution switch.
//!
//! Every helper here produces the same output for both modes: results are
//! collected in input order and reductions only combine commutative,
//! associative integer sums.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is compiled in, sequential otherwise.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Runs `f` with at most `workers` rayon threads. `None` uses the global pool.
pub fn with_workers<R, F>(workers: Option<usize>, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    if let Some(n) = workers {
        match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => return pool.install(f),
            Err(_) => return f(),
        }
    }
    let _ = workers;
    f()
}

pub(crate) fn map_collect<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Like [`map_collect`], but reports the first error in input order so the
/// outcome does not depend on scheduling.
pub(crate) fn try_map_collect<T, R, E, F>(exec: Execution, items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    map_collect(exec, items, f).into_iter().collect()
}

/// Folds `items` into per-worker accumulators and merges them.
pub(crate) fn try_fold_reduce<T, A, E, ID, FF, RF>(
    exec: Execution,
    items: &[T],
    identity: ID,
    fold: FF,
    reduce: RF,
) -> Result<A, E>
where
    T: Sync,
    A: Send,
    E: Send,
    ID: Fn() -> A + Sync + Send,
    FF: Fn(A, &T) -> Result<A, E> + Sync + Send,
    RF: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items
            .par_iter()
            .try_fold(&identity, |acc, item| fold(acc, item))
            .try_reduce(&identity, |a, b| Ok(reduce(a, b)));
    }
    let _ = (exec, &reduce);
    items.iter().try_fold(identity(), fold)
}
