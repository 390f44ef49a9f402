//! Batch execution: data-parallel with rayon, or sequential.
//!
//! Without the `parallel` feature every strategy runs sequentially. Results
//! are always returned in input order, so output never depends on scheduling.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parallelism {
    Sequential,
    #[default]
    Parallel,
}

impl Parallelism {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Parallel
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(par: Parallelism, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = par;
    items.iter().map(f).collect()
}

/// Like [`map`] for fallible work; the first error in input order wins.
pub fn try_map<T, R, E, F>(par: Parallelism, items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    map(par, items, f).into_iter().collect()
}

/// Index of the first item, in input order, for which `pred` holds or
/// fails. Parallel runs stop scanning past an earlier hit.
pub fn try_position<T, E, F>(par: Parallelism, items: &[T], pred: F) -> Result<Option<usize>, E>
where
    T: Sync,
    F: Fn(&T) -> Result<bool, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.is_parallel() {
        use rayon::prelude::*;
        let Some(i) = items.par_iter().position_first(|x| !matches!(pred(x), Ok(false))) else {
            return Ok(None);
        };
        return pred(&items[i]).map(|_| Some(i));
    }
    let _ = par;
    for (i, x) in items.iter().enumerate() {
        if pred(x)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Maps over `0..n`, preserving order.
pub fn map_range<R, F>(par: Parallelism, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = par;
    (0..n).map(f).collect()
}
