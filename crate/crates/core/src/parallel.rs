use rayon::prelude::*;

use crate::error::{Error, Result};

/// Evaluates `f(0..count)` in parallel and returns results in index order.
///
/// `workers = None` uses the global rayon pool; `Some(w)` runs on a dedicated
/// pool of `w` threads. Output never depends on the worker count.
pub fn map_indexed<T, F>(count: usize, workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let run = || (0..count).into_par_iter().map(&f).collect::<Vec<T>>();
    match workers {
        None => Ok(run()),
        Some(0) => Err(crate::error::invalid("workers", "must be at least 1")),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Numeric(format!("thread pool: {e}")))?;
            Ok(pool.install(run))
        }
    }
}

/// Like [`map_indexed`] for fallible work; the first error by index wins.
pub fn try_map_indexed<T, F>(count: usize, workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    map_indexed(count, workers, f)?.into_iter().collect()
}
