//! Optional data parallelism. Results are always returned in input order,
//! so output does not depend on the thread count.

use crate::error::{Error, Result};

#[cfg(feature = "parallel")]
pub(crate) fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Sets the number of worker threads used by the library. `1` means serial.
/// Only the first call has an effect; later calls with a different count
/// are reported as errors.
pub fn set_jobs(jobs: usize) -> Result<()> {
    if jobs == 0 {
        return Err(Error::InvalidParameter(
            "--jobs must be a positive integer".into(),
        ));
    }
    #[cfg(feature = "parallel")]
    {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .is_err()
            && rayon::current_num_threads() != jobs
        {
            return Err(Error::InvalidParameter(format!(
                "thread pool already running with {} threads",
                rayon::current_num_threads()
            )));
        }
    }
    Ok(())
}
