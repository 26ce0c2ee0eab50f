use anyhow::{bail, Context, Result};
use nw_core::TaskRunner;
use rayon::prelude::*;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "NW_THREADS";

/// Reads `NW_THREADS`. Unset or empty means "use the default".
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(e).context(THREADS_ENV),
        Ok(s) if s.trim().is_empty() => Ok(None),
        Ok(s) => {
            let n: usize = s
                .trim()
                .parse()
                .with_context(|| format!("{THREADS_ENV}={s:?} is not a positive integer"))?;
            if n == 0 {
                bail!("{THREADS_ENV} must be a positive integer");
            }
            Ok(Some(n))
        }
    }
}

/// Runs harness tasks on a dedicated rayon pool. Results come back in task
/// order, so output never depends on the thread count.
#[derive(Debug)]
pub struct RayonRunner {
    pool: rayon::ThreadPool,
}

impl RayonRunner {
    /// `None` lets rayon pick (one worker per core).
    pub fn new(threads: Option<usize>) -> Result<Self> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        Ok(RayonRunner {
            pool: builder.build().context("building thread pool")?,
        })
    }

    pub fn from_env() -> Result<Self> {
        Self::new(threads_from_env()?)
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl TaskRunner for RayonRunner {
    fn run<T, F>(&self, n: usize, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool
            .install(|| (0..n).into_par_iter().map(&task).collect())
    }
}
