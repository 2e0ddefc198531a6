use std::sync::Arc;

use lacewalk_core::exec::Executor;
use rayon::prelude::*;
use rayon::ThreadPool;

/// Runs tasks on a rayon pool; results come back in index order.
#[derive(Clone, Debug, Default)]
pub struct RayonExecutor {
    pool: Option<Arc<ThreadPool>>,
}

impl RayonExecutor {
    /// `None` uses the global pool.
    pub fn new(threads: Option<usize>) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = match threads {
            Some(n) => Some(Arc::new(rayon::ThreadPoolBuilder::new().num_threads(n).build()?)),
            None => None,
        };
        Ok(Self { pool })
    }
}

impl Executor for RayonExecutor {
    fn map<T, F>(&self, count: usize, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        let run = || (0..count).into_par_iter().map(&task).collect();
        match &self.pool {
            Some(pool) => pool.install(run),
            None => run(),
        }
    }
}
