//! Host services for the core search: a thread pool and a wall clock.

use std::time::Instant;

use rayon::prelude::*;
use rvfl_core::select::{CellFn, CellRunner, CellScore, Clock, Sequential};
use rvfl_core::Result;

use crate::error::Error;

/// Runs grid cells on a dedicated rayon pool. Results come back in cell
/// order, so selection does not depend on the thread count.
pub struct PoolRunner {
    pool: rayon::ThreadPool,
}

impl PoolRunner {
    pub fn new(threads: usize) -> std::result::Result<Self, Error> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Runtime(format!("thread pool: {e}")))?;
        Ok(PoolRunner { pool })
    }
}

impl CellRunner for PoolRunner {
    fn map(&self, n: usize, f: &CellFn<'_>) -> Vec<Result<CellScore>> {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}

/// Sequential for one thread, a pool otherwise.
pub fn runner(threads: usize) -> std::result::Result<Box<dyn CellRunner>, Error> {
    if threads <= 1 {
        Ok(Box::new(Sequential))
    } else {
        Ok(Box::new(PoolRunner::new(threads)?))
    }
}

pub struct WallClock {
    start: Instant,
}

impl Default for WallClock {
    fn default() -> Self {
        WallClock { start: Instant::now() }
    }
}

impl Clock for WallClock {
    fn now_ms(&self) -> f64 {
        self.start.elapsed().as_secs_f64() * 1e3
    }
}
