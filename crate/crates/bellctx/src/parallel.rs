//! Rayon-backed chunk executor. Chunks run in any order; their tallies are
//! merged in chunk order afterwards.

use bellctx_core::exec::{ChunkExecutor, Tally};
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

pub struct RayonExecutor {
    pool: ThreadPool,
}

impl RayonExecutor {
    /// `threads = None` lets rayon pick the thread count.
    pub fn new(threads: Option<usize>) -> Self {
        let mut b = ThreadPoolBuilder::new();
        if let Some(n) = threads {
            b = b.num_threads(n.max(1));
        }
        RayonExecutor { pool: b.build().expect("thread pool") }
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Maps `f` over `items` on the pool, preserving order.
    pub fn map<I, T, F>(&self, items: &[I], f: F) -> Vec<T>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> T + Sync + Send,
    {
        self.pool.install(|| items.par_iter().map(f).collect())
    }
}

impl ChunkExecutor for RayonExecutor {
    fn run<T, F>(&self, chunks: u32, f: F) -> bellctx_core::Result<T>
    where
        T: Tally,
        F: Fn(u32) -> bellctx_core::Result<T> + Sync + Send,
    {
        let parts: Vec<T> =
            self.pool.install(|| (0..chunks).into_par_iter().map(&f).collect::<bellctx_core::Result<_>>())?;
        let mut acc = T::default();
        for p in parts {
            acc.merge(p);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bellctx_core::exec::Sequential;
    use bellctx_core::hidden::{hv_quartet_with, Method, QuasiObjectivisticModel};
    use bellctx_core::Settings;

    #[test]
    fn matches_sequential() {
        let m = QuasiObjectivisticModel::malus(90).unwrap();
        let s = Settings::chsh_optimal();
        let method = Method::MonteCarlo { seed: 5, samples: 70_000 };
        let a = hv_quartet_with(&Sequential, &m, &s, method).unwrap();
        let b = hv_quartet_with(&RayonExecutor::new(Some(4)), &m, &s, method).unwrap();
        assert_eq!(a, b);
    }
}
