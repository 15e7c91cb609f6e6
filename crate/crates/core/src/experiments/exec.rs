//! Order-preserving map over independent work items.
//!
//! With the `parallel` feature the items run on a dedicated rayon pool;
//! without it, or with a single worker, they run in order on the calling
//! thread. Results are identical either way since every item is a pure
//! function of its input.

#[cfg(feature = "parallel")]
use std::sync::Arc;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Default)]
pub struct Executor {
    #[cfg(feature = "parallel")]
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl std::fmt::Debug for Executor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Executor")
            .field("workers", &self.workers())
            .finish()
    }
}

impl Executor {
    pub fn sequential() -> Self {
        Self::default()
    }

    /// Pool of `workers` threads; `0` means one per available processor.
    pub fn new(workers: usize) -> Self {
        let workers = if workers == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            workers
        };
        if workers <= 1 {
            return Self::sequential();
        }
        Self::with_pool(workers)
    }

    #[cfg(feature = "parallel")]
    fn with_pool(workers: usize) -> Self {
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => Self {
                pool: Some(Arc::new(pool)),
            },
            Err(_) => Self::sequential(),
        }
    }

    #[cfg(not(feature = "parallel"))]
    fn with_pool(_workers: usize) -> Self {
        Self::sequential()
    }

    pub fn workers(&self) -> usize {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            return pool.current_num_threads();
        }
        1
    }

    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            return pool.install(|| items.par_iter().map(&f).collect());
        }
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn preserves_order() {
        let items: Vec<u64> = (0..200).collect();
        let square = |x: &u64| x * x;
        let seq = Executor::sequential().map(&items, square);
        let par = Executor::new(4).map(&items, square);
        assert_eq!(seq, par);
        assert_eq!(seq[17], 289);
    }

    #[test]
    fn nested_maps() {
        let exec = Executor::new(3);
        let outer: Vec<u64> = (0..6).collect();
        let out = exec.map(&outer, |&i| {
            let inner: Vec<u64> = (0..i).collect();
            exec.map(&inner, |&j| j + i).into_iter().sum::<u64>()
        });
        assert_eq!(out, vec![0, 1, 5, 12, 22, 35]);
    }

    proptest! {
        #[test]
        fn any_worker_count_preserves_order(items in proptest::collection::vec(any::<i32>(), 0..100), workers in 0usize..6) {
            let f = |x: &i32| i64::from(*x) * 3 - 1;
            prop_assert_eq!(Executor::new(workers).map(&items, f), Executor::sequential().map(&items, f));
        }
    }
}
