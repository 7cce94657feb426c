//! Execution strategy for the data-parallel inner loops.
//!
//! Every scan in the crate (goodness quantifiers, coloring sweeps, brute-force
//! searches) goes through [`Exec`]. With the `parallel` feature the
//! [`Exec::Parallel`] strategy runs on the rayon pool; without it both
//! strategies run the same sequential loop. Results never depend on the
//! strategy: ordered collections keep input order and searches return the
//! least matching index.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// True when this strategy actually fans out to worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// `f` applied to every index, results in index order.
    pub fn map_range<R, F>(self, range: Range<u64>, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(u64) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return range.into_par_iter().map(f).collect();
        }
        range.map(f).collect()
    }

    /// `f` applied to every item, results in item order.
    pub fn map_slice<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// The result for the least index at which `f` returns `Some`.
    pub fn find_first<R, F>(self, range: Range<u64>, f: F) -> Option<R>
    where
        R: Send,
        F: Fn(u64) -> Option<R> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return range.into_par_iter().find_map_first(f);
        }
        range.into_iter().find_map(f)
    }

    /// True iff `f` holds for every index.
    pub fn all<F>(self, range: Range<u64>, f: F) -> bool
    where
        F: Fn(u64) -> bool + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return range.into_par_iter().all(f);
        }
        range.into_iter().all(f)
    }

    /// Folds every index into an accumulator. `merge` must be associative and
    /// commutative; chunking differs between strategies.
    pub fn fold<A, I, F, M>(self, range: Range<u64>, init: I, fold: F, merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(A, u64) -> A + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return range
                .into_par_iter()
                .fold(&init, &fold)
                .reduce(&init, &merge);
        }
        let _ = &merge;
        range.into_iter().fold(init(), fold)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            assert_eq!(exec.map_range(0..5, |i| i * i), vec![0, 1, 4, 9, 16]);
            assert_eq!(
                exec.find_first(0..1000, |i| (i % 7 == 3 && i > 10).then_some(i)),
                Some(17)
            );
            assert!(exec.all(0..100, |i| i < 100));
            let sum = exec.fold(0..101, || 0u64, |a, i| a + i, |a, b| a + b);
            assert_eq!(sum, 5050);
        }
    }
}
