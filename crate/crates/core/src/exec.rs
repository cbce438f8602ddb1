//! Execution policy for the data-parallel inner loops.
//!
//! Every loop that fans out over independent work items (rows of a mask,
//! candidate subsets, clique branches, random trials) goes through [`Exec`].
//! With the `parallel` feature disabled, [`Exec::Parallel`] silently runs the
//! sequential path, so callers never need their own `cfg` gates. Results are
//! always returned in input order, which keeps every output independent of
//! the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Order-preserving map over a slice.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Order-preserving map over `0..n`.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Applies `f` to consecutive chunks of `data`, passing the chunk index.
    pub fn for_each_chunk_mut<T, F>(self, data: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            data.par_chunks_mut(chunk)
                .enumerate()
                .for_each(|(i, c)| f(i, c));
            return;
        }
        data.chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
    }
}

/// Resource caps and execution policy shared by the heavier operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Settings {
    /// Maximum number of graph vertices a maximal-square search may visit.
    pub clique_cap: usize,
    /// Maximum number of maximal squares a single search may return.
    pub square_cap: usize,
    /// Maximum witness size for the relaxation oracle.
    pub subset_cap: usize,
    /// Run the exhaustive subset search next to the d = 1 pair scan.
    pub cross_check: bool,
    pub exec: Exec,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            clique_cap: 64,
            square_cap: 100_000,
            subset_cap: 6,
            cross_check: true,
            exec: Exec::default(),
        }
    }
}

impl Settings {
    pub fn sequential() -> Self {
        Settings {
            exec: Exec::Sequential,
            ..Settings::default()
        }
    }

    pub fn with_clique_cap(mut self, cap: usize) -> Self {
        self.clique_cap = cap;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }
}
