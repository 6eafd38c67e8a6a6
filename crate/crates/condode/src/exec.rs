//! Sequential or rayon-parallel evaluation of independent items.
//!
//! Without the `parallel` feature both strategies run sequentially, so callers
//! never need their own `cfg` switches.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
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
    /// `f` applied to `0..len`, results in index order.
    pub fn map_range<R, F>(self, len: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..len).into_par_iter().map(f).collect()
            }
            _ => (0..len).map(f).collect(),
        }
    }

    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        self.map_range(items.len(), |k| f(&items[k]))
    }

    /// Maximum of `f` over `0..len`; NaN values are ignored.
    pub fn max_range<F>(self, len: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..len)
                    .into_par_iter()
                    .map(f)
                    .reduce(|| f64::NEG_INFINITY, f64::max)
            }
            _ => (0..len).map(f).fold(f64::NEG_INFINITY, f64::max),
        }
    }
}
