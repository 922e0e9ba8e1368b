//! Data-parallel primitives with a sequential fallback.
//!
//! With the `parallel` feature (the default) these fan out over the current
//! rayon thread pool; without it they are plain loops. Callers are written so
//! results are independent of the execution mode: outputs are collected in
//! input order and reductions are associative with a total order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, collecting results in index order.
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Applies `f` to every element, with its index.
pub fn for_each_mut<T, F>(items: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter_mut().enumerate().for_each(|(i, t)| f(i, t));
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter_mut().enumerate().for_each(|(i, t)| f(i, t));
    }
}

/// Unstable sort; parallel when the feature is on. Comparators passed here
/// must be total orders so the result is unique regardless of mode.
pub fn sort_unstable_by<T, F>(items: &mut [T], cmp: F)
where
    T: Send,
    F: Fn(&T, &T) -> std::cmp::Ordering + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_sort_unstable_by(cmp);
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.sort_unstable_by(cmp);
    }
}
