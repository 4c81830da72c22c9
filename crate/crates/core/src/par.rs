//! Data-parallel helpers. With the `parallel` feature these fan out over the
//! rayon pool; without it they run sequentially with identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..len`, preserving order.
pub fn map_range<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Maps `f` over `0..len` and concatenates the results in order.
pub fn flat_map_range<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> Vec<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().flat_map_iter(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).flat_map(f).collect()
    }
}

/// Maps `f` over a slice, preserving order.
pub fn map_slice<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// True when `pred` holds for every index in `0..len`.
pub fn all_range<F>(len: usize, pred: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().all(pred)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).all(pred)
    }
}

/// Smallest index in `0..len` for which `f` returns `Some`, with its value.
pub fn find_first<T, F>(len: usize, f: F) -> Option<(usize, T)>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().filter_map(|i| f(i).map(|v| (i, v))).find_first(|_| true)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).find_map(|i| f(i).map(|v| (i, v)))
    }
}

/// Splits `items` into chunks, folds each with `fold`, then combines the
/// partial results left to right with `merge`.
pub fn chunked_reduce<I, A, Fo, M>(items: &[I], chunk: usize, identity: impl Fn() -> A + Sync + Send, fold: Fo, merge: M) -> A
where
    I: Sync,
    A: Send,
    Fo: Fn(A, &I) -> A + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    {
        items.par_chunks(chunk).map(|c| c.iter().fold(identity(), &fold)).reduce(&identity, &merge)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.chunks(chunk).map(|c| c.iter().fold(identity(), &fold)).fold(identity(), merge)
    }
}
