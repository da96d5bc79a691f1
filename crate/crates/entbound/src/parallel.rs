//! Data-parallel map helpers. With the `parallel` feature (default) the maps
//! run on rayon; without it they fall back to sequential iteration with the
//! same deterministic output order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Sequential variant, always available; benches compare it against the
/// parallel path.
pub fn map_collect_seq<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Deterministic argmax reduction: highest value wins, ties broken by the
/// lowest index regardless of evaluation order.
pub fn argmax_by_value<T>(items: Vec<(usize, f64, T)>) -> Option<(usize, f64, T)> {
    let mut best: Option<(usize, f64, T)> = None;
    for (idx, val, item) in items {
        let replace = match &best {
            None => true,
            Some((bi, bv, _)) => val > *bv || (val == *bv && idx < *bi),
        };
        if replace {
            best = Some((idx, val, item));
        }
    }
    best
}
