//! Map-over-indices helper that is parallel when the `parallel` feature is
//! enabled and sequential otherwise. Output ordering is by index either way,
//! so results are identical across both builds.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    // Coarse splitting: the kernels here are cheap per item, so per-item
    // task dispatch costs more than it buys.
    let min_len = (n / 64).max(256);
    (0..n)
        .into_par_iter()
        .with_min_len(min_len)
        .map(f)
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
