//! Thin switch between sequential iteration and rayon.
//!
//! Every caller writes into disjoint output slots, so the result never
//! depends on which branch is compiled in or how many workers run.

#[cfg(feature = "parallel")]
pub(crate) fn for_each_chunk<T, F>(out: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    use rayon::prelude::*;
    out.par_chunks_mut(chunk.max(1))
        .enumerate()
        .for_each(|(i, c)| f(i, c));
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn for_each_chunk<T, F>(out: &mut [T], chunk: usize, f: F)
where
    F: Fn(usize, &mut [T]),
{
    out.chunks_mut(chunk.max(1))
        .enumerate()
        .for_each(|(i, c)| f(i, c));
}

#[cfg(feature = "parallel")]
pub(crate) fn map_collect<R, F>(len: usize, f: F) -> alloc::vec::Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_collect<R, F>(len: usize, f: F) -> alloc::vec::Vec<R>
where
    F: Fn(usize) -> R,
{
    (0..len).map(f).collect()
}
