//! Rank-based merge and bottom-up merge sort over `(dist, id)` keys.
//!
//! Every output position is computed independently from the element's own
//! index plus a binary search in the other run, so each element could be
//! handled by its own worker. Here the per-element loop runs inline: the
//! lists are at most a few hundred entries and the batch already supplies
//! the parallelism.

use alloc::vec::Vec;
use core::cmp::Ordering;

/// An item ordered by ascending distance, then ascending id.
pub trait Ranked: Copy {
    fn id(&self) -> u32;
    fn dist(&self) -> f32;
}

#[inline]
pub fn rank_cmp<T: Ranked>(a: &T, b: &T) -> Ordering {
    a.dist()
        .total_cmp(&b.dist())
        .then_with(|| a.id().cmp(&b.id()))
}

/// A node and its distance to the query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbour {
    pub id: u32,
    pub dist: f32,
}

impl Neighbour {
    pub fn new(id: u32, dist: f32) -> Self {
        Self { id, dist }
    }
}

impl Ranked for Neighbour {
    #[inline]
    fn id(&self) -> u32 {
        self.id
    }
    #[inline]
    fn dist(&self) -> f32 {
        self.dist
    }
}

/// Merges sorted runs `a` and `b` into `out` (`out.len() == a.len() + b.len()`).
///
/// An element of `a` lands at its index plus the number of `b` elements
/// strictly below it; an element of `b` at its index plus the number of `a`
/// elements not above it. Equal keys therefore keep `a` first and the
/// positions form a permutation.
pub fn parallel_merge_into<T: Ranked>(a: &[T], b: &[T], out: &mut [T]) {
    assert_eq!(out.len(), a.len() + b.len());
    for (i, x) in a.iter().enumerate() {
        let p2 = b.partition_point(|y| rank_cmp(y, x) == Ordering::Less);
        out[i + p2] = *x;
    }
    for (j, y) in b.iter().enumerate() {
        let p1 = a.partition_point(|x| rank_cmp(x, y) != Ordering::Greater);
        out[j + p1] = *y;
    }
}

pub fn parallel_merge<T: Ranked>(a: &[T], b: &[T]) -> Vec<T> {
    let Some(&fill) = a.first().or_else(|| b.first()) else {
        return Vec::new();
    };
    let mut out = alloc::vec![fill; a.len() + b.len()];
    parallel_merge_into(a, b, &mut out);
    out
}

/// Sorts in place by merging runs of width 1, 2, 4, ... with
/// [`parallel_merge_into`]. `scratch` is reused between calls.
pub fn parallel_merge_sort_with<T: Ranked>(items: &mut Vec<T>, scratch: &mut Vec<T>) {
    let n = items.len();
    if n < 2 {
        return;
    }
    scratch.clear();
    scratch.extend_from_slice(items);
    let mut width = 1;
    while width < n {
        {
            let (src, dst) = (&*items, &mut scratch[..]);
            let mut start = 0;
            while start < n {
                let mid = (start + width).min(n);
                let end = (start + 2 * width).min(n);
                parallel_merge_into(&src[start..mid], &src[mid..end], &mut dst[start..end]);
                start = end;
            }
        }
        core::mem::swap(items, scratch);
        width *= 2;
    }
}

pub fn parallel_merge_sort<T: Ranked>(items: &mut Vec<T>) {
    let mut scratch = Vec::with_capacity(items.len());
    parallel_merge_sort_with(items, &mut scratch);
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn n(id: u32, dist: f32) -> Neighbour {
        Neighbour::new(id, dist)
    }

    #[test]
    fn trivial_sorts() {
        let mut v: Vec<Neighbour> = vec![];
        parallel_merge_sort(&mut v);
        assert!(v.is_empty());
        let mut v = vec![n(3, 1.0)];
        parallel_merge_sort(&mut v);
        assert_eq!(v, vec![n(3, 1.0)]);
    }

    #[test]
    fn ties_break_by_id() {
        let mut v = vec![n(9, 2.0), n(4, 2.0), n(7, 1.0), n(1, 2.0), n(0, 3.0)];
        parallel_merge_sort(&mut v);
        let ids: Vec<u32> = v.iter().map(|x| x.id).collect();
        assert_eq!(ids, vec![7, 1, 4, 9, 0]);
    }

    #[test]
    fn merge_with_empty_side() {
        let a = vec![n(1, 1.0), n(2, 2.0)];
        assert_eq!(parallel_merge(&a, &[]), a);
        assert_eq!(parallel_merge(&[], &a), a);
        assert!(parallel_merge::<Neighbour>(&[], &[]).is_empty());
    }

    #[test]
    fn equal_keys_keep_left_run_first() {
        let a = vec![n(5, 1.0)];
        let b = vec![n(5, 1.0)];
        let out = parallel_merge(&a, &b);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn rank_positions_in_a_four_by_four_merge() {
        // Item 28 sits at index 3 of the first run and every element of the
        // second run is smaller, so it lands at 3 + 4 = 7.
        let first = [5.0, 12.0, 19.0, 28.0];
        let second = [3.0, 9.0, 16.0, 25.0];
        let a: Vec<Neighbour> = first.iter().map(|&d| n(d as u32, d)).collect();
        let b: Vec<Neighbour> = second.iter().map(|&d| n(d as u32, d)).collect();
        let out = parallel_merge(&a, &b);
        assert_eq!(out[7].id, 28);
        let dists: Vec<f32> = out.iter().map(|x| x.dist).collect();
        assert_eq!(dists, vec![3.0, 5.0, 9.0, 12.0, 16.0, 19.0, 25.0, 28.0]);
    }
}
