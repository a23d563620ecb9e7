//! Bounded best-first candidate list.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::merge::{parallel_merge_into, rank_cmp, Neighbour, Ranked};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorklistEntry {
    pub id: u32,
    pub dist: f32,
    pub visited: bool,
}

impl Ranked for WorklistEntry {
    #[inline]
    fn id(&self) -> u32 {
        self.id
    }
    #[inline]
    fn dist(&self) -> f32 {
        self.dist
    }
}

impl From<Neighbour> for WorklistEntry {
    fn from(n: Neighbour) -> Self {
        Self {
            id: n.id,
            dist: n.dist,
            visited: false,
        }
    }
}

/// At most `capacity` entries, sorted by `(dist, id)`, ids distinct.
///
/// Within one query a node's distance never changes, so two copies of the
/// same id always carry the same key and end up adjacent after a merge.
#[derive(Debug, Clone)]
pub struct Worklist {
    capacity: usize,
    entries: Vec<WorklistEntry>,
    incoming: Vec<WorklistEntry>,
    merged: Vec<WorklistEntry>,
}

impl Worklist {
    /// # Panics
    /// If `capacity` is zero.
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "worklist capacity must be positive");
        Self {
            capacity,
            entries: Vec::with_capacity(capacity),
            incoming: Vec::new(),
            merged: Vec::new(),
        }
    }

    pub fn with_entry(capacity: usize, id: u32, dist: f32) -> Self {
        let mut w = Self::new(capacity);
        w.entries.push(WorklistEntry {
            id,
            dist,
            visited: false,
        });
        w
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[WorklistEntry] {
        &self.entries
    }

    pub fn first_unvisited(&self) -> Option<&WorklistEntry> {
        self.entries.iter().find(|e| !e.visited)
    }

    pub fn all_visited(&self) -> bool {
        self.entries.iter().all(|e| e.visited)
    }

    /// Marks `id` visited; returns false if it is not in the list.
    pub fn mark_visited(&mut self, id: u32) -> bool {
        match self.entries.iter_mut().find(|e| e.id == id) {
            Some(e) => {
                e.visited = true;
                true
            }
            None => false,
        }
    }

    /// Whether `candidate` would survive the truncation of an update.
    #[inline]
    pub fn admits(&self, candidate: &Neighbour) -> bool {
        match self.entries.get(self.capacity - 1) {
            None => true,
            Some(last) => {
                rank_cmp(candidate, &Neighbour::new(last.id, last.dist)) == Ordering::Less
            }
        }
    }

    /// Merges the sorted `incoming` run, drops repeated ids (keeping the copy
    /// already in the list, with its visited flag) and truncates to capacity.
    /// Returns how many distinct entries the truncation dropped.
    pub fn update(&mut self, incoming: &[Neighbour]) -> usize {
        if incoming.is_empty() {
            return 0;
        }
        debug_assert!(incoming
            .windows(2)
            .all(|w| rank_cmp(&w[0], &w[1]) != Ordering::Greater));
        self.incoming.clear();
        self.incoming
            .extend(incoming.iter().map(|&n| WorklistEntry::from(n)));
        let total = self.entries.len() + self.incoming.len();
        self.merged.clear();
        self.merged.resize(
            total,
            WorklistEntry {
                id: 0,
                dist: 0.0,
                visited: false,
            },
        );
        parallel_merge_into(&self.entries, &self.incoming, &mut self.merged);

        self.entries.clear();
        let mut last = None;
        let mut evicted = 0;
        for e in &self.merged {
            if last == Some(e.id) {
                continue;
            }
            last = Some(e.id);
            if self.entries.len() == self.capacity {
                evicted += 1;
            } else {
                self.entries.push(*e);
            }
        }
        evicted
    }

    /// The `k` nearest entries.
    pub fn top(&self, k: usize) -> &[WorklistEntry] {
        &self.entries[..k.min(self.entries.len())]
    }
}
