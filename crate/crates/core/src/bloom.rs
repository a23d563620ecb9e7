//! Per-query visited-node filters.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

/// Cell count used per query unless overridden.
pub const DEFAULT_BLOOM_ENTRIES: usize = 399_887;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Byte prepended to the key to derive the second hash.
const SECOND_HASH_SALT: u8 = 0x5A;

#[inline]
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

#[inline]
fn hash_pair(id: u32) -> (u64, u64) {
    let le = id.to_le_bytes();
    let h1 = fnv1a64(&le);
    let h2 = fnv1a64(&[SECOND_HASH_SALT, le[0], le[1], le[2], le[3]]);
    (h1, h2)
}

/// Membership structure the search uses to drop already-seen neighbours.
pub trait VisitedSet {
    /// Returns whether `id` was (possibly) present, and records it.
    fn test_and_set(&mut self, id: u32) -> bool;
    fn contains(&self, id: u32) -> bool;
    fn insert(&mut self, id: u32);
}

/// Two-hash Bloom filter over `z` one-bit cells.
///
/// The cells are packed 64 per word; `z` keeps the meaning of "number of
/// cells", so `z = 399_887` occupies about 50 KB.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BloomFilter {
    words: Vec<u64>,
    cells: u64,
}

impl BloomFilter {
    /// # Panics
    /// If `cells` is zero.
    pub fn new(cells: usize) -> Self {
        assert!(cells > 0, "bloom filter needs at least one cell");
        Self {
            words: vec![0; cells.div_ceil(64)],
            cells: cells as u64,
        }
    }

    pub fn cells(&self) -> usize {
        self.cells as usize
    }

    #[inline]
    fn slots(&self, id: u32) -> (usize, usize) {
        let (h1, h2) = hash_pair(id);
        ((h1 % self.cells) as usize, (h2 % self.cells) as usize)
    }

    #[inline]
    fn bit(&self, slot: usize) -> bool {
        self.words[slot / 64] & (1 << (slot % 64)) != 0
    }

    #[inline]
    fn set_bit(&mut self, slot: usize) {
        self.words[slot / 64] |= 1 << (slot % 64);
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }
}

impl VisitedSet for BloomFilter {
    #[inline]
    fn test_and_set(&mut self, id: u32) -> bool {
        let (a, b) = self.slots(id);
        let present = self.bit(a) && self.bit(b);
        self.set_bit(a);
        self.set_bit(b);
        present
    }

    #[inline]
    fn contains(&self, id: u32) -> bool {
        let (a, b) = self.slots(id);
        self.bit(a) && self.bit(b)
    }

    #[inline]
    fn insert(&mut self, id: u32) {
        let (a, b) = self.slots(id);
        self.set_bit(a);
        self.set_bit(b);
    }
}

/// Exact set, for tests and for bounding iteration counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExactVisited(BTreeSet<u32>);

impl ExactVisited {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl VisitedSet for ExactVisited {
    fn test_and_set(&mut self, id: u32) -> bool {
        !self.0.insert(id)
    }

    fn contains(&self, id: u32) -> bool {
        self.0.contains(&id)
    }

    fn insert(&mut self, id: u32) {
        self.0.insert(id);
    }
}
