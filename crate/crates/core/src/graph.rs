//! Bounded-degree directed proximity graph.

use alloc::vec::Vec;

use crate::error::{malformed, Result};

/// Adjacency lists plus the fixed search entry point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphIndex {
    max_degree: usize,
    medoid: u32,
    adjacency: Vec<Vec<u32>>,
}

impl GraphIndex {
    /// Builds a graph and checks every structural invariant: ids in range,
    /// no self-loops, no repeated neighbour, out-degree at most `max_degree`.
    pub fn new(max_degree: usize, medoid: u32, adjacency: Vec<Vec<u32>>) -> Result<Self> {
        let g = Self {
            max_degree,
            medoid,
            adjacency,
        };
        g.validate()?;
        Ok(g)
    }

    pub(crate) fn new_unchecked(max_degree: usize, medoid: u32, adjacency: Vec<Vec<u32>>) -> Self {
        Self {
            max_degree,
            medoid,
            adjacency,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.adjacency.len();
        if self.max_degree == 0 {
            return Err(malformed!("degree bound must be positive"));
        }
        if n == 0 {
            return Err(malformed!("graph has no nodes"));
        }
        if self.medoid as usize >= n {
            return Err(malformed!(
                "medoid {} out of range for {n} nodes",
                self.medoid
            ));
        }
        for (node, list) in self.adjacency.iter().enumerate() {
            if list.len() > self.max_degree {
                return Err(malformed!(
                    "node {node} has {} neighbours, bound is {}",
                    list.len(),
                    self.max_degree
                ));
            }
            for (i, &v) in list.iter().enumerate() {
                if v as usize >= n {
                    return Err(malformed!(
                        "node {node} links to {v}, out of range for {n} nodes"
                    ));
                }
                if v as usize == node {
                    return Err(malformed!("node {node} has a self-loop"));
                }
                if list[..i].contains(&v) {
                    return Err(malformed!("node {node} lists neighbour {v} twice"));
                }
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn medoid(&self) -> u32 {
        self.medoid
    }

    #[inline]
    pub fn neighbours(&self, node: u32) -> &[u32] {
        &self.adjacency[node as usize]
    }

    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adjacency
    }

    /// `hist[d]` = number of nodes with out-degree `d`.
    pub fn degree_histogram(&self) -> Vec<usize> {
        let mut hist = alloc::vec![0usize; self.max_degree + 1];
        for list in &self.adjacency {
            hist[list.len()] += 1;
        }
        hist
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_broken_adjacency() {
        assert!(GraphIndex::new(2, 0, vec![vec![1], vec![0]]).is_ok());
        assert!(GraphIndex::new(2, 0, vec![vec![]]).is_ok());
        assert!(GraphIndex::new(2, 0, vec![vec![0]]).is_err());
        assert!(GraphIndex::new(2, 0, vec![vec![2], vec![]]).is_err());
        assert!(GraphIndex::new(2, 0, vec![vec![1, 1], vec![]]).is_err());
        assert!(GraphIndex::new(1, 0, vec![vec![1, 2], vec![], vec![]]).is_err());
        assert!(GraphIndex::new(1, 5, vec![vec![]]).is_err());
    }

    #[test]
    fn histogram_counts_degrees() {
        let g = GraphIndex::new(2, 0, vec![vec![1, 2], vec![0], vec![]]).unwrap();
        assert_eq!(g.degree_histogram(), vec![1, 1, 1]);
    }
}
