use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Graph, Vertex};

/// A found path plus the counters of the search that produced it.
///
/// An empty `vertices` list with infinite `distance` marks an unreachable target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    pub vertices: Vec<Vertex>,
    pub distance: f64,
    pub hops: usize,
    /// Non-stale queue pops.
    pub popped: usize,
    /// Popped vertices skipped without expansion.
    pub pruned: usize,
    /// Peak bytes of search state (arrays, queue, caches).
    pub memory_bytes: usize,
}

impl PathResult {
    /// Builds a result from an explicit vertex sequence, recomputing its
    /// distance from the graph's edge weights in path order.
    ///
    /// Panics if consecutive vertices are not adjacent.
    pub fn from_vertices(g: &Graph, vertices: Vec<Vertex>) -> Self {
        let distance = g
            .path_weight(&vertices)
            .expect("path contains a non-adjacent vertex pair");
        let hops = vertices.len().saturating_sub(1);
        PathResult {
            vertices,
            distance,
            hops,
            popped: 0,
            pruned: 0,
            memory_bytes: 0,
        }
    }

    pub fn unreachable() -> Self {
        PathResult {
            vertices: Vec::new(),
            distance: f64::INFINITY,
            hops: 0,
            popped: 0,
            pruned: 0,
            memory_bytes: 0,
        }
    }

    pub fn is_reachable(&self) -> bool {
        !self.vertices.is_empty()
    }

    pub fn with_stats(mut self, popped: usize, pruned: usize, memory_bytes: usize) -> Self {
        self.popped = popped;
        self.pruned = pruned;
        self.memory_bytes = memory_bytes;
        self
    }

    /// True when both describe the same vertex sequence in either orientation.
    pub fn same_path(&self, other: &PathResult) -> bool {
        if self.vertices == other.vertices {
            return true;
        }
        self.vertices.len() == other.vertices.len() && self.vertices.iter().eq(other.vertices.iter().rev())
    }
}

/// Cuts every cycle out of a walk: whenever a vertex reappears, everything
/// after its first occurrence up to the repeat is dropped.
pub fn remove_cycles(walk: &[Vertex]) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = Vec::with_capacity(walk.len());
    let mut pos: HashMap<Vertex, usize> = HashMap::new();
    for &v in walk {
        if let Some(&i) = pos.get(&v) {
            for dropped in out.drain(i + 1..) {
                pos.remove(&dropped);
            }
        } else {
            pos.insert(v, out.len());
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn remove_cycles_cuts_loops() {
        assert_eq!(remove_cycles(&[1, 2, 3, 2, 4]), vec![1, 2, 4]);
        assert_eq!(remove_cycles(&[1, 2, 3, 4, 1, 5]), vec![1, 5]);
        assert_eq!(remove_cycles(&[1, 2, 3, 2, 3, 4]), vec![1, 2, 3, 4]);
        assert_eq!(remove_cycles(&[5]), vec![5]);
        assert!(remove_cycles(&[]).is_empty());
    }

    #[test]
    fn single_vertex_path_is_zero() {
        let g = Graph::from_edges(2, &[(0, 1, 3.0)]).unwrap();
        let p = PathResult::from_vertices(&g, vec![1]);
        assert_eq!(p.distance, 0.0);
        assert_eq!(p.hops, 0);
    }

    #[test]
    fn reversed_paths_are_the_same_path() {
        let g = Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let a = PathResult::from_vertices(&g, vec![0, 1, 2]);
        let b = PathResult::from_vertices(&g, vec![2, 1, 0]);
        let c = PathResult::from_vertices(&g, vec![0, 1]);
        assert!(a.same_path(&b));
        assert!(!a.same_path(&c));
    }
}
