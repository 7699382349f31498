//! Graph partitioning and the hierarchical index over the partitions:
//! leaves carry a distance model and a vertex-to-access distance matrix,
//! inner nodes carry distances and shortest-path trees between the access
//! vertices of their children.

mod build;
mod io;
mod partition;
mod query;

pub use build::build_index;
pub use io::{load_index, save_index};
pub use partition::{partition, Partitioning};
pub use query::Objective;

use serde::{Deserialize, Serialize};

use crate::graph::{Subgraph, Vertex};
use crate::search::{DistanceModel, NullModel, OracleModel};
use crate::sgnn::{ErrorBuffers, SgnnModel, TrainingConfig};
use crate::skeleton::SkeletonConfig;

/// Which vertices an inner node's shortest paths may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Territory {
    /// Only the node's own vertices. Smaller to build, but a cross-leaf
    /// shortest path that leaves the common ancestor's vertices is missed.
    Restricted,
    /// The whole graph. Cross-leaf answers are exact.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LeafModelKind {
    /// No model; leaf searches run in plain Dijkstra order.
    None,
    Oracle,
    Sgnn(TrainingConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexConfig {
    pub fanout: usize,
    pub territory: Territory,
    pub leaf_models: LeafModelKind,
    /// Skeleton config for leaf models; picked per leaf when `None`.
    pub skeleton: Option<SkeletonConfig>,
}

impl Default for IndexConfig {
    fn default() -> Self {
        IndexConfig {
            fanout: 5,
            territory: Territory::Full,
            leaf_models: LeafModelKind::Sgnn(TrainingConfig::default()),
            skeleton: None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum LeafModel {
    None,
    Oracle(OracleModel),
    Sgnn(Box<SgnnModel>),
}

impl DistanceModel for LeafModel {
    fn predict_distance(&self, s: Vertex, t: Vertex) -> f64 {
        match self {
            LeafModel::None => NullModel.predict_distance(s, t),
            LeafModel::Oracle(m) => m.predict_distance(s, t),
            LeafModel::Sgnn(m) => m.predict_distance(s, t),
        }
    }

    fn predict_hop(&self, s: Vertex, t: Vertex) -> f64 {
        match self {
            LeafModel::None => NullModel.predict_hop(s, t),
            LeafModel::Oracle(m) => DistanceModel::predict_hop(m, s, t),
            LeafModel::Sgnn(m) => m.predict_hop(s, t),
        }
    }

    fn predict(&self, s: Vertex, t: Vertex) -> (f64, f64) {
        match self {
            LeafModel::Sgnn(m) => m.predict_pair(s, t),
            _ => (self.predict_distance(s, t), self.predict_hop(s, t)),
        }
    }

    fn error_buffers(&self) -> ErrorBuffers {
        match self {
            LeafModel::None => NullModel.error_buffers(),
            LeafModel::Oracle(m) => m.error_buffers(),
            LeafModel::Sgnn(m) => m.error_buffers,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Leaf {
    /// Sorted global ids.
    pub vertices: Vec<Vertex>,
    /// Row-major `vertices.len() x access.len()` distances inside the leaf.
    pub dist: Vec<f64>,
    pub model: LeafModel,
    pub subgraph: Subgraph,
}

impl Leaf {
    pub fn distance_to_access(&self, local: usize, access_idx: usize, access_len: usize) -> f64 {
        self.dist[local * access_len + access_idx]
    }
}

/// Distances and shortest-path trees between the access vertices of an
/// inner node's children, computed inside the node's territory.
#[derive(Debug, Clone, PartialEq)]
pub struct DistPathMatrix {
    /// Sorted global ids.
    pub sources: Vec<Vertex>,
    /// Sorted global ids the paths may use.
    pub territory: Vec<Vertex>,
    /// Row-major `sources x sources`.
    pub dist: Vec<f64>,
    /// Row-major `sources x territory` predecessor (territory position),
    /// `u32::MAX` for none.
    pub prev: Vec<u32>,
}

impl DistPathMatrix {
    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        self.sources.binary_search(&v).ok()
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.dist[a * self.sources.len() + b]
    }

    /// Stored shortest path from source `a` (a position in `sources`) to
    /// global vertex `b`.
    pub fn path(&self, a: usize, b: Vertex) -> Option<Vec<Vertex>> {
        let width = self.territory.len();
        let row = &self.prev[a * width..(a + 1) * width];
        let src = self.territory.binary_search(&self.sources[a]).ok()?;
        let mut cur = self.territory.binary_search(&b).ok()?;
        let mut out = vec![self.territory[cur]];
        while cur != src {
            let p = row[cur];
            if p == u32::MAX {
                return None;
            }
            cur = p as usize;
            out.push(self.territory[cur]);
        }
        out.reverse();
        Some(out)
    }
}

#[derive(Debug, Clone)]
pub enum Payload {
    Leaf(Leaf),
    Inner(DistPathMatrix),
}

#[derive(Debug, Clone)]
pub struct HierNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub depth: usize,
    /// Vertices of this node with an edge leaving it, sorted.
    pub access: Vec<Vertex>,
    pub payload: Payload,
}

impl HierNode {
    pub fn leaf(&self) -> Option<&Leaf> {
        match &self.payload {
            Payload::Leaf(l) => Some(l),
            Payload::Inner(_) => None,
        }
    }

    pub fn matrix(&self) -> Option<&DistPathMatrix> {
        match &self.payload {
            Payload::Inner(m) => Some(m),
            Payload::Leaf(_) => None,
        }
    }
}

/// Tree of partitions. Nodes `0..leaf_count` are the leaves, in
/// partition order; the root is last.
#[derive(Debug, Clone)]
pub struct HierIndex {
    pub nodes: Vec<HierNode>,
    pub leaf_of: Vec<usize>,
    pub root: usize,
    pub territory: Territory,
}

impl HierIndex {
    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.leaf().is_some()).count()
    }

    pub fn vertex_count(&self) -> usize {
        self.leaf_of.len()
    }

    pub fn lca(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (a, b);
        while self.nodes[a].depth > self.nodes[b].depth {
            a = self.nodes[a].parent.expect("non-root has a parent");
        }
        while self.nodes[b].depth > self.nodes[a].depth {
            b = self.nodes[b].parent.expect("non-root has a parent");
        }
        while a != b {
            a = self.nodes[a].parent.expect("distinct nodes below the root");
            b = self.nodes[b].parent.expect("distinct nodes below the root");
        }
        a
    }

    /// `node` followed by its ancestors up to the root.
    pub fn ancestors(&self, node: usize) -> Vec<usize> {
        let mut out = vec![node];
        let mut cur = node;
        while let Some(p) = self.nodes[cur].parent {
            out.push(p);
            cur = p;
        }
        out
    }

    /// Bytes held by leaf distance matrices and inner distance-path matrices.
    pub fn matrix_bytes(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| match &n.payload {
                Payload::Leaf(l) => l.dist.len() * 8,
                Payload::Inner(m) => m.dist.len() * 8 + m.prev.len() * 4,
            })
            .sum()
    }
}
