//! Multi-tier skeleton labels and the skeleton graph derived from them.
//!
//! A vertex's label holds, for every tier `t in 0..=max_tier` and every
//! `k in 1..=base`, the bucket of vertices whose shortest path from the owner
//! has exactly `k * base^t` hops. Each entry also records the linked vertex in
//! the previous bucket of the same tier, i.e. the ancestor `base^t` steps back
//! along the shortest path.

mod build;
mod io;
mod skeleton_graph;

pub use build::{build_label, build_labels, find_linked_vertex};
pub use io::{load_labels, save_labels, write_labels_text};
pub use skeleton_graph::{SkeletonEdge, SkeletonGraph};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonConfig {
    pub base: usize,
    pub max_tier: usize,
}

impl SkeletonConfig {
    pub fn new(base: usize, max_tier: usize) -> Result<Self> {
        let cfg = SkeletonConfig { base, max_tier };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `b = 2, m = 2`, used for graphs with moderate or high average degree.
    pub const DENSE: SkeletonConfig = SkeletonConfig { base: 2, max_tier: 2 };

    /// `b = 3, m = 2`, used for sparse graphs with long hop lengths.
    pub const SPARSE: SkeletonConfig = SkeletonConfig { base: 3, max_tier: 2 };

    /// Picks `SPARSE` when the average degree is below 3, `DENSE` otherwise.
    pub fn for_graph(g: &Graph) -> Self {
        let n = g.vertex_count().max(1);
        let avg_degree = 2.0 * g.edge_count() as f64 / n as f64;
        if avg_degree < 3.0 {
            Self::SPARSE
        } else {
            Self::DENSE
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.base < 2 {
            return Err(Error::Config(format!("base must be >= 2, got {}", self.base)));
        }
        if self.hop_bound_checked().is_none() {
            return Err(Error::Config(format!(
                "base^(max_tier+1) overflows for base {} max_tier {}",
                self.base, self.max_tier
            )));
        }
        Ok(())
    }

    fn hop_bound_checked(&self) -> Option<usize> {
        self.base.checked_pow(self.max_tier as u32 + 1)
    }

    pub fn tier_count(&self) -> usize {
        self.max_tier + 1
    }

    pub fn bucket_count(&self) -> usize {
        self.base * self.tier_count()
    }

    /// Hop step of tier `t`: `base^t`.
    pub fn tier_step(&self, tier: usize) -> usize {
        self.base.pow(tier as u32)
    }

    /// Exploration stops beyond this hop length: `base^(max_tier+1)`.
    pub fn hop_bound(&self) -> usize {
        self.hop_bound_checked().expect("validated config")
    }

    pub fn bucket_index(&self, tier: usize, k: usize) -> usize {
        debug_assert!(tier <= self.max_tier && (1..=self.base).contains(&k));
        tier * self.base + (k - 1)
    }

    pub fn bucket_hop(&self, index: usize) -> usize {
        let (tier, k) = self.bucket_of(index);
        k * self.tier_step(tier)
    }

    /// `(tier, k)` of a bucket index.
    pub fn bucket_of(&self, index: usize) -> (usize, usize) {
        (index / self.base, index % self.base + 1)
    }

    /// All `(tier, k)` whose bucket hop equals `hop`. At most two: `k = base`
    /// in tier `t` coincides with `k = 1` in tier `t + 1`.
    pub fn buckets_for_hop(&self, hop: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..=self.max_tier).filter_map(move |tier| {
            let step = self.tier_step(tier);
            if hop.is_multiple_of(step) && (1..=self.base).contains(&(hop / step)) {
                Some((tier, hop / step))
            } else {
                None
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelEntry {
    pub vertex: Vertex,
    /// Ancestor `base^tier` steps back on the shortest path (the owner for `k = 1`).
    pub linked: Vertex,
    pub dist: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonLabel {
    pub owner: Vertex,
    /// Indexed by [`SkeletonConfig::bucket_index`].
    pub buckets: Vec<Vec<LabelEntry>>,
}

impl SkeletonLabel {
    pub fn empty(owner: Vertex, cfg: &SkeletonConfig) -> Self {
        SkeletonLabel {
            owner,
            buckets: vec![Vec::new(); cfg.bucket_count()],
        }
    }

    pub fn bucket(&self, cfg: &SkeletonConfig, tier: usize, k: usize) -> &[LabelEntry] {
        &self.buckets[cfg.bucket_index(tier, k)]
    }

    pub fn entry_count(&self) -> usize {
        self.buckets.iter().map(Vec::len).sum()
    }
}

/// Labels for every vertex of one graph, built with one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonLabels {
    pub config: SkeletonConfig,
    pub labels: Vec<SkeletonLabel>,
}

impl SkeletonLabels {
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, v: Vertex) -> &SkeletonLabel {
        &self.labels[v]
    }

    /// Message-passing neighbors of `v` at `tier`, sorted by id.
    ///
    /// Tier 0 is the union of all tier-0 buckets. For higher tiers the `k = 1`
    /// bucket is left out: it repeats the last bucket of the tier below.
    pub fn tier_neighbors(&self, v: Vertex, tier: usize) -> Vec<Vertex> {
        let cfg = &self.config;
        assert!(tier <= cfg.max_tier, "tier {tier} above max tier {}", cfg.max_tier);
        let first_k = if tier == 0 { 1 } else { 2 };
        let mut out: Vec<Vertex> = (first_k..=cfg.base)
            .flat_map(|k| self.labels[v].bucket(cfg, tier, k).iter().map(|e| e.vertex))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn entry_count(&self) -> usize {
        self.labels.iter().map(SkeletonLabel::entry_count).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{names, v, worked_example};

    fn bucket_names(labels: &SkeletonLabels, owner: Vertex, tier: usize, k: usize) -> Vec<usize> {
        names(
            labels
                .label(owner)
                .bucket(&labels.config, tier, k)
                .iter()
                .map(|e| e.vertex),
        )
    }

    #[test]
    fn worked_example_tier_zero_buckets() {
        let labels = build_labels(&worked_example(), SkeletonConfig::new(3, 1).unwrap());
        assert_eq!(bucket_names(&labels, v(1), 0, 1), vec![8]);
        assert_eq!(bucket_names(&labels, v(1), 0, 2), vec![2, 7, 9]);
        assert_eq!(bucket_names(&labels, v(1), 0, 3), vec![3, 10, 11, 14]);
        let links: Vec<_> = labels
            .label(v(1))
            .bucket(&labels.config, 0, 2)
            .iter()
            .map(|e| e.linked)
            .collect();
        assert!(links.iter().all(|&l| l == v(8)));
    }

    #[test]
    fn worked_example_tier_one_buckets() {
        let labels = build_labels(&worked_example(), SkeletonConfig::new(3, 2).unwrap());
        let cfg = &labels.config;
        assert_eq!(bucket_names(&labels, v(1), 1, 1), vec![3, 10, 11, 14]);
        assert_eq!(bucket_names(&labels, v(1), 1, 2), vec![5, 15]);
        assert_eq!(bucket_names(&labels, v(1), 1, 3), vec![17]);
        for e in labels.label(v(1)).bucket(cfg, 1, 2) {
            assert_eq!(e.linked, v(3));
        }
        assert_eq!(labels.label(v(1)).bucket(cfg, 1, 3)[0].linked, v(5));
    }

    #[test]
    fn worked_example_tier_neighbors() {
        let labels = build_labels(&worked_example(), SkeletonConfig::new(3, 1).unwrap());
        assert_eq!(names(labels.tier_neighbors(v(1), 0)), vec![2, 3, 7, 8, 9, 10, 11, 14]);
        assert_eq!(names(labels.tier_neighbors(v(1), 1)), vec![5, 15, 17]);
    }

    #[test]
    fn worked_example_skeleton_graph() {
        let labels = build_labels(&worked_example(), SkeletonConfig::new(3, 1).unwrap());
        let sg = SkeletonGraph::build(&labels);
        assert!(worked_example().edge_weight(v(1), v(9)).is_none());
        assert_eq!(sg.edge(v(1), v(9)).unwrap().weight, 3.0);
        assert_eq!(sg.edge(v(1), v(2)).unwrap().weight, 4.0);
    }

    #[test]
    fn isolated_vertex_has_no_tier_neighbors() {
        let g = Graph::from_edges(3, &[(1, 2, 1.0)]).unwrap();
        let labels = build_labels(&g, SkeletonConfig::DENSE);
        for tier in 0..=2 {
            assert!(labels.tier_neighbors(0, tier).is_empty());
        }
    }

    #[test]
    fn config_validation_and_buckets() {
        assert!(SkeletonConfig::new(1, 2).is_err());
        let cfg = SkeletonConfig::new(3, 2).unwrap();
        assert_eq!(cfg.bucket_count(), 9);
        assert_eq!(cfg.hop_bound(), 27);
        assert_eq!(cfg.buckets_for_hop(3).collect::<Vec<_>>(), vec![(0, 3), (1, 1)]);
        assert_eq!(cfg.buckets_for_hop(18).collect::<Vec<_>>(), vec![(2, 2)]);
        assert_eq!(cfg.buckets_for_hop(4).count(), 0);
        for i in 0..cfg.bucket_count() {
            let (t, k) = cfg.bucket_of(i);
            assert_eq!(cfg.bucket_index(t, k), i);
        }
    }

    #[test]
    fn sparse_graphs_get_base_three() {
        let path: Vec<_> = (0..9).map(|i| (i, i + 1, 1.0)).collect();
        let g = Graph::from_edges(10, &path).unwrap();
        assert_eq!(SkeletonConfig::for_graph(&g), SkeletonConfig::SPARSE);
        let k4 = Graph::from_edges(
            4,
            &[
                (0, 1, 1.0),
                (0, 2, 1.0),
                (0, 3, 1.0),
                (1, 2, 1.0),
                (1, 3, 1.0),
                (2, 3, 1.0),
            ],
        )
        .unwrap();
        assert_eq!(SkeletonConfig::for_graph(&k4), SkeletonConfig::DENSE);
    }
}
