use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Vertex;

use super::SkeletonLabels;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkeletonEdge {
    pub neighbor: Vertex,
    /// Exact shortest distance between the endpoints.
    pub weight: f64,
    pub tier: usize,
    pub hop: usize,
}

/// Union of all label links: owner to every vertex in any of its buckets,
/// weighted by the shortest distance. Bucket links are implied by label
/// links of other owners and are not added separately.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonGraph {
    adj: Vec<Vec<SkeletonEdge>>,
}

impl SkeletonGraph {
    pub fn build(labels: &SkeletonLabels) -> Self {
        let cfg = &labels.config;
        let mut links: BTreeMap<(Vertex, Vertex), (f64, usize, usize)> = BTreeMap::new();
        for label in &labels.labels {
            for (index, bucket) in label.buckets.iter().enumerate() {
                let (tier, _) = cfg.bucket_of(index);
                let hop = cfg.bucket_hop(index);
                for entry in bucket {
                    let key = (label.owner.min(entry.vertex), label.owner.max(entry.vertex));
                    match links.get_mut(&key) {
                        None => {
                            links.insert(key, (entry.dist, tier, hop));
                        }
                        Some(existing) => {
                            debug_assert!(
                                (existing.0 - entry.dist).abs() <= 1e-9 * existing.0.max(1.0),
                                "asymmetric skeleton distance on {key:?}: {} vs {}",
                                existing.0,
                                entry.dist
                            );
                            if entry.dist < existing.0 {
                                existing.0 = entry.dist;
                            }
                        }
                    }
                }
            }
        }
        let mut adj = vec![Vec::new(); labels.vertex_count()];
        for (&(u, v), &(weight, tier, hop)) in &links {
            adj[u].push(SkeletonEdge {
                neighbor: v,
                weight,
                tier,
                hop,
            });
            adj[v].push(SkeletonEdge {
                neighbor: u,
                weight,
                tier,
                hop,
            });
        }
        for list in &mut adj {
            list.sort_by_key(|e| e.neighbor);
        }
        SkeletonGraph { adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: Vertex) -> &[SkeletonEdge] {
        &self.adj[v]
    }

    pub fn edge(&self, u: Vertex, v: Vertex) -> Option<&SkeletonEdge> {
        let list = &self.adj[u];
        list.binary_search_by_key(&v, |e| e.neighbor).ok().map(|i| &list[i])
    }

    /// Each edge once as `(u, v, edge)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex, &SkeletonEdge)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |e| u < e.neighbor)
                .map(move |e| (u, e.neighbor, e))
        })
    }

    /// Writes `u v weight tier hop` lines.
    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(f);
        writeln!(w, "# u v weight tier hop")?;
        for (u, v, e) in self.edges() {
            writeln!(w, "{u} {v} {} {} {}", e.weight, e.tier, e.hop)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::skeleton::{build_labels, SkeletonConfig};

    #[test]
    fn triangle_tier_zero_edges_match_original() {
        let g = Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let labels = build_labels(&g, SkeletonConfig::new(2, 0).unwrap());
        let sg = SkeletonGraph::build(&labels);
        assert_eq!(sg.edge_count(), 3);
        for (u, v, e) in sg.edges() {
            assert_eq!(g.edge_weight(u, v), Some(e.weight));
            assert_eq!((e.tier, e.hop), (0, 1));
        }
    }

    #[test]
    fn longer_original_edge_is_reweighted() {
        // Direct 0-2 edge (5) is longer than 0-1-2 (4).
        let g = Graph::from_edges(4, &[(0, 1, 2.0), (1, 2, 2.0), (0, 2, 5.0), (2, 3, 1.0)]).unwrap();
        let labels = build_labels(&g, SkeletonConfig::new(2, 0).unwrap());
        let sg = SkeletonGraph::build(&labels);
        let e = sg.edge(0, 2).unwrap();
        assert_eq!(e.weight, 4.0);
        assert_eq!(e.hop, 2);
        assert_eq!(sg.edge(2, 3).unwrap().weight, 1.0);
        // 3 is three hops from 0, beyond the hop bound of 2.
        assert!(sg.edge(0, 3).is_none());
    }
}
