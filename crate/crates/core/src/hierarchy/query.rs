use serde::{Deserialize, Serialize};

use crate::graph::{remove_cycles, shortest_path, Graph, PathResult, Vertex};
use crate::search::{lsearch, SearchConfig};

use super::{HierIndex, Leaf};

/// How the connecting access-vertex pair is chosen for cross-leaf queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Objective {
    /// `H_s(i) + d_LCA(i, j) + H_t(j)`.
    #[default]
    Corrected,
    /// `H_s(i) + H_t(j)`, ignoring the distance between the access vertices.
    Literal,
}

#[derive(Debug, Clone, Copy)]
enum LegSearch<'a> {
    Dijkstra,
    Learned(&'a SearchConfig),
}

/// Distances from one query endpoint to the access vertices of one node,
/// with the argmin into the level below.
struct Level {
    node: usize,
    verts: Vec<Vertex>,
    dist: Vec<f64>,
    from: Vec<usize>,
}

struct Stats {
    popped: usize,
    pruned: usize,
    memory: usize,
}

impl HierIndex {
    /// Learned hierarchical search: leaf legs run [`lsearch`] with the leaf
    /// model, everything above the leaves comes from the stored matrices.
    pub fn hlsearch(&self, g: &Graph, s: Vertex, t: Vertex, cfg: &SearchConfig) -> PathResult {
        self.query(g, s, t, LegSearch::Learned(cfg), Objective::Corrected)
    }

    /// Same assembly as [`hlsearch`](Self::hlsearch) with Dijkstra for the
    /// leaf legs.
    pub fn hsearch(&self, g: &Graph, s: Vertex, t: Vertex) -> PathResult {
        self.query(g, s, t, LegSearch::Dijkstra, Objective::Corrected)
    }

    pub fn hlsearch_with(
        &self,
        g: &Graph,
        s: Vertex,
        t: Vertex,
        cfg: &SearchConfig,
        objective: Objective,
    ) -> PathResult {
        self.query(g, s, t, LegSearch::Learned(cfg), objective)
    }

    pub fn hsearch_with(&self, g: &Graph, s: Vertex, t: Vertex, objective: Objective) -> PathResult {
        self.query(g, s, t, LegSearch::Dijkstra, objective)
    }

    fn leaf(&self, id: usize) -> &Leaf {
        self.nodes[id].leaf().expect("leaf id")
    }

    fn leg(&self, leaf_id: usize, from: Vertex, to: Vertex, how: LegSearch, stats: &mut Stats) -> Option<Vec<Vertex>> {
        let leaf = self.leaf(leaf_id);
        let sub = &leaf.subgraph;
        let (a, b) = (sub.to_local(from)?, sub.to_local(to)?);
        let r = match how {
            LegSearch::Dijkstra => shortest_path(&sub.graph, a, b),
            LegSearch::Learned(cfg) => lsearch(&sub.graph, &leaf.model, a, b, cfg),
        };
        stats.popped += r.popped;
        stats.pruned += r.pruned;
        stats.memory += r.memory_bytes;
        r.is_reachable().then(|| sub.path_to_global(&r.vertices))
    }

    /// Distances from `v` to the access vertices of each node from its leaf
    /// up to `upto`.
    fn climb(&self, v: Vertex, upto: usize) -> Vec<Level> {
        let leaf_id = self.leaf_of[v];
        let leaf = self.leaf(leaf_id);
        let access = &self.nodes[leaf_id].access;
        let local = leaf.subgraph.to_local(v).expect("vertex in its leaf");
        let mut levels = vec![Level {
            node: leaf_id,
            verts: access.clone(),
            dist: (0..access.len())
                .map(|k| leaf.distance_to_access(local, k, access.len()))
                .collect(),
            from: vec![usize::MAX; access.len()],
        }];
        let mut node = leaf_id;
        while node != upto {
            node = self.nodes[node].parent.expect("upto is an ancestor");
            let m = self.nodes[node].matrix().expect("inner node");
            let below = levels.last().expect("leaf level");
            let below_idx: Vec<usize> = below
                .verts
                .iter()
                .map(|&a| m.index_of(a).expect("child access in matrix"))
                .collect();
            let verts = self.nodes[node].access.clone();
            let mut dist = vec![f64::INFINITY; verts.len()];
            let mut from = vec![usize::MAX; verts.len()];
            for (k, &b) in verts.iter().enumerate() {
                let bi = m.index_of(b).expect("access in matrix");
                for (j, &ai) in below_idx.iter().enumerate() {
                    let d = below.dist[j] + m.distance(ai, bi);
                    if d < dist[k] {
                        dist[k] = d;
                        from[k] = j;
                    }
                }
            }
            levels.push(Level {
                node,
                verts,
                dist,
                from,
            });
        }
        levels
    }

    /// Vertex sequence from the leaf-level access vertex up to
    /// `levels.last().verts[idx]`, plus that leaf access vertex.
    fn unwind(&self, levels: &[Level], mut idx: usize) -> (Vertex, Vec<Vertex>) {
        let mut segments = Vec::new();
        for k in (1..levels.len()).rev() {
            let b = levels[k].verts[idx];
            let j = levels[k].from[idx];
            let a = levels[k - 1].verts[j];
            let m = self.nodes[levels[k].node].matrix().expect("inner node");
            segments.push(
                m.path(m.index_of(a).expect("in matrix"), b)
                    .expect("finite entry has a path"),
            );
            idx = j;
        }
        let start = levels[0].verts[idx];
        segments.reverse();
        let mut walk = vec![start];
        for seg in segments {
            append(&mut walk, &seg);
        }
        (start, walk)
    }

    fn query(&self, g: &Graph, s: Vertex, t: Vertex, how: LegSearch, objective: Objective) -> PathResult {
        let n = self.vertex_count();
        assert!(s < n && t < n, "query vertex out of range");
        let mut stats = Stats {
            popped: 0,
            pruned: 0,
            memory: 0,
        };
        let (ls, lt) = (self.leaf_of[s], self.leaf_of[t]);
        if ls == lt {
            let direct = self
                .leg(ls, s, t, how, &mut stats)
                .map(|p| PathResult::from_vertices(g, p));
            let bound = direct.as_ref().map_or(f64::INFINITY, |r| r.distance);
            let detour = self.leaf_detour(g, ls, s, t, how, &mut stats, bound);
            let best = match (direct, detour) {
                (Some(a), Some(b)) => Some(if b.distance < a.distance { b } else { a }),
                (a, b) => a.or(b),
            };
            return best
                .unwrap_or_else(PathResult::unreachable)
                .with_stats(stats.popped, stats.pruned, stats.memory);
        }
        let lca = self.lca(ls, lt);
        let child_toward = |leaf: usize| {
            *self
                .ancestors(leaf)
                .iter()
                .find(|&&a| self.nodes[a].parent == Some(lca))
                .expect("leaf below lca")
        };
        let (ns, nt) = (child_toward(ls), child_toward(lt));
        let up_s = self.climb(s, ns);
        let up_t = self.climb(t, nt);
        let m = self.nodes[lca].matrix().expect("lca is inner");
        let (top_s, top_t) = (up_s.last().expect("level"), up_t.last().expect("level"));
        let idx_s: Vec<usize> = top_s
            .verts
            .iter()
            .map(|&v| m.index_of(v).expect("in lca matrix"))
            .collect();
        let idx_t: Vec<usize> = top_t
            .verts
            .iter()
            .map(|&v| m.index_of(v).expect("in lca matrix"))
            .collect();
        let mut best = (f64::INFINITY, 0, 0);
        for (i, &mi) in idx_s.iter().enumerate() {
            for (j, &mj) in idx_t.iter().enumerate() {
                let link = m.distance(mi, mj);
                if !link.is_finite() {
                    continue;
                }
                let score = match objective {
                    Objective::Corrected => top_s.dist[i] + link + top_t.dist[j],
                    Objective::Literal => top_s.dist[i] + top_t.dist[j],
                };
                if score < best.0 {
                    best = (score, i, j);
                }
            }
        }
        let memory = (up_s.iter().chain(&up_t).map(|l| l.verts.len()).sum::<usize>()) * 24;
        if !best.0.is_finite() {
            return PathResult::unreachable().with_stats(0, 0, memory);
        }
        let (_, i, j) = best;
        let (v_ls, up_walk_s) = self.unwind(&up_s, i);
        let (v_lt, up_walk_t) = self.unwind(&up_t, j);
        let (Some(head), Some(tail)) = (
            self.leg(ls, s, v_ls, how, &mut stats),
            self.leg(lt, t, v_lt, how, &mut stats),
        ) else {
            return PathResult::unreachable().with_stats(stats.popped, stats.pruned, stats.memory + memory);
        };
        let bridge = m.path(idx_s[i], top_t.verts[j]).expect("finite entry has a path");
        let mut walk = head;
        append(&mut walk, &up_walk_s);
        append(&mut walk, &bridge);
        let mut back = tail;
        append(&mut back, &up_walk_t);
        back.reverse();
        append(&mut walk, &back);
        PathResult::from_vertices(g, remove_cycles(&walk)).with_stats(stats.popped, stats.pruned, stats.memory + memory)
    }
}

impl HierIndex {
    /// Best same-leaf route that leaves the leaf: exit at access vertex `a`,
    /// follow the parent's stored path to access vertex `b`, re-enter.
    /// Only built when its matrix estimate beats `bound`.
    #[allow(clippy::too_many_arguments)]
    fn leaf_detour(
        &self,
        g: &Graph,
        leaf_id: usize,
        s: Vertex,
        t: Vertex,
        how: LegSearch,
        stats: &mut Stats,
        bound: f64,
    ) -> Option<PathResult> {
        let parent = self.nodes[leaf_id].parent?;
        let m = self.nodes[parent].matrix()?;
        let leaf = self.leaf(leaf_id);
        let access = &self.nodes[leaf_id].access;
        let k = access.len();
        let (ls, lt) = (leaf.subgraph.to_local(s)?, leaf.subgraph.to_local(t)?);
        let idx: Vec<usize> = access
            .iter()
            .map(|&a| m.index_of(a).expect("child access in parent matrix"))
            .collect();
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..k {
            let hs = leaf.distance_to_access(ls, i, k);
            if !hs.is_finite() {
                continue;
            }
            for j in 0..k {
                if i == j {
                    continue;
                }
                let score = hs + m.distance(idx[i], idx[j]) + leaf.distance_to_access(lt, j, k);
                if score < best.0 {
                    best = (score, i, j);
                }
            }
        }
        let (score, i, j) = best;
        if !score.is_finite() || score >= bound {
            return None;
        }
        let mut walk = self.leg(leaf_id, s, access[i], how, stats)?;
        append(&mut walk, &m.path(idx[i], access[j])?);
        let mut back = self.leg(leaf_id, t, access[j], how, stats)?;
        back.reverse();
        append(&mut walk, &back);
        Some(PathResult::from_vertices(g, remove_cycles(&walk)))
    }
}

/// Appends `seg` to `walk`, merging the shared junction vertex.
fn append(walk: &mut Vec<Vertex>, seg: &[Vertex]) {
    let skip = usize::from(walk.last().is_some() && walk.last() == seg.first());
    walk.extend_from_slice(&seg[skip..]);
}
