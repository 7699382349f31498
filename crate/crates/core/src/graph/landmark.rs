use super::{dijkstra, remove_cycles, Graph, PathResult, ShortestPathTree, Vertex};

/// Landmark baseline: full shortest-path trees from the highest-degree
/// vertices, queried by stitching `s -> L -> t` through the best landmark.
#[derive(Debug, Clone)]
pub struct LandmarkIndex {
    landmarks: Vec<Vertex>,
    trees: Vec<ShortestPathTree>,
}

impl LandmarkIndex {
    pub fn build(g: &Graph, count: usize) -> Self {
        assert!(count <= g.vertex_count(), "landmark count {count} exceeds vertex count");
        let landmarks: Vec<Vertex> = g.vertices_by_degree().into_iter().take(count).collect();
        let trees = landmarks.iter().map(|&l| dijkstra(g, l)).collect();
        LandmarkIndex { landmarks, trees }
    }

    pub fn landmarks(&self) -> &[Vertex] {
        &self.landmarks
    }

    /// Upper-bound estimate `min_L d(s,L) + d(L,t)`.
    pub fn estimate(&self, s: Vertex, t: Vertex) -> f64 {
        self.best(s, t).map(|(_, d)| d).unwrap_or(f64::INFINITY)
    }

    fn best(&self, s: Vertex, t: Vertex) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, tree) in self.trees.iter().enumerate() {
            let d = tree.dist[s] + tree.dist[t];
            if d.is_finite() && best.is_none_or(|(_, b)| d < b) {
                best = Some((i, d));
            }
        }
        best
    }

    pub fn query(&self, g: &Graph, s: Vertex, t: Vertex) -> PathResult {
        let memory = self.trees.len() * std::mem::size_of::<f64>();
        if s == t {
            return PathResult::from_vertices(g, vec![s]).with_stats(0, 0, memory);
        }
        let Some((i, _)) = self.best(s, t) else {
            return PathResult::unreachable().with_stats(0, 0, memory);
        };
        let tree = &self.trees[i];
        let mut walk = tree.path_to(s).expect("landmark reaches s");
        walk.reverse();
        let tail = tree.path_to(t).expect("landmark reaches t");
        walk.extend_from_slice(&tail[1..]);
        let path = remove_cycles(&walk);
        let memory = memory + walk.len() * std::mem::size_of::<Vertex>();
        PathResult::from_vertices(g, path).with_stats(0, 0, memory)
    }

    pub fn storage_bytes(&self) -> usize {
        self.trees
            .iter()
            .map(|t| t.dist.len() * (std::mem::size_of::<f64>() + std::mem::size_of::<Option<Vertex>>()))
            .sum()
    }
}
