use super::queue::MinQueue;
use super::{Graph, PathResult, Vertex};

/// Per-vertex oracle record: distance, hop length of the first-found
/// shortest path, and its predecessor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEntry {
    pub dist: f64,
    pub hop: usize,
    pub prev: Option<Vertex>,
}

/// Single-source shortest-path tree.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPathTree {
    pub source: Vertex,
    pub dist: Vec<f64>,
    pub hop: Vec<usize>,
    pub prev: Vec<Option<Vertex>>,
    pub popped: usize,
}

impl ShortestPathTree {
    pub fn entry(&self, v: Vertex) -> OracleEntry {
        OracleEntry {
            dist: self.dist[v],
            hop: self.hop[v],
            prev: self.prev[v],
        }
    }

    pub fn reachable(&self, v: Vertex) -> bool {
        self.dist[v].is_finite()
    }

    /// Source-to-`v` vertex sequence, `None` if unreachable.
    pub fn path_to(&self, v: Vertex) -> Option<Vec<Vertex>> {
        if !self.reachable(v) {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.prev[cur] {
            path.push(p);
            cur = p;
        }
        debug_assert_eq!(cur, self.source);
        path.reverse();
        Some(path)
    }
}

/// Exact single-source Dijkstra. Queue ties go to the smaller vertex id and
/// relaxation happens only on strict improvement, so `hop` and `prev`
/// describe one deterministic shortest path per vertex.
pub fn dijkstra(g: &Graph, source: Vertex) -> ShortestPathTree {
    assert!(source < g.vertex_count(), "source {source} out of range");
    let n = g.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut hop = vec![usize::MAX; n];
    let mut prev = vec![None; n];
    let mut popped = 0;
    let mut queue = MinQueue::new();
    dist[source] = 0.0;
    hop[source] = 0;
    queue.push(0.0, source, 0.0);
    while let Some(e) = queue.pop() {
        if e.dist > dist[e.vertex] {
            continue;
        }
        popped += 1;
        let u = e.vertex;
        for &(v, w) in g.neighbors(u) {
            let nd = dist[u] + w;
            if nd < dist[v] {
                dist[v] = nd;
                hop[v] = hop[u] + 1;
                prev[v] = Some(u);
                queue.push(nd, v, nd);
            }
        }
    }
    ShortestPathTree {
        source,
        dist,
        hop,
        prev,
        popped,
    }
}

/// Point-to-point Dijkstra that stops once `target` is settled.
pub fn shortest_path(g: &Graph, source: Vertex, target: Vertex) -> PathResult {
    let n = g.vertex_count();
    assert!(source < n && target < n, "query vertex out of range");
    let mut dist = vec![f64::INFINITY; n];
    let mut prev: Vec<Option<Vertex>> = vec![None; n];
    let mut popped = 0;
    let mut queue = MinQueue::new();
    dist[source] = 0.0;
    queue.push(0.0, source, 0.0);
    let mut found = false;
    while let Some(e) = queue.pop() {
        if e.dist > dist[e.vertex] {
            continue;
        }
        popped += 1;
        let u = e.vertex;
        if u == target {
            found = true;
            break;
        }
        for &(v, w) in g.neighbors(u) {
            let nd = dist[u] + w;
            if nd < dist[v] {
                dist[v] = nd;
                prev[v] = Some(u);
                queue.push(nd, v, nd);
            }
        }
    }
    let memory =
        n * (std::mem::size_of::<f64>() + std::mem::size_of::<Option<Vertex>>()) + queue.peak() * MinQueue::ENTRY_BYTES;
    if !found {
        return PathResult::unreachable().with_stats(popped, 0, memory);
    }
    let mut path = vec![target];
    let mut cur = target;
    while let Some(p) = prev[cur] {
        path.push(p);
        cur = p;
    }
    path.reverse();
    PathResult::from_vertices(g, path).with_stats(popped, 0, memory)
}
