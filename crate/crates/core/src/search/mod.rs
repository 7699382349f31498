//! Best-first search guided by learned distance predictions, with vertex
//! skipping and early-stage protection.

mod models;

pub use models::{DistanceModel, NullModel, OracleModel};

use std::collections::HashMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::eval::{compute_metrics, MetricsReport};
use crate::graph::queue::MinQueue;
use crate::graph::{shortest_path, Graph, LandmarkIndex, PathResult, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Scales both error buffers in the skip test.
    pub alpha: f64,
    /// Hop length up to which the heuristic and skipping stay off.
    /// `None` means never switch them on.
    pub beta: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            alpha: 0.2,
            beta: Some(0),
        }
    }
}

impl SearchConfig {
    fn guided(&self, hop: usize) -> bool {
        self.beta.is_some_and(|b| hop > b)
    }
}

/// Learned best-first search from `s` to `t`.
///
/// A vertex reached with more than `beta` hops is queued by
/// `dist + M^d(v, t)` and may be skipped on pop when its distance exceeds
/// the prediction `M^d(s, v)` by more than `alpha * e^d` and its hop count
/// differs from `M^h(s, v)` by more than `alpha * ceil(e^h)`. The search
/// stops when `t` is popped or the popped key reaches `dist[t]`.
pub fn lsearch<M: DistanceModel + ?Sized>(
    g: &Graph,
    model: &M,
    s: Vertex,
    t: Vertex,
    cfg: &SearchConfig,
) -> PathResult {
    let n = g.vertex_count();
    assert!(s < n && t < n, "query vertex out of range");
    let buffers = model.error_buffers();
    let skip_d = buffers.distance.is_finite().then_some(cfg.alpha * buffers.distance);
    let skip_h = buffers.hop.is_finite().then_some(cfg.alpha * buffers.hop.ceil());

    let mut dist = vec![f64::INFINITY; n];
    let mut hop = vec![usize::MAX; n];
    let mut prev: Vec<Option<Vertex>> = vec![None; n];
    let mut to_target: HashMap<Vertex, f64> = HashMap::new();
    let mut from_source: HashMap<Vertex, (f64, f64)> = HashMap::new();
    let mut queue = MinQueue::new();
    let (mut popped, mut pruned) = (0, 0);

    dist[s] = 0.0;
    hop[s] = 0;
    queue.push(model.predict_distance(s, t), s, 0.0);
    let mut reached = false;
    while let Some(e) = queue.pop() {
        let v = e.vertex;
        if e.dist > dist[v] {
            continue;
        }
        popped += 1;
        if v == t || e.key >= dist[t] {
            reached = true;
            break;
        }
        if cfg.guided(hop[v]) {
            if let (Some(bd), Some(bh)) = (skip_d, skip_h) {
                let (pd, ph) = *from_source.entry(v).or_insert_with(|| model.predict(s, v));
                if dist[v] - pd > bd && (hop[v] as f64 - ph).abs() > bh {
                    pruned += 1;
                    continue;
                }
            }
        }
        for &(u, w) in g.neighbors(v) {
            let nd = dist[v] + w;
            if nd < dist[u] {
                dist[u] = nd;
                prev[u] = Some(v);
                hop[u] = hop[v] + 1;
                let key = if cfg.guided(hop[u]) {
                    nd + *to_target.entry(u).or_insert_with(|| model.predict_distance(u, t))
                } else {
                    nd
                };
                queue.push(key, u, nd);
            }
        }
    }
    let memory = n * (2 * std::mem::size_of::<f64>() + std::mem::size_of::<Option<Vertex>>())
        + queue.peak() * MinQueue::ENTRY_BYTES
        + (to_target.len() + 2 * from_source.len()) * (std::mem::size_of::<Vertex>() + 8);
    if !reached || !dist[t].is_finite() {
        return PathResult::unreachable().with_stats(popped, pruned, memory);
    }
    let mut path = vec![t];
    let mut cur = t;
    while let Some(p) = prev[cur] {
        path.push(p);
        cur = p;
    }
    path.reverse();
    PathResult::from_vertices(g, path).with_stats(popped, pruned, memory)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub mean_micros: f64,
    pub mean_memory_bytes: f64,
    pub total_popped: usize,
    pub total_pruned: usize,
    pub metrics: MetricsReport,
    pub results: Vec<PathResult>,
}

/// Runs Dijkstra, the landmark baseline and [`lsearch`] on the same
/// queries and scores each against Dijkstra.
pub fn compare_searches<M: DistanceModel + ?Sized>(
    g: &Graph,
    model: &M,
    landmarks: &LandmarkIndex,
    queries: &[(Vertex, Vertex)],
    cfg: &SearchConfig,
) -> Vec<MethodSummary> {
    assert!(!queries.is_empty(), "no queries");
    let truth: Vec<PathResult> = queries.iter().map(|&(s, t)| shortest_path(g, s, t)).collect();
    type Run<'a> = Box<dyn Fn(Vertex, Vertex) -> PathResult + 'a>;
    let methods: [(&str, Run); 3] = [
        ("dijkstra", Box::new(|s, t| shortest_path(g, s, t))),
        ("landmark", Box::new(|s, t| landmarks.query(g, s, t))),
        ("lsearch", Box::new(|s, t| lsearch(g, model, s, t, cfg))),
    ];
    methods
        .iter()
        .map(|(name, run)| {
            let start = Instant::now();
            let results: Vec<PathResult> = queries.iter().map(|&(s, t)| run(s, t)).collect();
            let elapsed = start.elapsed().as_secs_f64() * 1e6;
            let k = queries.len() as f64;
            MethodSummary {
                method: name.to_string(),
                mean_micros: elapsed / k,
                mean_memory_bytes: results.iter().map(|r| r.memory_bytes as f64).sum::<f64>() / k,
                total_popped: results.iter().map(|r| r.popped).sum(),
                total_pruned: results.iter().map(|r| r.pruned).sum(),
                metrics: compute_metrics(&truth, &results),
                results,
            }
        })
        .collect()
}
