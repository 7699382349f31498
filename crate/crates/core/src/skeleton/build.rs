use rayon::prelude::*;

use crate::graph::queue::MinQueue;
use crate::graph::{Graph, Vertex};

use super::{LabelEntry, SkeletonConfig, SkeletonLabel, SkeletonLabels};

/// Walks `steps` predecessors back from `v`.
///
/// Panics if the chain ends early; callers only ask for ancestors that the
/// hop count guarantees exist.
pub fn find_linked_vertex(prev: &[Option<Vertex>], v: Vertex, steps: usize) -> Vertex {
    let mut cur = v;
    for _ in 0..steps {
        cur = prev[cur].unwrap_or_else(|| panic!("broken predecessor chain walking {steps} steps back from {v}"));
    }
    cur
}

/// Per-thread scratch state reused across sources.
struct Scratch {
    dist: Vec<f64>,
    hop: Vec<usize>,
    prev: Vec<Option<Vertex>>,
    settled: Vec<bool>,
    touched: Vec<Vertex>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            dist: vec![f64::INFINITY; n],
            hop: vec![usize::MAX; n],
            prev: vec![None; n],
            settled: vec![false; n],
            touched: Vec::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.dist[v] = f64::INFINITY;
            self.hop[v] = usize::MAX;
            self.prev[v] = None;
            self.settled[v] = false;
        }
        self.touched.clear();
    }
}

pub fn build_labels(g: &Graph, cfg: SkeletonConfig) -> SkeletonLabels {
    cfg.validate().expect("invalid skeleton config");
    let n = g.vertex_count();
    let labels = (0..n)
        .into_par_iter()
        .map_init(|| Scratch::new(n), |scratch, v| label_with(g, &cfg, v, scratch))
        .collect();
    SkeletonLabels { config: cfg, labels }
}

pub fn build_label(g: &Graph, cfg: &SkeletonConfig, owner: Vertex) -> SkeletonLabel {
    let mut scratch = Scratch::new(g.vertex_count());
    label_with(g, cfg, owner, &mut scratch)
}

fn label_with(g: &Graph, cfg: &SkeletonConfig, owner: Vertex, s: &mut Scratch) -> SkeletonLabel {
    let mut label = SkeletonLabel::empty(owner, cfg);
    match g.neighbors(owner) {
        [] => return label,
        // Degree-1 owners keep only their 1-hop bucket.
        &[(nb, w)] => {
            label.buckets[cfg.bucket_index(0, 1)].push(LabelEntry {
                vertex: nb,
                linked: owner,
                dist: w,
            });
            return label;
        }
        _ => {}
    }

    let bound = cfg.hop_bound();
    let mut queue = MinQueue::new();
    s.reset();
    s.dist[owner] = 0.0;
    s.hop[owner] = 0;
    s.touched.push(owner);
    queue.push(0.0, owner, 0.0);
    let mut hop_min = usize::MAX;
    // Unsettled vertices whose tentative hop is within the bound. Once this
    // reaches zero no later relaxation can produce an in-bound hop.
    let mut open_in_bound = 1usize;

    while let Some(e) = queue.pop() {
        if hop_min > bound && hop_min != usize::MAX {
            break;
        }
        let v = e.vertex;
        if e.dist > s.dist[v] {
            continue;
        }
        if s.dist[v].is_infinite() {
            break;
        }
        s.settled[v] = true;
        let hv = s.hop[v];
        if hv <= bound {
            open_in_bound -= 1;
        }
        // Past-bound vertices are still expanded so in-bound ones settle exactly.
        for &(u, w) in g.neighbors(v) {
            let nd = s.dist[v] + w;
            if nd < s.dist[u] {
                debug_assert!(!s.settled[u]);
                if s.dist[u].is_finite() {
                    if s.hop[u] <= bound {
                        open_in_bound -= 1;
                    }
                } else {
                    s.touched.push(u);
                }
                s.hop[u] = hv + 1;
                s.dist[u] = nd;
                s.prev[u] = Some(v);
                if s.hop[u] <= bound {
                    open_in_bound += 1;
                }
                queue.push(nd, u, nd);
                hop_min = hop_min.min(s.hop[u]);
            }
        }
        if hv > 0 {
            for (tier, k) in cfg.buckets_for_hop(hv) {
                let linked = find_linked_vertex(&s.prev, v, cfg.tier_step(tier));
                label.buckets[cfg.bucket_index(tier, k)].push(LabelEntry {
                    vertex: v,
                    linked,
                    dist: s.dist[v],
                });
            }
        }
        if open_in_bound == 0 {
            break;
        }
    }
    label
}
