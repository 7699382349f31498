#![allow(dead_code)]

use skelpath::graph::{Graph, Vertex};
use skelpath::skeleton::{SkeletonConfig, SkeletonLabels};

/// All-pairs distances and hop counts by Floyd-Warshall. Hop counts are
/// those of the path found, so they are only meaningful when shortest paths
/// are unique (continuous random weights).
pub struct Floyd {
    pub dist: Vec<Vec<f64>>,
    pub hop: Vec<Vec<usize>>,
}

pub fn floyd(g: &Graph) -> Floyd {
    let n = g.vertex_count();
    let mut dist = vec![vec![f64::INFINITY; n]; n];
    let mut hop = vec![vec![usize::MAX; n]; n];
    for i in 0..n {
        dist[i][i] = 0.0;
        hop[i][i] = 0;
    }
    for (a, b, w) in g.edges() {
        if w < dist[a][b] {
            dist[a][b] = w;
            dist[b][a] = w;
            hop[a][b] = 1;
            hop[b][a] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = dist[i][k];
            if !dik.is_finite() {
                continue;
            }
            for j in 0..n {
                let cand = dik + dist[k][j];
                if cand < dist[i][j] {
                    dist[i][j] = cand;
                    hop[i][j] = hop[i][k] + hop[k][j];
                }
            }
        }
    }
    Floyd { dist, hop }
}

/// Checks every bucket of every label against the brute-force set
/// `{v : hop(owner, v) = k * base^tier}`. Degree-1 owners must hold only
/// their single neighbor. Returns a description of the first mismatch.
pub fn check_buckets(g: &Graph, labels: &SkeletonLabels, oracle: &Floyd) -> Result<(), String> {
    let cfg: &SkeletonConfig = &labels.config;
    for owner in 0..g.vertex_count() {
        let label = labels.label(owner);
        for tier in 0..=cfg.max_tier {
            for k in 1..=cfg.base {
                let mut got: Vec<Vertex> = label.bucket(cfg, tier, k).iter().map(|e| e.vertex).collect();
                got.sort_unstable();
                let h = k * cfg.base.pow(tier as u32);
                let want: Vec<Vertex> = if g.degree(owner) == 1 {
                    if h == 1 {
                        g.neighbors(owner).iter().map(|&(u, _)| u).collect()
                    } else {
                        Vec::new()
                    }
                } else {
                    (0..g.vertex_count())
                        .filter(|&v| v != owner && oracle.hop[owner][v] == h)
                        .collect()
                };
                if got != want {
                    return Err(format!("owner {owner} tier {tier} k {k}: got {got:?}, want {want:?}"));
                }
                for e in label.bucket(cfg, tier, k) {
                    if (e.dist - oracle.dist[owner][e.vertex]).abs() > 1e-9 {
                        return Err(format!(
                            "owner {owner} entry {} distance {} vs {}",
                            e.vertex, e.dist, oracle.dist[owner][e.vertex]
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}
