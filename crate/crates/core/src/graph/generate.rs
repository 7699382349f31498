//! Seeded synthetic graph generators.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weights {
    /// Continuous uniform in `[lo, hi]`.
    Uniform(f64, f64),
    /// Integer-valued uniform in `lo..=hi`; sums stay exact in `f64`.
    Integer(u32, u32),
}

impl Weights {
    fn sample(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            Weights::Uniform(lo, hi) => rng.gen_range(lo..=hi),
            Weights::Integer(lo, hi) => rng.gen_range(lo..=hi) as f64,
        }
    }
}

/// Random spanning tree over a shuffled vertex order plus `extra_edges`
/// additional random edges. Always connected for `n >= 1`.
pub fn random_connected(n: usize, extra_edges: usize, weights: Weights, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<Vertex> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut seen: HashSet<(Vertex, Vertex)> = HashSet::new();
    let mut edges = Vec::with_capacity(n + extra_edges);
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (u, v) = (order[i], order[j]);
        seen.insert((u.min(v), u.max(v)));
        edges.push((u, v, weights.sample(&mut rng)));
    }
    let max_edges = n * n.saturating_sub(1) / 2;
    let target = (edges.len() + extra_edges).min(max_edges);
    while edges.len() < target {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || !seen.insert((u.min(v), u.max(v))) {
            continue;
        }
        edges.push((u, v, weights.sample(&mut rng)));
    }
    Graph::from_edges(n, &edges).expect("generator produces valid edges")
}

/// Preferential-attachment graph: a seed clique of `attach + 1` vertices,
/// then each new vertex links to `attach` distinct existing vertices chosen
/// proportionally to degree. Connected, with a power-law degree tail.
pub fn power_law(n: usize, attach: usize, weights: Weights, seed: u64) -> Graph {
    assert!(attach >= 1, "attach must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let core = (attach + 1).min(n);
    let mut edges = Vec::new();
    let mut endpoints: Vec<Vertex> = Vec::new();
    for u in 0..core {
        for v in u + 1..core {
            edges.push((u, v, weights.sample(&mut rng)));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    for v in core..n {
        let mut targets: Vec<Vertex> = Vec::with_capacity(attach);
        while targets.len() < attach.min(v) {
            let u = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&u) {
                targets.push(u);
            }
        }
        for u in targets {
            edges.push((u, v, weights.sample(&mut rng)));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    Graph::from_edges(n, &edges).expect("generator produces valid edges")
}

/// Two `k`-cliques with unit weights joined by a single bridge `(k-1, k)`.
pub fn two_cliques(k: usize) -> Graph {
    let mut edges = Vec::new();
    for offset in [0, k] {
        for u in 0..k {
            for v in u + 1..k {
                edges.push((offset + u, offset + v, 1.0));
            }
        }
    }
    edges.push((k - 1, k, 1.0));
    Graph::from_edges(2 * k, &edges).expect("valid clique edges")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_connected_is_connected_and_seeded() {
        let a = random_connected(60, 40, Weights::Integer(1, 10), 7);
        let b = random_connected(60, 40, Weights::Integer(1, 10), 7);
        assert!(a.is_connected());
        assert_eq!(a.edge_count(), 99);
        assert_eq!(a, b);
    }

    #[test]
    fn power_law_has_hubs() {
        let g = power_law(500, 2, Weights::Uniform(1.0, 10.0), 3);
        assert!(g.is_connected());
        let max_deg = (0..500).map(|v| g.degree(v)).max().unwrap();
        assert!(max_deg > 20, "max degree {max_deg}");
        for (_, _, w) in g.edges() {
            assert!((1.0..=10.0).contains(&w));
        }
    }

    #[test]
    fn two_cliques_single_bridge() {
        let g = two_cliques(4);
        assert_eq!(g.edge_count(), 13);
        assert_eq!(g.edge_weight(3, 4), Some(1.0));
    }
}
