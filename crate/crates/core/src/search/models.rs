use rayon::prelude::*;

use crate::graph::{dijkstra, Graph, Vertex};
use crate::sgnn::{ErrorBuffers, SgnnModel};

/// Source of predicted distances and hop lengths for guided search.
pub trait DistanceModel: Sync {
    fn predict_distance(&self, s: Vertex, t: Vertex) -> f64;

    fn predict_hop(&self, s: Vertex, t: Vertex) -> f64;

    fn predict(&self, s: Vertex, t: Vertex) -> (f64, f64) {
        (self.predict_distance(s, t), self.predict_hop(s, t))
    }

    fn error_buffers(&self) -> ErrorBuffers;
}

impl DistanceModel for SgnnModel {
    fn predict_distance(&self, s: Vertex, t: Vertex) -> f64 {
        SgnnModel::predict_distance(self, s, t)
    }

    fn predict_hop(&self, s: Vertex, t: Vertex) -> f64 {
        SgnnModel::predict_hop(self, s, t)
    }

    fn predict(&self, s: Vertex, t: Vertex) -> (f64, f64) {
        self.predict_pair(s, t)
    }

    fn error_buffers(&self) -> ErrorBuffers {
        self.error_buffers
    }
}

/// Predicts zero with infinite buffers: search degrades to Dijkstra order
/// and never skips.
#[derive(Debug, Clone, Copy, Default)]
pub struct NullModel;

impl DistanceModel for NullModel {
    fn predict_distance(&self, _: Vertex, _: Vertex) -> f64 {
        0.0
    }

    fn predict_hop(&self, _: Vertex, _: Vertex) -> f64 {
        0.0
    }

    fn error_buffers(&self) -> ErrorBuffers {
        ErrorBuffers {
            distance: f64::INFINITY,
            hop: f64::INFINITY,
        }
    }
}

/// Exact all-pairs distances and hop lengths with zero buffers. Unreachable
/// pairs predict infinity.
#[derive(Debug, Clone)]
pub struct OracleModel {
    n: usize,
    dist: Vec<f64>,
    hops: Vec<u32>,
}

impl OracleModel {
    pub fn new(g: &Graph) -> Self {
        let n = g.vertex_count();
        let rows: Vec<(Vec<f64>, Vec<u32>)> = (0..n)
            .into_par_iter()
            .map(|s| {
                let tree = dijkstra(g, s);
                let hops = tree.hop.iter().map(|&h| u32::try_from(h).unwrap_or(u32::MAX)).collect();
                (tree.dist, hops)
            })
            .collect();
        let mut dist = Vec::with_capacity(n * n);
        let mut hops = Vec::with_capacity(n * n);
        for (d, h) in rows {
            dist.extend(d);
            hops.extend(h);
        }
        OracleModel { n, dist, hops }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }
}

impl DistanceModel for OracleModel {
    fn predict_distance(&self, s: Vertex, t: Vertex) -> f64 {
        self.dist[s * self.n + t]
    }

    fn predict_hop(&self, s: Vertex, t: Vertex) -> f64 {
        match self.hops[s * self.n + t] {
            u32::MAX => f64::INFINITY,
            h => h as f64,
        }
    }

    fn error_buffers(&self) -> ErrorBuffers {
        ErrorBuffers {
            distance: 0.0,
            hop: 0.0,
        }
    }
}
