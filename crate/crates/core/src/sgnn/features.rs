use ndarray::Array2;

use crate::graph::{Graph, Vertex};
use crate::skeleton::SkeletonLabels;

/// Columns per vertex: degree, clustering coefficient, then
/// `[count, min, max, mean]` of entry distances for every bucket in
/// `(tier, k)` order.
pub fn feature_dim(labels: &SkeletonLabels) -> usize {
    2 + 4 * labels.config.bucket_count()
}

pub fn clustering_coefficient(g: &Graph, v: Vertex) -> f64 {
    let nbrs = g.neighbors(v);
    let d = nbrs.len();
    if d < 2 {
        return 0.0;
    }
    let mut links = 0usize;
    for (i, &(a, _)) in nbrs.iter().enumerate() {
        for &(b, _) in &nbrs[i + 1..] {
            if g.edge_weight(a, b).is_some() {
                links += 1;
            }
        }
    }
    2.0 * links as f64 / (d * (d - 1)) as f64
}

/// Unnormalized feature matrix, one row per vertex.
pub fn raw_features(g: &Graph, labels: &SkeletonLabels) -> Array2<f64> {
    let n = g.vertex_count();
    assert_eq!(n, labels.vertex_count(), "labels built on a different graph");
    let mut x = Array2::zeros((n, feature_dim(labels)));
    for v in 0..n {
        let mut row = x.row_mut(v);
        row[0] = g.degree(v) as f64;
        row[1] = clustering_coefficient(g, v);
        for (b, bucket) in labels.label(v).buckets.iter().enumerate() {
            if bucket.is_empty() {
                continue;
            }
            let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
            for e in bucket {
                lo = lo.min(e.dist);
                hi = hi.max(e.dist);
                sum += e.dist;
            }
            let c = 2 + 4 * b;
            row[c] = bucket.len() as f64;
            row[c + 1] = lo;
            row[c + 2] = hi;
            row[c + 3] = sum / bucket.len() as f64;
        }
    }
    x
}

/// Per-column z-score statistics. Constant columns map to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Normalizer {
    pub fn fit(x: &Array2<f64>) -> Self {
        let n = x.nrows().max(1) as f64;
        let mut mean = Vec::with_capacity(x.ncols());
        let mut std = Vec::with_capacity(x.ncols());
        for col in x.columns() {
            let mu = col.sum() / n;
            let var = col.iter().map(|&a| (a - mu) * (a - mu)).sum::<f64>() / n;
            mean.push(mu);
            std.push(var.sqrt());
        }
        Normalizer { mean, std }
    }

    pub fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        assert_eq!(x.ncols(), self.mean.len(), "feature width mismatch");
        let mut out = x.clone();
        for (j, mut col) in out.columns_mut().into_iter().enumerate() {
            let (mu, sd) = (self.mean[j], self.std[j]);
            if sd > 1e-12 {
                col.mapv_inplace(|a| (a - mu) / sd);
            } else {
                col.fill(0.0);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{v, worked_example};
    use crate::graph::generate::{power_law, Weights};
    use crate::skeleton::{build_labels, SkeletonConfig};

    #[test]
    fn triangle_features() {
        let g = Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let labels = build_labels(&g, SkeletonConfig::new(2, 0).unwrap());
        let x = raw_features(&g, &labels);
        assert_eq!(x.ncols(), 2 + 4 * 2);
        for r in 0..3 {
            let row = x.row(r);
            assert_eq!(row[0], 2.0);
            assert_eq!(row[1], 1.0);
            assert_eq!(&row.to_vec()[2..6], &[2.0, 1.0, 1.0, 1.0]);
            assert_eq!(&row.to_vec()[6..10], &[0.0; 4]);
        }
    }

    #[test]
    fn isolated_vertex_row_is_zero() {
        let g = Graph::from_edges(3, &[(1, 2, 1.0)]).unwrap();
        let labels = build_labels(&g, SkeletonConfig::DENSE);
        let x = raw_features(&g, &labels);
        assert!(x.row(0).iter().all(|&a| a == 0.0));
    }

    #[test]
    fn worked_example_bucket_counts() {
        let g = worked_example();
        let labels = build_labels(&g, SkeletonConfig::new(3, 1).unwrap());
        let x = raw_features(&g, &labels);
        let row = x.row(v(1));
        assert_eq!((row[2], row[6], row[10]), (1.0, 3.0, 4.0));
        // 2-hop bucket {v2: 4, v7: 3, v9: 3}
        assert_eq!((row[7], row[8]), (3.0, 4.0));
        assert!((row[9] - 10.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn normalized_columns_are_standardized() {
        let g = power_law(120, 2, Weights::Uniform(1.0, 10.0), 5);
        let labels = build_labels(&g, SkeletonConfig::DENSE);
        let raw = raw_features(&g, &labels);
        let norm = Normalizer::fit(&raw);
        let x = norm.apply(&raw);
        for (j, col) in x.columns().into_iter().enumerate() {
            assert!(col.iter().all(|a| a.is_finite()));
            let mu = col.sum() / col.len() as f64;
            assert!(mu.abs() < 1e-6, "column {j} mean {mu}");
            if norm.std[j] > 1e-12 {
                let var = col.iter().map(|a| (a - mu) * (a - mu)).sum::<f64>() / col.len() as f64;
                assert!((var - 1.0).abs() < 1e-6, "column {j} variance {var}");
            } else {
                assert!(col.iter().all(|&a| a == 0.0));
            }
        }
    }
}
