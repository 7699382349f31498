use ndarray::Array2;

use crate::skeleton::SkeletonLabels;

/// Row-sparse operator `M = A h` for one tier, with
/// `A[i][j] = 1 / (sqrt|N_i| * sqrt(max(|N_j|, 1)))` for `j in N_i`.
#[derive(Debug, Clone, PartialEq)]
struct SparseRows {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    coef: Vec<f64>,
}

impl SparseRows {
    fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[i]..self.offsets[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.coef[r].iter().copied())
    }
}

/// Per-tier normalized aggregation over skeleton tier neighbors.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    n: usize,
    tiers: Vec<SparseRows>,
}

impl Propagation {
    pub fn from_labels(labels: &SkeletonLabels) -> Self {
        let n = labels.vertex_count();
        let tiers = (0..labels.config.tier_count())
            .map(|tier| {
                let nbrs: Vec<Vec<usize>> = (0..n).map(|v| labels.tier_neighbors(v, tier)).collect();
                let mut offsets = vec![0];
                let mut cols = Vec::new();
                let mut coef = Vec::new();
                for list in &nbrs {
                    let ni = (list.len() as f64).sqrt();
                    for &j in list {
                        cols.push(j);
                        coef.push(1.0 / (ni * (nbrs[j].len().max(1) as f64).sqrt()));
                    }
                    offsets.push(cols.len());
                }
                SparseRows { offsets, cols, coef }
            })
            .collect();
        Propagation { n, tiers }
    }

    pub fn tiers(&self) -> usize {
        self.tiers.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Stored coefficients of `tier` as `(i, j, a_ij)` triples.
    pub fn entries(&self, tier: usize) -> Vec<(usize, usize, f64)> {
        let t = &self.tiers[tier];
        (0..self.n)
            .flat_map(|i| t.row(i).map(move |(j, a)| (i, j, a)))
            .collect()
    }

    pub fn apply(&self, tier: usize, h: &Array2<f64>) -> Array2<f64> {
        assert_eq!(h.nrows(), self.n, "row count mismatch");
        let t = &self.tiers[tier];
        let mut out = Array2::zeros(h.raw_dim());
        for i in 0..self.n {
            let mut row = out.row_mut(i);
            for (j, a) in t.row(i) {
                row.scaled_add(a, &h.row(j));
            }
        }
        out
    }

    pub fn apply_transpose(&self, tier: usize, g: &Array2<f64>) -> Array2<f64> {
        assert_eq!(g.nrows(), self.n, "row count mismatch");
        let t = &self.tiers[tier];
        let mut out = Array2::zeros(g.raw_dim());
        for i in 0..self.n {
            let gi = g.row(i);
            for (j, a) in t.row(i) {
                out.row_mut(j).scaled_add(a, &gi);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::{random_connected, Weights};
    use crate::skeleton::{build_labels, SkeletonConfig};

    #[test]
    fn transpose_matches_dense() {
        let g = random_connected(25, 15, Weights::Integer(1, 5), 3);
        let labels = build_labels(&g, SkeletonConfig::DENSE);
        let p = Propagation::from_labels(&labels);
        let h = Array2::from_shape_fn((25, 3), |(i, j)| (i * 3 + j) as f64 * 0.1 - 1.0);
        for tier in 0..p.tiers() {
            let mut dense = Array2::<f64>::zeros((25, 25));
            for (i, j, a) in p.entries(tier) {
                dense[[i, j]] = a;
            }
            let fwd = p.apply(tier, &h);
            let bwd = p.apply_transpose(tier, &h);
            assert!((fwd - dense.dot(&h)).iter().all(|e| e.abs() < 1e-12));
            assert!((bwd - dense.t().dot(&h)).iter().all(|e| e.abs() < 1e-12));
        }
    }
}
