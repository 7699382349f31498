use serde::{Deserialize, Serialize};

use crate::graph::PathResult;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Percent.
    pub mape_d: f64,
    /// Percent.
    pub mape_h: f64,
    pub rmse_d: f64,
    pub rmse_h: f64,
    /// Percent.
    pub acc: f64,
    /// Fraction of queries whose path matches the ground truth exactly.
    pub hit: f64,
    pub query_time_micros: f64,
    pub memory_proxy_bytes: f64,
    /// Scored pairs.
    pub pairs: usize,
    /// Pairs left out because the true distance is zero or infinite.
    pub excluded: usize,
    /// Scored pairs for which no path was found.
    pub failed: usize,
}

/// Mean absolute percentage error, in percent, over pairs with `y != 0`.
pub fn mape(y: &[f64], y_hat: &[f64]) -> f64 {
    assert_eq!(y.len(), y_hat.len());
    let terms: Vec<f64> = y
        .iter()
        .zip(y_hat)
        .filter(|(a, _)| **a != 0.0)
        .map(|(a, b)| (a - b).abs() / a.abs())
        .collect();
    if terms.is_empty() {
        return 0.0;
    }
    100.0 * terms.iter().sum::<f64>() / terms.len() as f64
}

pub fn rmse(y: &[f64], y_hat: &[f64]) -> f64 {
    assert_eq!(y.len(), y_hat.len());
    if y.is_empty() {
        return 0.0;
    }
    let sq: f64 = y.iter().zip(y_hat).map(|(a, b)| (a - b) * (a - b)).sum();
    (sq / y.len() as f64).sqrt()
}

/// Scores `found` against `truth` pairwise.
///
/// Acc is `mean(1 - |d - d_hat| / d)` in percent and Hit the share of exact
/// path matches, a path and its reverse counting as equal. A failed search
/// scores 0 on both and is left out of MAPE and RMSE.
pub fn compute_metrics(truth: &[PathResult], found: &[PathResult]) -> MetricsReport {
    assert_eq!(truth.len(), found.len(), "result lists differ in length");
    let mut report = MetricsReport::default();
    let (mut yd, mut yd_hat, mut yh, mut yh_hat) = (vec![], vec![], vec![], vec![]);
    let (mut acc, mut hits) = (0.0, 0usize);
    for (t, f) in truth.iter().zip(found) {
        if !(t.distance > 0.0 && t.distance.is_finite()) {
            report.excluded += 1;
            continue;
        }
        report.pairs += 1;
        if !f.is_reachable() {
            report.failed += 1;
            continue;
        }
        yd.push(t.distance);
        yd_hat.push(f.distance);
        yh.push(t.hops as f64);
        yh_hat.push(f.hops as f64);
        acc += 1.0 - (t.distance - f.distance).abs() / t.distance;
        if t.same_path(f) {
            hits += 1;
        }
    }
    if report.excluded > 0 {
        log::warn!("{} pairs with zero or infinite true distance left out", report.excluded);
    }
    if report.pairs > 0 {
        let k = report.pairs as f64;
        report.acc = 100.0 * acc / k;
        report.hit = hits as f64 / k;
    }
    report.mape_d = mape(&yd, &yd_hat);
    report.mape_h = mape(&yh, &yh_hat);
    report.rmse_d = rmse(&yd, &yd_hat);
    report.rmse_h = rmse(&yh, &yh_hat);
    let n = found.len().max(1) as f64;
    report.memory_proxy_bytes = found.iter().map(|r| r.memory_bytes as f64).sum::<f64>() / n;
    report
}
