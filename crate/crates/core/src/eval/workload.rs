use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{dijkstra, Graph, Vertex};
use crate::hierarchy::HierIndex;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub query_count: usize,
    /// Runs per query; the first is a warm-up and is left out of timings.
    pub repeats: usize,
    /// Centre of the admissible hop band. `None` admits every reachable pair.
    pub rho: Option<usize>,
    pub band_halfwidth: usize,
    /// Fraction of cross-leaf pairs, enforced only when an index is given.
    pub eta: f64,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            query_count: 100,
            repeats: 10,
            rho: None,
            band_halfwidth: 50,
            eta: 0.6,
            seed: 0,
        }
    }
}

impl EvalConfig {
    /// Inclusive hop band `[rho - w, rho + w]`.
    pub fn band(&self) -> Option<(usize, usize)> {
        self.rho
            .map(|r| (r.saturating_sub(self.band_halfwidth), r + self.band_halfwidth))
    }

    /// Number of cross-leaf pairs required out of `query_count`.
    pub fn cross_leaf_count(&self) -> usize {
        ((self.eta * self.query_count as f64) - 1e-9).ceil().max(0.0) as usize
    }
}

/// Samples `cfg.query_count` distinct-endpoint pairs whose shortest-path hop
/// length lies in the configured band. With an index, exactly
/// [`EvalConfig::cross_leaf_count`] of them have endpoints in different leaves.
///
/// Sources are drawn at random; each draw runs Dijkstra and picks one
/// admissible target of whichever kind is still missing. After `20 * n`
/// fruitless draws the workload is declared infeasible and the error reports
/// the hop range actually observed.
pub fn generate_queries(g: &Graph, cfg: &EvalConfig, idx: Option<&HierIndex>) -> Result<Vec<(Vertex, Vertex)>> {
    let n = g.vertex_count();
    if !(0.0..=1.0).contains(&cfg.eta) {
        return Err(Error::Config(format!("eta must lie in [0, 1], got {}", cfg.eta)));
    }
    if let Some(idx) = idx {
        if idx.vertex_count() != n {
            return Err(Error::Validation("index was built for a different graph".into()));
        }
    }
    if cfg.query_count == 0 {
        return Ok(Vec::new());
    }
    if n < 2 {
        return Err(Error::Infeasible("graph has fewer than two vertices".into()));
    }
    let (lo, hi) = cfg.band().unwrap_or((1, usize::MAX));
    let mut need_cross = idx.map_or(0, |_| cfg.cross_leaf_count());
    let mut need_same = cfg.query_count - need_cross.min(cfg.query_count);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.query_count);
    let (mut seen_lo, mut seen_hi) = (usize::MAX, 0);
    let mut misses = 0;
    let limit = 20 * n;
    while need_cross + need_same > 0 {
        if misses >= limit {
            let seen = if seen_hi == 0 {
                "no reachable pairs".to_string()
            } else {
                format!("observed hop lengths {seen_lo}..={seen_hi}")
            };
            return Err(Error::Infeasible(format!(
                "found {} of {} pairs with hops in {lo}..={hi} ({} cross-leaf still missing); {seen}",
                out.len(),
                cfg.query_count,
                need_cross
            )));
        }
        let s = rng.gen_range(0..n);
        let tree = dijkstra(g, s);
        let mut cross = Vec::new();
        let mut same = Vec::new();
        for t in 0..n {
            if t == s || !tree.reachable(t) {
                continue;
            }
            let h = tree.hop[t];
            seen_lo = seen_lo.min(h);
            seen_hi = seen_hi.max(h);
            if h < lo || h > hi {
                continue;
            }
            match idx {
                Some(idx) if idx.leaf_of[s] != idx.leaf_of[t] => cross.push(t),
                _ => same.push(t),
            }
        }
        let pick = if need_cross > 0 && !cross.is_empty() {
            need_cross -= 1;
            cross.choose(&mut rng)
        } else if need_same > 0 && !same.is_empty() {
            need_same -= 1;
            same.choose(&mut rng)
        } else {
            None
        };
        match pick {
            Some(&t) => out.push((s, t)),
            None => misses += 1,
        }
    }
    Ok(out)
}
