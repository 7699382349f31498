use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{dijkstra, Graph, Vertex};
use crate::skeleton::SkeletonLabels;

use super::adam::Adam;
use super::features::{feature_dim, raw_features, Normalizer};
use super::model::{Architecture, ErrorBuffers, GraphContext, LossParts, SgnnModel, TrainingPair};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainingConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub embedding_dim: usize,
    pub gamma: f64,
    pub seed: u64,
    pub train_fraction: f64,
    pub pair_sample_budget: usize,
    pub head_hidden: Vec<usize>,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            learning_rate: 0.01,
            batch_size: 10_000,
            epochs: 200,
            embedding_dim: 32,
            gamma: 0.5,
            seed: 0,
            train_fraction: 0.9,
            pair_sample_budget: 100_000,
            head_hidden: vec![64, 64],
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Config(format!("gamma {} outside [0, 1]", self.gamma)));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "train fraction {} outside (0, 1]",
                self.train_fraction
            )));
        }
        if self.batch_size == 0 || self.embedding_dim == 0 || self.pair_sample_budget == 0 {
            return Err(Error::Config(
                "batch size, embedding dim and pair budget must be positive".into(),
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning rate {}", self.learning_rate)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub epoch: usize,
    pub total: f64,
    pub distance: f64,
    pub hop: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PredictionMetrics {
    pub mape_distance: f64,
    pub mape_hop: f64,
    pub rmse_distance: f64,
    pub rmse_hop: f64,
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs: Vec<EpochLoss>,
    pub test: PredictionMetrics,
    pub train_pairs: usize,
    pub test_pairs: usize,
    pub error_buffers: (f64, f64),
    pub wall_seconds: f64,
}

impl TrainReport {
    /// Per-epoch losses as CSV with header `epoch,loss,loss_distance,loss_hop`.
    pub fn write_epoch_log(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Format(e.to_string()))?;
        w.write_record(["epoch", "loss", "loss_distance", "loss_hop"])
            .map_err(|e| Error::Format(e.to_string()))?;
        for e in &self.epochs {
            w.write_record([
                e.epoch.to_string(),
                e.total.to_string(),
                e.distance.to_string(),
                e.hop.to_string(),
            ])
            .map_err(|e| Error::Format(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

/// Ground-truth pairs: all connected unordered pairs when there are at most
/// `budget` of them, otherwise a uniform sample of `budget` unordered pairs
/// (unreachable ones dropped). Each pair gets a random orientation.
pub fn sample_pairs(g: &Graph, budget: usize, rng: &mut ChaCha8Rng) -> Vec<TrainingPair> {
    let n = g.vertex_count();
    if n < 2 {
        return Vec::new();
    }
    let total = n as u128 * (n as u128 - 1) / 2;
    let mut by_source: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    if total <= budget as u128 {
        for s in 0..n {
            by_source.insert(s, (s + 1..n).collect());
        }
    } else {
        let mut seen = HashSet::with_capacity(budget);
        while seen.len() < budget {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                seen.insert((a.min(b), a.max(b)));
            }
        }
        let mut chosen: Vec<_> = seen.into_iter().collect();
        chosen.sort_unstable();
        for (a, b) in chosen {
            by_source.entry(a).or_default().push(b);
        }
    }
    let sources: Vec<_> = by_source.into_iter().collect();
    let truths: Vec<Vec<TrainingPair>> = sources
        .par_iter()
        .map(|(s, targets)| {
            let tree = dijkstra(g, *s);
            targets
                .iter()
                .filter(|&&t| tree.reachable(t))
                .map(|&t| TrainingPair {
                    source: *s,
                    target: t,
                    distance: tree.dist[t],
                    hops: tree.hop[t] as f64,
                })
                .collect()
        })
        .collect();
    let mut pairs: Vec<TrainingPair> = truths.into_iter().flatten().collect();
    for p in &mut pairs {
        if rng.gen_bool(0.5) {
            std::mem::swap(&mut p.source, &mut p.target);
        }
    }
    pairs
}

/// MAPE (percent) and RMSE of model predictions against the pairs'
/// ground truth. Pairs with zero ground truth are left out of MAPE.
pub fn evaluate(model: &SgnnModel, pairs: &[TrainingPair]) -> PredictionMetrics {
    let mut m = PredictionMetrics {
        pairs: pairs.len(),
        ..Default::default()
    };
    if pairs.is_empty() {
        return m;
    }
    let (mut nd, mut nh) = (0usize, 0usize);
    for p in pairs {
        let (d, h) = model.predict_pair(p.source, p.target);
        m.rmse_distance += (d - p.distance).powi(2);
        m.rmse_hop += (h - p.hops).powi(2);
        if p.distance > 0.0 {
            m.mape_distance += (d - p.distance).abs() / p.distance;
            nd += 1;
        }
        if p.hops > 0.0 {
            m.mape_hop += (h - p.hops).abs() / p.hops;
            nh += 1;
        }
    }
    let n = pairs.len() as f64;
    m.rmse_distance = (m.rmse_distance / n).sqrt();
    m.rmse_hop = (m.rmse_hop / n).sqrt();
    m.mape_distance = 100.0 * m.mape_distance / nd.max(1) as f64;
    m.mape_hop = 100.0 * m.mape_hop / nh.max(1) as f64;
    m
}

/// Largest absolute prediction errors over `pairs`, in original units.
pub fn max_errors(model: &SgnnModel, pairs: &[TrainingPair]) -> ErrorBuffers {
    let mut buf = ErrorBuffers {
        distance: 0.0,
        hop: 0.0,
    };
    for p in pairs {
        let (d, h) = model.predict_pair(p.source, p.target);
        buf.distance = buf.distance.max((d - p.distance).abs());
        buf.hop = buf.hop.max((h - p.hops).abs());
    }
    buf
}

pub fn architecture(labels: &SkeletonLabels, cfg: &TrainingConfig) -> Architecture {
    Architecture {
        feature_dim: feature_dim(labels),
        embedding_dim: cfg.embedding_dim,
        layers: labels.config.tier_count(),
        head_hidden: cfg.head_hidden.clone(),
    }
}

/// Trains an SGNN on `g` with Adam and returns it with embeddings attached
/// and error buffers set from the held-out split.
pub fn train(g: &Graph, labels: &SkeletonLabels, cfg: &TrainingConfig) -> Result<(SgnnModel, TrainReport)> {
    cfg.validate()?;
    let start = Instant::now();
    let normalizer = Normalizer::fit(&raw_features(g, labels));
    let mut model = SgnnModel::new(
        architecture(labels, cfg),
        labels.config,
        normalizer,
        cfg.gamma,
        cfg.seed,
    );
    let ctx = GraphContext::new(g, labels, &model.normalizer);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_5eed);
    let mut pairs = sample_pairs(g, cfg.pair_sample_budget, &mut rng);
    if pairs.is_empty() {
        return Err(Error::Config("graph has no connected vertex pairs to train on".into()));
    }
    pairs.shuffle(&mut rng);
    let train_len = ((pairs.len() as f64 * cfg.train_fraction).ceil() as usize).clamp(1, pairs.len());
    let (train_set, test_set) = pairs.split_at(train_len);

    model.dist_scale = positive_max(train_set.iter().map(|p| p.distance));
    model.hop_scale = positive_max(train_set.iter().map(|p| p.hops));

    let mut opt = Adam::new(model.params.len(), cfg.learning_rate);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut epochs = Vec::with_capacity(cfg.epochs);
    let mut batch = Vec::with_capacity(cfg.batch_size.min(train_set.len()));
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut acc = LossParts::default();
        for chunk in order.chunks(cfg.batch_size) {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| train_set[i]));
            let (parts, grads) = model.loss_and_grads(&ctx, &batch);
            opt.step(&mut model.params, &grads);
            let w = chunk.len() as f64;
            acc.total += parts.total * w;
            acc.distance += parts.distance * w;
            acc.hop += parts.hop * w;
        }
        let n = train_set.len() as f64;
        let e = EpochLoss {
            epoch,
            total: acc.total / n,
            distance: acc.distance / n,
            hop: acc.hop / n,
        };
        log::debug!("epoch {epoch} loss {:.6}", e.total);
        epochs.push(e);
    }

    model.attach_embeddings(&ctx);
    let held_out = if test_set.is_empty() { train_set } else { test_set };
    model.error_buffers = max_errors(&model, held_out);
    let report = TrainReport {
        epochs,
        test: evaluate(&model, held_out),
        train_pairs: train_set.len(),
        test_pairs: test_set.len(),
        error_buffers: (model.error_buffers.distance, model.error_buffers.hop),
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    Ok((model, report))
}

fn positive_max(values: impl Iterator<Item = f64>) -> f64 {
    let m = values.fold(0.0, f64::max);
    if m > 0.0 {
        m
    } else {
        1.0
    }
}
