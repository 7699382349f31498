use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{load_graph, shortest_path, Graph, LandmarkIndex, PathResult, Vertex};
use crate::hierarchy::{load_index, HierIndex};
use crate::search::{lsearch, SearchConfig};
use crate::sgnn::{load_model, SgnnModel};

use super::{compute_metrics, generate_queries, EvalConfig, MetricsReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dijkstra,
    Landmark,
    Lsearch,
    Hsearch,
    Hlsearch,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Dijkstra => "dijkstra",
            Method::Landmark => "landmark",
            Method::Lsearch => "lsearch",
            Method::Hsearch => "hsearch",
            Method::Hlsearch => "hlsearch",
        }
    }

    fn tunable(self) -> bool {
        matches!(self, Method::Lsearch | Method::Hlsearch)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweeps {
    pub alpha: Vec<f64>,
    /// `null` stands for an unbounded protection depth.
    pub beta: Vec<Option<usize>>,
}

fn default_landmarks() -> usize {
    16
}

/// One experiment run, usually read from JSON.
///
/// Relative paths are resolved against the directory of the spec file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub graph: PathBuf,
    #[serde(default)]
    pub model: Option<PathBuf>,
    #[serde(default)]
    pub index: Option<PathBuf>,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub queries: EvalConfig,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default = "default_landmarks")]
    pub landmarks: usize,
    #[serde(default)]
    pub sweeps: Sweeps,
    pub output: PathBuf,
}

impl ExperimentSpec {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut spec: ExperimentSpec =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        spec.resolve(base);
        Ok(spec)
    }

    pub fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.graph);
        fix(&mut self.output);
        self.model.as_mut().map(fix);
        self.index.as_mut().map(fix);
    }

    /// Checks that every artifact the listed methods need is named and exists.
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Config("no methods listed".into()));
        }
        if self.queries.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        let need = |what: &str, p: &Option<PathBuf>, method: Method| -> Result<()> {
            match p {
                None => Err(Error::Config(format!("method {} needs a {what} file", method.name()))),
                Some(p) if !p.exists() => Err(Error::Config(format!("{what} file {} does not exist", p.display()))),
                Some(_) => Ok(()),
            }
        };
        if !self.graph.exists() {
            return Err(Error::Config(format!(
                "graph file {} does not exist",
                self.graph.display()
            )));
        }
        for &m in &self.methods {
            match m {
                Method::Lsearch => need("model", &self.model, m)?,
                Method::Hsearch | Method::Hlsearch => need("index", &self.index, m)?,
                Method::Dijkstra | Method::Landmark => {}
            }
        }
        if self.index.as_ref().is_some_and(|p| !p.exists()) {
            return Err(Error::Config("index file does not exist".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    /// Method name, suffixed with the swept setting for sweep runs.
    pub label: String,
    pub metrics: MetricsReport,
    pub total_popped: usize,
    pub total_pruned: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSeries {
    pub parameter: String,
    pub method: String,
    pub values: Vec<serde_json::Value>,
    pub acc: Vec<f64>,
    pub hit: Vec<f64>,
    pub acc_non_decreasing: bool,
    pub hit_non_decreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub queries: usize,
    pub cross_leaf_queries: Option<usize>,
    pub methods: Vec<MethodReport>,
    pub sweeps: Vec<SweepSeries>,
}

#[derive(Serialize)]
struct Row<'a> {
    method: &'a str,
    query_id: usize,
    distance: f64,
    truth_distance: f64,
    hops: usize,
    hit: u8,
    micros: f64,
    pops: usize,
    prunes: usize,
}

struct Artifacts {
    graph: Graph,
    model: Option<SgnnModel>,
    index: Option<HierIndex>,
    landmarks: Option<LandmarkIndex>,
}

impl Artifacts {
    fn run(&self, method: Method, cfg: &SearchConfig, s: Vertex, t: Vertex) -> PathResult {
        let g = &self.graph;
        match method {
            Method::Dijkstra => shortest_path(g, s, t),
            Method::Landmark => self.landmarks.as_ref().expect("landmarks built").query(g, s, t),
            Method::Lsearch => lsearch(g, self.model.as_ref().expect("model loaded"), s, t, cfg),
            Method::Hsearch => self.index.as_ref().expect("index loaded").hsearch(g, s, t),
            Method::Hlsearch => self.index.as_ref().expect("index loaded").hlsearch(g, s, t, cfg),
        }
    }
}

/// Runs `method` on every query `repeats` times. Returns the last results and
/// the mean per-query time of all runs but the first.
fn timed(
    art: &Artifacts,
    method: Method,
    cfg: &SearchConfig,
    queries: &[(Vertex, Vertex)],
    repeats: usize,
) -> (Vec<PathResult>, Vec<f64>) {
    queries
        .par_iter()
        .map(|&(s, t)| {
            let mut micros = Vec::with_capacity(repeats);
            let mut last = None;
            for _ in 0..repeats {
                let start = Instant::now();
                let r = art.run(method, cfg, s, t);
                micros.push(start.elapsed().as_secs_f64() * 1e6);
                last = Some(r);
            }
            let kept = if micros.len() > 1 { &micros[1..] } else { &micros[..] };
            (
                last.expect("repeats >= 1"),
                kept.iter().sum::<f64>() / kept.len() as f64,
            )
        })
        .unzip()
}

fn non_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] >= w[0] - 1e-12)
}

/// Loads the artifacts, generates the workload, runs every method (and every
/// sweep setting of the learned methods) and writes `results.csv` and
/// `summary.json` into the output directory.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    spec.validate()?;
    let graph = load_graph(&spec.graph)?;
    let model = match (&spec.model, spec.methods.contains(&Method::Lsearch)) {
        (Some(p), true) => Some(load_model(p)?),
        _ => None,
    };
    let index = match &spec.index {
        Some(p) => Some(load_index(p, &graph)?),
        None => None,
    };
    if let Some(m) = &model {
        match m.embeddings() {
            Some(e) if e.nrows() == graph.vertex_count() => {}
            Some(_) => return Err(Error::Validation("model was trained on a different graph".into())),
            None => return Err(Error::Validation("model file carries no vertex embeddings".into())),
        }
    }
    let landmarks = spec
        .methods
        .contains(&Method::Landmark)
        .then(|| LandmarkIndex::build(&graph, spec.landmarks.min(graph.vertex_count())));
    let art = Artifacts {
        graph,
        model,
        index,
        landmarks,
    };
    let queries = generate_queries(&art.graph, &spec.queries, art.index.as_ref())?;
    let cross = art.index.as_ref().map(|idx| {
        queries
            .iter()
            .filter(|&&(s, t)| idx.leaf_of[s] != idx.leaf_of[t])
            .count()
    });
    let truth: Vec<PathResult> = queries
        .par_iter()
        .map(|&(s, t)| shortest_path(&art.graph, s, t))
        .collect();

    let mut runs: Vec<(String, Method, SearchConfig)> = spec
        .methods
        .iter()
        .map(|&m| (m.name().to_string(), m, spec.search))
        .collect();
    let mut series_keys = Vec::new();
    for &m in spec.methods.iter().filter(|m| m.tunable()) {
        if !spec.sweeps.alpha.is_empty() {
            let start = runs.len();
            for &a in &spec.sweeps.alpha {
                runs.push((
                    format!("{}@alpha={a}", m.name()),
                    m,
                    SearchConfig {
                        alpha: a,
                        ..spec.search
                    },
                ));
            }
            let values = spec.sweeps.alpha.iter().map(|&a| serde_json::json!(a)).collect();
            series_keys.push(("alpha", m, values, start));
        }
        if !spec.sweeps.beta.is_empty() {
            let start = runs.len();
            for &b in &spec.sweeps.beta {
                let label = b.map_or("inf".to_string(), |b| b.to_string());
                runs.push((
                    format!("{}@beta={label}", m.name()),
                    m,
                    SearchConfig { beta: b, ..spec.search },
                ));
            }
            let values = spec.sweeps.beta.iter().map(|&b| serde_json::json!(b)).collect();
            series_keys.push(("beta", m, values, start));
        }
    }

    fs::create_dir_all(&spec.output).map_err(|e| Error::io(&spec.output, e))?;
    let csv_path = spec.output.join("results.csv");
    let mut csv = csv::Writer::from_path(&csv_path)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", csv_path.display())))?;
    let mut reports = Vec::with_capacity(runs.len());
    for (label, method, cfg) in &runs {
        log::info!("running {label} on {} queries", queries.len());
        let (found, micros) = timed(&art, *method, cfg, &queries, spec.queries.repeats);
        let mut metrics = compute_metrics(&truth, &found);
        metrics.query_time_micros = micros.iter().sum::<f64>() / micros.len().max(1) as f64;
        for (i, (f, tr)) in found.iter().zip(&truth).enumerate() {
            csv.serialize(Row {
                method: label,
                query_id: i,
                distance: f.distance,
                truth_distance: tr.distance,
                hops: f.hops,
                hit: u8::from(tr.same_path(f)),
                micros: micros[i],
                pops: f.popped,
                prunes: f.pruned,
            })
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", csv_path.display())))?;
        }
        reports.push(MethodReport {
            label: label.clone(),
            metrics,
            total_popped: found.iter().map(|r| r.popped).sum(),
            total_pruned: found.iter().map(|r| r.pruned).sum(),
        });
    }
    csv.flush().map_err(|e| Error::io(&csv_path, e))?;

    let sweeps = series_keys
        .into_iter()
        .map(
            |(parameter, m, values, start): (&str, Method, Vec<serde_json::Value>, usize)| {
                let slice = &reports[start..start + values.len()];
                let acc: Vec<f64> = slice.iter().map(|r| r.metrics.acc).collect();
                let hit: Vec<f64> = slice.iter().map(|r| r.metrics.hit).collect();
                SweepSeries {
                    parameter: parameter.to_string(),
                    method: m.name().to_string(),
                    values,
                    acc_non_decreasing: non_decreasing(&acc),
                    hit_non_decreasing: non_decreasing(&hit),
                    acc,
                    hit,
                }
            },
        )
        .collect();
    let summary = ExperimentSummary {
        queries: queries.len(),
        cross_leaf_queries: cross,
        methods: reports,
        sweeps,
    };
    let json_path = spec.output.join("summary.json");
    let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(&json_path, text).map_err(|e| Error::io(&json_path, e))?;
    Ok(summary)
}
