//! Accuracy metrics, query workloads and experiment runs.

mod experiment;
mod metrics;
mod workload;

pub use experiment::{run_experiment, ExperimentSpec, ExperimentSummary, Method, MethodReport, SweepSeries, Sweeps};
pub use metrics::{compute_metrics, mape, rmse, MetricsReport};
pub use workload::{generate_queries, EvalConfig};
