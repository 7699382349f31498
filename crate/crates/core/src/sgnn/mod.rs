//! Skeleton graph neural network: tiered message passing over skeleton
//! labels, two MLP heads predicting shortest distance and hop length, and
//! the training loop.

mod adam;
mod features;
mod io;
mod model;
mod propagation;
mod train;

pub use adam::Adam;
pub use features::{clustering_coefficient, feature_dim, raw_features, Normalizer};
pub use io::{load_model, read_model, save_model, write_model};
pub use model::{Architecture, ErrorBuffers, GraphContext, LossParts, SgnnModel, TensorSpec, TrainingPair};
pub use propagation::Propagation;
pub use train::{
    architecture, evaluate, max_errors, sample_pairs, train, EpochLoss, PredictionMetrics, TrainReport, TrainingConfig,
};
