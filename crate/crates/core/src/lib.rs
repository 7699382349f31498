//! Skeleton-guided learned shortest-path search.

pub mod codec;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod graph;
pub mod hierarchy;
pub mod search;
pub mod sgnn;
pub mod skeleton;

pub use error::{Error, Result};
