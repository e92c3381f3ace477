//! Analysis tools that run over assemblies.
//!
//! Tools implement [`AnalysisTool`] and are looked up by name in a
//! [`Registry`]. Two ship built in: `pin_diff` (normalized percentage
//! difference of pin series, enabled by default) and `kmeans` (clustering of
//! pin axial profiles).

mod diff;
mod features;
mod kmeans;
mod registry;
mod result;

pub use diff::{pin_diff, PinDiffTool};
pub use features::pin_feature_vectors;
pub use kmeans::{kmeans, KMeansFit, KMeansTool, DEFAULT_MAX_ITER};
pub use registry::{AnalysisTool, ParamKind, ParamSpec, ParamValue, Params, Registry, ToolInfo};
pub use result::{AnalysisResult, Artifact, Matrix, Series, Table};

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("conflict: {0}")]
    Conflict(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<ModelError> for AnalysisError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::NotFound(m) => AnalysisError::NotFound(m),
            ModelError::InvalidArgument(m) | ModelError::TypeError(m) => AnalysisError::InvalidArgument(m),
        }
    }
}

pub type Result<T, E = AnalysisError> = std::result::Result<T, E>;
