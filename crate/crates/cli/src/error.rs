use std::path::{Path, PathBuf};

use corelens::analysis::AnalysisError;
use corelens::ingest::IngestError;
use corelens::model::ModelError;
use corelens::nrdf::NrdfError;
use corelens::render::RenderError;
use corelens_server::ServerError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Nrdf { path: PathBuf, source: NrdfError },
    #[error("{}: {source}", path.display())]
    Ingest { path: PathBuf, source: IngestError },
    #[error("{0}")]
    Server(#[from] ServerError),
    #[error("{0}")]
    Analysis(#[from] AnalysisError),
    #[error("{0}")]
    Render(#[from] RenderError),
    #[error("{0}")]
    Model(#[from] ModelError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. } | CliError::Nrdf { .. } | CliError::Ingest { .. } | CliError::Server(_) => 2,
            CliError::Analysis(_) | CliError::Render(_) | CliError::Model(_) => 3,
        }
    }

    pub(crate) fn io(path: &Path) -> impl FnOnce(std::io::Error) -> Self + '_ {
        move |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn nrdf(path: &Path) -> impl FnOnce(NrdfError) -> Self + '_ {
        move |source| CliError::Nrdf {
            path: path.to_path_buf(),
            source,
        }
    }
}
