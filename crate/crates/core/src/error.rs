use thiserror::Error;

use crate::classify::ClassifyError;
use crate::ingest::IngestError;
use crate::metrics::MetricsError;
use crate::synthgen::GenError;
use crate::temporal::TemporalError;

/// Any failure raised by the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Temporal(#[from] TemporalError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Generate(#[from] GenError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
