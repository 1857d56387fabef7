use thiserror::Error;

use crate::adversary::AdversaryError;
use crate::config::ConfigError;
use crate::metrics::MetricsError;
use crate::protocol::ProtocolError;
use crate::topology::TopologyError;

/// Anything that can stop an experiment.
#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("trial {0}: baseline and protocol saw different attack schedules")]
    Unpaired(u32),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("cannot create {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
