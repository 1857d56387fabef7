//! Packets keyed for duplicate detection, budgeted protection, dual-path
//! transmission and per-trial execution.

mod digest;
mod packet;
mod select;
mod transmit;
mod trial;

use thiserror::Error;

use crate::topology::{NodeId, TopologyError};

pub use digest::{payload_digest, Digest};
pub use packet::{duplicate_for_parallel, make_message, CopyKind, IdempotencyKey, MessageIdSource, Packet};
pub use select::{packet_risk, select_protected_subset, RiskModel};
pub use transmit::{transmit, Classification, CopyFate, FaultHook, NoFaults, TransmissionOutcome};
pub use trial::{run_trial, Simulation, TrialDiagnostics, TrialRun, PAYLOAD_LEN};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("source and destination are both {0}")]
    SameEndpoints(NodeId),
    #[error("packet {0} is not a primary copy")]
    NotPrimary(IdempotencyKey),
    #[error("critical packet {0} cannot be a budgeted candidate")]
    CriticalCandidate(IdempotencyKey),
    #[error("risk weight {0} is not finite and non-negative")]
    InvalidRisk(f64),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}
