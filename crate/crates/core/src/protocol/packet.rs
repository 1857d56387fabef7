use std::fmt;

use super::digest::{payload_digest, Digest};
use super::ProtocolError;
use crate::topology::NodeId;

/// Identifies one transmission of a message. Parallel copies of an attempt
/// share the key; a retransmission bumps `attempt`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdempotencyKey {
    pub message_id: u64,
    pub attempt: u32,
}

impl fmt::Display for IdempotencyKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.message_id, self.attempt)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CopyKind {
    Primary,
    Parallel,
}

/// Monotonic message id allocator, one per trial.
#[derive(Debug, Clone)]
pub struct MessageIdSource {
    next: u64,
}

impl Default for MessageIdSource {
    fn default() -> Self {
        Self { next: 1 }
    }
}

impl MessageIdSource {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn next_id(&mut self) -> u64 {
        let id = self.next;
        self.next += 1;
        id
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    pub key: IdempotencyKey,
    pub src: NodeId,
    pub dst: NodeId,
    pub critical: bool,
    pub payload: Vec<u8>,
    /// Digest carried alongside the payload. Set at creation; an in-line
    /// attacker may overwrite it.
    pub digest: Digest,
    pub copy: CopyKind,
}

impl Packet {
    /// Whether the carried digest matches the payload.
    pub fn self_consistent(&self) -> bool {
        payload_digest(&self.payload) == self.digest
    }

    /// Fresh primary copy for retransmission number `attempt`.
    pub(crate) fn for_attempt(&self, attempt: u32) -> Packet {
        Packet {
            key: IdempotencyKey {
                message_id: self.key.message_id,
                attempt,
            },
            copy: CopyKind::Primary,
            ..self.clone()
        }
    }
}

pub fn make_message(
    src: NodeId,
    dst: NodeId,
    payload: Vec<u8>,
    critical: bool,
    ids: &mut MessageIdSource,
) -> Result<Packet, ProtocolError> {
    if src == dst {
        return Err(ProtocolError::SameEndpoints(src));
    }
    let digest = payload_digest(&payload);
    Ok(Packet {
        key: IdempotencyKey {
            message_id: ids.next_id(),
            attempt: 0,
        },
        src,
        dst,
        critical,
        payload,
        digest,
        copy: CopyKind::Primary,
    })
}

pub fn duplicate_for_parallel(p: &Packet) -> Result<Packet, ProtocolError> {
    if p.copy != CopyKind::Primary {
        return Err(ProtocolError::NotPrimary(p.key));
    }
    Ok(Packet {
        copy: CopyKind::Parallel,
        ..p.clone()
    })
}
