//! Single- and dual-path delivery of one message, with receive-side
//! validation and bounded retransmission.
//!
//! Time is collapsed to one instant: every attempt, acknowledgment and retry
//! happens against the same routing view and the same fault hook.

use super::packet::{duplicate_for_parallel, CopyKind, IdempotencyKey, Packet};
use super::ProtocolError;
use crate::topology::{Path, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CopyFate {
    Delivered,
    Dropped,
}

/// In-flight interception of one copy along its route.
pub trait FaultHook {
    /// Carries `copy` across `path`. The hook may rewrite the copy or drop it.
    fn carry(&mut self, copy: &mut Packet, path: &Path) -> CopyFate;
}

impl<F> FaultHook for F
where
    F: FnMut(&mut Packet, &Path) -> CopyFate,
{
    fn carry(&mut self, copy: &mut Packet, path: &Path) -> CopyFate {
        self(copy, path)
    }
}

/// A channel with no faults.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoFaults;

impl FaultHook for NoFaults {
    fn carry(&mut self, _copy: &mut Packet, _path: &Path) -> CopyFate {
        CopyFate::Delivered
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    DeliveredClean,
    DeliveredCorruptDetected,
    DeliveredCorruptUndetected,
    Lost,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransmissionOutcome {
    /// Key of the final attempt.
    pub key: IdempotencyKey,
    /// Copies that reached the receiver on the final attempt.
    pub delivered_copies: u8,
    /// Of those, copies whose payload differs from the original.
    pub corrupted_copies: u8,
    /// Routes of the final attempt that had one.
    pub paths_used: Vec<Path>,
    pub classification: Classification,
    pub retransmissions: u32,
    /// Every copy that failed to arrive, over all attempts.
    pub dropped_copies: u32,
    pub copies_sent: u32,
    /// Key and kind of every copy put on the wire, in order.
    pub keys_sent: Vec<(IdempotencyKey, CopyKind)>,
    /// At least one attempt went out as two edge-disjoint copies.
    pub dual: bool,
    /// Protection was requested but no disjoint route existed on some attempt.
    pub degraded: bool,
    /// Two copies of one attempt shared a link. Never expected to be set.
    pub overlapping_paths: bool,
    /// The first attempt's primary copy was rewritten in flight.
    pub primary_corrupted_in_flight: bool,
}

/// Sends `packet` and retries up to `max_retries` times on loss or detected
/// corruption.
///
/// Unprotected sends use one copy on the shortest route. Protected sends add
/// a parallel copy on a route that avoids every link of the primary route,
/// falling back to a single copy when no such route exists. A copy that
/// cannot be routed at all counts as dropped.
pub fn transmit<H: FaultHook + ?Sized>(
    routing: &Topology,
    packet: &Packet,
    protected: bool,
    max_retries: u32,
    hook: &mut H,
) -> Result<TransmissionOutcome, ProtocolError> {
    if packet.copy != CopyKind::Primary {
        return Err(ProtocolError::NotPrimary(packet.key));
    }
    if packet.src == packet.dst {
        return Err(ProtocolError::SameEndpoints(packet.src));
    }

    let original = &packet.payload;
    let mut out = TransmissionOutcome {
        key: packet.key,
        delivered_copies: 0,
        corrupted_copies: 0,
        paths_used: Vec::new(),
        classification: Classification::Lost,
        retransmissions: 0,
        dropped_copies: 0,
        copies_sent: 0,
        keys_sent: Vec::new(),
        dual: false,
        degraded: false,
        overlapping_paths: false,
        primary_corrupted_in_flight: false,
    };
    let mut detected_any = false;

    for attempt in 0..=max_retries {
        let primary = packet.for_attempt(packet.key.attempt + attempt);
        if attempt > 0 {
            out.retransmissions += 1;
        }
        out.key = primary.key;
        out.delivered_copies = 0;
        out.corrupted_copies = 0;
        out.paths_used.clear();

        let Some(primary_path) = routing.shortest_path(packet.src, packet.dst)? else {
            out.copies_sent += 1;
            out.dropped_copies += 1;
            out.keys_sent.push((primary.key, CopyKind::Primary));
            continue;
        };
        let parallel_path = if protected {
            let p = routing.parallel_path(&primary_path)?;
            if p.is_none() {
                out.degraded = true;
            }
            p
        } else {
            None
        };

        let mut sends = Vec::with_capacity(2);
        if let Some(par) = parallel_path {
            out.dual = true;
            out.overlapping_paths |= primary_path.shares_edge_with(&par);
            sends.push((duplicate_for_parallel(&primary)?, par));
        }
        sends.insert(0, (primary, primary_path));

        let mut arrived: Vec<Packet> = Vec::with_capacity(2);
        for (mut copy, path) in sends {
            out.copies_sent += 1;
            out.keys_sent.push((copy.key, copy.copy));
            let fate = hook.carry(&mut copy, &path);
            if attempt == 0 && copy.copy == CopyKind::Primary && copy.payload != *original {
                out.primary_corrupted_in_flight = true;
            }
            out.paths_used.push(path);
            match fate {
                CopyFate::Delivered => arrived.push(copy),
                CopyFate::Dropped => out.dropped_copies += 1,
            }
        }

        if arrived.is_empty() {
            // Missing acknowledgment: retry.
            continue;
        }
        out.delivered_copies = arrived.len() as u8;
        out.corrupted_copies = arrived.iter().filter(|c| c.payload != *original).count() as u8;

        let mismatch = arrived.iter().any(|c| !c.self_consistent())
            || (arrived.len() == 2 && arrived[0].digest != arrived[1].digest);
        if mismatch {
            detected_any = true;
            out.classification = Classification::DeliveredCorruptDetected;
            continue;
        }

        out.classification = if arrived[0].payload != *original {
            Classification::DeliveredCorruptUndetected
        } else if detected_any {
            Classification::DeliveredCorruptDetected
        } else {
            Classification::DeliveredClean
        };
        return Ok(out);
    }

    // Retries exhausted. A flagged delivery stays flagged; otherwise nothing
    // ever arrived.
    if !detected_any {
        out.classification = Classification::Lost;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::digest::payload_digest;
    use super::super::packet::{make_message, MessageIdSource};
    use super::*;
    use crate::topology::{build_figure1, edge, node, Edge};

    fn msg(src: &str, dst: &str) -> Packet {
        let mut ids = MessageIdSource::new();
        make_message(node(src), node(dst), b"payload".to_vec(), false, &mut ids).unwrap()
    }

    /// Rewrites payload and digest of any copy crossing `target`.
    fn consistent_corruptor(target: Edge) -> impl FnMut(&mut Packet, &Path) -> CopyFate {
        move |copy: &mut Packet, path: &Path| {
            if path.edges().any(|e| e == target) {
                copy.payload = b"forged".to_vec();
                copy.digest = payload_digest(&copy.payload);
            }
            CopyFate::Delivered
        }
    }

    fn dropper(target: Edge) -> impl FnMut(&mut Packet, &Path) -> CopyFate {
        move |_: &mut Packet, path: &Path| {
            if path.edges().any(|e| e == target) {
                CopyFate::Dropped
            } else {
                CopyFate::Delivered
            }
        }
    }

    #[test]
    fn clean_channel() {
        let t = build_figure1(false);
        let out = transmit(&t, &msg("O1", "O4"), false, 3, &mut NoFaults).unwrap();
        assert_eq!(out.classification, Classification::DeliveredClean);
        assert_eq!(out.retransmissions, 0);
        assert_eq!(out.delivered_copies, 1);
        assert_eq!(out.paths_used[0].to_string(), "O1->L1->U2->U1->N1->N2->U3->L3->O4");
    }

    #[test]
    fn single_path_consistent_rewrite_goes_unnoticed() {
        let t = build_figure1(false);
        let mut hook = consistent_corruptor(edge("N1-N2"));
        let out = transmit(&t, &msg("O1", "O4"), false, 3, &mut hook).unwrap();
        assert_eq!(out.classification, Classification::DeliveredCorruptUndetected);
        assert_eq!(out.retransmissions, 0);
        assert!(out.primary_corrupted_in_flight);
    }

    #[test]
    fn dual_path_rewrite_is_detected() {
        let t = build_figure1(true);
        let mut hook = consistent_corruptor(edge("N1-N2"));
        let out = transmit(&t, &msg("U1", "U3"), true, 3, &mut hook).unwrap();
        assert!(out.dual);
        assert_eq!(out.classification, Classification::DeliveredCorruptDetected);
        // The attack persists for the whole instant, so every retry sees it.
        assert_eq!(out.retransmissions, 3);
        assert_eq!(out.delivered_copies, 2);
        assert_eq!(out.corrupted_copies, 1);
        assert!(!out.paths_used[0].shares_edge_with(&out.paths_used[1]));
    }

    #[test]
    fn payload_only_rewrite_caught_by_digest() {
        let t = build_figure1(false);
        let mut hook = |copy: &mut Packet, _: &Path| {
            copy.payload[0] ^= 1;
            CopyFate::Delivered
        };
        let out = transmit(&t, &msg("O1", "O4"), false, 2, &mut hook).unwrap();
        assert_eq!(out.classification, Classification::DeliveredCorruptDetected);
        assert_eq!(out.retransmissions, 2);
    }

    #[test]
    fn transient_corruption_recovered_by_retry() {
        let t = build_figure1(true);
        let mut calls = 0;
        let mut hook = |copy: &mut Packet, _: &Path| {
            calls += 1;
            if calls == 1 {
                copy.payload = b"x".to_vec();
                copy.digest = payload_digest(&copy.payload);
            }
            CopyFate::Delivered
        };
        let out = transmit(&t, &msg("U1", "U3"), true, 3, &mut hook).unwrap();
        assert_eq!(out.classification, Classification::DeliveredCorruptDetected);
        assert_eq!(out.retransmissions, 1);
        assert_eq!(out.key.attempt, 1);
        assert_eq!(out.corrupted_copies, 0);
    }

    #[test]
    fn loss_exhausts_retries() {
        let t = build_figure1(false);
        let mut hook = dropper(edge("N1-N2"));
        let out = transmit(&t, &msg("O1", "O4"), false, 3, &mut hook).unwrap();
        assert_eq!(out.classification, Classification::Lost);
        assert_eq!(out.retransmissions, 3);
        assert_eq!(out.dropped_copies, 4);
        assert_eq!(out.delivered_copies, 0);
    }

    #[test]
    fn redundant_copy_survives_loss() {
        let t = build_figure1(true);
        let mut hook = dropper(edge("N1-N2"));
        let out = transmit(&t, &msg("U1", "U3"), true, 3, &mut hook).unwrap();
        assert_eq!(out.classification, Classification::DeliveredClean);
        assert_eq!(out.retransmissions, 0);
        assert_eq!(out.dropped_copies, 1);
    }

    #[test]
    fn unroutable_counts_as_drop() {
        let t = build_figure1(false).severed(edge("N1-N2")).unwrap();
        let out = transmit(&t, &msg("O1", "O4"), true, 1, &mut NoFaults).unwrap();
        assert_eq!(out.classification, Classification::Lost);
        assert_eq!(out.dropped_copies, 2);
        assert_eq!(out.retransmissions, 1);
    }

    #[test]
    fn degrades_without_disjoint_route() {
        let t = build_figure1(false);
        let out = transmit(&t, &msg("O1", "O4"), true, 3, &mut NoFaults).unwrap();
        assert!(out.degraded);
        assert!(!out.dual);
        assert_eq!(out.copies_sent, 1);
    }

    #[test]
    fn key_discipline() {
        let t = build_figure1(true);
        let mut hook = consistent_corruptor(edge("N1-N2"));
        let out = transmit(&t, &msg("U1", "U3"), true, 2, &mut hook).unwrap();
        let attempts: Vec<u32> = out.keys_sent.iter().map(|(k, _)| k.attempt).collect();
        assert_eq!(attempts, [0, 0, 1, 1, 2, 2]);
        assert!(out.keys_sent.iter().all(|(k, _)| k.message_id == out.key.message_id));
        for pair in out.keys_sent.chunks(2) {
            assert_eq!(pair[0].1, CopyKind::Primary);
            assert_eq!(pair[1].1, CopyKind::Parallel);
        }
    }

    #[test]
    fn rejects_parallel_input_and_unknown_nodes() {
        let t = build_figure1(false);
        let p = msg("O1", "O4");
        let d = duplicate_for_parallel(&p).unwrap();
        assert!(matches!(
            transmit(&t, &d, false, 0, &mut NoFaults),
            Err(ProtocolError::NotPrimary(_))
        ));
        let stray = msg("O1", "O9");
        assert!(matches!(
            transmit(&t, &stray, false, 0, &mut NoFaults),
            Err(ProtocolError::Topology(_))
        ));
    }
}
