//! One trial: seeded traffic and attacks on a fixed topology, executed tick
//! by tick.
//!
//! Every transmission and its retries complete inside the tick it was sent.
//! Two views of the network exist per tick: the physical one, where every
//! active cut is dead, and the routing one, which only drops a cut link once
//! it has been down for `route_convergence_ticks`. Copies routed over a cut
//! link that routing has not yet learned about are lost.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index;
use rand::{Rng, RngCore};

use super::packet::{make_message, CopyKind, IdempotencyKey, MessageIdSource, Packet};
use super::select::{select_protected_subset, RiskModel};
use super::transmit::{transmit, Classification, TransmissionOutcome};
use crate::adversary::{schedule_attacks, AttackKind, AttackSchedule, Placement, ScheduleParams, TickAttacks};
use crate::config::SimConfig;
use crate::metrics::{quantize, Mode, TrialMetrics};
use crate::protocol::Digest;
use crate::rng;
use crate::topology::{Level, NodeId, Topology};
use crate::SimError;

pub const PAYLOAD_LEN: usize = 64;

/// Per-trial facts that are not part of the CSV row.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrialDiagnostics {
    pub schedule_digest: Option<Digest>,
    /// Messages that were sent as protected (critical or budgeted).
    pub protected_messages: u64,
    /// Messages that went out as two copies on at least one attempt.
    pub dual_messages: u64,
    /// Messages whose first primary copy was rewritten in flight.
    pub primary_corrupted: u64,
    /// Of those, messages that also carried a parallel copy.
    pub primary_corrupted_dual: u64,
    /// Dual sends whose two routes shared a link.
    pub overlapping_paths: u64,
    /// Copies whose key broke the per-message key rules.
    pub key_violations: u64,
    /// Undetected corruptions on messages that had two copies in flight.
    pub undetected_on_dual: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRun {
    pub metrics: TrialMetrics,
    pub diagnostics: TrialDiagnostics,
}

#[derive(Debug, Clone)]
struct PlannedMessage {
    tick: u32,
    packet: Packet,
}

/// Configuration plus the topology it describes, shared by all trials.
#[derive(Debug, Clone)]
pub struct Simulation {
    cfg: SimConfig,
    topology: Topology,
    outer: Vec<NodeId>,
    risk: RiskModel<f64>,
}

impl Simulation {
    pub fn new(cfg: &SimConfig) -> Result<Self, SimError> {
        cfg.validate()?;
        let topology = cfg.topology.build(rng::derive_seed(cfg.seed, "topology", &[]))?;
        let outer: Vec<NodeId> = topology.nodes_at(Level::O).collect();
        Ok(Self {
            cfg: cfg.clone(),
            topology,
            outer,
            risk: RiskModel::default(),
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    /// Attack schedule for `trial_index`. Independent of mode.
    pub fn schedule(&self, trial_index: u32) -> Result<AttackSchedule, SimError> {
        let params = ScheduleParams {
            ticks: self.cfg.ticks,
            rates: self.cfg.rates,
            durations: self.cfg.durations,
            placement: if self.cfg.weighted_attacks {
                Placement::CriticalityWeighted
            } else {
                Placement::Uniform
            },
        };
        let seed = rng::derive_seed(self.cfg.seed, "schedule", &[u64::from(trial_index)]);
        Ok(schedule_attacks(&self.topology, &params, seed)?)
    }

    fn plan_traffic(&self, trial_index: u32) -> Result<Vec<PlannedMessage>, SimError> {
        let mut rng = rng::stream(self.cfg.seed, "traffic", &[u64::from(trial_index)]);
        let m = self.cfg.messages_per_trial as usize;
        let k = self.outer.len();
        let mut ids = MessageIdSource::new();
        let mut planned = Vec::with_capacity(m);
        for _ in 0..m {
            let tick = rng.gen_range(0..self.cfg.ticks);
            let s = rng.gen_range(0..k);
            let mut d = rng.gen_range(0..k - 1);
            if d >= s {
                d += 1;
            }
            let mut payload = vec![0u8; PAYLOAD_LEN];
            rng.fill_bytes(&mut payload);
            let packet = make_message(self.outer[s], self.outer[d], payload, false, &mut ids)?;
            planned.push(PlannedMessage { tick, packet });
        }
        let critical = (self.cfg.critical_fraction * m as f64).round() as usize;
        for i in index::sample(&mut rng, m, critical.min(m)) {
            planned[i].packet.critical = true;
        }
        Ok(planned)
    }

    /// Keys of the messages that get a parallel copy in protocol mode.
    fn protected_keys(&self, planned: &[PlannedMessage], mode: Mode) -> Result<BTreeSet<IdempotencyKey>, SimError> {
        if mode == Mode::Baseline {
            return Ok(BTreeSet::new());
        }
        let mut keys: BTreeSet<IdempotencyKey> = planned
            .iter()
            .filter(|p| p.packet.critical)
            .map(|p| p.packet.key)
            .collect();
        let mut candidates = Vec::new();
        for p in planned.iter().filter(|p| !p.packet.critical) {
            if let Some(path) = self.topology.shortest_path(p.packet.src, p.packet.dst)? {
                candidates.push((p.packet.clone(), path));
            }
        }
        let budget = self.cfg.duplication_budget as usize;
        keys.extend(select_protected_subset(&candidates, budget, &self.risk)?);
        Ok(keys)
    }

    /// Whether the intact network offers two edge-disjoint routes.
    fn dual_capable(
        &self,
        cache: &mut BTreeMap<(NodeId, NodeId), bool>,
        src: NodeId,
        dst: NodeId,
    ) -> Result<bool, SimError> {
        if let Some(&v) = cache.get(&(src, dst)) {
            return Ok(v);
        }
        let v = match self.topology.shortest_path(src, dst)? {
            Some(primary) => self.topology.parallel_path(&primary)?.is_some(),
            None => false,
        };
        cache.insert((src, dst), v);
        Ok(v)
    }

    pub fn run_trial(&self, mode: Mode, trial_index: u32) -> Result<TrialRun, SimError> {
        let schedule = self.schedule(trial_index)?;
        let mut planned = self.plan_traffic(trial_index)?;
        let protected = self.protected_keys(&planned, mode)?;
        planned.sort_by_key(|p| (p.tick, p.packet.key.message_id));

        let mut metrics = TrialMetrics {
            trial_index,
            mode,
            messages_attempted: 0,
            delivered_clean: 0,
            corrupt_detected: 0,
            corrupt_undetected: 0,
            lost: 0,
            packet_loss_copies: 0,
            retransmissions: 0,
            availability: 1.0,
            mean_connectivity: 1.0,
            tapped_copies: 0,
            degradations: 0,
        };
        let mut diag = TrialDiagnostics {
            schedule_digest: Some(schedule.digest()),
            ..Default::default()
        };

        let pristine = self.topology.pristine();
        let pairs = {
            let n = pristine.node_count() as u64;
            n * (n - 1)
        };
        let mut dual_capable = BTreeMap::new();
        let mut reachable_sum: u64 = 0;
        let mut next = 0;
        for tick in 0..self.cfg.ticks {
            let mut physical = pristine.clone();
            let mut routing = pristine.clone();
            for ev in schedule.active_at(tick).filter(|e| e.kind == AttackKind::Sever) {
                physical.sever_edge(ev.edge)?;
                if tick >= ev.start_tick + self.cfg.route_convergence_ticks {
                    routing.sever_edge(ev.edge)?;
                }
            }
            reachable_sum += *physical.connectivity_ratio()?.numer();

            let mut hook = TickAttacks::at(&schedule, tick, self.cfg.corruption_mode);
            while next < planned.len() && planned[next].tick == tick {
                let packet = &planned[next].packet;
                let is_protected = protected.contains(&packet.key);
                let mut out = transmit(&routing, packet, is_protected, self.cfg.max_retries, &mut hook)?;
                // Only a fallback the intact network would not have forced
                // counts as degradation.
                if out.degraded && !self.dual_capable(&mut dual_capable, packet.src, packet.dst)? {
                    out.degraded = false;
                }
                record(&mut metrics, &mut diag, &out, is_protected);
                next += 1;
            }
            metrics.tapped_copies += hook.tapped_copies();
        }

        metrics.mean_connectivity = quantize(reachable_sum as f64 / (pairs * u64::from(self.cfg.ticks)) as f64);
        metrics.availability = metrics.availability_from_counts();
        Ok(TrialRun {
            metrics,
            diagnostics: diag,
        })
    }
}

fn record(m: &mut TrialMetrics, d: &mut TrialDiagnostics, out: &TransmissionOutcome, protected: bool) {
    m.messages_attempted += 1;
    match out.classification {
        Classification::DeliveredClean => m.delivered_clean += 1,
        Classification::DeliveredCorruptDetected => m.corrupt_detected += 1,
        Classification::DeliveredCorruptUndetected => {
            m.corrupt_undetected += 1;
            if out.dual {
                d.undetected_on_dual += 1;
            }
        }
        Classification::Lost => m.lost += 1,
    }
    m.packet_loss_copies += u64::from(out.dropped_copies);
    m.retransmissions += u64::from(out.retransmissions);
    m.degradations += u64::from(out.degraded);

    d.protected_messages += u64::from(protected);
    d.dual_messages += u64::from(out.dual);
    d.overlapping_paths += u64::from(out.overlapping_paths);
    if out.primary_corrupted_in_flight {
        d.primary_corrupted += 1;
        d.primary_corrupted_dual += u64::from(out.dual);
    }

    // Same message id throughout; attempts start at 0 and climb by one;
    // a parallel copy follows the primary of its own attempt.
    let mut expected_attempt = 0;
    let mut last_primary: Option<IdempotencyKey> = None;
    for (key, kind) in &out.keys_sent {
        let ok = match kind {
            CopyKind::Primary => {
                let ok = key.message_id == out.key.message_id && key.attempt == expected_attempt;
                expected_attempt += 1;
                last_primary = Some(*key);
                ok
            }
            CopyKind::Parallel => last_primary == Some(*key),
        };
        d.key_violations += u64::from(!ok);
    }
}

/// Runs one trial from scratch.
pub fn run_trial(cfg: &SimConfig, mode: Mode, trial_index: u32) -> Result<TrialMetrics, SimError> {
    Ok(Simulation::new(cfg)?.run_trial(mode, trial_index)?.metrics)
}
