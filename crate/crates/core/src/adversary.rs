//! Seeded physical-layer attack schedules and their effects on copies in
//! flight and on links.
//!
//! Three attack kinds act on a single link for a window of ticks:
//!
//! * `TAP` reads traffic. It leaves no trace visible to the protocol and only
//!   bumps an exposure counter.
//! * `CORRUPT` rewrites the payload of every copy crossing the link. By
//!   default the attacker also recomputes the carried digest so the copy is
//!   self-consistent; [`CorruptionMode::PayloadOnly`] leaves the digest alone.
//! * `SEVER` cuts the link. Copies crossing it are dropped.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use sha2::{Digest as _, Sha256};
use thiserror::Error;

use crate::protocol::{payload_digest, CopyFate, Digest, FaultHook, Packet};
use crate::rng;
use crate::topology::{Edge, Path, Topology, TopologyError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdversaryError {
    #[error("{kind} rate {rate} outside [0, 1]")]
    RateOutOfRange { kind: AttackKind, rate: f64 },
    #[error("attack duration range {min}..={max} is invalid (need 1 <= min <= max)")]
    BadDuration { min: u32, max: u32 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttackKind {
    Tap,
    Corrupt,
    Sever,
}

impl AttackKind {
    pub const ALL: [AttackKind; 3] = [AttackKind::Tap, AttackKind::Corrupt, AttackKind::Sever];
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackKind::Tap => "TAP",
            AttackKind::Corrupt => "CORRUPT",
            AttackKind::Sever => "SEVER",
        })
    }
}

impl FromStr for AttackKind {
    type Err = AdversaryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "TAP" => Ok(AttackKind::Tap),
            "CORRUPT" => Ok(AttackKind::Corrupt),
            "SEVER" => Ok(AttackKind::Sever),
            other => Err(AdversaryError::Parse(format!("unknown attack kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorruptionMode {
    /// Rewrites payload and carried digest together.
    #[default]
    Consistent,
    /// Rewrites the payload only.
    PayloadOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Effect {
    /// Copy was read; nothing about it changed.
    Exposed,
    /// Copy payload (and possibly digest) replaced.
    Rewritten,
    /// Copy lost on a cut link.
    Dropped,
    /// Link marked dead.
    Severed,
    /// Attack has no effect on this target.
    Unaffected,
}

pub enum AttackTarget<'a> {
    Copy(&'a mut Packet),
    Topology(&'a mut Topology),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AttackEvent {
    pub kind: AttackKind,
    pub edge: Edge,
    pub start_tick: u32,
    pub duration_ticks: u32,
}

impl AttackEvent {
    pub fn new(kind: AttackKind, edge: Edge, start_tick: u32, duration_ticks: u32) -> Result<Self, AdversaryError> {
        if duration_ticks == 0 {
            return Err(AdversaryError::BadDuration { min: 0, max: 0 });
        }
        Ok(Self {
            kind,
            edge,
            start_tick,
            duration_ticks,
        })
    }

    /// First tick after the window.
    pub fn end_tick(&self) -> u32 {
        self.start_tick.saturating_add(self.duration_ticks)
    }

    pub fn active_at(&self, tick: u32) -> bool {
        self.start_tick <= tick && tick < self.end_tick()
    }

    /// Bytes the attacker XORs into payloads. Distinct events give distinct
    /// masks, and the mask is never all zero.
    fn corruption_mask(&self) -> [u8; 32] {
        let mut mask: [u8; 32] = Sha256::digest(self.to_string().as_bytes()).into();
        mask[0] |= 1;
        mask
    }

    fn rewrite(&self, copy: &mut Packet, mode: CorruptionMode) {
        let mask = self.corruption_mask();
        if copy.payload.is_empty() {
            copy.payload = mask.to_vec();
        } else {
            for (i, b) in copy.payload.iter_mut().enumerate() {
                *b ^= mask[i % mask.len()];
            }
        }
        if mode == CorruptionMode::Consistent {
            copy.digest = payload_digest(&copy.payload);
        }
    }
}

impl fmt::Display for AttackEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {}",
            self.kind, self.edge, self.start_tick, self.duration_ticks
        )
    }
}

impl FromStr for AttackEvent {
    type Err = AdversaryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fields: Vec<&str> = s.split_whitespace().collect();
        let [kind, edge, start, dur] = fields[..] else {
            return Err(AdversaryError::Parse(format!(
                "expected 'kind edge start duration', got {s:?}"
            )));
        };
        let num = |v: &str| {
            v.parse::<u32>()
                .map_err(|e| AdversaryError::Parse(format!("{v:?}: {e}")))
        };
        AttackEvent::new(kind.parse()?, edge.parse()?, num(start)?, num(dur)?)
    }
}

/// Applies one active attack to a copy in flight or to a topology.
pub fn apply_attack(
    event: &AttackEvent,
    target: AttackTarget<'_>,
    mode: CorruptionMode,
) -> Result<Effect, AdversaryError> {
    Ok(match (event.kind, target) {
        (AttackKind::Tap, AttackTarget::Copy(_)) => Effect::Exposed,
        (AttackKind::Corrupt, AttackTarget::Copy(copy)) => {
            event.rewrite(copy, mode);
            Effect::Rewritten
        }
        (AttackKind::Sever, AttackTarget::Copy(_)) => Effect::Dropped,
        (AttackKind::Sever, AttackTarget::Topology(t)) => {
            t.sever_edge(event.edge)?;
            Effect::Severed
        }
        (_, AttackTarget::Topology(t)) => {
            if !t.contains_edge(event.edge) {
                return Err(TopologyError::UnknownEdge(event.edge).into());
            }
            Effect::Unaffected
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct AttackRates {
    pub tap: f64,
    pub corrupt: f64,
    pub sever: f64,
}

impl AttackRates {
    pub fn get(&self, kind: AttackKind) -> f64 {
        match kind {
            AttackKind::Tap => self.tap,
            AttackKind::Corrupt => self.corrupt,
            AttackKind::Sever => self.sever,
        }
    }

    pub fn validate(&self) -> Result<(), AdversaryError> {
        for kind in AttackKind::ALL {
            let rate = self.get(kind);
            if !(0.0..=1.0).contains(&rate) {
                return Err(AdversaryError::RateOutOfRange { kind, rate });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DurationRange {
    pub min: u32,
    pub max: u32,
}

impl Default for DurationRange {
    fn default() -> Self {
        Self { min: 1, max: 5 }
    }
}

impl DurationRange {
    pub fn validate(&self) -> Result<(), AdversaryError> {
        if self.min == 0 || self.min > self.max {
            return Err(AdversaryError::BadDuration {
                min: self.min,
                max: self.max,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Placement {
    /// Every link draws at the configured rate.
    #[default]
    Uniform,
    /// Per-link rate proportional to link criticality, scaled so the mean
    /// over links equals the configured rate (capped at 1).
    CriticalityWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleParams {
    pub ticks: u32,
    pub rates: AttackRates,
    pub durations: DurationRange,
    pub placement: Placement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackSchedule {
    pub events: Vec<AttackEvent>,
    pub seed: u64,
}

impl AttackSchedule {
    /// One event per line, `kind edge start duration`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for e in &self.events {
            s.push_str(&e.to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str, seed: u64) -> Result<Self, AdversaryError> {
        let events = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<AttackEvent>, _>>()?;
        Ok(Self { events, seed })
    }

    pub fn digest(&self) -> Digest {
        payload_digest(self.to_text().as_bytes())
    }

    pub fn active_at(&self, tick: u32) -> impl Iterator<Item = &AttackEvent> + '_ {
        self.events
            .iter()
            .take_while(move |e| e.start_tick <= tick)
            .filter(move |e| e.active_at(tick))
    }

    pub fn count(&self, kind: AttackKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }
}

/// Independent Bernoulli draw for every (tick, link, kind).
///
/// Each kind draws from its own stream, so enabling one kind never perturbs
/// the events of another.
pub fn schedule_attacks(t: &Topology, params: &ScheduleParams, seed: u64) -> Result<AttackSchedule, AdversaryError> {
    params.rates.validate()?;
    params.durations.validate()?;

    let pristine = t.pristine();
    let weights: Vec<f64> = match params.placement {
        Placement::Uniform => vec![1.0; t.edge_count()],
        Placement::CriticalityWeighted => {
            let crit: Vec<f64> = t
                .edges()
                .iter()
                .map(|e| pristine.edge_criticality(*e).map(|c| c as f64))
                .collect::<Result<_, _>>()?;
            let total: f64 = crit.iter().sum();
            if total == 0.0 {
                vec![0.0; crit.len()]
            } else {
                let scale = crit.len() as f64 / total;
                crit.into_iter().map(|c| c * scale).collect()
            }
        }
    };

    let mut events = Vec::new();
    for kind in AttackKind::ALL {
        let base = params.rates.get(kind);
        if base == 0.0 {
            continue;
        }
        let mut rng = rng::stream(seed, "attacks", &[kind as u64]);
        for tick in 0..params.ticks {
            for (e, w) in t.edges().iter().zip(&weights) {
                let p = (base * w).min(1.0);
                if rng.gen_bool(p) {
                    let duration = rng.gen_range(params.durations.min..=params.durations.max);
                    events.push(AttackEvent::new(kind, *e, tick, duration)?);
                }
            }
        }
    }
    events.sort_by_key(|e| (e.start_tick, e.kind, e.edge));
    Ok(AttackSchedule { events, seed })
}

/// Attacks active during one tick, applied to copies as they cross links.
#[derive(Debug, Clone)]
pub struct TickAttacks {
    by_edge: BTreeMap<Edge, Vec<AttackEvent>>,
    mode: CorruptionMode,
    tapped_copies: u64,
    rewrites: u64,
}

impl TickAttacks {
    pub fn new<'a>(active: impl IntoIterator<Item = &'a AttackEvent>, mode: CorruptionMode) -> Self {
        let mut by_edge: BTreeMap<Edge, Vec<AttackEvent>> = BTreeMap::new();
        for e in active {
            by_edge.entry(e.edge).or_default().push(*e);
        }
        Self {
            by_edge,
            mode,
            tapped_copies: 0,
            rewrites: 0,
        }
    }

    pub fn at(schedule: &AttackSchedule, tick: u32, mode: CorruptionMode) -> Self {
        Self::new(schedule.active_at(tick), mode)
    }

    pub fn severed_edges(&self) -> BTreeSet<Edge> {
        self.by_edge
            .iter()
            .filter(|(_, evs)| evs.iter().any(|e| e.kind == AttackKind::Sever))
            .map(|(e, _)| *e)
            .collect()
    }

    /// Copies that crossed at least one tapped link.
    pub fn tapped_copies(&self) -> u64 {
        self.tapped_copies
    }

    /// Individual payload rewrites performed.
    pub fn rewrites(&self) -> u64 {
        self.rewrites
    }
}

impl FaultHook for TickAttacks {
    fn carry(&mut self, copy: &mut Packet, path: &Path) -> CopyFate {
        let mut tapped = false;
        let mut fate = CopyFate::Delivered;
        'hops: for e in path.edges() {
            let Some(events) = self.by_edge.get(&e) else {
                continue;
            };
            if events.iter().any(|ev| ev.kind == AttackKind::Sever) {
                fate = CopyFate::Dropped;
                break 'hops;
            }
            for ev in events {
                match apply_attack(ev, AttackTarget::Copy(copy), self.mode).expect("copy targets never fail") {
                    Effect::Exposed => tapped = true,
                    Effect::Rewritten => self.rewrites += 1,
                    _ => {}
                }
            }
        }
        if tapped {
            self.tapped_copies += 1;
        }
        fate
    }
}
