//! Budgeted choice of which non-critical packets get a parallel copy.
//!
//! Each candidate is scored by the summed risk of the links on its primary
//! route. The objective (total score of the chosen set) is modular, so taking
//! the highest scores first is optimal for any budget.

use std::collections::{BTreeMap, BTreeSet};

use super::packet::{IdempotencyKey, Packet};
use super::ProtocolError;
use crate::scalar::Scalar;
use crate::topology::{Edge, Path};

/// Per-link risk weights. Links without an explicit weight use the default.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskModel<S: Scalar = f64> {
    default: S,
    overrides: BTreeMap<Edge, S>,
}

impl<S: Scalar> Default for RiskModel<S> {
    fn default() -> Self {
        Self::uniform(S::one()).expect("unit weight is valid")
    }
}

fn check_weight<S: Scalar>(w: S) -> Result<S, ProtocolError> {
    if w.is_finite() && w >= S::zero() {
        Ok(w)
    } else {
        Err(ProtocolError::InvalidRisk(w.to_f64_lossy()))
    }
}

impl<S: Scalar> RiskModel<S> {
    pub fn uniform(weight: S) -> Result<Self, ProtocolError> {
        Ok(Self {
            default: check_weight(weight)?,
            overrides: BTreeMap::new(),
        })
    }

    pub fn zero() -> Self {
        Self {
            default: S::zero(),
            overrides: BTreeMap::new(),
        }
    }

    pub fn with_edge(mut self, e: Edge, weight: S) -> Result<Self, ProtocolError> {
        self.overrides.insert(e, check_weight(weight)?);
        Ok(self)
    }

    pub fn risk(&self, e: &Edge) -> S {
        self.overrides.get(e).copied().unwrap_or(self.default)
    }
}

/// Summed link risk along `primary_path`.
pub fn packet_risk<S: Scalar>(p: &Packet, primary_path: &Path, rm: &RiskModel<S>) -> S {
    debug_assert!(primary_path.src() == p.src && primary_path.dst() == p.dst);
    primary_path.edges().map(|e| rm.risk(&e)).sum()
}

/// Keys of the `budget` riskiest candidates; ties go to the smaller message id.
pub fn select_protected_subset<S: Scalar>(
    candidates: &[(Packet, Path)],
    budget: usize,
    rm: &RiskModel<S>,
) -> Result<BTreeSet<IdempotencyKey>, ProtocolError> {
    if let Some((p, _)) = candidates.iter().find(|(p, _)| p.critical) {
        return Err(ProtocolError::CriticalCandidate(p.key));
    }
    let mut scored: Vec<(S, IdempotencyKey)> = candidates
        .iter()
        .map(|(p, path)| (packet_risk(p, path, rm), p.key))
        .collect();
    // Weights are finite and non-negative, so the comparison is total.
    scored.sort_by(|(ra, ka), (rb, kb)| {
        rb.partial_cmp(ra)
            .expect("finite risk")
            .then(ka.message_id.cmp(&kb.message_id))
    });
    Ok(scored.into_iter().take(budget).map(|(_, k)| k).collect())
}
