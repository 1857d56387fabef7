//! Paired runs: every trial index executes in both modes against the same
//! attack schedule; results are ordered by trial index.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::config::SimConfig;
use crate::metrics::{compare, write_csv, ComparisonReport, Mode, TrialMetrics};
use crate::protocol::{Simulation, TrialDiagnostics};
use crate::SimError;

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub baseline: Vec<TrialMetrics>,
    pub protocol: Vec<TrialMetrics>,
    /// `(baseline, protocol)` diagnostics per trial index.
    pub diagnostics: Vec<(TrialDiagnostics, TrialDiagnostics)>,
    pub report: ComparisonReport<f64>,
}

impl ExperimentOutput {
    /// Share of protocol-mode messages whose primary copy was rewritten in
    /// flight that also carried a parallel copy. `None` if nothing was hit.
    pub fn corrupted_dual_coverage(&self) -> Option<f64> {
        let (hit, dual) = self.diagnostics.iter().fold((0u64, 0u64), |(h, d), (_, p)| {
            (h + p.primary_corrupted, d + p.primary_corrupted_dual)
        });
        (hit > 0).then(|| dual as f64 / hit as f64)
    }

    /// Protocol-mode dual sends whose two routes shared a link.
    pub fn overlapping_paths(&self) -> u64 {
        self.diagnostics.iter().map(|(_, p)| p.overlapping_paths).sum()
    }

    pub fn key_violations(&self) -> u64 {
        self.diagnostics
            .iter()
            .map(|(b, p)| b.key_violations + p.key_violations)
            .sum()
    }
}

/// Runs `cfg.trials` paired trials and, if `out_dir` is given, writes
/// `baseline.csv`, `protocol.csv` and `report.txt` there.
pub fn run_experiment(cfg: &SimConfig, out_dir: Option<&Path>) -> Result<ExperimentOutput, SimError> {
    let sim = Simulation::new(cfg)?;
    let runs = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let b = sim.run_trial(Mode::Baseline, t)?;
            let p = sim.run_trial(Mode::Protocol, t)?;
            if b.diagnostics.schedule_digest != p.diagnostics.schedule_digest {
                return Err(SimError::Unpaired(t));
            }
            b.metrics.check_invariants().map_err(SimError::Invariant)?;
            p.metrics.check_invariants().map_err(SimError::Invariant)?;
            Ok((b, p))
        })
        .collect::<Result<Vec<_>, SimError>>()?;

    let mut out = ExperimentOutput {
        baseline: Vec::with_capacity(runs.len()),
        protocol: Vec::with_capacity(runs.len()),
        diagnostics: Vec::with_capacity(runs.len()),
        report: ComparisonReport {
            n_baseline: 0,
            n_protocol: 0,
            rows: Vec::new(),
        },
    };
    for (b, p) in runs {
        out.baseline.push(b.metrics);
        out.protocol.push(p.metrics);
        out.diagnostics.push((b.diagnostics, p.diagnostics));
    }
    out.report = compare(&out.baseline, &out.protocol)?;

    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|source| SimError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        write_csv(&out.baseline, &dir.join("baseline.csv"))?;
        write_csv(&out.protocol, &dir.join("protocol.csv"))?;
        let report = dir.join("report.txt");
        fs::write(&report, out.report.to_text()).map_err(|source| SimError::Io {
            path: report.display().to_string(),
            source,
        })?;
    }
    Ok(out)
}
