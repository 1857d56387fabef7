//! Per-trial counters, CSV persistence, baseline-vs-protocol comparison and
//! box-whisker summaries.

mod compare;
mod csv;
mod stats;

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use thiserror::Error;

pub use compare::{compare, ComparisonReport, Metric, MetricComparison, Polarity};
pub use csv::{parse_csv, to_csv_string, write_csv, CSV_HEADER};
pub use stats::{box_stats, BoxStats};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("no rows to write")]
    NoRows,
    #[error("{0} input is empty")]
    Empty(&'static str),
    #[error("value {0} is not finite")]
    NonFinite(f64),
    #[error("csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Baseline,
    Protocol,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Baseline => "baseline",
            Mode::Protocol => "protocol",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "baseline" => Ok(Mode::Baseline),
            "protocol" => Ok(Mode::Protocol),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

/// Rounds to the 6 decimal places the CSV carries, so stored fractions
/// survive a write/parse cycle unchanged.
pub fn quantize(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialMetrics {
    pub trial_index: u32,
    pub mode: Mode,
    pub messages_attempted: u64,
    pub delivered_clean: u64,
    pub corrupt_detected: u64,
    pub corrupt_undetected: u64,
    pub lost: u64,
    /// Individual copies dropped.
    pub packet_loss_copies: u64,
    pub retransmissions: u64,
    /// Share of messages delivered after retries.
    pub availability: f64,
    /// Graph connectivity averaged over ticks.
    pub mean_connectivity: f64,
    pub tapped_copies: u64,
    /// Protected sends that fell back to a single copy.
    pub degradations: u64,
}

impl TrialMetrics {
    /// Exact delivered share, `(attempted - lost) / attempted`.
    pub fn availability_ratio(&self) -> Ratio<u64> {
        if self.messages_attempted == 0 {
            return Ratio::from_integer(1);
        }
        Ratio::new(self.messages_attempted - self.lost, self.messages_attempted)
    }

    pub fn availability_from_counts(&self) -> f64 {
        let r = self.availability_ratio();
        quantize(*r.numer() as f64 / *r.denom() as f64)
    }

    /// Classification sum and availability formula.
    pub fn check_invariants(&self) -> Result<(), String> {
        let sum = self.delivered_clean + self.corrupt_detected + self.corrupt_undetected + self.lost;
        if sum != self.messages_attempted {
            return Err(format!(
                "trial {} {}: classifications sum to {sum}, attempted {}",
                self.trial_index, self.mode, self.messages_attempted
            ));
        }
        if self.availability != self.availability_from_counts() {
            return Err(format!(
                "trial {} {}: availability {} != {}",
                self.trial_index,
                self.mode,
                self.availability,
                self.availability_from_counts()
            ));
        }
        for (name, v) in [
            ("availability", self.availability),
            ("mean_connectivity", self.mean_connectivity),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(format!(
                    "trial {} {}: {name} {v} outside [0, 1]",
                    self.trial_index, self.mode
                ));
            }
        }
        Ok(())
    }
}
