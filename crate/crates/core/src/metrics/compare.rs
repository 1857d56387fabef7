use std::fmt::Write as _;

use super::{MetricsError, TrialMetrics};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    LowerIsBetter,
    HigherIsBetter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    PacketLoss,
    Retransmissions,
    CorruptUndetected,
    CorruptDetected,
    Lost,
    DeliveredClean,
    Availability,
    MeanConnectivity,
    TappedCopies,
    Degradations,
}

impl Metric {
    pub const ALL: [Metric; 10] = [
        Metric::PacketLoss,
        Metric::Retransmissions,
        Metric::CorruptUndetected,
        Metric::CorruptDetected,
        Metric::Lost,
        Metric::DeliveredClean,
        Metric::Availability,
        Metric::MeanConnectivity,
        Metric::TappedCopies,
        Metric::Degradations,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::PacketLoss => "packet_loss_copies",
            Metric::Retransmissions => "retransmissions",
            Metric::CorruptUndetected => "corrupt_undetected",
            Metric::CorruptDetected => "corrupt_detected",
            Metric::Lost => "lost",
            Metric::DeliveredClean => "delivered_clean",
            Metric::Availability => "availability",
            Metric::MeanConnectivity => "mean_connectivity",
            Metric::TappedCopies => "tapped_copies",
            Metric::Degradations => "degradations",
        }
    }

    pub fn polarity(self) -> Polarity {
        match self {
            Metric::CorruptDetected | Metric::DeliveredClean | Metric::Availability | Metric::MeanConnectivity => {
                Polarity::HigherIsBetter
            }
            _ => Polarity::LowerIsBetter,
        }
    }

    pub fn value(self, m: &TrialMetrics) -> f64 {
        match self {
            Metric::PacketLoss => m.packet_loss_copies as f64,
            Metric::Retransmissions => m.retransmissions as f64,
            Metric::CorruptUndetected => m.corrupt_undetected as f64,
            Metric::CorruptDetected => m.corrupt_detected as f64,
            Metric::Lost => m.lost as f64,
            Metric::DeliveredClean => m.delivered_clean as f64,
            Metric::Availability => m.availability,
            Metric::MeanConnectivity => m.mean_connectivity,
            Metric::TappedCopies => m.tapped_copies as f64,
            Metric::Degradations => m.degradations as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricComparison<S: Scalar = f64> {
    pub metric: Metric,
    pub baseline_mean: S,
    pub protocol_mean: S,
    /// `protocol_mean - baseline_mean`.
    pub delta: S,
    /// Percent change relative to the baseline mean, signed so that an
    /// improvement is positive. `None` when the baseline mean is zero.
    pub percent_change: Option<S>,
}

impl<S: Scalar> MetricComparison<S> {
    pub fn improved(&self) -> bool {
        self.percent_change.is_some_and(|p| p > S::zero())
    }

    pub fn worsened(&self) -> bool {
        self.percent_change.is_some_and(|p| p < S::zero())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport<S: Scalar = f64> {
    pub n_baseline: usize,
    pub n_protocol: usize,
    pub rows: Vec<MetricComparison<S>>,
}

impl<S: Scalar> ComparisonReport<S> {
    pub fn get(&self, metric: Metric) -> &MetricComparison<S> {
        self.rows
            .iter()
            .find(|r| r.metric == metric)
            .expect("every metric is compared")
    }

    /// Metrics that got worse under the protocol.
    pub fn regressions(&self) -> Vec<Metric> {
        self.rows.iter().filter(|r| r.worsened()).map(|r| r.metric).collect()
    }

    /// One line per metric, `metric: baseline=.. protocol=.. delta=.. change=..%`,
    /// followed by a `flag:` line for each regression.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n: baseline={} protocol={}", self.n_baseline, self.n_protocol);
        for r in &self.rows {
            let change = match r.percent_change {
                Some(p) => format!("{:.2}%", p.to_f64_lossy()),
                None => "undefined".to_string(),
            };
            let _ = writeln!(
                out,
                "{}: baseline={:.6} protocol={:.6} delta={:.6} change={}",
                r.metric.name(),
                r.baseline_mean.to_f64_lossy(),
                r.protocol_mean.to_f64_lossy(),
                r.delta.to_f64_lossy(),
                change
            );
        }
        for r in self.rows.iter().filter(|r| r.worsened()) {
            let _ = writeln!(out, "flag: {} worse under protocol", r.metric.name());
        }
        out
    }
}

fn mean<S: Scalar>(rows: &[TrialMetrics], metric: Metric) -> S {
    let sum: S = rows
        .iter()
        .map(|m| S::from_f64(metric.value(m)).unwrap_or_else(S::nan))
        .sum();
    sum / S::from_usize_lossy(rows.len())
}

pub fn compare<S: Scalar>(
    baseline: &[TrialMetrics],
    protocol: &[TrialMetrics],
) -> Result<ComparisonReport<S>, MetricsError> {
    if baseline.is_empty() {
        return Err(MetricsError::Empty("baseline"));
    }
    if protocol.is_empty() {
        return Err(MetricsError::Empty("protocol"));
    }
    let hundred = S::from_f64(100.0).expect("100 is representable");
    let rows = Metric::ALL
        .iter()
        .map(|&metric| {
            let b: S = mean(baseline, metric);
            let p: S = mean(protocol, metric);
            let delta = p - b;
            let percent_change = (b != S::zero()).then(|| {
                let raw = delta / b * hundred;
                match metric.polarity() {
                    Polarity::LowerIsBetter => -raw,
                    Polarity::HigherIsBetter => raw,
                }
            });
            MetricComparison {
                metric,
                baseline_mean: b,
                protocol_mean: p,
                delta,
                percent_change,
            }
        })
        .collect();
    Ok(ComparisonReport {
        n_baseline: baseline.len(),
        n_protocol: protocol.len(),
        rows,
    })
}
