use super::MetricsError;
use crate::scalar::Scalar;

/// Five-number summary plus mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxStats<S: Scalar = f64> {
    pub min: S,
    pub q1: S,
    pub median: S,
    pub q3: S,
    pub max: S,
    pub mean: S,
    pub stddev: S,
}

// Linear interpolation between order statistics at position p*(n-1).
fn quantile<S: Scalar>(sorted: &[S], p: S) -> S {
    let pos = p * S::from_usize_lossy(sorted.len() - 1);
    let lo = pos.floor();
    let i = lo.to_usize().expect("position within bounds");
    if i + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    let frac = pos - lo;
    sorted[i] + (sorted[i + 1] - sorted[i]) * frac
}

pub fn box_stats<S: Scalar>(values: &[S]) -> Result<BoxStats<S>, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::Empty("box_stats"));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(MetricsError::NonFinite(bad.to_f64_lossy()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));

    let n = S::from_usize_lossy(sorted.len());
    let mean = sorted.iter().copied().sum::<S>() / n;
    let stddev = if sorted.len() < 2 {
        S::zero()
    } else {
        let ss: S = sorted.iter().map(|&v| (v - mean) * (v - mean)).sum();
        (ss / (n - S::one())).sqrt()
    };
    let q = |p: f64| quantile(&sorted, S::from_f64(p).expect("quartile position"));
    Ok(BoxStats {
        min: sorted[0],
        q1: q(0.25),
        median: q(0.5),
        q3: q(0.75),
        max: sorted[sorted.len() - 1],
        mean,
        stddev,
    })
}
