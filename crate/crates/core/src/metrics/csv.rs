use std::path::Path;

use super::{MetricsError, TrialMetrics};

pub const CSV_HEADER: &str = "trial_index,mode,messages_attempted,delivered_clean,corrupt_detected,corrupt_undetected,lost,packet_loss_copies,retransmissions,availability,mean_connectivity,tapped_copies,degradations";

fn row(m: &TrialMetrics) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{:.6},{:.6},{},{}",
        m.trial_index,
        m.mode,
        m.messages_attempted,
        m.delivered_clean,
        m.corrupt_detected,
        m.corrupt_undetected,
        m.lost,
        m.packet_loss_copies,
        m.retransmissions,
        m.availability,
        m.mean_connectivity,
        m.tapped_copies,
        m.degradations,
    )
}

pub fn to_csv_string(rows: &[TrialMetrics]) -> Result<String, MetricsError> {
    if rows.is_empty() {
        return Err(MetricsError::NoRows);
    }
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for m in rows {
        out.push_str(&row(m));
        out.push('\n');
    }
    Ok(out)
}

pub fn write_csv(rows: &[TrialMetrics], dest: &Path) -> Result<(), MetricsError> {
    let text = to_csv_string(rows)?;
    std::fs::write(dest, text).map_err(|source| MetricsError::Io {
        path: dest.display().to_string(),
        source,
    })
}

pub fn parse_csv(text: &str) -> Result<Vec<TrialMetrics>, MetricsError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => {
            return Err(MetricsError::Csv {
                line: 1,
                msg: "missing or unexpected header".into(),
            })
        }
    }
    lines
        .map(|(i, l)| parse_row(l).map_err(|msg| MetricsError::Csv { line: i + 1, msg }))
        .collect()
}

fn parse_row(line: &str) -> Result<TrialMetrics, String> {
    let f: Vec<&str> = line.split(',').collect();
    if f.len() != 13 {
        return Err(format!("expected 13 fields, got {}", f.len()));
    }
    fn int<T: std::str::FromStr>(s: &str) -> Result<T, String>
    where
        T::Err: std::fmt::Display,
    {
        s.parse().map_err(|e| format!("{s:?}: {e}"))
    }
    let frac = |s: &str| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
    Ok(TrialMetrics {
        trial_index: int(f[0])?,
        mode: f[1].parse()?,
        messages_attempted: int(f[2])?,
        delivered_clean: int(f[3])?,
        corrupt_detected: int(f[4])?,
        corrupt_undetected: int(f[5])?,
        lost: int(f[6])?,
        packet_loss_copies: int(f[7])?,
        retransmissions: int(f[8])?,
        availability: frac(f[9])?,
        mean_connectivity: frac(f[10])?,
        tapped_copies: int(f[11])?,
        degradations: int(f[12])?,
    })
}
