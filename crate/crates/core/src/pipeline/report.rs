//! Per-n count tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::catalog::CatalogRecord;
use crate::error::{Error, Result};

/// Least-squares fit of `ln y = a + b x`.
fn log_linear_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.1 > 0.0).map(|&(x, y)| (x, y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let b = sxy / sxx;
    Some((my - b * mx, b))
}

/// CSV with one row per `n` up to `extrapolate_to` (or the largest `n` in
/// the catalog, if larger). `count` is data and is left empty where the
/// catalog has no records; the last two columns come from a log-linear
/// least-squares fit over the observed rows and are extrapolation only.
pub fn report_counts(records: &[CatalogRecord], extrapolate_to: usize) -> Result<String> {
    if records.is_empty() {
        return Err(Error::Precondition("catalog is empty".into()));
    }
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for r in records {
        *counts.entry(r.n).or_default() += 1;
    }
    let points: Vec<(f64, f64)> = counts.iter().map(|(&n, &c)| (n as f64, c as f64)).collect();
    let fit = log_linear_fit(&points);
    let last = extrapolate_to.max(*counts.keys().next_back().expect("nonempty"));
    let mut out = String::new();
    out.push_str("# count: records in the catalog (data)\n");
    out.push_str("# extrapolated_count, extrapolated_cumulative: log-linear least-squares fit, not data\n");
    out.push_str("n,count,extrapolated_count,extrapolated_cumulative\n");
    let mut cumulative = 0.0;
    for n in 1..=last {
        let count = counts.get(&n).map(|c| c.to_string()).unwrap_or_default();
        let (est, cum) = match fit {
            Some((a, b)) => {
                let e = (a + b * n as f64).exp();
                cumulative += e;
                (format!("{e:.3e}"), format!("{cumulative:.3e}"))
            }
            None => (String::new(), String::new()),
        };
        let _ = writeln!(out, "{n},{count},{est},{cum}");
    }
    Ok(out)
}
