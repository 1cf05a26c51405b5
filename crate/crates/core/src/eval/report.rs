use std::collections::BTreeMap;
use std::fmt::Write;

use super::experiment::{median, MetricsRow, Outcome};

/// `min-max` to one decimal.
pub fn format_band(lo: f64, hi: f64) -> String {
    format!("{lo:.1}-{hi:.1}")
}

/// Plain-text table with one line per (method, area, m): the number of
/// runs, the per-point error band pooled over runs, and the pooled median.
pub fn compare_methods(rows: &[MetricsRow]) -> String {
    let mut groups: BTreeMap<(&str, &str, usize), (usize, usize, Vec<f64>)> = BTreeMap::new();
    for r in rows {
        let g = groups.entry((r.method.as_str(), r.area.as_str(), r.m)).or_default();
        match r.outcome {
            Outcome::Ok => {
                g.0 += 1;
                g.2.extend(&r.errors);
            }
            Outcome::SegmentationFailed => g.1 += 1,
        }
    }

    let header = ["method", "area (m)", "m", "runs", "failed", "error band (m)", "median (m)"];
    let mut table: Vec<[String; 7]> = vec![header.map(String::from)];
    for ((method, area, m), (runs, failed, errors)) in &groups {
        let (band, med) = if errors.is_empty() {
            ("n/a".to_string(), "n/a".to_string())
        } else {
            let lo = errors.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = errors.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (format_band(lo, hi), format!("{:.1}", median(errors).unwrap_or(0.0)))
        };
        table.push([
            method.to_string(),
            area.to_string(),
            m.to_string(),
            runs.to_string(),
            failed.to_string(),
            band,
            med,
        ]);
    }

    let widths: Vec<usize> = (0..7).map(|c| table.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for (i, r) in table.iter().enumerate() {
        let line: Vec<String> = r.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
        if i == 0 {
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            let _ = writeln!(out, "{}", rule.join("  "));
        }
    }
    out
}
