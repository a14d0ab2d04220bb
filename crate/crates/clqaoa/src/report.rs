//! Aggregation of run records into plot-ready CSV tables.

use std::collections::BTreeMap;
use std::io::Write;

use clqaoa_core::metrics::{mean, median, std_err_median};
use serde::Serialize;

use crate::records::Record;

pub const DEFAULT_METRICS: [&str; 8] = [
    "ar_min",
    "ar_exp",
    "best_cost",
    "relative_ratio",
    "qaoa_calls",
    "eval_ms",
    "wall_ms.total",
    "iterations",
];

/// One group of runs sharing every key and the axis value. `std_err` is the
/// standard error of the median.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub axis: String,
    pub method: String,
    pub backend: String,
    pub constraint: String,
    pub n: usize,
    pub metric: String,
    pub axis_value: Option<f64>,
    pub mean: f64,
    pub median: f64,
    pub std_err: f64,
    pub count: usize,
    pub failures: usize,
}

type Key = (String, String, String, String, usize, u64);

fn key(r: &Record) -> Key {
    (
        r.axis.clone().unwrap_or_default(),
        r.method.clone(),
        r.backend.clone().unwrap_or_default(),
        r.constraint.clone().unwrap_or_default(),
        r.n,
        // Sorts nonnegative reals numerically; records without a value come last.
        r.axis_value.map_or(u64::MAX, f64::to_bits),
    )
}

/// Rows sorted by group keys, axis value, then metric order.
pub fn summarize(records: &[Record], metrics: &[&str]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<Key, Vec<&Record>> = BTreeMap::new();
    for r in records {
        groups.entry(key(r)).or_default().push(r);
    }
    let mut rows = Vec::new();
    for ((axis, method, backend, constraint, n, _), group) in groups {
        let failures = group.iter().filter(|r| r.error.is_some()).count();
        for &metric in metrics {
            let values: Vec<f64> = group.iter().filter_map(|r| r.metric(metric)).collect();
            let (Some(m), Some(med)) = (mean(&values), median(&values)) else {
                continue;
            };
            rows.push(SummaryRow {
                axis: axis.clone(),
                method: method.clone(),
                backend: backend.clone(),
                constraint: constraint.clone(),
                n,
                metric: metric.to_owned(),
                axis_value: group[0].axis_value,
                mean: m,
                median: med,
                std_err: std_err_median(&values),
                count: values.len(),
                failures,
            });
        }
    }
    rows
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    if rows.is_empty() {
        out.write_record([
            "axis", "method", "backend", "constraint", "n", "metric", "axis_value", "mean", "median", "std_err",
            "count", "failures",
        ])?;
    }
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(value: f64, ar: f64) -> Record {
        Record {
            axis: Some("shots".into()),
            axis_value: Some(value),
            method: "qaoa".into(),
            n: 3,
            constraint: Some("none".into()),
            ar_min: Some(ar),
            ..Record::default()
        }
    }

    #[test]
    fn groups_by_axis_value_in_numeric_order() {
        let recs = vec![rec(100.0, 1.0), rec(10.0, 0.5), rec(10.0, 1.0), rec(100.0, 1.0)];
        let rows = summarize(&recs, &["ar_min"]);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].axis_value, Some(10.0));
        assert_eq!(rows[0].mean, 0.75);
        assert_eq!(rows[0].count, 2);
        assert_eq!(rows[1].mean, 1.0);
        assert_eq!(rows[1].std_err, 0.0);
    }

    #[test]
    fn failures_are_counted_not_averaged() {
        let mut bad = rec(10.0, 0.0);
        bad.ar_min = None;
        bad.error = Some("boom".into());
        let rows = summarize(&[rec(10.0, 1.0), bad], &["ar_min"]);
        assert_eq!((rows[0].count, rows[0].failures, rows[0].mean), (1, 1, 1.0));
    }

    #[test]
    fn csv_has_header() {
        let rows = summarize(&[rec(10.0, 1.0)], &["ar_min"]);
        let mut buf = Vec::new();
        write_summary_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "axis,method,backend,constraint,n,metric,axis_value,mean,median,std_err,count,failures"
        );
        assert_eq!(lines.next().unwrap(), "shots,qaoa,,none,3,ar_min,10.0,1.0,1.0,0.0,1,0");
    }
}
