//! JSON-lines records, one object per run.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use clqaoa_core::metrics::ArRecord;
use clqaoa_core::oracle::ExtremesMode;
use clqaoa_core::qaoa::QaoaRunRecord;
use clqaoa_core::SequenceState;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Renders a sequence as its `n^2`-bit one-hot string, character `t*n + i`
/// being bit `t*n + i`.
pub fn bit_string(seq: &SequenceState) -> String {
    seq.to_bits().iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// A QAOA, clustered-solver or failed run. Fields that do not apply are
/// omitted from the JSON.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Record {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis_value: Option<f64>,
    pub method: String,
    pub problem_id: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint: Option<String>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_star: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_cost: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_sequence: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tour: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_expectation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extremes_mode: Option<ExtremesMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_opt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_worst: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ar_exp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ar_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qaoa_calls: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aco_cost: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_ratio: Option<f64>,
    /// Mean time of one objective evaluation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub wall_ms: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Record {
    pub fn apply_qaoa(&mut self, run: &QaoaRunRecord, s: usize, s_star: usize) {
        let w = run.wall_times;
        self.method = "qaoa".into();
        self.p = Some(run.params.p());
        self.s = Some(s);
        self.s_star = Some(s_star);
        self.best_cost = Some(run.best_cost);
        self.best_sequence = Some(bit_string(&run.best_sequence));
        self.tour = Some(run.best_sequence.seq.clone());
        self.final_expectation = Some(run.final_expectation);
        self.iterations = Some(run.iterations_used);
        self.eval_ms = (run.iterations_used > 0).then(|| 1e3 * w.optimize / run.iterations_used as f64);
        self.wall_ms = BTreeMap::from([
            ("init".into(), 1e3 * w.init),
            ("optimize".into(), 1e3 * w.optimize),
            ("sample".into(), 1e3 * w.sample),
            ("total".into(), 1e3 * (w.init + w.optimize + w.sample)),
        ]);
    }

    pub fn apply_ratios(&mut self, ar: &ArRecord) {
        self.extremes_mode = Some(ar.extremes_mode);
        self.c_opt = Some(ar.c_opt);
        self.c_worst = Some(ar.c_worst);
        self.ar_exp = Some(ar.ar_exp);
        self.ar_min = Some(ar.ar_min);
    }

    /// Numeric metric by name, for aggregation.
    pub fn metric(&self, name: &str) -> Option<f64> {
        match name {
            "ar_min" => self.ar_min,
            "ar_exp" => self.ar_exp,
            "best_cost" => self.best_cost,
            "final_expectation" => self.final_expectation,
            "relative_ratio" => self.relative_ratio,
            "qaoa_calls" => self.qaoa_calls.map(|c| c as f64),
            "iterations" => self.iterations.map(|c| c as f64),
            "eval_ms" => self.eval_ms,
            _ => name.strip_prefix("wall_ms.").and_then(|k| self.wall_ms.get(k).copied()),
        }
    }
}

/// Output of the SA and ACO baselines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicRecord {
    pub method: String,
    pub n: usize,
    pub seed: u64,
    pub cost: f64,
    pub tour: Vec<usize>,
    pub wall_ms: f64,
}

pub fn write_json_line<W: Write, T: Serialize>(w: &mut W, value: &T) -> std::io::Result<()> {
    serde_json::to_writer(&mut *w, value)?;
    w.write_all(b"\n")
}

/// Reads records, reporting the line of any malformed one.
pub fn read_records<R: BufRead>(reader: R, path: &Path) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.into(),
            line: i + 1,
            column: e.column(),
            msg: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bits_follow_step_major_order() {
        assert_eq!(bit_string(&SequenceState::new(vec![1, 0])), "0110");
        assert_eq!(bit_string(&SequenceState::new(vec![2, 0, 1])), "001100010");
    }

    #[test]
    fn json_lines_round_trip() {
        let r = Record {
            cell: Some(3),
            method: "qaoa".into(),
            problem_id: "x".into(),
            n: 4,
            ar_min: Some(0.1 + 0.2),
            wall_ms: BTreeMap::from([("total".into(), 1.5)]),
            ..Record::default()
        };
        let mut buf = Vec::new();
        write_json_line(&mut buf, &r).unwrap();
        write_json_line(&mut buf, &r).unwrap();
        let back = read_records(buf.as_slice(), Path::new("r.jsonl")).unwrap();
        assert_eq!(back, vec![r.clone(), r]);
    }

    #[test]
    fn bad_line_is_located() {
        let text = "{\"method\":\"qaoa\",\"problem_id\":\"a\",\"n\":2,\"seed\":0}\n{oops}\n";
        match read_records(text.as_bytes(), Path::new("r.jsonl")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn metric_lookup() {
        let r = Record { wall_ms: BTreeMap::from([("optimize".into(), 2.0)]), qaoa_calls: Some(4), ..Record::default() };
        assert_eq!(r.metric("wall_ms.optimize"), Some(2.0));
        assert_eq!(r.metric("qaoa_calls"), Some(4.0));
        assert_eq!(r.metric("ar_min"), None);
    }
}
