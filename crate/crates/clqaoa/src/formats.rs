//! Cost matrix and constraint files.
//!
//! Matrices are JSON `{"n": 3, "matrix": [[...], ...]}` or headerless CSV
//! rows. Constraints are JSON with optional `bnc` (one 0/1 per city), `road`
//! and `time` (n x n of 0/1) and a `lambda` object of weight overrides.
//! Reals are written in shortest round-trip form, so save/load is lossless.

use std::fs;
use std::path::Path;

use clqaoa_core::{ConstraintSet, CostMatrix, PenaltyWeights};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    n: usize,
    matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bnc: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    road: Option<Vec<Vec<u8>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    time: Option<Vec<Vec<u8>>>,
    #[serde(default, skip_serializing_if = "is_default_weights")]
    lambda: PenaltyWeights,
}

fn is_default_weights(w: &PenaltyWeights) -> bool {
    *w == PenaltyWeights::default()
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn matrix_to_json(m: &CostMatrix) -> String {
    let file = MatrixFile { n: m.n(), matrix: m.rows() };
    let mut s = serde_json::to_string(&file).expect("finite reals serialize");
    s.push('\n');
    s
}

pub fn matrix_to_csv(m: &CostMatrix) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for row in m.rows() {
        w.serialize(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// `path` only labels errors.
pub fn parse_matrix_json(text: &str, path: &Path) -> Result<CostMatrix> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| Error::json(path, e))?;
    if file.matrix.len() != file.n {
        return Err(Error::field(path, "matrix", format!("expected {} rows, got {}", file.n, file.matrix.len())));
    }
    for (i, row) in file.matrix.iter().enumerate() {
        if row.len() != file.n {
            return Err(Error::field(
                path,
                format!("matrix[{i}]"),
                format!("expected {} entries, got {}", file.n, row.len()),
            ));
        }
    }
    CostMatrix::from_rows(&file.matrix).map_err(|e| Error::field(path, "matrix", e.to_string()))
}

pub fn parse_matrix_csv(text: &str, path: &Path) -> Result<CostMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::Parse { path: path.into(), line, column: 0, msg: e.to_string() }
        })?;
        let line = rec.position().map_or(rows.len() + 1, |p| p.line() as usize);
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, f)| {
                f.parse::<f64>().map_err(|e| Error::Parse {
                    path: path.into(),
                    line,
                    column: j + 1,
                    msg: format!("field {}: {f:?}: {e}", j + 1),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::Parse {
            path: path.into(),
            line: i + 1,
            column: 0,
            msg: format!("expected {n} fields, got {}", row.len()),
        });
    }
    CostMatrix::from_rows(&rows).map_err(|e| Error::field(path, "matrix", e.to_string()))
}

/// Dispatches on the extension: `.csv` or JSON otherwise.
pub fn read_matrix(path: &Path) -> Result<CostMatrix> {
    let text = read_text(path)?;
    if is_csv(path) {
        parse_matrix_csv(&text, path)
    } else {
        parse_matrix_json(&text, path)
    }
}

pub fn write_matrix(path: &Path, m: &CostMatrix) -> Result<()> {
    let text = if is_csv(path) { matrix_to_csv(m) } else { matrix_to_json(m) };
    write_text(path, &text)
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn flags(v: &[bool]) -> Vec<u8> {
    v.iter().map(|&b| b as u8).collect()
}

fn square(v: &[bool], n: usize) -> Vec<Vec<u8>> {
    v.chunks(n.max(1)).map(flags).collect()
}

pub fn constraints_to_json(c: &ConstraintSet, n: usize) -> String {
    let file = ConstraintFile {
        bnc: c.bnc.as_deref().map(flags),
        road: c.road.as_deref().map(|r| square(r, n)),
        time: c.time.as_deref().map(|t| square(t, n)),
        lambda: c.weights,
    };
    let mut s = serde_json::to_string(&file).expect("finite reals serialize");
    s.push('\n');
    s
}

fn parse_flags(v: &[u8], path: &Path, field: &str) -> Result<Vec<bool>> {
    v.iter()
        .enumerate()
        .map(|(i, &b)| match b {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(Error::field(path, format!("{field}[{i}]"), format!("expected 0 or 1, got {b}"))),
        })
        .collect()
}

fn parse_square(rows: &[Vec<u8>], n: usize, path: &Path, field: &str) -> Result<Vec<bool>> {
    if rows.len() != n {
        return Err(Error::field(path, field, format!("expected {n} rows, got {}", rows.len())));
    }
    let mut out = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let name = format!("{field}[{i}]");
        if row.len() != n {
            return Err(Error::field(path, name, format!("expected {n} entries, got {}", row.len())));
        }
        out.extend(parse_flags(row, path, &name)?);
    }
    Ok(out)
}

/// Parses and validates a constraint file for an `n`-city instance.
pub fn parse_constraints(text: &str, n: usize, path: &Path) -> Result<ConstraintSet> {
    let file: ConstraintFile = serde_json::from_str(text).map_err(|e| Error::json(path, e))?;
    let mut c = ConstraintSet::none().with_weights(file.lambda);
    if let Some(k) = &file.bnc {
        if k.len() != n {
            return Err(Error::field(path, "bnc", format!("expected {n} entries, got {}", k.len())));
        }
        c = c.with_bnc(parse_flags(k, path, "bnc")?);
    }
    if let Some(r) = &file.road {
        c = c.with_road(parse_square(r, n, path, "road")?);
    }
    if let Some(t) = &file.time {
        c = c.with_time(parse_square(t, n, path, "time")?);
    }
    c.validate(n).map_err(|e| Error::field(path, "constraints", e.to_string()))?;
    Ok(c)
}

pub fn read_constraints(path: &Path, n: usize) -> Result<ConstraintSet> {
    parse_constraints(&read_text(path)?, n, path)
}

pub fn write_constraints(path: &Path, c: &ConstraintSet, n: usize) -> Result<()> {
    write_text(path, &constraints_to_json(c, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clqaoa_core::instances::{gen_constraints, gen_synthetic, ConstraintKind};
    use clqaoa_core::rng::rng_from_seed;

    fn p() -> &'static Path {
        Path::new("m.json")
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let mut rng = rng_from_seed(3);
        for n in 2..8 {
            let m = gen_synthetic(n, &mut rng).unwrap();
            let back = parse_matrix_json(&matrix_to_json(&m), p()).unwrap();
            let a: Vec<u64> = m.as_slice().iter().map(|x| x.to_bits()).collect();
            let b: Vec<u64> = back.as_slice().iter().map(|x| x.to_bits()).collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let m = CostMatrix::from_rows(&[vec![0.0, 0.1 + 0.2, 1e-300], vec![7.2, 0.0, 1.0 / 3.0], vec![2.5e10, 9.0, 0.0]])
            .unwrap();
        let back = parse_matrix_csv(&matrix_to_csv(&m), Path::new("m.csv")).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn constraint_round_trip() {
        let mut rng = rng_from_seed(5);
        for kind in ConstraintKind::ALL {
            let mut c = gen_constraints(kind, 5, &mut rng).unwrap();
            c.weights.t = Some(0.1 + 0.2);
            let back = parse_constraints(&constraints_to_json(&c, 5), 5, p()).unwrap();
            assert_eq!(c, back);
        }
    }

    #[test]
    fn row_length_error_names_the_row() {
        let err = parse_matrix_json(r#"{"n": 2, "matrix": [[0, 1], [2]]}"#, p()).unwrap_err();
        assert!(err.to_string().contains("matrix[1]"), "{err}");
    }

    #[test]
    fn syntax_error_has_line() {
        let err = parse_matrix_json("{\"n\": 2,\n \"matrix\": [[0, 1], [2, 0]],,}", p()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn csv_bad_field_has_line_and_column() {
        let err = parse_matrix_csv("0,1,2\n3,0,x\n1,1,0\n", Path::new("m.csv")).unwrap_err();
        match err {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (2, 3)),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn non_binary_flag_is_rejected() {
        let err = parse_constraints(r#"{"bnc": [0, 2]}"#, 2, p()).unwrap_err();
        assert!(err.to_string().contains("bnc[1]"), "{err}");
    }

    #[test]
    fn road_diagonal_is_rejected() {
        let err = parse_constraints(r#"{"road": [[1, 0], [0, 0]]}"#, 2, p()).unwrap_err();
        assert!(matches!(err, Error::Field { .. }), "{err}");
    }
}
