use std::path::Path;

use anyhow::{bail, Context};
use serde_json::Value;
use thn_core::scalar::parse_rational;
use thn_core::{Matrix, Rational};

/// Contents of a `{"n": .., "matrix": [[..], ..]}` file. Entries may be JSON
/// numbers or `"p/q"` strings; both are read exactly.
#[derive(Clone, Debug)]
pub struct MetricFile {
    pub n: usize,
    pub matrix: Matrix<Rational>,
}

pub fn read_metric(path: &Path) -> anyhow::Result<MetricFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_metric(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn parse_metric(text: &str) -> anyhow::Result<MetricFile> {
    let v: Value = serde_json::from_str(text)?;
    let n = v.get("n").and_then(Value::as_u64).context("missing integer field n")? as usize;
    if n < 1 {
        bail!("n must be at least 1");
    }
    let rows = v.get("matrix").and_then(Value::as_array).context("missing array field matrix")?;
    let dim = 4 * n + 2;
    if rows.len() != dim {
        bail!("matrix has {} rows, expected {dim}", rows.len());
    }
    let mut parsed = Vec::with_capacity(dim);
    for (r, row) in rows.iter().enumerate() {
        let row = row.as_array().with_context(|| format!("row {} is not an array", r + 1))?;
        if row.len() != dim {
            bail!("row {} has {} entries, expected {dim}", r + 1, row.len());
        }
        let entries = row.iter().map(entry).collect::<anyhow::Result<Vec<_>>>().with_context(|| format!("row {}", r + 1))?;
        parsed.push(entries);
    }
    let matrix = Matrix::from_rows(&parsed)?;
    if !matrix.is_symmetric(0.0) {
        bail!("matrix is not symmetric");
    }
    Ok(MetricFile { n, matrix })
}

fn entry(v: &Value) -> anyhow::Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s).with_context(|| format!("bad rational {s:?}")),
        Value::Number(x) => match parse_rational(&x.to_string()) {
            Some(r) => Ok(r),
            None => x.as_f64().and_then(Rational::from_float).with_context(|| format!("bad number {x}")),
        },
        other => bail!("unexpected entry {other}"),
    }
}
