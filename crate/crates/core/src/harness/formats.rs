//! On-disk formats.
//!
//! Data CSV: header `x0,x1,...,x{D-1}`, one point per row, floats written with
//! 17 significant digits (`{:.16e}`), LF line endings. Truth and result files
//! are flat JSON objects with explicit `D` and `d` and row-major matrices.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::data::DataSet;
use crate::subspace::Subspace;

/// Formats a float with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn data_to_csv(data: &DataSet) -> String {
    let mut out = String::new();
    let header: Vec<String> = (0..data.dim()).map(|i| format!("x{i}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for p in data.iter() {
        let row: Vec<String> = p.iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parses a data CSV. The header row is required and fixes `D`.
pub fn data_from_csv(text: &str) -> Result<DataSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let dim = reader.headers().context("reading CSV header")?.len();
    if dim == 0 {
        bail!("CSV header is empty");
    }
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("CSV row {}", line + 2))?;
        if record.len() != dim {
            bail!("CSV row {} has {} fields, expected {dim}", line + 2, record.len());
        }
        let row = record
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .with_context(|| format!("CSV row {} is not numeric", line + 2))?;
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("CSV contains no data rows");
    }
    Ok(DataSet::from_rows(&rows)?)
}

pub fn read_data_csv(path: &Path) -> Result<DataSet> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    data_from_csv(&text).with_context(|| format!("parsing {}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthFile {
    #[serde(rename = "D")]
    pub ambient_dim: usize,
    #[serde(rename = "d")]
    pub subspace_dim: usize,
    /// `D x d`, row-major.
    pub basis: Vec<f64>,
}

impl TruthFile {
    pub fn from_subspace(s: &Subspace) -> Self {
        Self {
            ambient_dim: s.ambient_dim(),
            subspace_dim: s.dim(),
            basis: s.to_row_major(),
        }
    }

    pub fn to_subspace(&self) -> Result<Subspace> {
        Ok(Subspace::from_row_major(
            self.ambient_dim,
            self.subspace_dim,
            &self.basis,
        )?)
    }
}

pub fn read_truth(path: &Path) -> Result<Subspace> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let truth: TruthFile =
        serde_json::from_str(&text).with_context(|| format!("parsing truth file {}", path.display()))?;
    truth.to_subspace()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    #[serde(rename = "D")]
    pub ambient_dim: usize,
    #[serde(rename = "d")]
    pub subspace_dim: usize,
    /// `D x D`, row-major.
    pub sigma: Vec<f64>,
    /// One of `converged`, `max_iterations`, `breakdown`.
    pub termination: String,
    pub iterations: usize,
    pub objective: f64,
    /// `D x d`, row-major.
    pub basis: Vec<f64>,
    pub recovery_error: Option<f64>,
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Simple CSV table writer with a fixed header.
pub struct CsvTable {
    text: String,
    width: usize,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self {
            text,
            width: header.len(),
        }
    }

    pub fn push(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.width, "row width must match header");
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// Writes `contents` to each path, refusing to replace existing files unless
/// `force` is set. All paths are checked before anything is written.
pub fn write_outputs(files: &[(&Path, &str)], force: bool) -> Result<()> {
    if !force {
        for (path, _) in files {
            if path.exists() {
                bail!("{} already exists (use --force to overwrite)", path.display());
            }
        }
    }
    for (path, contents) in files {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        let mut f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        f.write_all(contents.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn csv_layout() {
        let data = DataSet::from_rows(&[[1.0, -0.5], [0.1, 2.0]]).unwrap();
        let text = data_to_csv(&data);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x0,x1"));
        assert_eq!(lines.next(), Some("1.0000000000000000e0,-5.0000000000000000e-1"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn malformed_csv_rejected() {
        assert!(data_from_csv("x0,x1\n1,2\n3\n").is_err());
        assert!(data_from_csv("x0,x1\n1,abc\n").is_err());
        assert!(data_from_csv("x0,x1\n").is_err());
        assert!(data_from_csv("x0,x1\n0,0\n").is_err());
    }

    #[test]
    fn truth_json_fields() {
        let s = Subspace::coordinate(3, 2).unwrap();
        let json = to_json_pretty(&TruthFile::from_subspace(&s)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["D"], 3);
        assert_eq!(v["d"], 2);
        assert_eq!(v["basis"].as_array().unwrap().len(), 6);
        let back: TruthFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_subspace().unwrap(), s);
    }

    #[test]
    fn write_outputs_respects_force() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        write_outputs(&[(&p, "one")], false).unwrap();
        assert!(write_outputs(&[(&p, "two")], false).is_err());
        assert_eq!(fs::read_to_string(&p).unwrap(), "one");
        write_outputs(&[(&p, "two")], true).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact(rows in proptest::collection::vec(
            proptest::collection::vec(-1e6f64..1e6, 3), 1..20)
        ) {
            prop_assume!(rows.iter().all(|r| r.iter().any(|&v| v != 0.0)));
            let data = DataSet::from_rows(&rows).unwrap();
            let back = data_from_csv(&data_to_csv(&data)).unwrap();
            prop_assert_eq!(back, data);
        }
    }
}
