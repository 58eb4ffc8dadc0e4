//! Tabular sweep records and their CSV/JSON export.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One row per grid point of a named parameter axis. The first column is the
/// axis itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub axis: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub meta: BTreeMap<String, serde_json::Value>,
}

impl SweepReport {
    pub fn new(axis: &str, columns: &[&str]) -> Self {
        let mut cols = vec![axis.to_string()];
        cols.extend(columns.iter().map(|c| c.to_string()));
        Self {
            axis: axis.into(),
            columns: cols,
            rows: Vec::new(),
            meta: BTreeMap::new(),
        }
    }

    /// Appends a row; the axis value must exceed the previous one.
    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Invariant(format!(
                "row has {} entries, report has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        if let Some(last) = self.rows.last() {
            if !(row[0] > last[0]) {
                return Err(Error::Invariant(format!(
                    "{} grid not strictly increasing: {} after {}",
                    self.axis, row[0], last[0]
                )));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn set_meta(&mut self, key: &str, value: impl Serialize) {
        self.meta.insert(
            key.into(),
            serde_json::to_value(value).unwrap_or(serde_json::Value::Null),
        );
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Vec<f64> {
        let i = self
            .column_index(name)
            .unwrap_or_else(|| panic!("report has no column '{name}'"));
        self.rows.iter().map(|r| r[i]).collect()
    }

    /// Largest value of `column` and the axis value where it occurs.
    pub fn max_of(&self, column: &str) -> Option<(f64, f64)> {
        let i = self.column_index(column)?;
        self.rows
            .iter()
            .map(|r| (r[i], r[0]))
            .fold(None, |best, (v, a)| match best {
                Some((bv, _)) if bv >= v => best,
                _ => Some((v, a)),
            })
    }

    /// `max / min` of a column over its positive entries.
    pub fn spread(&self, column: &str) -> f64 {
        let v: Vec<f64> = self.column(column).into_iter().filter(|x| *x > 0.0).collect();
        if v.is_empty() {
            return 0.0;
        }
        let max = v.iter().cloned().fold(f64::MIN, f64::max);
        let min = v.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }

    /// Every entry of every `ratio*` column is finite and nonnegative.
    pub fn check_ratios(&self) -> Result<()> {
        for (c, name) in self.columns.iter().enumerate() {
            if !name.starts_with("ratio") {
                continue;
            }
            for r in &self.rows {
                if !(r[c].is_finite() && r[c] >= 0.0) {
                    return Err(Error::Invariant(format!(
                        "{name} = {} at {} = {}",
                        r[c], self.axis, r[0]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for r in &self.rows {
            out.write_record(r.iter().map(|v| format!("{v:e}")))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    /// JSON summary: metadata plus the table.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Largest ratio over a corpus and a parameter grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub value: f64,
    /// Parameter value where the maximum is attained.
    pub witness: f64,
    pub corpus: Vec<String>,
}

impl ConstantEstimate {
    pub fn empty() -> Self {
        Self {
            value: 0.0,
            witness: f64::NAN,
            corpus: Vec::new(),
        }
    }

    /// Combines two estimates, keeping the larger value.
    pub fn merge(mut self, other: ConstantEstimate) -> Self {
        if other.value > self.value || self.witness.is_nan() {
            self.value = other.value;
            self.witness = other.witness;
        }
        self.corpus.extend(other.corpus);
        self
    }
}

pub fn write_json(value: &impl Serialize, path: impl AsRef<Path>) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_must_increase() {
        let mut r = SweepReport::new("beta", &["ratio"]);
        r.push(vec![0.1, 1.0]).unwrap();
        assert!(r.push(vec![0.1, 2.0]).is_err());
        assert!(r.push(vec![0.2]).is_err());
        r.push(vec![0.3, 4.0]).unwrap();
        assert_eq!(r.spread("ratio"), 4.0);
        assert_eq!(r.max_of("ratio"), Some((4.0, 0.3)));
    }

    #[test]
    fn csv_round_trips_values() {
        let mut r = SweepReport::new("t", &["lhs", "ratio"]);
        r.push(vec![0.5, 1.0 / 3.0, 2.0]).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(v, vec![0.5, 1.0 / 3.0, 2.0]);
    }

    #[test]
    fn bad_ratio_is_flagged() {
        let mut r = SweepReport::new("t", &["ratio"]);
        r.push(vec![1.0, f64::NAN]).unwrap();
        assert!(r.check_ratios().is_err());
    }
}
