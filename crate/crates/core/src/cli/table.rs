//! Tabular output with fixed 12-significant-digit floats, written atomically.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde_json::{Map, Number, Value as Json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Missing,
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Rounds to 12 significant digits; `-0` becomes `0`.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Shortest decimal that round-trips the 12-digit rounding; exponent form
/// outside `1e-4 ≤ |x| < 1e15`.
pub fn fmt12(x: f64) -> String {
    let r = round12(x);
    if r != 0.0 && r.is_finite() && !(1e-4..1e15).contains(&r.abs()) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Int(v) => write!(out, "{v}").unwrap(),
                    Cell::Num(v) => out.push_str(&fmt12(*v)),
                    Cell::Missing => {}
                    Cell::Text(s) => out.push_str(s),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let records: Vec<Json> = self
            .rows
            .iter()
            .map(|row| {
                let mut record = Map::new();
                for (key, cell) in self.header.iter().zip(row) {
                    let value = match cell {
                        Cell::Int(v) => Json::from(*v),
                        Cell::Num(v) => Number::from_f64(round12(*v)).map_or(Json::Null, Json::Number),
                        Cell::Missing => Json::Null,
                        Cell::Text(s) => Json::from(s.as_str()),
                    };
                    record.insert(key.clone(), value);
                }
                Json::Object(record)
            })
            .collect();
        let mut out = serde_json::to_string_pretty(&records).expect("records serialize");
        out.push('\n');
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Writes `<dir>/<name>.<ext>` through a temporary file in the same
    /// directory, so readers never see a partial file.
    pub fn write(&self, dir: &Path, format: Format) -> std::io::Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.{}", self.name, format.extension()));
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(self.render(format).as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt12(1.0 - 1.2), "-0.2");
        assert_eq!(fmt12(std::f64::consts::SQRT_2), "1.41421356237");
        assert_eq!(fmt12(-0.0), "0");
        assert_eq!(fmt12(2e6), "2000000");
        assert_eq!(fmt12(3.0), "3");
        assert_eq!(fmt12(123456789012345.0), "123456789012000");
        assert_eq!(fmt12(-1.2229031828123e-16), "-1.22290318281e-16");
        assert_eq!(fmt12(2.5e15), "2.5e15");
        assert_eq!(fmt12(1e-4), "0.0001");
    }

    #[test]
    fn csv_and_json() {
        let mut t = Table::new("t", &["M", "E", "F", "labels"]);
        t.push(vec![1usize.into(), (-0.2000000000001).into(), None.into(), "0;1;2".to_string().into()]);
        assert_eq!(t.to_csv(), "M,E,F,labels\n1,-0.2,,0;1;2\n");
        let json: Json = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(json[0]["M"], 1);
        assert_eq!(json[0]["E"], -0.2);
        assert!(json[0]["F"].is_null());
        assert_eq!(json[0]["labels"], "0;1;2");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("x", &["a"]);
        t.push(vec![1usize.into()]);
        let p = t.write(dir.path(), Format::Csv).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "a\n1\n");
        t.push(vec![2usize.into()]);
        t.write(dir.path(), Format::Csv).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "a\n1\n2\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
