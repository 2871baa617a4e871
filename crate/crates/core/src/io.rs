//! CSV series in fixed 12-significant-digit scientific notation.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::pde::PdeRunResult;
use crate::scalar::RunResult;

pub const SCALAR_HEADER: [&str; 2] = ["t", "u"];
pub const PDE_HEADER: [&str; 3] = ["t", "center", "l2"];

/// `1.23456789012e-3` style: 12 significant digits, `.` separator.
pub fn format_value(v: f64) -> String {
    format!("{v:.11e}")
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

fn write_columns<W: Write>(w: W, header: &[&str], columns: &[&[f64]]) -> Result<()> {
    let n = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::Parameter("columns have different lengths".into()));
    }
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    out.write_record(header).map_err(io_err)?;
    for i in 0..n {
        out.write_record(columns.iter().map(|c| format_value(c[i])))
            .map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

pub fn write_scalar_csv<W: Write>(result: &RunResult, w: W) -> Result<()> {
    write_columns(w, &SCALAR_HEADER, &[&result.times, &result.values])
}

pub fn write_pde_csv<W: Write>(result: &PdeRunResult, w: W) -> Result<()> {
    write_columns(w, &PDE_HEADER, &[&result.times, &result.center, &result.l2])
}

/// Generic two-column writer with a custom header.
pub fn write_pairs<W: Write>(w: W, header: [&str; 2], x: &[f64], y: &[f64]) -> Result<()> {
    write_columns(w, &header, &[x, y])
}

/// A numeric CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// Parses a header line followed by rows of finite numbers.
pub fn read_csv<R: Read>(r: R) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(|s| s.trim().to_string())
        .collect();
    if header.is_empty() || header.iter().any(|h| h.is_empty()) {
        return Err(Error::Parse {
            line: 1,
            message: "empty column name".into(),
        });
    }
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if rec.len() != header.len() {
            return Err(Error::Parse {
                line,
                message: format!("{} fields, expected {}", rec.len(), header.len()),
            });
        }
        let row = rec
            .iter()
            .map(|f| {
                let v: f64 = f.trim().parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("not a number: {f:?}"),
                })?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Parse {
                        line,
                        message: format!("non-finite value {f:?}"),
                    })
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}

/// Reads a `t,u` series.
pub fn read_series<R: Read>(r: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let table = read_csv(r)?;
    if table.header != SCALAR_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header t,u, got {}", table.header.join(",")),
        });
    }
    let t = table.column("t").unwrap_or_default();
    let u = table.column("u").unwrap_or_default();
    Ok((t, u))
}
