//! CSV data and curve files: header `t,c0,c1,…`, one row per sample.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::manifold::{Manifold, Point};
use crate::model::io_error;

/// Time-stamped manifold data read from a CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct DataFile {
    pub times: Vec<f64>,
    pub points: Vec<Point>,
}

impl DataFile {
    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Point::dim)
    }

    /// Parses CSV text. Membership and monotonicity are checked by [`DataFile::validate`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| Error::InvalidInput(format!("cannot read CSV header: {e}")))?
            .clone();
        let k = header.len().saturating_sub(1);
        let expected: Vec<String> = std::iter::once("t".to_string())
            .chain((0..k).map(|i| format!("c{i}")))
            .collect();
        if k == 0 || header.iter().ne(expected.iter().map(String::as_str)) {
            return Err(Error::InvalidInput(format!(
                "CSV header must be `t,c0,...`, found `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut times = Vec::new();
        let mut points = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record =
                record.map_err(|e| Error::InvalidInput(format!("CSV row {}: {e}", row + 1)))?;
            let values = record
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| {
                            Error::InvalidInput(format!(
                                "CSV row {}: `{f}` is not a finite number",
                                row + 1
                            ))
                        })
                })
                .collect::<Result<Vec<f64>>>()?;
            times.push(values[0]);
            points.push(Point::new(values[1..].to_vec()));
        }
        Ok(DataFile { times, points })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        DataFile::parse(&text)
    }

    /// Checks row count, strictly increasing times and manifold membership.
    pub fn validate<M: Manifold>(&self, manifold: &M) -> Result<()> {
        if self.times.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least two data rows, found {}",
                self.times.len()
            )));
        }
        for (j, w) in self.times.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidInput(format!(
                    "times must be strictly increasing (rows {} and {})",
                    j + 1,
                    j + 2
                )));
            }
        }
        for (j, p) in self.points.iter().enumerate() {
            manifold
                .check_point(p)
                .map_err(|e| Error::InvalidInput(format!("row {}: {e}", j + 1)))?;
        }
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let rows = self
            .times
            .iter()
            .zip(&self.points)
            .map(|(t, p)| (*t, p.coords()));
        write_rows(path, self.dim(), rows)
    }
}

/// Writes `t,c0,…` rows with `\n` line endings.
pub fn write_rows<'a, I>(path: &Path, dim: usize, rows: I) -> Result<()>
where
    I: IntoIterator<Item = (f64, &'a [f64])>,
{
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut out = BufWriter::new(file);
    let mut header = String::from("t");
    for k in 0..dim {
        header.push_str(&format!(",c{k}"));
    }
    let write = || -> std::io::Result<()> {
        writeln!(out, "{header}")?;
        for (t, coords) in rows {
            write!(out, "{t}")?;
            for c in coords {
                write!(out, ",{c}")?;
            }
            writeln!(out)?;
        }
        out.flush()
    };
    write().map_err(|e| io_error(path, e))
}
