//! Minimal CSV tables with a provenance comment line.
//!
//! Cells hold `Option<f64>`; `None` and non-finite values are written as
//! empty cells. Numbers use Rust's shortest round-trip formatting (`{:?}`), so the
//! output is byte-for-byte reproducible.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub comment: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl CsvTable {
    pub fn new(comment: impl Into<String>, headers: Vec<String>) -> Self {
        Self { comment: comment.into(), headers, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) -> Result<()> {
        if row.len() != self.headers.len() {
            return Err(Error::Dimension(format!("row of {} cells for {} columns", row.len(), self.headers.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Everything below the comment line.
    pub fn body(&self) -> String {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        writer.write_record(&self.headers).expect("write to memory");
        let mut cells = Vec::with_capacity(self.headers.len());
        for row in &self.rows {
            cells.clear();
            cells.extend(row.iter().map(|cell| match cell.filter(|x| x.is_finite()) {
                Some(x) => format!("{x:?}"),
                None => String::new(),
            }));
            writer.write_record(&cells).expect("write to memory");
        }
        let bytes = writer.into_inner().expect("flush to memory");
        String::from_utf8(bytes).expect("CSV output is UTF-8")
    }

    pub fn render(&self) -> String {
        format!("# {}\n{}", self.comment, self.body())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.render())?;
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.headers.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Replaces infinities and NaN by `None`.
pub fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}
