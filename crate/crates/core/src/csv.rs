//! Minimal deterministic CSV writer with `#` comment lines.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

/// Formats a number with a fixed layout: plain decimals in `[1e-3, 1e6)`,
/// scientific notation outside it.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        "0".to_string()
    } else if !(1e-3..1e6).contains(&a) {
        format!("{v:.9e}")
    } else {
        format!("{v:.9}")
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            comments: Vec::new(),
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) -> &mut Self {
        self.comments.push(line.into());
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_layout() {
        assert_eq!(fmt_num(84.5), "84.500000000");
        assert_eq!(fmt_num(2.5e9), "2.500000000e9");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-1e-5), "-1.000000000e-5");
    }

    #[test]
    fn header_only_table() {
        let t = CsvTable::new(["x", "y"]);
        assert_eq!(t.render(), "x,y\n");
    }
}
