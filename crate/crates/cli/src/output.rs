//! Report directory handling and table rendering.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::{ConfigError, Format};

/// A report directory that is either new, empty, or explicitly allowed to
/// be overwritten.
pub struct ReportDir {
    root: PathBuf,
}

impl ReportDir {
    pub fn prepare(root: &Path, overwrite: bool) -> Result<ReportDir> {
        if root.exists() {
            let empty = root.is_dir() && fs::read_dir(root)?.next().is_none();
            if !empty && !overwrite {
                return Err(ConfigError(format!(
                    "report directory {} already exists; pass --overwrite or choose another --out",
                    root.display()
                ))
                .into());
            }
        }
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(ReportDir {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<()> {
        let path = self.path(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
    }

    pub fn write_json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<()> {
        self.write(name, &(serde_json::to_string_pretty(value)? + "\n"))
    }
}

/// Rows of strings with fixed headers, rendered as CSV or aligned text.
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: Vec<&'static str>) -> Table {
        Table {
            headers,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: Vec<&str>| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}", w = *w))
                .collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(self.headers.clone());
        for row in &self.rows {
            out += &line(row.iter().map(String::as_str).collect());
        }
        out
    }
}

/// Renders `table` (csv, text) or `json_value` (json) for stdout and the
/// summary file.
pub fn render<T: Serialize + ?Sized>(
    format: Format,
    table: &Table,
    json_value: &T,
) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(json_value)? + "\n",
        Format::Csv => table.to_csv()?,
        Format::Text => table.to_text(),
    })
}

/// Run metadata, kept apart from the reports so that those are identical
/// across runs of the same configuration.
#[derive(Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub args: Vec<String>,
    pub parallelism: usize,
    pub started_at: String,
    pub finished_at: String,
    pub exit_code: i32,
}

pub fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_csv_rendering() {
        let mut t = Table::new(vec!["N", "value"]);
        t.push(vec!["13".into(), "2523.19".into()]);
        t.push(vec!["9".into(), "a,b".into()]);
        assert_eq!(t.to_text(), " N    value\n13  2523.19\n 9      a,b\n");
        assert_eq!(t.to_csv().unwrap(), "N,value\n13,2523.19\n9,\"a,b\"\n");
    }

    #[test]
    fn existing_directory_needs_overwrite() {
        let dir = tempfile::tempdir().unwrap();
        ReportDir::prepare(dir.path(), false).unwrap();
        std::fs::write(dir.path().join("x"), "1").unwrap();
        assert!(ReportDir::prepare(dir.path(), false).is_err());
        ReportDir::prepare(dir.path(), true).unwrap();
    }
}
