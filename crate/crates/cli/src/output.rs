//! CSV emission and the output-file manifest.
//!
//! CSV format: header row, comma separator, LF line endings, values in
//! shortest round-trip decimal form (lossless for diffing); excluded
//! samples become empty fields.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// One emitted file as listed in the run report.
#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub rows: usize,
    pub sha256: String,
}

/// Accumulates written files and their checksums.
pub struct OutputWriter {
    directory: PathBuf,
    files: Vec<FileEntry>,
}

/// A CSV cell: excluded samples serialize as empty fields.
pub type Cell = Option<f64>;

impl OutputWriter {
    pub fn create(directory: &Path) -> Result<OutputWriter, CliError> {
        fs::create_dir_all(directory).map_err(|e| {
            CliError::Config(format!(
                "cannot create output directory {}: {e}",
                directory.display()
            ))
        })?;
        Ok(OutputWriter {
            directory: directory.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn directory(&self) -> &Path {
        &self.directory
    }

    /// Writes a CSV file with the given header (no trailing newline in
    /// `header`) and rows; records the file in the manifest.
    pub fn write_csv(
        &mut self,
        name: &str,
        header: &str,
        rows: impl Iterator<Item = Vec<Cell>>,
    ) -> Result<(), CliError> {
        let mut text = String::new();
        text.push_str(header);
        text.push('\n');
        let mut count = 0usize;
        for row in rows {
            let mut first = true;
            for cell in row {
                if !first {
                    text.push(',');
                }
                first = false;
                if let Some(v) = cell {
                    text.push_str(&format_value(v));
                }
            }
            text.push('\n');
            count += 1;
        }
        self.write_named(name, text.as_bytes(), count)
    }

    /// Writes pre-rendered bytes (used for the JSON report and resolved
    /// config) and records them.
    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let rows = bytes.iter().filter(|&&b| b == b'\n').count();
        self.write_named(name, bytes, rows)
    }

    fn write_named(&mut self, name: &str, bytes: &[u8], rows: usize) -> Result<(), CliError> {
        let path = self.directory.join(name);
        fs::write(&path, bytes)
            .map_err(|e| CliError::Numerical(format!("cannot write {}: {e}", path.display())))?;
        let mut hasher = Sha256::new();
        hasher.update(bytes);
        self.files.push(FileEntry {
            name: name.to_string(),
            rows,
            sha256: format!("{:x}", hasher.finalize()),
        });
        Ok(())
    }

    pub fn manifest(&self) -> &[FileEntry] {
        &self.files
    }
}

/// Shortest decimal rendering that round-trips to the same double.
pub fn format_value(v: f64) -> String {
    format!("{v}")
}

/// Lambda tag for file names, e.g. `V1_lambda_0.2.csv`.
pub fn lambda_tag(lambda: f64) -> String {
    format_value(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_is_lossless_and_handles_exclusions() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = OutputWriter::create(dir.path()).unwrap();
        let rows = vec![
            vec![Some(0.1), Some(1.0 / 3.0)],
            vec![Some(0.2), None],
            vec![Some(1e-300), Some(12345678.90123456789)],
        ];
        w.write_csv("t.csv", "z,v", rows.into_iter()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "z,v");
        assert_eq!(lines[2], "0.2,");
        // every numeric field parses back to the identical double
        let field = lines[1].split(',').nth(1).unwrap();
        assert_eq!(field.parse::<f64>().unwrap(), 1.0 / 3.0);
        let field = lines[3].split(',').nth(0).unwrap();
        assert_eq!(field.parse::<f64>().unwrap(), 1e-300);
        assert!(text.ends_with('\n'));
        assert!(!text.contains('\r'));
        assert_eq!(w.manifest()[0].rows, 3);
        assert_eq!(w.manifest()[0].name, "t.csv");
        assert_eq!(w.manifest()[0].sha256.len(), 64);
    }

    #[test]
    fn lambda_tags() {
        assert_eq!(lambda_tag(0.2), "0.2");
        assert_eq!(lambda_tag(1.0), "1");
        assert_eq!(lambda_tag(30.0), "30");
        assert_eq!(lambda_tag(1e6), "1000000");
    }
}
