//! CSV emission with the stable schema: a `# space,time,quantity` comment
//! row, a column-name row, then data rows with floats at 17 significant
//! digits. Output is byte-reproducible for a fixed configuration.

use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{CliError, Result};

/// 17-significant-digit float form used everywhere in the outputs.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvFile {
    writer: BufWriter<std::fs::File>,
    path: String,
}

impl CsvFile {
    pub fn create(path: &Path, space: &str, time: f64, quantity: &str, columns: &[&str]) -> Result<Self> {
        let file = std::fs::File::create(path)
            .map_err(|e| CliError::io(&format!("create {}", path.display()), e))?;
        let mut writer = BufWriter::new(file);
        writeln!(writer, "# {space},{},{quantity}", fmt_float(time))
            .map_err(|e| CliError::io("write header", e))?;
        writeln!(writer, "{}", columns.join(","))
            .map_err(|e| CliError::io("write header", e))?;
        Ok(Self {
            writer,
            path: path.display().to_string(),
        })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        writeln!(self.writer, "{}", fields.join(","))
            .map_err(|e| CliError::io(&format!("write {}", self.path), e))
    }

    pub fn finish(mut self) -> Result<()> {
        self.writer
            .flush()
            .map_err(|e| CliError::io(&format!("flush {}", self.path), e))
    }
}
