//! Run manifests and file writers.

use crate::CliError;
use serde_json::{json, Value};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use trapcool::params::PhysParams;
use trapcool::timeseries::{fmt_f64, write_json_17, TimeSeries};

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Numerical(format!("cannot create {}: {e}", dir.display())))
}

/// Collects output paths for a run and writes the closing manifest.
pub struct RunWriter {
    dir: PathBuf,
    stem: String,
    outputs: Vec<String>,
}

impl RunWriter {
    pub fn new(dir: &Path, stem: &str) -> Result<Self, CliError> {
        ensure_dir(dir)?;
        Ok(Self { dir: dir.to_path_buf(), stem: stem.to_string(), outputs: Vec::new() })
    }

    pub fn manifest_name(&self) -> String {
        format!("{}-manifest.json", self.stem)
    }

    fn open(&mut self, name: &str) -> Result<BufWriter<File>, CliError> {
        let path = self.dir.join(name);
        let f = File::create(&path)
            .map_err(|e| CliError::Numerical(format!("cannot write {}: {e}", path.display())))?;
        self.outputs.push(name.to_string());
        Ok(BufWriter::new(f))
    }

    pub fn write_series(&mut self, name: &str, ts: &TimeSeries) -> Result<(), CliError> {
        let csv = self.open(&format!("{name}.csv"))?;
        ts.write_csv(csv).map_err(|e| CliError::Numerical(e.to_string()))?;
        let mut doc = ts.to_json_value();
        doc["manifest"] = Value::String(self.manifest_name());
        let json = self.open(&format!("{name}.json"))?;
        write_json_17(json, &doc).map_err(|e| CliError::Numerical(e.to_string()))?;
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, mut doc: Value) -> Result<(), CliError> {
        doc["manifest"] = Value::String(self.manifest_name());
        let w = self.open(name)?;
        write_json_17(w, &doc).map_err(|e| CliError::Numerical(e.to_string()))
    }

    pub fn write_csv_rows(
        &mut self,
        name: &str,
        header: &[String],
        rows: &[Vec<f64>],
    ) -> Result<(), CliError> {
        let mut w = self.open(name)?;
        writeln!(w, "{}", header.join(",")).map_err(|e| CliError::Numerical(e.to_string()))?;
        for row in rows {
            let line = row.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(",");
            writeln!(w, "{line}").map_err(|e| CliError::Numerical(e.to_string()))?;
        }
        Ok(())
    }

    /// Writes `<stem>-manifest.json` listing every file produced so far.
    pub fn finish(
        self,
        command: &str,
        params: &PhysParams,
        notes: Value,
    ) -> Result<PathBuf, CliError> {
        let manifest = json!({
            "command": command,
            "params": params,
            "seeds": Value::Null,
            "code_version": env!("CARGO_PKG_VERSION"),
            "timestamp": chrono::Utc::now().to_rfc3339(),
            "outputs": self.outputs,
            "notes": notes,
        });
        let path = self.dir.join(self.manifest_name());
        let f = File::create(&path)
            .map_err(|e| CliError::Numerical(format!("cannot write {}: {e}", path.display())))?;
        write_json_17(BufWriter::new(f), &manifest)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        Ok(path)
    }
}
