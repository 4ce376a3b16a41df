use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::Serialize;

use crate::error::CliResult;

pub const MANIFEST_FILE: &str = "run.json";

/// Record of one CLI invocation, written next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub flags: serde_json::Value,
    pub seed: Option<u64>,
    pub started: DateTime<Utc>,
    pub finished: DateTime<Utc>,
    pub outputs: Vec<String>,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<serde_json::Value>,
}

/// Collects output files for a run rooted at one directory.
pub struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    pub fn new(dir: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    /// Registers `name` and returns its full path.
    pub fn path(&mut self, name: &str) -> PathBuf {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        self.dir.join(name)
    }

    pub fn csv_writer(&mut self, name: &str) -> CliResult<csv::Writer<BufWriter<File>>> {
        let path = self.path(name);
        Ok(csv::Writer::from_writer(BufWriter::new(File::create(path)?)))
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let path = self.path(name);
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, value)?;
        Ok(())
    }

    pub fn finish(
        mut self,
        subcommand: &str,
        flags: serde_json::Value,
        seed: Option<u64>,
        started: DateTime<Utc>,
        summary: Option<serde_json::Value>,
    ) -> CliResult<PathBuf> {
        self.files.push(MANIFEST_FILE.to_string());
        let manifest = RunManifest {
            subcommand: subcommand.to_string(),
            flags,
            seed,
            started,
            finished: Utc::now(),
            outputs: self.files.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            summary,
        };
        let path = self.dir.join(MANIFEST_FILE);
        let mut w = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut w, &manifest)?;
        Ok(path)
    }
}
