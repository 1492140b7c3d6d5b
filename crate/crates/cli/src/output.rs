use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

/// Writes files into one directory, stamping each with the library version
/// and the config hash.
pub struct Output {
    dir: PathBuf,
    hash: String,
    seed: u64,
    files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    library: &'static str,
    version: &'static str,
    config_hash: &'a str,
    seed: u64,
    command: &'a str,
    data: T,
}

fn io(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

impl Output {
    pub fn new(dir: &Path, cfg: &RunConfig) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        Ok(Output { dir: dir.to_path_buf(), hash: cfg.hash(), seed: cfg.seed, files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.files
    }

    pub fn config_hash(&self) -> &str {
        &self.hash
    }

    pub fn json<T: Serialize>(&mut self, name: &str, command: &str, data: T) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let env = Envelope {
            library: "lipsmooth",
            version: lipsmooth::VERSION,
            config_hash: &self.hash,
            seed: self.seed,
            command,
            data,
        };
        let mut text = serde_json::to_string_pretty(&env).map_err(|e| io(&path, e))?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| io(&path, e))?;
        self.files.push(path);
        Ok(())
    }

    /// A `#` line with version and hash, then the header row and the rows.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|e| io(&path, e))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "# lipsmooth {} config_sha256={}", lipsmooth::VERSION, self.hash).map_err(|e| io(&path, e))?;
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(header).map_err(|e| io(&path, e))?;
        for row in rows {
            csv.write_record(row).map_err(|e| io(&path, e))?;
        }
        csv.flush().map_err(|e| io(&path, e))?;
        self.files.push(path);
        Ok(())
    }
}

/// Shortest round-trip formatting, identical across runs.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
