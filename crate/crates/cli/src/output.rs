//! Output files stamped with the tool version and config hash.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use shell_rhs::hardy::fmt_f64;

use crate::config::RunConfig;

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SCHEMA_VERSION: u32 = 1;

pub struct Emitter {
    dir: PathBuf,
    command: &'static str,
    hash: String,
    written: Vec<PathBuf>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    tool: &'a str,
    tool_version: &'a str,
    config_sha256: &'a str,
    command: &'a str,
    result: &'a T,
}

impl Emitter {
    pub fn new(dir: &Path, command: &'static str, config: &RunConfig) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_owned(),
            command,
            hash: config.hash(),
            written: Vec::new(),
        })
    }

    pub fn header(&self) -> Vec<String> {
        vec![
            format!("{TOOL} {VERSION}"),
            format!("command: {}", self.command),
            format!("config-sha256: {}", self.hash),
        ]
    }

    fn create(&mut self, name: &str) -> std::io::Result<BufWriter<File>> {
        let path = self.dir.join(name);
        let file = File::create(&path)?;
        self.written.push(path);
        Ok(BufWriter::new(file))
    }

    /// Plain numeric table with `#` header lines.
    pub fn table(&mut self, name: &str, columns: &[&str], rows: &[Vec<f64>]) -> anyhow::Result<()> {
        let mut w = self.create(name)?;
        for line in self.header() {
            writeln!(w, "# {line}")?;
        }
        let mut out = csv::Writer::from_writer(w);
        out.write_record(columns)?;
        for row in rows {
            out.write_record(row.iter().map(|&x| fmt_f64(x)))?;
        }
        out.flush()?;
        Ok(())
    }

    /// Hands a writer and the header lines to a library CSV writer.
    pub fn with_csv<F>(&mut self, name: &str, write: F) -> anyhow::Result<()>
    where
        F: FnOnce(&mut BufWriter<File>, &[String]) -> shell_rhs::Result<()>,
    {
        let header = self.header();
        let mut w = self.create(name)?;
        write(&mut w, &header)?;
        w.flush()?;
        Ok(())
    }

    /// JSON document wrapped with the schema version, tool version and
    /// config hash.
    pub fn json<T: Serialize>(&mut self, name: &str, result: &T) -> anyhow::Result<()> {
        let hash = self.hash.clone();
        let envelope = Envelope {
            schema_version: SCHEMA_VERSION,
            tool: TOOL,
            tool_version: VERSION,
            config_sha256: &hash,
            command: self.command,
            result,
        };
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, &envelope)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}
