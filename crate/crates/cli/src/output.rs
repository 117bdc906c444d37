//! Artifact collection and atomic writes.

use crate::failure::Failure;
use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub fn sha256_hex(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Everything a command produces; nothing touches the disk until `commit`.
#[derive(Debug, Default)]
pub struct Run {
    pub command: String,
    pub hash: String,
    /// `# key value` lines shared by every file.
    pub meta: Vec<(String, String)>,
    pub files: Vec<(String, String)>,
    pub report: Vec<String>,
    /// Results that could not be settled; exit 4.
    pub flags: Vec<String>,
    /// Checks that failed outright; exit 3.
    pub failures: Vec<String>,
}

impl Run {
    pub fn new(command: &str, hash: String) -> Self {
        Self { command: command.into(), hash, ..Default::default() }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.into(), value.to_string()));
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.report.push(s.into());
    }

    pub fn flag(&mut self, s: impl Into<String>) {
        let s = s.into();
        self.report.push(format!("flagged: {s}"));
        self.flags.push(s);
    }

    pub fn fail(&mut self, s: impl Into<String>) {
        let s = s.into();
        self.report.push(format!("failed: {s}"));
        self.failures.push(s);
    }

    pub fn file(&mut self, name: &str, body: String) {
        self.files.push((name.into(), body));
    }

    pub fn exit_code(&self) -> i32 {
        if !self.failures.is_empty() {
            3
        } else if !self.flags.is_empty() {
            4
        } else {
            0
        }
    }

    fn header(&self) -> String {
        let mut s = format!("# torus-pencil {}\n# config sha256:{}\n", self.command, self.hash);
        for (k, v) in &self.meta {
            s.push_str(&format!("# {k}={v}\n"));
        }
        s
    }

    pub fn report_text(&self) -> String {
        let mut s = self.header();
        for l in &self.report {
            s.push_str(l);
            s.push('\n');
        }
        s
    }

    /// Writes every artifact plus `report.txt` into `dir`; returns the written paths.
    pub fn commit(&self, dir: &Path) -> Result<Vec<PathBuf>, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::config(format!("cannot create {}: {e}", dir.display())))?;
        let head = self.header();
        let mut written = Vec::new();
        for (name, body) in &self.files {
            written.push(write_atomic(dir, name, &format!("{head}{body}"))?);
        }
        written.push(write_atomic(dir, "report.txt", &self.report_text())?);
        Ok(written)
    }
}

/// Temp file in the target directory, then rename over the destination.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    let dest = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    let io = |e: std::io::Error| Failure::numerical(format!("writing {}: {e}", dest.display()));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(contents.as_bytes()).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, &dest).map_err(io)?;
    Ok(dest)
}
