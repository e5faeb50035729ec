use std::io::Write;
use std::path::Path;

use anyhow::Context;
use had2lin::Rational;
use serde_json::Value;
use tempfile::NamedTempFile;

use crate::Format;

/// What a command prints, and whether it counts as success.
pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub ok: bool,
}

impl Outcome {
    pub fn new(text: String, json: Value) -> Outcome {
        Outcome { text, json, ok: true }
    }

    pub fn print(&self, format: Format) {
        match format {
            Format::Text => print!("{}", self.text),
            Format::Json => println!("{}", serde_json::to_string_pretty(&self.json).expect("values serialise")),
        }
    }
}

pub fn frac(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Files staged next to their destinations and renamed into place together,
/// so a failed command leaves no partial output behind.
#[derive(Default)]
pub struct Staged {
    files: Vec<(NamedTempFile, std::path::PathBuf)>,
}

impl Staged {
    pub fn add(&mut self, path: &Path, contents: &str) -> anyhow::Result<()> {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = NamedTempFile::new_in(dir).with_context(|| format!("cannot write into {}", dir.display()))?;
        tmp.write_all(contents.as_bytes())?;
        tmp.flush()?;
        self.files.push((tmp, path.to_path_buf()));
        Ok(())
    }

    pub fn commit(self) -> anyhow::Result<()> {
        for (tmp, path) in self.files {
            tmp.persist(&path).with_context(|| format!("cannot create {}", path.display()))?;
        }
        Ok(())
    }
}

pub fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let mut s = Staged::default();
    s.add(path, contents)?;
    s.commit()
}

pub fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}
