use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::args::Format;

/// Output directory plus the table format for the primary result.
pub struct Sink {
    pub dir: PathBuf,
    pub format: Format,
}

impl Sink {
    pub fn new(dir: PathBuf, format: Format) -> Result<Self> {
        fs::create_dir_all(&dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Self { dir, format })
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.dir.join(rel)
    }

    /// Writes through a sibling temp file and renames it into place.
    pub fn write_with(&self, rel: &str, fill: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<PathBuf> {
        let dest = self.path(rel);
        if let Some(parent) = dest.parent() {
            fs::create_dir_all(parent)?;
        }
        let mut buf = Vec::new();
        fill(&mut buf)?;
        atomic_write(&dest, &buf)?;
        Ok(dest)
    }

    pub fn json<T: Serialize>(&self, rel: &str, value: &T) -> Result<PathBuf> {
        self.write_with(rel, |buf| {
            serde_json::to_writer_pretty(&mut *buf, value)?;
            buf.push(b'\n');
            Ok(())
        })
    }

    /// The command summary as `<stem>.json` or a flattened `<stem>.csv`.
    pub fn summary(&self, stem: &str, value: &Value) -> Result<PathBuf> {
        match self.format {
            Format::Json => self.json(&format!("{stem}.json"), value),
            Format::Csv => self.write_with(&format!("{stem}.csv"), |buf| {
                let mut w = csv::Writer::from_writer(buf);
                w.write_record(["key", "value"])?;
                let mut rows = Vec::new();
                flatten("", value, &mut rows);
                for (k, v) in rows {
                    w.write_record([k, v])?;
                }
                w.flush()?;
                Ok(())
            }),
        }
    }
}

fn atomic_write(dest: &Path, bytes: &[u8]) -> Result<()> {
    let name = dest.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dest.with_file_name(format!(".{name}.tmp-{}", std::process::id()));
    let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
    f.write_all(bytes)?;
    f.sync_all()?;
    drop(f);
    fs::rename(&tmp, dest).with_context(|| format!("renaming into {}", dest.display()))?;
    Ok(())
}

/// Dotted-path rows for every scalar leaf of `v`.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}
