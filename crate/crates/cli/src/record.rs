//! Line-oriented run records: one `key = value` pair per line, nested keys
//! dotted (`params.lambda = 0.5`). Floats use Rust's shortest round-trip
//! formatting, so parsing a record back yields the same bits.

use std::fmt::Display;
use std::path::Path;

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunRecord {
    entries: Vec<(String, String)>,
}

impl RunRecord {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `key`, replacing an earlier value in place.
    pub fn set(&mut self, key: &str, value: impl Display) {
        assert!(
            !key.is_empty() && !key.contains(['=', '\n', ' ']),
            "bad record key {key:?}"
        );
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Parses a stored value, e.g. `record.parse::<f64>("result.objective")`.
    pub fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::error::Error + Send + Sync + 'static,
    {
        let raw = self.get(key).with_context(|| format!("missing key {key}"))?;
        raw.parse()
            .with_context(|| format!("bad value {raw:?} for {key}"))
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&escape(v));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut rec = RunRecord::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once(" = ") else {
                bail!("line {}: expected `key = value`", i + 1);
            };
            rec.entries.push((k.to_string(), unescape(v)));
        }
        Ok(rec)
    }

    /// Drops keys that legitimately differ between identical runs.
    pub fn without_timings(&self) -> Self {
        RunRecord {
            entries: self
                .entries
                .iter()
                .filter(|(k, _)| !k.ends_with("wall_time"))
                .cloned()
                .collect(),
        }
    }

    /// Records path, shape and SHA-256 of the input file under `dataset.*`.
    pub fn set_fingerprint(&mut self, path: &Path, rows: usize, cols: usize) -> Result<()> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.set("dataset.path", path.display());
        self.set("dataset.rows", rows);
        self.set("dataset.cols", cols);
        self.set("dataset.sha256", hex::encode(Sha256::digest(&bytes)));
        Ok(())
    }
}

fn escape(v: &str) -> String {
    v.replace('\\', "\\\\").replace('\n', "\\n")
}

fn unescape(v: &str) -> String {
    let mut out = String::with_capacity(v.len());
    let mut chars = v.chars();
    while let Some(ch) = chars.next() {
        if ch == '\\' {
            match chars.next() {
                Some('n') => out.push('\n'),
                Some(other) => out.push(other),
                None => out.push('\\'),
            }
        } else {
            out.push(ch);
        }
    }
    out
}
