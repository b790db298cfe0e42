use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub value: bool,
}

/// Outcome of one subcommand. Exit code 0 iff every verdict holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub verdicts: Vec<Verdict>,
    pub counters: BTreeMap<String, u64>,
    pub artifacts: Vec<String>,
    /// Primary output, inlined when no output directory was given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl Report {
    pub fn new(command: &str, inputs_digest: String) -> Self {
        Report {
            command: command.to_string(),
            inputs_digest,
            verdicts: Vec::new(),
            counters: BTreeMap::new(),
            artifacts: Vec::new(),
            result: None,
            message: None,
        }
    }

    pub fn verdict(mut self, name: &str, value: bool) -> Self {
        self.verdicts.push(Verdict { name: name.to_string(), value });
        self
    }

    pub fn counter(mut self, name: &str, value: u64) -> Self {
        self.counters.insert(name.to_string(), value);
        self
    }

    pub fn message(mut self, msg: impl Into<String>) -> Self {
        self.message = Some(msg.into());
        self
    }

    pub fn all_true(&self) -> bool {
        !self.verdicts.is_empty() && self.verdicts.iter().all(|v| v.value)
    }

    pub fn exit_code(&self) -> u8 {
        if self.all_true() {
            0
        } else {
            1
        }
    }

    /// Writes `value` to `out/name` when an output directory is set, otherwise inlines it.
    pub fn emit<T: Serialize>(mut self, out: Option<&Path>, name: &str, value: &T) -> Result<Self, CliError> {
        match out {
            Some(dir) => {
                let path = write_json(dir, name, value)?;
                self.artifacts.push(path.display().to_string());
            }
            None => {
                self.result = Some(serde_json::to_value(value).expect("serializable"));
            }
        }
        Ok(self)
    }

    pub fn summary(&self) -> String {
        let verdicts: Vec<String> = self.verdicts.iter().map(|v| format!("{}={}", v.name, v.value)).collect();
        let mut line = format!("{}: {}", self.command, verdicts.join(" "));
        if let Some(msg) = &self.message {
            line.push_str(&format!(" ({msg})"));
        }
        line
    }
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let io = |source| CliError::Io { path: dir.display().to_string(), source };
    fs::create_dir_all(dir).map_err(io)?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(&path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    Ok(path)
}

/// SHA-256 over labelled input blobs.
#[derive(Default)]
pub struct InputDigest(Sha256);

impl InputDigest {
    pub fn add(&mut self, label: &str, bytes: &[u8]) {
        self.0.update((label.len() as u64).to_le_bytes());
        self.0.update(label.as_bytes());
        self.0.update((bytes.len() as u64).to_le_bytes());
        self.0.update(bytes);
    }

    pub fn add_json<T: Serialize>(&mut self, label: &str, value: &T) {
        self.add(label, &serde_json::to_vec(value).expect("serializable"));
    }

    pub fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_follows_verdicts() {
        let r = Report::new("x", String::new());
        assert_eq!(r.exit_code(), 1);
        let r = r.verdict("a", true);
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.verdict("b", false).exit_code(), 1);
    }

    #[test]
    fn digest_separates_inputs() {
        let mut a = InputDigest::default();
        a.add("f", b"ab");
        a.add("g", b"c");
        let mut b = InputDigest::default();
        b.add("f", b"a");
        b.add("g", b"bc");
        assert_ne!(a.finish(), b.finish());
    }
}
