use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context as _;
use lrtk::corpus::{parse_lines, parse_lines_allow_empty, Sentence};
use lrtk::data::{builtin, BUILTIN_PREFIX};

use crate::record::{sha256_hex, RunRecord};

/// A bad flag combination, reported with exit status 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

/// Shared I/O for one run. Tracks digests of everything read and written
/// so the run record can name them.
pub struct Context {
    subcommand: String,
    config: serde_json::Value,
    seed: Option<u64>,
    stats: bool,
    record: Option<PathBuf>,
    started: Instant,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
    /// Where the record goes when `--record` is absent.
    default_record: Option<PathBuf>,
    resolved_seed: Option<u64>,
}

impl Context {
    pub fn new(
        subcommand: String,
        config: serde_json::Value,
        seed: Option<u64>,
        stats: bool,
        record: Option<PathBuf>,
    ) -> Self {
        Context {
            subcommand,
            config,
            seed,
            stats,
            record,
            started: Instant::now(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            default_record: None,
            resolved_seed: None,
        }
    }

    /// The `--seed` flag, defaulting to 0.
    pub fn seed(&mut self) -> u64 {
        let s = self.seed.unwrap_or(0);
        self.resolved_seed = Some(s);
        s
    }

    /// The `--seed` flag only if given.
    pub fn explicit_seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn set_resolved_seed(&mut self, seed: u64) {
        self.resolved_seed = Some(seed);
    }

    /// Read a file, or stdin for `None` / `-`.
    pub fn read_input(&mut self, path: Option<&Path>) -> anyhow::Result<Vec<u8>> {
        let (name, bytes) = match path {
            Some(p) if p != Path::new("-") => {
                let bytes = fs::read(p).with_context(|| format!("reading {}", p.display()))?;
                (p.display().to_string(), bytes)
            }
            _ => {
                let mut buf = Vec::new();
                io::stdin().read_to_end(&mut buf).context("reading stdin")?;
                ("-".to_string(), buf)
            }
        };
        self.inputs.insert(name, sha256_hex(&bytes));
        Ok(bytes)
    }

    /// Corpus lines; empty lines are an error.
    pub fn read_corpus(&mut self, path: Option<&Path>) -> anyhow::Result<Vec<Sentence>> {
        let bytes = self.read_input(path)?;
        parse_lines(&bytes).with_context(|| input_name(path))
    }

    /// System output lines; empty lines are kept.
    pub fn read_output_lines(&mut self, path: &Path) -> anyhow::Result<Vec<Sentence>> {
        let bytes = self.read_input(Some(path))?;
        parse_lines_allow_empty(&bytes).with_context(|| input_name(Some(path)))
    }

    /// A `builtin:NAME` resource or a file.
    pub fn resource(&mut self, spec: &str) -> anyhow::Result<String> {
        let text = match spec.strip_prefix(BUILTIN_PREFIX) {
            Some(name) => builtin(name)
                .with_context(|| format!("unknown built-in resource {name:?}"))?
                .to_string(),
            None => fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?,
        };
        self.inputs.insert(spec.to_string(), sha256_hex(text.as_bytes()));
        Ok(text)
    }

    /// Write to a file, or stdout for `None` / `-`. A file output becomes
    /// the default home of the run record.
    pub fn write_output(&mut self, path: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
        match path {
            Some(p) if p != Path::new("-") => {
                fs::write(p, bytes).with_context(|| format!("writing {}", p.display()))?;
                self.outputs.insert(p.display().to_string(), sha256_hex(bytes));
                if self.default_record.is_none() {
                    let mut name = p.as_os_str().to_owned();
                    name.push(".run.json");
                    self.default_record = Some(PathBuf::from(name));
                }
            }
            _ => {
                let mut out = io::stdout().lock();
                out.write_all(bytes).context("writing stdout")?;
                out.flush().context("writing stdout")?;
                self.outputs.insert("-".to_string(), sha256_hex(bytes));
            }
        }
        Ok(())
    }

    /// Record a file written by library code.
    pub fn note_output(&mut self, path: &Path) -> anyhow::Result<()> {
        let bytes = fs::read(path).with_context(|| format!("reading back {}", path.display()))?;
        self.outputs.insert(path.display().to_string(), sha256_hex(&bytes));
        Ok(())
    }

    pub fn set_default_record(&mut self, path: PathBuf) {
        self.default_record = Some(path);
    }

    /// One JSON line on stderr when `--stats` is on.
    pub fn stat(&self, value: serde_json::Value) {
        if self.stats {
            eprintln!("{value}");
        }
    }

    pub fn finish(self) -> anyhow::Result<()> {
        let Some(path) = self.record.or(self.default_record) else {
            return Ok(());
        };
        let record = RunRecord {
            subcommand: self.subcommand,
            argv: std::env::args().collect(),
            config: self.config,
            seed: self.resolved_seed.or(self.seed).unwrap_or(0),
            inputs: self.inputs,
            outputs: self.outputs,
            version: env!("CARGO_PKG_VERSION"),
            wall_time_ms: self.started.elapsed().as_millis(),
        };
        let mut text = serde_json::to_string_pretty(&record)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing run record {}", path.display()))
    }
}

fn input_name(path: Option<&Path>) -> String {
    match path {
        Some(p) if p != Path::new("-") => p.display().to_string(),
        _ => "stdin".to_string(),
    }
}

/// Sentences as newline-terminated text.
pub fn join_lines<S: AsRef<str>>(lines: &[S]) -> Vec<u8> {
    let mut out = String::new();
    for l in lines {
        out.push_str(l.as_ref());
        out.push('\n');
    }
    out.into_bytes()
}
