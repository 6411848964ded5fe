use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::ops::{Outcome, Status, Verdict};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct FileEntry<'a> {
    name: &'a str,
    bytes: usize,
    sha256: String,
}

#[derive(Serialize)]
struct Summary<'a> {
    schema_version: u32,
    tool: &'static str,
    version: &'static str,
    operation: String,
    status: Status,
    config: &'a RunConfig,
    input_hash: String,
    seed: u64,
    verdicts: &'a [Verdict],
    warnings: &'a [String],
    files: Vec<FileEntry<'a>>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Git-style content hash: `sha256("blob <len>\0" + canonical config JSON)`.
pub fn input_hash(config: &RunConfig) -> String {
    let body = serde_json::to_vec(config).expect("config serializes");
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", body.len()).as_bytes());
    h.update(&body);
    format!("sha256:{}", hex::encode(h.finalize()))
}

/// Fail beats inconclusive beats pass.
pub fn overall(verdicts: &[Verdict]) -> Status {
    if verdicts.iter().any(|v| v.status == Status::Fail) {
        Status::Fail
    } else if verdicts.iter().any(|v| v.status == Status::Inconclusive) {
        Status::Inconclusive
    } else {
        Status::Pass
    }
}

/// Writes every artifact plus `summary.json` into the output directory.
pub fn write_outputs(config: &RunConfig, outcome: &Outcome) -> io::Result<()> {
    let dir: &Path = &config.output_dir;
    fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(outcome.artifacts.len());
    for a in &outcome.artifacts {
        fs::write(dir.join(&a.name), &a.bytes)?;
        files.push(FileEntry { name: &a.name, bytes: a.bytes.len(), sha256: sha256_hex(&a.bytes) });
    }
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        tool: "geoharnack",
        version: env!("CARGO_PKG_VERSION"),
        operation: format!("{} {}", config.operation.name(), config.target()),
        status: overall(&outcome.verdicts),
        config,
        input_hash: input_hash(config),
        seed: config.mc.seed,
        verdicts: &outcome.verdicts,
        warnings: &outcome.warnings,
        files,
    };
    let mut text = serde_json::to_vec_pretty(&summary).expect("summary serializes");
    text.push(b'\n');
    fs::write(dir.join("summary.json"), text)
}
