//! Reproducible experiment plumbing: seed derivation, float formatting,
//! atomic output files, run manifests, and the CSV/JSON report writers used
//! by the command line.

pub mod cli;
pub mod sweep;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const ENV_OUT_DIR: &str = "OWPINV_OUT_DIR";
pub const ENV_WORKERS: &str = "OWPINV_WORKERS";

/// Formats a float with 17 significant digits in scientific notation, e.g.
/// `5.0000000000000000e-1`. Round-trip safe and locale independent.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// `splitmix64(splitmix64(master ^ fnv1a64(label)) ^ discriminator)`.
///
/// `splitmix64` is the standard finalizer with increment
/// `0x9e3779b97f4a7c15`; `fnv1a64` is 64-bit FNV-1a over the UTF-8 label.
pub fn derive_seed(master: u64, label: &str, discriminator: u64) -> u64 {
    splitmix64(splitmix64(master ^ fnv1a64(label.as_bytes())) ^ discriminator)
}

/// Writes `bytes` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("output path {} has no file name", path.display())))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(format!(".tmp-{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputChecksum {
    pub file: String,
    pub sha256: String,
}

/// Emitted next to every output file. Contains nothing that depends on
/// wall-clock time, paths outside the output name, or worker count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: serde_json::Value,
    pub derived_seeds: BTreeMap<String, u64>,
    pub outputs: Vec<OutputChecksum>,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config,
            derived_seeds: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn seed(&mut self, label: impl Into<String>, seed: u64) {
        self.derived_seeds.insert(label.into(), seed);
    }

    pub fn add_output(&mut self, path: &Path, bytes: &[u8]) {
        self.outputs.push(OutputChecksum {
            file: path
                .file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_default(),
            sha256: sha256_hex(bytes),
        });
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        Ok(bytes)
    }
}

/// Path of the manifest accompanying `output`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}

/// Writes `bytes` to `path` and its manifest next to it.
pub fn write_with_manifest(path: &Path, bytes: &[u8], mut manifest: RunManifest) -> Result<RunManifest> {
    manifest.add_output(path, bytes);
    write_atomic(path, bytes)?;
    write_atomic(&manifest_path(path), &manifest.to_bytes()?)?;
    Ok(manifest)
}

/// One entry of a JSON verdict report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
}

impl CheckEntry {
    /// A `measured <= bound` check.
    pub fn upper(name: impl Into<String>, measured: f64, bound: f64, pass: bool) -> Self {
        CheckEntry {
            name: name.into(),
            measured,
            bound,
            margin: bound - measured,
            pass,
        }
    }

    /// A `measured >= bound` check.
    pub fn lower(name: impl Into<String>, measured: f64, bound: f64, pass: bool) -> Self {
        CheckEntry {
            name: name.into(),
            measured,
            bound,
            margin: measured - bound,
            pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerdictReport {
    pub command: String,
    pub all_pass: bool,
    pub first_failing_stage: Option<usize>,
    pub checks: Vec<CheckEntry>,
}

impl VerdictReport {
    pub fn new(command: &str, checks: Vec<CheckEntry>, first_failing_stage: Option<usize>) -> Self {
        VerdictReport {
            command: command.to_string(),
            all_pass: checks.iter().all(|c| c.pass),
            first_failing_stage,
            checks,
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        Ok(bytes)
    }
}
