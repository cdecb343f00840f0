//! CSV traces, JSON summary, echoed config and a SHA-256 manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use gridsched::{Policy, TraceRecord};
use sha2::{Digest, Sha256};

use crate::compare::Comparison;
use crate::error::CliError;

pub const CSV_HEADER: &str = "step,alor,completed_jobs,messages,pending_length_total";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CONFIG_FILE: &str = "config.toml";
pub const MANIFEST_FILE: &str = "manifest.sha256";

pub fn trace_file_name(policy: Policy) -> String {
    format!("trace_{}.csv", policy.name().to_lowercase())
}

/// Formats a trace as CSV. Floats use the shortest representation that
/// round-trips exactly, so zero prints as `0`.
pub fn trace_csv(trace: &[TraceRecord]) -> String {
    let mut out = String::with_capacity(32 * (trace.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in trace {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.step, r.alor, r.completed_jobs, r.messages, r.pending_length_total
        )
        .expect("writing to a String");
    }
    out
}

fn write(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes all outputs of a comparison into `out_dir` and returns the paths
/// written, manifest last.
pub fn emit_outputs(comparison: &Comparison, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;

    let mut files: Vec<(String, Vec<u8>)> = comparison
        .runs
        .iter()
        .map(|(p, out)| (trace_file_name(*p), trace_csv(&out.trace).into_bytes()))
        .collect();
    let mut summary = serde_json::to_string_pretty(&comparison.report).expect("report serializes");
    summary.push('\n');
    files.push((SUMMARY_FILE.to_string(), summary.into_bytes()));
    files.push((CONFIG_FILE.to_string(), comparison.report.config.to_toml().into_bytes()));
    files.sort_by(|a, b| a.0.cmp(&b.0));

    let mut manifest = String::new();
    let mut written = Vec::with_capacity(files.len() + 1);
    for (name, bytes) in &files {
        let path = out_dir.join(name);
        write(&path, bytes)?;
        writeln!(manifest, "{}  {}", hex::encode(Sha256::digest(bytes)), name).expect("writing to a String");
        written.push(path);
    }
    let manifest_path = out_dir.join(MANIFEST_FILE);
    write(&manifest_path, manifest.as_bytes())?;
    written.push(manifest_path);
    Ok(written)
}
