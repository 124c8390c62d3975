//! Batch runner for the bracket-approximation experiments.
//!
//! A run reads one TOML configuration, validates it completely, executes the
//! experiment and writes every artifact plus `manifest.json` at the end.
//! Nothing is written when validation fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod exec;
pub mod experiments;
pub mod output;
pub mod scenario;
pub mod selftest;

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use output::{Artifact, Manifest, Verdict};

/// Success.
pub const EXIT_OK: i32 = 0;
/// The experiment ran and an invariant or expected outcome failed.
pub const EXIT_FAILED: i32 = 1;
/// The configuration could not be read or parsed.
pub const EXIT_PARSE: i32 = 2;
/// The configuration parsed but is not valid.
pub const EXIT_INVALID: i32 = 3;

/// Environment variable overriding the directory that `output` is relative to.
pub const OUTPUT_ROOT_VAR: &str = "BRACKETFLOW_OUTPUT_ROOT";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("cannot read {0}: {1}")]
    Read(PathBuf, std::io::Error),
    #[error("cannot parse {0}: {1}")]
    Parse(PathBuf, toml::de::Error),
    #[error("invalid configuration: {0}")]
    Invalid(#[from] experiments::ValidationError),
    #[error("experiment failed: {0}")]
    Experiment(#[from] experiments::ExperimentError),
    #[error("cannot write output: {0}")]
    Write(std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Read(..) | RunError::Parse(..) => EXIT_PARSE,
            RunError::Invalid(_) => EXIT_INVALID,
            RunError::Experiment(_) | RunError::Write(_) => EXIT_FAILED,
        }
    }
}

/// The result of a completed run.
#[derive(Debug)]
pub struct RunReport {
    pub output_dir: PathBuf,
    pub verdicts: Vec<Verdict>,
    pub summary: Vec<String>,
    pub warnings: Vec<&'static str>,
}

impl RunReport {
    pub fn violated(&self) -> Vec<&str> {
        self.verdicts.iter().filter(|v| v.required && !v.passed).map(|v| v.name.as_str()).collect()
    }
    pub fn exit_code(&self) -> i32 {
        if self.violated().is_empty() {
            EXIT_OK
        } else {
            EXIT_FAILED
        }
    }
}

fn nearest_existing(p: &Path) -> Option<&Path> {
    let mut cur = Some(p);
    while let Some(c) = cur {
        if c.exists() {
            return Some(c);
        }
        cur = c.parent();
    }
    None
}

fn check_writable(dir: &Path) -> Result<(), experiments::ValidationError> {
    let bad = |m: String| experiments::ValidationError(m);
    if dir.exists() && !dir.is_dir() {
        return Err(bad(format!("output {} exists and is not a directory", dir.display())));
    }
    let base = nearest_existing(dir).ok_or_else(|| bad(format!("output {} has no existing ancestor", dir.display())))?;
    if !base.is_dir() {
        return Err(bad(format!("{} is not a directory", base.display())));
    }
    let meta = std::fs::metadata(base).map_err(|e| bad(format!("{}: {e}", base.display())))?;
    if meta.permissions().readonly() {
        return Err(bad(format!("{} is read-only", base.display())));
    }
    Ok(())
}

/// Root that relative `output` paths resolve against.
pub fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::current_dir().unwrap_or_else(|_| PathBuf::from(".")))
}

pub fn run(config_path: &Path, root: &Path) -> Result<RunReport, RunError> {
    let text = std::fs::read_to_string(config_path).map_err(|e| RunError::Read(config_path.to_path_buf(), e))?;
    let cfg = config::parse(&text).map_err(|e| RunError::Parse(config_path.to_path_buf(), e))?;
    let plan = experiments::validate(&cfg)?;
    let out_dir = root.join(&cfg.output);
    check_writable(&out_dir)?;
    let exec = exec::RayonExecutor::new(plan.threads)
        .map_err(|e| experiments::ValidationError(format!("thread pool: {e}")))?;

    let outcome = experiments::execute(&plan, &exec)?;
    let warnings = plan.built.as_ref().map(|b| b.warnings()).unwrap_or_default();
    let report = RunReport { output_dir: out_dir.clone(), verdicts: outcome.verdicts, summary: outcome.summary, warnings };

    let mut files: Vec<String> = outcome.artifacts.iter().map(|a| a.path.display().to_string()).collect();
    files.sort();
    let manifest = Manifest {
        program: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: config_path.display().to_string(),
        config_sha256: output::sha256_hex(text.as_bytes()),
        experiment: cfg.experiment.name(),
        scenario: cfg.scenario.name(),
        created_unix_s: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        tolerances: &plan.tolerances,
        step: serde_json::json!({
            "h_max_s": plan.policy.h_max,
            "samples_per_period": plan.policy.samples_per_period,
            "blowup_bound": plan.policy.blowup_bound,
        }),
        threads: exec.threads(),
        status: if report.violated().is_empty() { "passed" } else { "failed" },
        violated: report.violated(),
        verdicts: &report.verdicts,
        warnings: report.warnings.clone(),
        files,
    };
    let mut artifacts = outcome.artifacts;
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    artifacts.push(Artifact::new("manifest.json", json + "\n"));
    std::fs::create_dir_all(&out_dir).map_err(RunError::Write)?;
    output::write_all(&out_dir, &artifacts).map_err(RunError::Write)?;
    Ok(report)
}

/// Runs a configuration and prints verdict lines; returns the exit code.
pub fn run_and_report(config_path: &Path, root: &Path) -> i32 {
    match run(config_path, root) {
        Ok(r) => {
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            for line in &r.summary {
                println!("{line}");
            }
            for v in &r.verdicts {
                let tag = match (v.passed, v.required) {
                    (true, _) => "ok",
                    (false, true) => "FAIL",
                    (false, false) => "note",
                };
                let mut line = format!("[{tag}] {}", v.name);
                if let Some(x) = v.value {
                    line.push_str(&format!(" = {x:.6e}"));
                }
                if let Some(d) = &v.detail {
                    line.push_str(&format!(" ({d})"));
                }
                println!("{line}");
            }
            let violated = r.violated();
            if !violated.is_empty() {
                eprintln!("violated: {}", violated.join(", "));
            }
            println!("output: {}", r.output_dir.display());
            r.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
