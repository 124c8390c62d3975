//! CSV, plot-data and manifest writers. Floats carry 17 significant digits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bracketflow_core::simulator::{ConvergenceReport, Trajectory};
use serde::Serialize;

pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// `j` as it appears in file names.
pub fn j_label(j: f64) -> String {
    if j.is_infinite() {
        "inf".into()
    } else if j.fract() == 0.0 && j.abs() < 1e15 {
        format!("{}", j as i64)
    } else {
        format!("{j}").replace('.', "p")
    }
}

/// A file produced by an experiment, relative to the output directory.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub path: PathBuf,
    pub contents: String,
}

impl Artifact {
    pub fn new(path: impl Into<PathBuf>, contents: String) -> Self {
        Artifact { path: path.into(), contents }
    }
}

#[derive(Default)]
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut c = Csv { buf: String::new() };
        c.buf.push_str(&header.join(","));
        c.buf.push('\n');
        c
    }
    pub fn row<S: AsRef<str>>(&mut self, cells: impl IntoIterator<Item = S>) {
        let mut first = true;
        for c in cells {
            if !first {
                self.buf.push(',');
            }
            self.buf.push_str(c.as_ref());
            first = false;
        }
        self.buf.push('\n');
    }
    pub fn finish(self) -> String {
        self.buf
    }
}

/// `t, x` for scalar states, `t, x1, …, xn` otherwise.
pub fn state_header(n: usize) -> Vec<String> {
    if n == 1 {
        return vec!["t".into(), "x".into()];
    }
    std::iter::once("t".to_string()).chain((1..=n).map(|i| format!("x{i}"))).collect()
}

pub fn trajectory_csv(tr: &Trajectory) -> String {
    let header = state_header(tr.dim());
    let mut c = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for (k, x) in tr.states().enumerate() {
        c.row(std::iter::once(num(tr.time(k))).chain(x.iter().map(|v| num(*v))));
    }
    c.finish()
}

pub fn convergence_csv(rep: &ConvergenceReport, n: usize) -> String {
    let mut header = vec!["j".to_string(), "t0".to_string()];
    header.extend((1..=n).map(|i| format!("x0_{i}")));
    header.extend(["sup_d", "b", "ratio", "complete"].map(String::from));
    let mut c = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for cell in &rep.cells {
        let mut row = vec![num(cell.j), num(cell.t0)];
        row.extend(cell.x0.iter().map(|v| num(*v)));
        row.push(num(cell.sup_d));
        row.push(num(cell.b));
        row.push(cell.ratio.map_or_else(|| "nan".into(), num));
        row.push(cell.complete.to_string());
        c.row(row);
    }
    c.finish()
}

/// Whitespace separated columns under `#` comment lines.
pub struct PlotData {
    buf: String,
}

impl PlotData {
    pub fn new(title: &str, comments: &[String], columns: &[&str]) -> Self {
        let mut buf = String::new();
        let _ = writeln!(buf, "# {title}");
        for c in comments {
            let _ = writeln!(buf, "# {c}");
        }
        let _ = writeln!(buf, "# columns: {}", columns.join(" "));
        PlotData { buf }
    }
    pub fn row(&mut self, values: &[f64]) {
        let line: Vec<String> = values.iter().map(|v| num(*v)).collect();
        self.buf.push_str(&line.join(" "));
        self.buf.push('\n');
    }
    pub fn finish(self) -> String {
        self.buf
    }
}

pub fn trajectory_plot(tr: &Trajectory, title: &str) -> String {
    let header = state_header(tr.dim());
    let mut p = PlotData::new(title, &[], &header.iter().map(String::as_str).collect::<Vec<_>>());
    for (k, x) in tr.states().enumerate() {
        let mut row = vec![tr.time(k)];
        row.extend_from_slice(x);
        p.row(&row);
    }
    p.finish()
}

/// `(j, max ratio)` per listed j; ready for log-log axes.
pub fn decay_plot(rep: &ConvergenceReport) -> String {
    let mut p = PlotData::new("sup-distance ratio against j", &["max over (t0, x0) cells".into()], &["j", "max_ratio"]);
    for &j in &rep.js {
        if let Some(r) = rep.max_ratio(j) {
            p.row(&[j, r]);
        }
    }
    p.finish()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    /// Informational verdicts are reported but never fail a run.
    pub required: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Verdict {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        Verdict { name: name.into(), passed, required: true, value: None, detail: None }
    }
    pub fn value(mut self, v: f64) -> Self {
        self.value = v.is_finite().then_some(v);
        self
    }
    pub fn informational(mut self) -> Self {
        self.required = false;
        self
    }
    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub program: &'static str,
    pub version: &'static str,
    pub config: String,
    pub config_sha256: String,
    pub experiment: &'static str,
    pub scenario: &'static str,
    pub created_unix_s: u64,
    pub tolerances: &'a crate::config::Tolerances,
    pub step: serde_json::Value,
    pub threads: usize,
    pub status: &'static str,
    pub violated: Vec<&'a str>,
    pub verdicts: &'a [Verdict],
    pub warnings: Vec<&'static str>,
    pub files: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::Digest;
    sha2::Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_all(dir: &Path, artifacts: &[Artifact]) -> std::io::Result<()> {
    for a in artifacts {
        let p = dir.join(&a.path);
        if let Some(parent) = p.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(p, &a.contents)?;
    }
    Ok(())
}
