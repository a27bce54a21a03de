//! Run reports (`key: value` lines, blank line between sections) and CSV series.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use coupled_obs::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Bad arguments that only surfaced while running.
    Invalid,
    /// Numerical or convergence failure.
    Failed,
    /// An asserted property did not hold.
    Violated,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Invalid => 2,
            Status::Failed => 3,
            Status::Violated => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Invalid => "invalid",
            Status::Failed => "failed",
            Status::Violated => "violated",
        }
    }

    pub fn of_error(e: &Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::InsufficientTruncation(_) => Status::Invalid,
            Error::Violation(_) | Error::Containment(_) => Status::Violated,
            Error::Resolution(_) | Error::Numerical(_) | Error::Convergence { .. } | Error::Infeasible(_) => Status::Failed,
        }
    }

    /// The more severe of two statuses.
    pub fn worst(self, other: Self) -> Self {
        let rank = |s: Self| match s {
            Status::Ok => 0,
            Status::Violated => 1,
            Status::Failed => 2,
            Status::Invalid => 3,
        };
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

/// Fixed-format float: plain decimals in a readable range, scientific otherwise.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e7).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub entries: Vec<(String, String)>,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), entries: Vec::new() }
    }

    pub fn text(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.text(key, fmt_f64(value))
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.text(key, value)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// One CSV series: a fixed header and preformatted rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|v| format!("{v}")).collect());
    }

    /// A series whose body is already rendered, header line included.
    pub fn raw(name: &str, text: &str) -> Self {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("").split(',').map(str::to_string).collect();
        let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
        Self { name: name.into(), header, rows }
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub id: String,
    pub command: String,
    pub seed: u64,
    pub status: Status,
    pub config: Section,
    pub sections: Vec<Section>,
    /// Wall-clock milliseconds per step; rendered last.
    pub timings: Vec<(String, f64)>,
    pub csvs: Vec<Csv>,
}

impl Report {
    pub fn new(id: &str, command: &str, seed: u64, config: Section) -> Self {
        Self {
            id: id.into(),
            command: command.into(),
            seed,
            status: Status::Ok,
            config,
            sections: Vec::new(),
            timings: Vec::new(),
            csvs: Vec::new(),
        }
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn mark(&mut self, status: Status) {
        self.status = self.status.worst(status);
    }

    /// Records a failed step as its own section and folds its status in.
    pub fn record_error(&mut self, step: &str, e: &Error) {
        let status = Status::of_error(e);
        let mut s = Section::new(format!("{step}.error"));
        s.text("status", status.as_str()).text("message", e);
        self.sections.push(s);
        self.mark(status);
    }

    /// The report without the timings section.
    pub fn render_body(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "experiment: {}", self.id);
        let _ = writeln!(out, "command: {}", self.command);
        let _ = writeln!(out, "seed: {}", self.seed);
        let _ = writeln!(out, "status: {}", self.status.as_str());
        for s in std::iter::once(&self.config).chain(&self.sections) {
            out.push('\n');
            let _ = writeln!(out, "section: {}", s.name);
            for (k, v) in &s.entries {
                let _ = writeln!(out, "{k}: {v}");
            }
        }
        out
    }

    pub fn render(&self) -> String {
        let mut out = self.render_body();
        if !self.timings.is_empty() {
            out.push_str("\nsection: timings\n");
            for (k, ms) in &self.timings {
                let _ = writeln!(out, "{k}_ms: {ms:.3}");
            }
        }
        out
    }

    /// Writes `report.txt` and every CSV into `dir`, creating it.
    pub fn write(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = vec![dir.join("report.txt")];
        fs::write(&written[0], self.render())?;
        written.extend(emit_csvs(&self.csvs, dir)?);
        Ok(written)
    }
}

/// Writes one file per series; nothing for an empty list.
pub fn emit_csvs(csvs: &[Csv], dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut paths = Vec::with_capacity(csvs.len());
    for c in csvs {
        let p = dir.join(format!("{}.csv", c.name));
        fs::write(&p, c.render())?;
        paths.push(p);
    }
    Ok(paths)
}

/// Drops the timings section from a rendered report.
pub fn strip_timings(report: &str) -> &str {
    match report.find("\nsection: timings\n") {
        Some(i) => &report[..i],
        None => report,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering_layout() {
        let mut cfg = Section::new("config");
        cfg.num("params.a", 1.0);
        let mut r = Report::new("abc", "remez", 7, cfg);
        let mut s = Section::new("remez");
        s.num("worst_ratio", 1.25e-9).flag("holds", true);
        r.sections.push(s);
        r.timings.push(("remez".into(), 3.0));
        let text = r.render();
        assert!(text.starts_with("experiment: abc\ncommand: remez\nseed: 7\nstatus: ok\n\nsection: config\nparams.a: 1\n"), "{text}");
        assert!(text.contains("\nsection: remez\nworst_ratio: 1.25e-9\nholds: true\n"));
        assert_eq!(strip_timings(&text), r.render_body());
    }

    #[test]
    fn status_severity() {
        assert_eq!(Status::Ok.worst(Status::Violated), Status::Violated);
        assert_eq!(Status::Failed.worst(Status::Violated), Status::Failed);
        assert_eq!(Status::of_error(&Error::Infeasible("x".into())).exit_code(), 3);
        assert_eq!(Status::of_error(&Error::Violation("x".into())).exit_code(), 4);
    }

    #[test]
    fn empty_series_list_writes_nothing() {
        let dir = std::env::temp_dir().join(format!("coupled-obs-empty-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        assert!(emit_csvs(&[], &dir).unwrap().is_empty());
        assert_eq!(fs::read_dir(&dir).unwrap().count(), 0);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn raw_series_round_trip() {
        let c = Csv::raw("control", "x,t,value\n0.5,0.25,1\n");
        assert_eq!(c.header, ["x", "t", "value"]);
        assert_eq!(c.render(), "x,t,value\n0.5,0.25,1\n");
    }
}
