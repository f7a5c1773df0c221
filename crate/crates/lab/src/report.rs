//! Run reports: a canonical JSON document per run, singular-value CSV
//! sidecars, and a human-readable summary.
//!
//! Everything serialized here is deterministic for a fixed configuration:
//! map keys are sorted (`BTreeMap`), scenarios are sorted by id, and wall
//! times are kept out of `report.json` (they appear only in `summary.txt`).

use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

/// Version tag of the `report.json` layout.
pub const SCHEMA: &str = "hardy-lab/1";

/// Outcome of a single check.
#[derive(Serialize, Clone, Copy, PartialEq, Eq, Debug)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    ReportOnly,
}

/// Direction of the comparison behind an asserted check.
#[derive(Serialize, Clone, Copy, PartialEq, Eq, Debug)]
#[serde(rename_all = "kebab-case")]
pub enum CmpOp {
    /// Pass when `value <= tolerance` (error bounds).
    Le,
    /// Pass when `value >= tolerance` (gaps, separations).
    Ge,
    /// Pass when `value == tolerance` exactly (integer counts).
    Eq,
}

/// One measured quantity with its verdict. Report-only checks carry no
/// operator and no tolerance.
#[derive(Serialize, Clone, Debug)]
pub struct Check {
    pub id: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op: Option<CmpOp>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub verdict: Verdict,
}

/// Everything one scenario produced.
#[derive(Serialize, Clone, Debug)]
pub struct ScenarioReport {
    pub scenario: String,
    /// Effective parameters (resolved defaults included), stringly typed
    /// so the echo is exact and stable.
    pub params: BTreeMap<String, String>,
    /// Scalar diagnostics that carry no verdict.
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    /// Singular-value lists, written as CSV sidecars next to the report.
    pub spectra: BTreeMap<String, Vec<f64>>,
    /// Wall time; excluded from JSON so reports are byte-stable.
    #[serde(skip)]
    pub wall: Duration,
}

impl ScenarioReport {
    pub fn new(scenario: &str) -> Self {
        ScenarioReport {
            scenario: scenario.to_string(),
            params: BTreeMap::new(),
            metrics: BTreeMap::new(),
            checks: Vec::new(),
            spectra: BTreeMap::new(),
            wall: Duration::ZERO,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.params.insert(key.to_string(), value.to_string());
    }

    pub fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    pub fn spectrum(&mut self, key: &str, sigmas: &[f64]) {
        self.spectra.insert(key.to_string(), sigmas.to_vec());
    }

    fn push(&mut self, id: &str, value: f64, op: CmpOp, tolerance: f64, pass: bool) -> bool {
        self.checks.push(Check {
            id: id.to_string(),
            value,
            op: Some(op),
            tolerance: Some(tolerance),
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        });
        pass
    }

    /// Assert `value <= tolerance`.
    pub fn check_le(&mut self, id: &str, value: f64, tolerance: f64) -> bool {
        let pass = value.is_finite() && value <= tolerance;
        self.push(id, value, CmpOp::Le, tolerance, pass)
    }

    /// Assert `value >= floor`.
    pub fn check_ge(&mut self, id: &str, value: f64, floor: f64) -> bool {
        let pass = value.is_finite() && value >= floor;
        self.push(id, value, CmpOp::Ge, floor, pass)
    }

    /// Assert an exact integer count.
    pub fn check_count(&mut self, id: &str, value: usize, expected: usize) -> bool {
        self.push(id, value as f64, CmpOp::Eq, expected as f64, value == expected)
    }

    /// Record a value without asserting anything about it.
    pub fn report_only(&mut self, id: &str, value: f64) {
        self.checks.push(Check {
            id: id.to_string(),
            value,
            op: None,
            tolerance: None,
            verdict: Verdict::ReportOnly,
        });
    }

    /// True when every asserted check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn failed_check_ids(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| c.verdict == Verdict::Fail)
            .map(|c| c.id.as_str())
            .collect()
    }

    /// Look a check up by id (ids are unique within a scenario).
    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }
}

/// The canonical per-run document.
#[derive(Serialize, Clone, Debug)]
pub struct RunReport {
    pub schema: &'static str,
    /// Full configuration echo, defaults resolved.
    pub config: BTreeMap<String, String>,
    /// Scenario reports, sorted by scenario id.
    pub scenarios: Vec<ScenarioReport>,
    /// True when every asserted check in every scenario passed.
    pub passed: bool,
}

impl RunReport {
    pub fn new(config: BTreeMap<String, String>, mut scenarios: Vec<ScenarioReport>) -> Self {
        scenarios.sort_by(|a, b| a.scenario.cmp(&b.scenario));
        let passed = scenarios.iter().all(ScenarioReport::passed);
        RunReport {
            schema: SCHEMA,
            config,
            scenarios,
            passed,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }

    /// Human-readable digest, including wall times (the one place they
    /// are reported).
    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "hardy-lab run ({} scenario(s))", self.scenarios.len());
        for sc in &self.scenarios {
            let status = if sc.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "[{status}] {:<18} {:>8.2}s  {} check(s)",
                sc.scenario,
                sc.wall.as_secs_f64(),
                sc.checks.len()
            );
            for c in &sc.checks {
                let verdict = match c.verdict {
                    Verdict::Pass => "pass",
                    Verdict::Fail => "FAIL",
                    Verdict::ReportOnly => "info",
                };
                let bound = match (c.op, c.tolerance) {
                    (Some(CmpOp::Le), Some(t)) => format!(" (<= {t:.3e})"),
                    (Some(CmpOp::Ge), Some(t)) => format!(" (>= {t:.3e})"),
                    (Some(CmpOp::Eq), Some(t)) => format!(" (== {t})"),
                    _ => String::new(),
                };
                let _ = writeln!(out, "    {verdict}  {:<44} {:.6e}{bound}", c.id, c.value);
            }
        }
        let _ = writeln!(out, "overall: {}", if self.passed { "PASS" } else { "FAIL" });
        out
    }

    /// Write `report.json`, `summary.txt`, and one CSV per recorded
    /// spectrum into `outdir` (created if missing). Returns the paths
    /// written.
    pub fn write(&self, outdir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(outdir)?;
        let mut written = Vec::new();

        let json_path = outdir.join("report.json");
        fs::write(&json_path, self.to_json())?;
        written.push(json_path);

        let summary_path = outdir.join("summary.txt");
        fs::write(&summary_path, self.summary_text())?;
        written.push(summary_path);

        for sc in &self.scenarios {
            for (name, sigmas) in &sc.spectra {
                let path = outdir.join(format!("{}-{}.csv", sc.scenario, name));
                fs::write(&path, spectrum_csv(sigmas))?;
                written.push(path);
            }
        }
        Ok(written)
    }
}

/// CSV body for a singular-value list: header plus one `index,sigma` row
/// per value.
pub fn spectrum_csv(sigmas: &[f64]) -> String {
    let mut out = String::from("index,sigma\n");
    for (i, s) in sigmas.iter().enumerate() {
        let _ = writeln!(out, "{i},{s:e}");
    }
    out
}

/// Output directory resolution: explicit flag, then `HARDY_LAB_OUTDIR`,
/// then `./hardy-lab-out`.
pub fn resolve_outdir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("HARDY_LAB_OUTDIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("hardy-lab-out"))
}
