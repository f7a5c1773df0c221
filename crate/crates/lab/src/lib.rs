//! Scenario runner for numerical experiments on kernels of Toeplitz
//! operators and de Branges–Rovnyak spaces on the unit circle.
//!
//! The library exposes six scenarios over shared configuration
//! ([`RunConfig`]); each returns a [`ScenarioReport`] of asserted checks
//! and diagnostics, and the binary assembles them into one canonical
//! `report.json` per run.

pub mod report;
pub mod scenarios;
pub mod setups;

use std::collections::BTreeMap;
use std::time::Instant;
use thiserror::Error;

pub use report::{Check, CmpOp, RunReport, ScenarioReport, Verdict, SCHEMA};

/// Scenario ids with one-line descriptions, in canonical order.
pub const SCENARIOS: [(&str, &str); 6] = [
    (
        "sweep-alpha",
        "kernel dimensions of Toeplitz sections for unimodular power symbols, swept over the exponent",
    ),
    (
        "theorem1",
        "symbols conj(g)/g whose section kernel is an outer multiple of a model space",
    ),
    (
        "lemma-hss",
        "analytic projection of weighted Szego kernels against closed-form rational identities",
    ),
    (
        "example-s4",
        "dyadic Blaschke family whose kernel exceeds the model-space count by one",
    ),
    (
        "complement-s5",
        "multiplier-range complement, boundary eigenvector of the adjoint shift, and intertwining checks",
    ),
    (
        "theorem2-witness",
        "node-wise identity mapping the extra kernel function onto a reproducing kernel",
    ),
];

#[derive(Error, Debug)]
pub enum LabError {
    /// The request cannot be run as stated (bad grid size, endpoint
    /// exponent, unknown scenario, ...). Reported before any computation.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// A computation failed mid-scenario.
    #[error("computation failed: {0}")]
    Core(String),
}

impl From<hardy_core::circle_fft::FftError> for LabError {
    fn from(e: hardy_core::circle_fft::FftError) -> Self {
        LabError::Core(e.to_string())
    }
}

impl From<hardy_core::functions::FunctionsError> for LabError {
    fn from(e: hardy_core::functions::FunctionsError) -> Self {
        LabError::Core(e.to_string())
    }
}

impl From<hardy_core::pairs_dbr::PairError> for LabError {
    fn from(e: hardy_core::pairs_dbr::PairError) -> Self {
        LabError::Core(e.to_string())
    }
}

impl From<hardy_core::toeplitz::ToeplitzError> for LabError {
    fn from(e: hardy_core::toeplitz::ToeplitzError) -> Self {
        LabError::Core(e.to_string())
    }
}

/// Shared scenario configuration with all defaults resolved.
#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Grid size (power of two, at least 64).
    pub n: usize,
    /// Coefficient/section order (at most `n / 4`).
    pub m: usize,
    /// Relative tolerance for strict kernel cuts.
    pub tol: f64,
    /// Seed for randomized probes.
    pub seed: u64,
    /// Exponents for the sweep scenario.
    pub alphas: Vec<f64>,
    /// Depth of the dyadic Blaschke family.
    pub m_blaschke: usize,
    /// Complement candidate directions.
    pub d: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 4096,
            m: 512,
            tol: 1e-6,
            seed: 20240229,
            alphas: vec![0.3, 1.0, 1.4, 1.7, 2.3, 2.7],
            m_blaschke: 1,
            d: 32,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), LabError> {
        if !self.n.is_power_of_two() || self.n < 64 || self.n > (1 << 22) {
            return Err(LabError::Config(format!(
                "n = {} must be a power of two in [64, 2^22]",
                self.n
            )));
        }
        if self.m < 8 || self.m > self.n / 4 {
            return Err(LabError::Config(format!(
                "m = {} must lie in [8, n/4] = [8, {}]",
                self.m,
                self.n / 4
            )));
        }
        if !(1e-12..=1e-2).contains(&self.tol) {
            return Err(LabError::Config(format!(
                "tol = {:e} must lie in [1e-12, 1e-2]",
                self.tol
            )));
        }
        if self.m_blaschke > setups::MAX_BLASCHKE_DEPTH {
            return Err(LabError::Config(format!(
                "blaschke depth {} exceeds the supported maximum {}",
                self.m_blaschke,
                setups::MAX_BLASCHKE_DEPTH
            )));
        }
        if self.d == 0 || 2 * self.d > self.m {
            return Err(LabError::Config(format!(
                "d = {} must satisfy 1 <= d <= m/2 = {}",
                self.d,
                self.m / 2
            )));
        }
        for &alpha in &self.alphas {
            alpha_guard(alpha)?;
        }
        Ok(())
    }

    /// Stable string echo of every field, for the report header.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        map.insert("n".to_string(), self.n.to_string());
        map.insert("m".to_string(), self.m.to_string());
        map.insert("tol".to_string(), format!("{:?}", self.tol));
        map.insert("seed".to_string(), self.seed.to_string());
        map.insert(
            "alphas".to_string(),
            self.alphas.iter().map(|a| format!("{a:?}")).collect::<Vec<_>>().join(","),
        );
        map.insert("blaschke".to_string(), self.m_blaschke.to_string());
        map.insert("d".to_string(), self.d.to_string());
        map
    }
}

/// Reject sweep exponents too close to a half-integer: there the kernel
/// dimension of the power symbol jumps and finite sections cannot resolve
/// a side. The open guard band is `|alpha - (k + 1/2)| < 0.1`.
pub fn alpha_guard(alpha: f64) -> Result<(), LabError> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(LabError::Config(format!(
            "alpha = {alpha} must be a finite nonnegative number"
        )));
    }
    let frac = alpha - alpha.floor();
    let dist = (frac - 0.5).abs();
    if dist < 0.1 {
        return Err(LabError::Config(format!(
            "alpha = {alpha} is within 0.1 of a half-integer, where the kernel dimension jumps"
        )));
    }
    Ok(())
}

pub fn scenario_ids() -> Vec<&'static str> {
    SCENARIOS.iter().map(|(id, _)| *id).collect()
}

/// Closest known scenario id, by edit distance (for error messages).
pub fn nearest_scenario(id: &str) -> &'static str {
    SCENARIOS
        .iter()
        .map(|(known, _)| (levenshtein(id, known), *known))
        .min_by_key(|(d, _)| *d)
        .map(|(_, known)| known)
        .expect("scenario table is nonempty")
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut row = vec![i + 1];
        for (j, cb) in b.iter().enumerate() {
            let subst = prev[j] + usize::from(ca != cb);
            row.push(subst.min(prev[j + 1] + 1).min(row[j] + 1));
        }
        prev = row;
    }
    prev[b.len()]
}

/// Run one scenario by id, timing it. The configuration is validated
/// first, so scenario code can assume structurally sound inputs.
pub fn run_scenario(id: &str, cfg: &RunConfig) -> Result<ScenarioReport, LabError> {
    cfg.validate()?;
    let start = Instant::now();
    let mut sc = match id {
        "sweep-alpha" => scenarios::sweep_alpha(cfg),
        "theorem1" => scenarios::theorem1(cfg),
        "lemma-hss" => scenarios::lemma_hss(cfg),
        "example-s4" => scenarios::example_s4(cfg),
        "complement-s5" => scenarios::complement_s5(cfg),
        "theorem2-witness" => scenarios::theorem2_witness(cfg),
        other => Err(LabError::Config(format!(
            "unknown scenario `{other}`; nearest match: `{}`",
            nearest_scenario(other)
        ))),
    }?;
    sc.wall = start.elapsed();
    Ok(sc)
}

/// Like [`run_scenario`], but converts a mid-scenario computation failure
/// into a failed report (one `hard-error` check) so a multi-scenario run
/// still produces its document. Configuration errors are not masked.
pub fn run_scenario_reporting(id: &str, cfg: &RunConfig) -> Result<ScenarioReport, LabError> {
    match run_scenario(id, cfg) {
        Ok(sc) => Ok(sc),
        Err(LabError::Core(message)) => {
            let mut sc = ScenarioReport::new(id);
            sc.param("error", &message);
            sc.check_le("hard-error", 1.0, 0.0);
            Ok(sc)
        }
        Err(e) => Err(e),
    }
}
