//! Inequality suites behind `dilute verify`.

use dilute_core::error_budget::upsilon_suite;
use dilute_core::finite_box::{curvature_suite, delta_p0_suite, lemma4_suite};
use dilute_core::matrix_lab::{
    klein_scan, lemma2_suite, lemma7_suite, refined_subadditivity_suite, trace_norm_chain_suite,
};
use dilute_core::suite::{SuiteReport, Tally};
use serde::Serialize;

use crate::error::{CliError, Result};

/// Suite names accepted by `--suite`, in run order. `delta_p0` and
/// `upsilon` each emit a second report against the corrected bound.
pub const SUITES: [&str; 9] = [
    "lemma2",
    "lemma4",
    "lemma7",
    "klein",
    "trace_norm_chain",
    "refined_subadditivity",
    "curvature",
    "delta_p0",
    "upsilon",
];

/// Instance count (or grid side for grid suites) used without `--instances`.
pub fn default_size(suite: &str) -> usize {
    match suite {
        "lemma2" => 500,
        "lemma4" => 1000,
        "lemma7" => 2000,
        "klein" => 100_000,
        "trace_norm_chain" => 500,
        "refined_subadditivity" => 500,
        "curvature" => 100,
        "delta_p0" => 10,
        "upsilon" => 200,
        _ => 0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Overrides every suite's instance count; grid suites are truncated
    /// in row-major order.
    pub instances: Option<usize>,
    pub suites: Vec<String>,
    /// Appends a suite with one failing instance (exit-code self-test).
    pub inject_failure: bool,
}

impl VerifyConfig {
    pub fn new(seed: u64) -> Self {
        VerifyConfig {
            seed,
            instances: None,
            suites: SUITES.iter().map(|s| s.to_string()).collect(),
            inject_failure: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRecord {
    pub check: String,
    pub seed: u64,
    pub instances: usize,
    pub failures: usize,
    /// `null` for an empty suite.
    pub worst_slack: Option<f64>,
    pub failing: Vec<usize>,
    /// More failures than `failing` lists.
    pub failing_truncated: bool,
}

impl From<SuiteReport> for SuiteRecord {
    fn from(r: SuiteReport) -> Self {
        SuiteRecord {
            failing_truncated: r.failures > r.failing.len(),
            worst_slack: r.worst_slack.is_finite().then_some(r.worst_slack),
            check: r.check,
            seed: r.seed,
            instances: r.instances,
            failures: r.failures,
            failing: r.failing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub suites: Vec<SuiteRecord>,
    pub total_failures: usize,
    pub pass: bool,
}

fn grid(side_default: usize, n: Option<usize>) -> (usize, Option<usize>) {
    match n {
        None => (side_default, None),
        Some(n) => ((n as f64).sqrt().ceil().max(1.0) as usize, Some(n)),
    }
}

fn run_one(name: &str, seed: u64, n: Option<usize>) -> Result<Vec<SuiteReport>> {
    let count = n.unwrap_or_else(|| default_size(name));
    Ok(match name {
        "lemma2" => vec![lemma2_suite(seed, count)?],
        "lemma4" => vec![lemma4_suite(seed, count)?],
        "lemma7" => vec![lemma7_suite(seed, count)?],
        "klein" => vec![klein_scan(seed, count)?],
        "trace_norm_chain" => vec![trace_norm_chain_suite(seed, count)?],
        "refined_subadditivity" => vec![refined_subadditivity_suite(seed, count)?],
        "curvature" => {
            let (side, limit) = grid(default_size(name), n);
            vec![curvature_suite(side, limit)?]
        }
        "delta_p0" => {
            let (side, limit) = grid(default_size(name), n);
            let (stated, corrected) = delta_p0_suite(side, limit)?;
            vec![stated, corrected]
        }
        "upsilon" => {
            let (stated, corrected) = upsilon_suite(seed, count)?;
            vec![stated, corrected]
        }
        other => {
            return Err(CliError::config(format!(
                "unknown suite '{other}' (expected one of {})",
                SUITES.join(", ")
            )))
        }
    })
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.suites.is_empty() {
        return Err(CliError::config("no suites selected"));
    }
    if cfg.instances == Some(0) {
        return Err(CliError::config("--instances must be at least 1"));
    }
    // validate every name before running anything
    if let Some(bad) = cfg.suites.iter().find(|s| !SUITES.contains(&s.as_str())) {
        return Err(CliError::config(format!(
            "unknown suite '{bad}' (expected one of {})",
            SUITES.join(", ")
        )));
    }
    let mut suites = Vec::new();
    for name in &cfg.suites {
        suites.extend(run_one(name, cfg.seed, cfg.instances)?.into_iter().map(SuiteRecord::from));
    }
    if cfg.inject_failure {
        let mut t = Tally::new("injected_failure", cfg.seed);
        t.record(false, -1.0);
        suites.push(t.finish().into());
    }
    let total_failures = suites.iter().map(|s| s.failures).sum();
    Ok(VerifyReport {
        seed: cfg.seed,
        suites,
        total_failures,
        pass: total_failures == 0,
    })
}
