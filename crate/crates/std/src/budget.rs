//! Budget sweeps over the dilution x = aϱ₀^{1/3}.

use dilute_core::error_budget::{fit_loglog, lower_budget, upper_budget, BudgetReport, BudgetTerm, LowerSchedule, UpperSchedule};
use dilute_core::ideal_gas::{density_ideal, ThermoPoint};
use dilute_core::Error;
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Lower,
    Upper,
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetConfig {
    pub x: Vec<f64>,
    pub kind: Kind,
    pub epsilon: f64,
    pub nu: f64,
    pub beta: f64,
    /// βμ; the state ϱ₀(β, μ) at q = 2 fixes a = x ϱ₀^{-1/3}.
    pub ln_z: f64,
    /// R₀ / a for the upper schedule.
    pub r0_over_a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermRecord {
    pub name: String,
    pub value: f64,
    pub ln_value: Option<f64>,
    pub exponent: Option<f64>,
}

impl From<&BudgetTerm> for TermRecord {
    fn from(t: &BudgetTerm) -> Self {
        TermRecord {
            name: t.name.clone(),
            value: t.value,
            ln_value: t.ln_value,
            exponent: t.exponent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetRow {
    pub kind: &'static str,
    pub x: f64,
    pub a: f64,
    pub rho0: f64,
    /// Set when the schedule invariants fail at this x; the row then
    /// carries no terms.
    pub out_of_validity: bool,
    pub message: Option<String>,
    pub threshold: f64,
    pub total: Option<f64>,
    pub target_exponent: f64,
    pub target: Option<f64>,
    pub ratio: Option<f64>,
    pub pass: Option<bool>,
    pub terms: Vec<TermRecord>,
    pub z_terms: Vec<TermRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fit {
    pub kind: &'static str,
    pub term: String,
    pub points: usize,
    pub fitted_exponent: f64,
    pub expected_exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetSweep {
    pub constants_as_one: bool,
    pub beta: f64,
    pub mu: f64,
    pub epsilon: f64,
    pub nu: f64,
    pub rows: Vec<BudgetRow>,
    pub fits: Vec<Fit>,
}

/// Flat CSV view: one line per (row, term).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetCsvRow {
    pub kind: &'static str,
    pub x: f64,
    pub group: &'static str,
    pub term: String,
    pub value: Option<f64>,
    pub ln_value: Option<f64>,
    pub exponent: Option<f64>,
    pub out_of_validity: bool,
}

fn row(kind: &'static str, x: f64, a: f64, rho0: f64, target_exponent: f64, threshold: f64, r: Result<BudgetReport>) -> Result<BudgetRow> {
    let base = BudgetRow {
        kind,
        x,
        a,
        rho0,
        out_of_validity: x > threshold,
        message: None,
        threshold,
        total: None,
        target_exponent,
        target: None,
        ratio: None,
        pass: None,
        terms: Vec::new(),
        z_terms: Vec::new(),
    };
    match r {
        Ok(rep) => Ok(BudgetRow {
            total: Some(rep.total),
            target: Some(rep.target),
            ratio: Some(rep.ratio),
            pass: Some(rep.pass),
            terms: rep.terms.iter().map(TermRecord::from).collect(),
            z_terms: rep.z_terms.iter().map(TermRecord::from).collect(),
            ..base
        }),
        Err(CliError::Core(Error::OutOfValidity(msg))) => Ok(BudgetRow {
            out_of_validity: true,
            message: Some(msg),
            ..base
        }),
        Err(e) => Err(e),
    }
}

fn fits(rows: &[BudgetRow]) -> Vec<Fit> {
    let mut out: Vec<Fit> = Vec::new();
    for kind in ["lower", "upper"] {
        let valid: Vec<&BudgetRow> = rows.iter().filter(|r| r.kind == kind && !r.out_of_validity).collect();
        let Some(first) = valid.first() else { continue };
        for t in first.terms.iter().chain(&first.z_terms) {
            let pts: Vec<(f64, f64)> = valid
                .iter()
                .filter_map(|r| r.terms.iter().chain(&r.z_terms).find(|u| u.name == t.name).map(|u| (r.x, u.value)))
                .filter(|&(_, v)| v > 0.0 && v.is_finite())
                .collect();
            if pts.len() < 2 || pts.len() < valid.len() {
                continue;
            }
            out.push(Fit {
                kind,
                term: t.name.clone(),
                points: pts.len(),
                fitted_exponent: fit_loglog(&pts),
                expected_exponent: t.exponent,
            });
        }
    }
    out
}

pub fn budget_sweep(cfg: &BudgetConfig) -> Result<BudgetSweep> {
    if cfg.x.is_empty() {
        return Err(CliError::config("x grid is empty"));
    }
    if let Some(x) = cfg.x.iter().find(|&&x| !(x > 0.0)) {
        return Err(CliError::config(format!("x must be positive, got {x}")));
    }
    let mu = cfg.ln_z / cfg.beta;
    let rho0 = density_ideal(&ThermoPoint::new(cfg.beta, mu, 2)?)?;
    let z = cfg.ln_z.exp();
    let mut rows = Vec::new();
    for &x in &cfg.x {
        let a = x / rho0.cbrt();
        if matches!(cfg.kind, Kind::Lower | Kind::Both) {
            let r = LowerSchedule::at_fugacity(a, cfg.beta, z, cfg.epsilon).and_then(|s| lower_budget(&s, z));
            let th = LowerSchedule::y_threshold().cbrt();
            rows.push(row("lower", x, a, rho0, 1.0 / 27.0 - cfg.epsilon, th, r.map_err(CliError::from))?);
        }
        if matches!(cfg.kind, Kind::Upper | Kind::Both) {
            let r = UpperSchedule::at_point(a, cfg.beta, mu, cfg.nu, cfg.r0_over_a * a).and_then(|s| upper_budget(&s));
            let th = UpperSchedule::x_threshold();
            rows.push(row("upper", x, a, rho0, 1.0 / 33.0 - cfg.nu, th, r.map_err(CliError::from))?);
        }
    }
    let fits = fits(&rows);
    Ok(BudgetSweep {
        constants_as_one: true,
        beta: cfg.beta,
        mu,
        epsilon: cfg.epsilon,
        nu: cfg.nu,
        rows,
        fits,
    })
}

pub fn csv_rows(s: &BudgetSweep) -> Vec<BudgetCsvRow> {
    let mut out = Vec::new();
    for r in &s.rows {
        let mut push = |group: &'static str, term: &str, value: Option<f64>, ln_value: Option<f64>, exponent: Option<f64>| {
            out.push(BudgetCsvRow {
                kind: r.kind,
                x: r.x,
                group,
                term: term.into(),
                value,
                ln_value,
                exponent,
                out_of_validity: r.out_of_validity,
            })
        };
        for t in &r.terms {
            push("term", &t.name, Some(t.value), t.ln_value, t.exponent);
        }
        for t in &r.z_terms {
            push("z_term", &t.name, Some(t.value), t.ln_value, t.exponent);
        }
        push("summary", "total", r.total, None, None);
        push("summary", "target", r.target, None, Some(r.target_exponent));
        push("summary", "ratio", r.ratio, None, None);
    }
    out
}
