//! Table, scattering and two-body commands.

use dilute_core::dilute_eos::{free_energy_dilute, pressure_dilute, pressure_polarized, EosOptions};
use dilute_core::finite_box::{two_body_shift, LatticeTwoBody};
use dilute_core::scattering::{scattering_length, scattering_length_ode, RadialPotential, ScatteringResult};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::records::{EosRow, PolarizedRow, ScatteringRow, TwoBodyRow, WavefunctionRow};

/// Chemical potential axis, given directly or through the fugacity.
#[derive(Debug, Clone, PartialEq)]
pub enum Chemical {
    Mu(Vec<f64>),
    Z(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct EosGrid {
    pub beta: Vec<f64>,
    pub chemical: Chemical,
    pub a: Vec<f64>,
    pub q: Vec<u32>,
    /// Spin field grid; switches to polarized rows (q = 2).
    pub m: Option<Vec<f64>>,
    pub options: EosOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum EosRows {
    Plain(Vec<EosRow>),
    Polarized(Vec<PolarizedRow>),
}

fn mus(chem: &Chemical, beta: f64) -> Result<Vec<f64>> {
    match chem {
        Chemical::Mu(m) => Ok(m.clone()),
        Chemical::Z(zs) => zs
            .iter()
            .map(|&z| {
                if z > 0.0 {
                    Ok(z.ln() / beta)
                } else {
                    Err(CliError::config(format!("fugacity must be positive, got {z}")))
                }
            })
            .collect(),
    }
}

/// Rows in β-major, then μ, a, q (or m) order.
pub fn eos_table(g: &EosGrid) -> Result<EosRows> {
    for (name, empty) in [("beta", g.beta.is_empty()), ("a", g.a.is_empty()), ("q", g.q.is_empty())] {
        if empty {
            return Err(CliError::config(format!("{name} grid is empty")));
        }
    }
    if let Some(ms) = &g.m {
        if g.q != [2] {
            return Err(CliError::config("polarized tables are two-component; drop --q or set it to 2"));
        }
        let mut rows = Vec::new();
        for &beta in &g.beta {
            for mu in mus(&g.chemical, beta)? {
                for &a in &g.a {
                    for &m in ms {
                        let (p0, _) = pressure_polarized(beta, mu, m, 0.0)?;
                        let (p, pt) = pressure_polarized(beta, mu, m, a)?;
                        rows.push(PolarizedRow::new(&pt, a, p0, p));
                    }
                }
            }
        }
        return Ok(EosRows::Polarized(rows));
    }
    let mut rows = Vec::new();
    for &beta in &g.beta {
        for mu in mus(&g.chemical, beta)? {
            for &a in &g.a {
                for &q in &g.q {
                    rows.push(EosRow::from(&pressure_dilute(beta, mu, a, q, &g.options)?));
                }
            }
        }
    }
    Ok(EosRows::Plain(rows))
}

/// Density-parameterized rows, β-major, then ϱ, a, q.
pub fn free_energy_table(beta: &[f64], rho: &[f64], a: &[f64], q: &[u32], opts: &EosOptions) -> Result<Vec<EosRow>> {
    let mut rows = Vec::new();
    for &b in beta {
        for &r in rho {
            for &aa in a {
                for &qq in q {
                    rows.push(EosRow::from(&free_energy_dilute(b, r, aa, qq, opts)?));
                }
            }
        }
    }
    if rows.is_empty() {
        return Err(CliError::config("empty parameter grid"));
    }
    Ok(rows)
}

pub fn scattering(v: &RadialPotential, force_ode: bool) -> Result<ScatteringResult> {
    Ok(if force_ode {
        scattering_length_ode(v)?
    } else {
        scattering_length(v)?
    })
}

pub fn scattering_row(v: &RadialPotential, r: &ScatteringResult) -> ScatteringRow {
    ScatteringRow {
        a: r.a,
        range: r.range,
        core_radius: v.core_radius(),
        method: r.method.tag(),
        error_estimate: r.error_estimate,
    }
}

pub fn wavefunction_rows(r: &ScatteringResult) -> Vec<WavefunctionRow> {
    r.u_samples
        .iter()
        .map(|&(x, u)| WavefunctionRow {
            r: x,
            u,
            phi: if x > 0.0 { u / x } else { f64::NAN },
        })
        .collect()
}

/// Soft ball v = 0.5 on r < 1.
pub fn reference_soft_ball() -> RadialPotential {
    RadialPotential::square(1.0, 0.5).expect("valid reference potential")
}

#[derive(Debug, Clone)]
pub struct TwoBodyConfig {
    pub potential: RadialPotential,
    pub side: f64,
    pub n_grid: Vec<usize>,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoBodyReport {
    pub rows: Vec<TwoBodyRow>,
    /// |ratio − 1| strictly decreasing along the listed grids; absent with
    /// fewer than two ratios.
    pub monotone_toward_one: Option<bool>,
}

pub fn two_body(cfg: &TwoBodyConfig) -> Result<TwoBodyReport> {
    if cfg.n_grid.is_empty() {
        return Err(CliError::config("n-grid list is empty"));
    }
    let mut rows = Vec::new();
    for &n in &cfg.n_grid {
        let mut lt = LatticeTwoBody::new(cfg.side, n, cfg.potential.clone());
        lt.tol = cfg.tol;
        let r = two_body_shift(&lt)?;
        rows.push(TwoBodyRow {
            side: cfg.side,
            n_grid: n,
            delta_e: r.delta_e,
            a: r.a,
            luscher_ratio: r.luscher_ratio,
            max_vh2: r.max_vh2,
            iterations: r.iterations,
            residual: r.residual,
        });
    }
    let ratios: Option<Vec<f64>> = rows.iter().map(|r| r.luscher_ratio).collect();
    let monotone_toward_one = match ratios {
        Some(rs) if rs.len() >= 2 => Some(rs.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs())),
        _ => None,
    };
    Ok(TwoBodyReport {
        rows,
        monotone_toward_one,
    })
}
