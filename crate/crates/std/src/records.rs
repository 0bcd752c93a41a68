//! Output records. CSV columns are the struct fields in declaration order;
//! JSON documents wrap the same records with `schema_version`.

use std::io::Write;

use dilute_core::dilute_eos::{EosReport, Flags, PolarizedPoint};
use serde::Serialize;

use crate::error::Result;

/// Bumped whenever a column or JSON field changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Run metadata; omitted under `--no-meta` so output is byte-reproducible.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub generated_unix: u64,
}

impl Meta {
    pub fn now() -> Self {
        let generated_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Meta {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            generated_unix,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Document<T: Serialize> {
    pub schema_version: u32,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
    #[serde(flatten)]
    pub body: T,
}

pub fn write_json<T: Serialize, W: Write>(mut w: W, command: &'static str, meta: Option<Meta>, body: T) -> Result<()> {
    let doc = Document {
        schema_version: SCHEMA_VERSION,
        command,
        meta,
        body,
    };
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w).map_err(|e| crate::error::CliError::Output(e.to_string()))?;
    Ok(())
}

pub fn write_csv<T: Serialize, W: Write>(w: W, rows: &[T]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush().map_err(|e| crate::error::CliError::Output(e.to_string()))?;
    Ok(())
}

/// `|`-separated flag names, empty when clear.
pub fn flag_string(f: &Flags) -> String {
    let mut names = Vec::new();
    if f.not_dilute {
        names.push("not_dilute");
    }
    if f.low_fugacity {
        names.push("low_fugacity");
    }
    names.join("|")
}

/// One equation-of-state row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EosRow {
    pub beta: f64,
    pub mu: f64,
    pub q: u32,
    pub a: f64,
    pub z: f64,
    pub rho0: f64,
    pub x: f64,
    pub a3rho: f64,
    pub p0: f64,
    pub p: f64,
    pub f0: Option<f64>,
    pub f: Option<f64>,
    pub envelope_scale: f64,
    pub flags: String,
}

pub const EOS_HEADER: [&str; 14] = [
    "beta", "mu", "q", "a", "z", "rho0", "x", "a3rho", "p0", "p", "f0", "f", "envelope_scale", "flags",
];

impl From<&EosReport> for EosRow {
    fn from(r: &EosReport) -> Self {
        EosRow {
            beta: r.beta,
            mu: r.mu,
            q: r.q,
            a: r.a,
            z: r.z,
            rho0: r.rho0,
            x: r.x,
            a3rho: r.a3rho,
            p0: r.p0,
            p: r.p,
            f0: r.f0,
            f: r.f,
            envelope_scale: r.envelope_scale,
            flags: flag_string(&r.flags),
        }
    }
}

/// Spin-polarized row: μ↑ = μ − m/2, μ↓ = μ + m/2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarizedRow {
    pub beta: f64,
    pub mu: f64,
    pub m: f64,
    pub a: f64,
    pub rho_up: f64,
    pub rho_down: f64,
    pub p0: f64,
    pub p: f64,
}

impl PolarizedRow {
    pub fn new(pt: &PolarizedPoint, a: f64, p0: f64, p: f64) -> Self {
        PolarizedRow {
            beta: pt.beta,
            mu: pt.mu,
            m: pt.m,
            a,
            rho_up: pt.rho_up,
            rho_down: pt.rho_down,
            p0,
            p,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatteringRow {
    pub a: f64,
    pub range: f64,
    pub core_radius: f64,
    pub method: &'static str,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WavefunctionRow {
    pub r: f64,
    pub u: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoBodyRow {
    pub side: f64,
    pub n_grid: usize,
    pub delta_e: f64,
    pub a: f64,
    pub luscher_ratio: Option<f64>,
    pub max_vh2: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eos_header_matches_fields() {
        let row = EosRow {
            beta: 1.0,
            mu: 0.0,
            q: 2,
            a: 0.0,
            z: 1.0,
            rho0: 0.1,
            x: 0.0,
            a3rho: 0.0,
            p0: 0.1,
            p: 0.1,
            f0: None,
            f: None,
            envelope_scale: 0.0,
            flags: String::new(),
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), EOS_HEADER.join(","));
    }
}
