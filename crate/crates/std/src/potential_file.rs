//! Plain-text potential specs.
//!
//! ```text
//! # square barrier
//! core_radius = 0
//! range = 1
//! segment = 0 0.5 2.0
//! segment = 0.5 1 2.0 0.0   # optional fourth number: linear ramp
//! ```
//!
//! `core_radius` and `range` must each appear exactly once. Segments are
//! listed in order and must tile `[core_radius, range]` without gaps.

use std::path::Path;

use dilute_core::scattering::{RadialPotential, Segment};

use crate::error::{CliError, Result};

/// A parse failure at a 1-based line (0 for whole-file problems).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError { line, msg: msg.into() }
}

fn number(line: usize, field: &str, tok: &str) -> std::result::Result<f64, ParseError> {
    let v: f64 = tok
        .parse()
        .map_err(|_| err(line, format!("{field}: '{tok}' is not a number")))?;
    if !v.is_finite() {
        return Err(err(line, format!("{field}: '{tok}' is not finite")));
    }
    if v < 0.0 {
        return Err(err(line, format!("{field}: {v} is negative")));
    }
    Ok(v)
}

pub fn parse(text: &str) -> std::result::Result<RadialPotential, ParseError> {
    let mut core: Option<(f64, usize)> = None;
    let mut range: Option<(f64, usize)> = None;
    let mut segments: Vec<(Segment, usize)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected 'key = value', found '{body}'")))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "core_radius" | "range" => {
                let slot = if key == "core_radius" { &mut core } else { &mut range };
                if let Some((_, first)) = slot {
                    return Err(err(line, format!("duplicate key '{key}' (first set on line {first})")));
                }
                let mut toks = value.split_whitespace();
                let tok = toks.next().ok_or_else(|| err(line, format!("{key}: missing value")))?;
                if toks.next().is_some() {
                    return Err(err(line, format!("{key}: expected a single number")));
                }
                *slot = Some((number(line, key, tok)?, line));
            }
            "segment" => {
                let toks: Vec<&str> = value.split_whitespace().collect();
                if !(toks.len() == 3 || toks.len() == 4) {
                    return Err(err(
                        line,
                        format!("segment: expected 'r_start r_end value [value_end]', found {} fields", toks.len()),
                    ));
                }
                let r0 = number(line, "segment r_start", toks[0])?;
                let r1 = number(line, "segment r_end", toks[1])?;
                let v0 = number(line, "segment value", toks[2])?;
                if r1 <= r0 {
                    return Err(err(line, format!("segment: r_end {r1} must exceed r_start {r0}")));
                }
                let seg = match toks.get(3) {
                    Some(t) => Segment::ramp(r0, r1, v0, number(line, "segment value_end", t)?),
                    None => Segment::constant(r0, r1, v0),
                };
                segments.push((seg, line));
            }
            other => return Err(err(line, format!("unknown key '{other}'"))),
        }
    }

    let (core_radius, core_line) = core.ok_or_else(|| err(0, "missing key 'core_radius'"))?;
    let (range, range_line) = range.ok_or_else(|| err(0, "missing key 'range'"))?;
    if range < core_radius {
        return Err(err(range_line, format!("range {range} is below core_radius {core_radius}")));
    }
    let tol = 1e-12 * range.max(1.0);
    let mut at = (core_radius, core_line);
    for (seg, line) in &segments {
        if (seg.r_start - at.0).abs() > tol {
            return Err(err(
                *line,
                format!("segment starts at {} but coverage ends at {} (line {})", seg.r_start, at.0, at.1),
            ));
        }
        at = (seg.r_end, *line);
    }
    if (at.0 - range).abs() > tol {
        let line = segments.last().map_or(range_line, |s| s.1);
        return Err(err(line, format!("segments end at {} but range is {range}", at.0)));
    }
    RadialPotential::new(core_radius, range, segments.into_iter().map(|s| s.0).collect())
        .map_err(|e| err(0, e.to_string()))
}

pub fn load(path: &Path) -> Result<RadialPotential> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line,
        msg: e.msg,
    })
}
