//! Parameter grids: `1.5`, `0.1,0.5,1`, `start:stop:count` (linear) and
//! `start:stop:count:log`. Comma-separated items may mix the forms.

use crate::error::{CliError, Result};

fn scalar(tok: &str, what: &str) -> Result<f64> {
    let v: f64 = tok
        .trim()
        .parse()
        .map_err(|_| CliError::config(format!("{what}: '{tok}' is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::config(format!("{what}: '{tok}' is not finite")));
    }
    Ok(v)
}

fn range(parts: &[&str], what: &str) -> Result<Vec<f64>> {
    let start = scalar(parts[0], what)?;
    let stop = scalar(parts[1], what)?;
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| CliError::config(format!("{what}: count '{}' is not a positive integer", parts[2])))?;
    if count == 0 {
        return Err(CliError::config(format!("{what}: count must be at least 1")));
    }
    let log = match parts.get(3).map(|s| s.trim()) {
        None | Some("lin") => false,
        Some("log") => true,
        Some(other) => return Err(CliError::config(format!("{what}: unknown spacing '{other}'"))),
    };
    if log && !(start > 0.0 && stop > 0.0) {
        return Err(CliError::config(format!("{what}: log spacing needs positive endpoints")));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = |i: usize| i as f64 / (count - 1) as f64;
    Ok((0..count)
        .map(|i| match i {
            0 => start,
            _ if i == count - 1 => stop,
            _ if log => (start.ln() + step(i) * (stop.ln() - start.ln())).exp(),
            _ => start + step(i) * (stop - start),
        })
        .collect())
}

/// Parses a grid for the flag named `what` (used in messages).
pub fn parse_grid(spec: &str, what: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in spec.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(CliError::config(format!("{what}: empty grid item in '{spec}'")));
        }
        let parts: Vec<&str> = item.split(':').collect();
        match parts.len() {
            1 => out.push(scalar(item, what)?),
            3 | 4 => out.extend(range(&parts, what)?),
            _ => return Err(CliError::config(format!("{what}: cannot read grid item '{item}'"))),
        }
    }
    Ok(out)
}

/// Positive integer grid (spin multiplicities, lattice sizes).
pub fn parse_counts(spec: &str, what: &str) -> Result<Vec<u32>> {
    parse_grid(spec, what)?
        .into_iter()
        .map(|v| {
            if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as u32)
            } else {
                Err(CliError::config(format!("{what}: {v} is not a positive integer")))
            }
        })
        .collect()
}
