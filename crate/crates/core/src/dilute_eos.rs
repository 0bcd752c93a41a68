//! Interaction-corrected equation of state at leading order in a.
//!
//! P = P₀ − 4πa(1 − 1/q)ϱ₀², f = f₀ + 4πa(1 − 1/q)ϱ². Error envelopes are
//! reported as scales only; no constant is attached to them.


#[allow(unused_imports)]
use num_traits::Float;
use crate::error::{invalid, Error, Result};
use crate::ideal_gas::{density_ideal, density_slope, fermi_temperature, mu_from_density, pressure_ideal, ThermoPoint};

const PI: f64 = core::f64::consts::PI;

/// Thresholds behind the validity flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validity {
    pub max_a3rho: f64,
    pub min_z: f64,
}

impl Default for Validity {
    fn default() -> Self {
        Validity {
            max_a3rho: 1e-2,
            min_z: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosOptions {
    /// Envelope exponent, 0 < α < 1/33.
    pub alpha: f64,
    pub validity: Validity,
}

impl Default for EosOptions {
    fn default() -> Self {
        EosOptions {
            alpha: 1.0 / 34.0,
            validity: Validity::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Flags {
    /// a³ϱ₀ above threshold.
    pub not_dilute: bool,
    /// z below threshold.
    pub low_fugacity: bool,
}

impl Flags {
    pub fn any(&self) -> bool {
        self.not_dilute || self.low_fugacity
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosReport {
    pub beta: f64,
    pub mu: f64,
    pub q: u32,
    pub a: f64,
    pub z: f64,
    pub ln_z: f64,
    pub rho0: f64,
    /// x = aϱ₀^{1/3}.
    pub x: f64,
    pub a3rho: f64,
    pub t_over_tf: f64,
    pub p0: f64,
    pub p: f64,
    /// Free energies, present for density-parameterized reports.
    pub f0: Option<f64>,
    pub f: Option<f64>,
    pub envelope_scale: f64,
    pub flags: Flags,
}

fn spin_factor(q: u32) -> f64 {
    1.0 - 1.0 / q as f64
}

fn check(a: f64, alpha: f64) -> Result<()> {
    if !(a.is_finite() && a >= 0.0) {
        return Err(invalid("scattering length must be finite and non-negative"));
    }
    if !(alpha > 0.0 && alpha < 1.0 / 33.0) {
        return Err(invalid("alpha must lie in (0, 1/33)"));
    }
    Ok(())
}

fn flags(a3rho: f64, ln_z: f64, v: &Validity) -> Flags {
    Flags {
        not_dilute: a3rho > v.max_a3rho,
        low_fugacity: ln_z < v.min_z.ln(),
    }
}

fn report(pt: &ThermoPoint, a: f64, rho0: f64, p0: f64, opts: &EosOptions) -> Result<EosReport> {
    let q = pt.q();
    let x = a * rho0.cbrt();
    let a3rho = a * a * a * rho0;
    let t_f = fermi_temperature(rho0, q)?;
    Ok(EosReport {
        beta: pt.beta(),
        mu: pt.mu(),
        q,
        a,
        z: pt.fugacity(),
        ln_z: pt.ln_z(),
        rho0,
        x,
        a3rho,
        t_over_tf: 1.0 / (pt.beta() * t_f),
        p0,
        p: p0 - 4.0 * PI * a * spin_factor(q) * rho0 * rho0,
        f0: None,
        f: None,
        envelope_scale: a * rho0 * rho0 * x.powf(opts.alpha),
        flags: flags(a3rho, pt.ln_z(), &opts.validity),
    })
}

/// P(β, μ) = P₀ − 4πa(1 − 1/q)ϱ₀².
pub fn pressure_dilute(beta: f64, mu: f64, a: f64, q: u32, opts: &EosOptions) -> Result<EosReport> {
    check(a, opts.alpha)?;
    let pt = ThermoPoint::new(beta, mu, q)?;
    let p0 = pressure_ideal(&pt)?;
    let rho0 = density_ideal(&pt)?;
    report(&pt, a, rho0, p0, opts)
}

/// f(β, ϱ) = f₀ + 4πa(1 − 1/q)ϱ² with f₀ = μ₀ϱ − P₀(β, μ₀).
pub fn free_energy_dilute(beta: f64, rho: f64, a: f64, q: u32, opts: &EosOptions) -> Result<EosReport> {
    check(a, opts.alpha)?;
    let mu0 = mu_from_density(beta, rho, q)?;
    let pt = ThermoPoint::new(beta, mu0, q)?;
    let p0 = pressure_ideal(&pt)?;
    let mut r = report(&pt, a, rho, p0, opts)?;
    let f0 = mu0 * rho - p0;
    r.f0 = Some(f0);
    r.f = Some(f0 + 4.0 * PI * a * spin_factor(q) * rho * rho);
    Ok(r)
}

/// Two single-species gases at μ↑ = μ − m/2 and μ↓ = μ + m/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizedPoint {
    pub beta: f64,
    pub mu: f64,
    pub m: f64,
    pub rho_up: f64,
    pub rho_down: f64,
}

/// P = P₀↑ + P₀↓ − 8πaϱ↑ϱ↓.
pub fn pressure_polarized(beta: f64, mu: f64, m: f64, a: f64) -> Result<(f64, PolarizedPoint)> {
    if !(a.is_finite() && a >= 0.0) {
        return Err(invalid("scattering length must be finite and non-negative"));
    }
    if !m.is_finite() {
        return Err(invalid("spin field must be finite"));
    }
    let up = ThermoPoint::new(beta, mu - 0.5 * m, 1)?;
    let down = ThermoPoint::new(beta, mu + 0.5 * m, 1)?;
    let rho_up = density_ideal(&up)?;
    let rho_down = density_ideal(&down)?;
    let p = pressure_ideal(&up)? + pressure_ideal(&down)? - 8.0 * PI * a * rho_up * rho_down;
    Ok((
        p,
        PolarizedPoint {
            beta,
            mu,
            m,
            rho_up,
            rho_down,
        },
    ))
}

/// (3/5)(6π²/q)^{2/3}ϱ^{5/3} + 4πa(1 − 1/q)ϱ².
pub fn energy_density_ground(rho: f64, a: f64, q: u32) -> Result<f64> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(invalid("density must be finite and positive"));
    }
    if !(a.is_finite() && a >= 0.0) {
        return Err(invalid("scattering length must be finite and non-negative"));
    }
    let kinetic = 0.6 * fermi_temperature(rho, q)? * rho;
    Ok(kinetic + 4.0 * PI * a * spin_factor(q) * rho * rho)
}

/// 2πϱ²/|ln a²ϱ|, valid for a²ϱ ≤ 0.1.
pub fn interaction_energy_2d(rho: f64, a: f64) -> Result<f64> {
    if !(rho.is_finite() && rho > 0.0 && a.is_finite() && a > 0.0) {
        return Err(invalid("density and scattering length must be finite and positive"));
    }
    let y = a * a * rho;
    if y > 0.1 {
        return Err(Error::OutOfValidity(alloc::format!("a²ϱ = {y} exceeds 0.1")));
    }
    Ok(2.0 * PI * rho * rho / y.ln().abs())
}

/// Relative-deviation scale for the one-sided densities ϱ±.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEnvelope {
    pub rho0: f64,
    /// (aϱ₀^{1/3})^{(1+α)/2}; the deviation is bounded by an unknown
    /// constant times this.
    pub scale: f64,
    /// Finite-difference step in μ: scale · max(μ, 1/β).
    pub probe_step: f64,
    /// ϱ₀ − 8πa(1 − 1/q)ϱ₀ ∂ϱ₀/∂μ. Conjectural: the μ-derivative of the
    /// first-order pressure, not a proven statement.
    pub conjectured_rho: f64,
}

pub fn density_envelope(beta: f64, mu: f64, a: f64, q: u32, alpha: f64) -> Result<DensityEnvelope> {
    check(a, alpha)?;
    let pt = ThermoPoint::new(beta, mu, q)?;
    let rho0 = density_ideal(&pt)?;
    let scale = (a * rho0.cbrt()).powf(0.5 * (1.0 + alpha));
    let slope = density_slope(&pt)?;
    Ok(DensityEnvelope {
        rho0,
        scale,
        probe_step: scale * mu.max(1.0 / beta),
        conjectured_rho: rho0 - 8.0 * PI * a * spin_factor(q) * rho0 * slope,
    })
}
