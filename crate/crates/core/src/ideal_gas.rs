//! Thermodynamics of the free spin-q Fermi gas in the thermodynamic limit.
//!
//! With t = βp² the momentum integrals reduce to
//!
//! ```text
//! P₀ = q / (4π² β^{5/2}) ∫₀^∞ √t ln(1 + e^{η−t}) dt
//! ϱ₀ = q / (4π² β^{3/2}) ∫₀^∞ √t / (1 + e^{t−η}) dt
//! ```
//!
//! where η = βμ = ln z. Integrals are done in u = √t, which removes the
//! endpoint singularity, and everything is kept in terms of η so that deeply
//! degenerate points (βμ in the thousands) stay finite.


#[allow(unused_imports)]
use num_traits::Float;
use crate::error::{invalid, numeric, Result};
use crate::quadrature::integrate;

const PI: f64 = core::f64::consts::PI;
const REL_TOL: f64 = 1e-14;

/// Grand-canonical state point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoPoint {
    beta: f64,
    mu: f64,
    q: u32,
}

impl ThermoPoint {
    pub fn new(beta: f64, mu: f64, q: u32) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(invalid("beta must be finite and positive"));
        }
        if !mu.is_finite() {
            return Err(invalid("mu must be finite"));
        }
        if q == 0 {
            return Err(invalid("spin multiplicity q must be at least 1"));
        }
        Ok(ThermoPoint { beta, mu, q })
    }

    /// State point at fugacity `z > 0`.
    pub fn from_fugacity(beta: f64, z: f64, q: u32) -> Result<Self> {
        if !(z.is_finite() && z > 0.0) {
            return Err(invalid("fugacity must be finite and positive"));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(invalid("beta must be finite and positive"));
        }
        Self::new(beta, z.ln() / beta, q)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// η = βμ = ln z.
    pub fn ln_z(&self) -> f64 {
        self.beta * self.mu
    }

    /// z = e^{βμ}; `+∞` once βμ exceeds the f64 range.
    pub fn fugacity(&self) -> f64 {
        self.ln_z().exp()
    }

    fn qf(&self) -> f64 {
        self.q as f64
    }
}

/// Ideal-gas pressure, density, energy density and entropy density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealGasValues {
    pub p0: f64,
    pub rho0: f64,
    pub u0: f64,
    pub s0: f64,
}

/// ln(1 + e^x) without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// 1 / (1 + e^{-x}).
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Breakpoints in u = √t: origin, Fermi edge (if any), cutoff.
fn u_breaks(eta: f64) -> ([f64; 5], usize) {
    let t_max = 50.0f64.max(eta + 50.0);
    let u_max = t_max.sqrt();
    if eta > 0.0 {
        let u0 = eta.sqrt();
        // edge width in u is ~1/(2u0); bracket it so the first pass sees it
        let w = (4.0 / u0.max(1.0)).min(0.5 * u0);
        ([0.0, u0 - w, u0, u0 + w, u_max], 5)
    } else {
        ([0.0, 0.5 * u_max, u_max, 0.0, 0.0], 3)
    }
}

/// Bound on ∫_T^∞ √t e^{η−t} dt with T the cutoff: e^{η−T}(√T + 1/(2√T)).
fn tail_bound(eta: f64) -> f64 {
    let t_max = 50.0f64.max(eta + 50.0);
    (eta - t_max).exp() * (t_max.sqrt() + 0.5 / t_max.sqrt())
}

fn finish(what: &str, est: crate::quadrature::Estimate, eta: f64) -> Result<f64> {
    let tail = tail_bound(eta);
    let err = est.error + tail;
    if err > 1e-11 * est.value.abs() && est.value != 0.0 {
        return Err(numeric(what, err / est.value.abs()));
    }
    Ok(est.value)
}

/// I_P(η) = ∫₀^∞ √t ln(1 + e^{η−t}) dt.
fn pressure_integral(eta: f64) -> Result<f64> {
    let (b, n) = u_breaks(eta);
    let est = integrate(
        |u: f64| 2.0 * u * u * softplus(eta - u * u),
        &b[..n],
        REL_TOL,
        0.0,
    )?;
    finish("pressure integral", est, eta)
}

/// I_N(η) = ∫₀^∞ √t / (1 + e^{t−η}) dt.
fn density_integral(eta: f64) -> Result<f64> {
    let (b, n) = u_breaks(eta);
    let est = integrate(
        |u: f64| 2.0 * u * u * logistic(eta - u * u),
        &b[..n],
        REL_TOL,
        0.0,
    )?;
    finish("density integral", est, eta)
}

/// I_D(η) = ∫₀^∞ √t n(1−n) dt with n the Fermi factor.
fn density_slope_integral(eta: f64) -> Result<f64> {
    let (b, n) = u_breaks(eta);
    let est = integrate(
        |u: f64| {
            let x = eta - u * u;
            2.0 * u * u * logistic(x) * logistic(-x)
        },
        &b[..n],
        REL_TOL,
        0.0,
    )?;
    finish("density slope integral", est, eta)
}

/// P₀(β, μ) for q spin states.
pub fn pressure_ideal(pt: &ThermoPoint) -> Result<f64> {
    let b = pt.beta;
    Ok(pt.qf() / (4.0 * PI * PI * b.powf(2.5)) * pressure_integral(pt.ln_z())?)
}

/// ϱ₀(β, μ) = ∂P₀/∂μ.
pub fn density_ideal(pt: &ThermoPoint) -> Result<f64> {
    let b = pt.beta;
    Ok(pt.qf() / (4.0 * PI * PI * b.powf(1.5)) * density_integral(pt.ln_z())?)
}

/// ∂ϱ₀/∂μ at fixed β.
pub fn density_slope(pt: &ThermoPoint) -> Result<f64> {
    let b = pt.beta;
    Ok(pt.qf() / (4.0 * PI * PI * b.sqrt()) * density_slope_integral(pt.ln_z())?)
}

/// Pressure, density, u₀ = (3/2)P₀ and s₀ = β(u₀ + P₀ − μϱ₀).
pub fn energy_entropy_ideal(pt: &ThermoPoint) -> Result<IdealGasValues> {
    let p0 = pressure_ideal(pt)?;
    let rho0 = density_ideal(pt)?;
    let u0 = 1.5 * p0;
    let s0 = pt.beta * (u0 + p0 - pt.mu * rho0);
    Ok(IdealGasValues { p0, rho0, u0, s0 })
}

/// T_F = (6π²/q)^{2/3} ϱ^{2/3}.
pub fn fermi_temperature(rho: f64, q: u32) -> Result<f64> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(invalid("density must be finite and positive"));
    }
    if q == 0 {
        return Err(invalid("spin multiplicity q must be at least 1"));
    }
    Ok((6.0 * PI * PI / q as f64 * rho).powf(2.0 / 3.0))
}

/// Order of the Fermi–Dirac function f_s(z) = −Li_s(−z).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdOrder {
    ThreeHalves,
    FiveHalves,
}

impl FdOrder {
    pub fn from_f64(s: f64) -> Result<Self> {
        if s == 1.5 {
            Ok(FdOrder::ThreeHalves)
        } else if s == 2.5 {
            Ok(FdOrder::FiveHalves)
        } else {
            Err(invalid("only orders 3/2 and 5/2 are supported"))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            FdOrder::ThreeHalves => 1.5,
            FdOrder::FiveHalves => 2.5,
        }
    }
}

/// Alternating series Σ_{k≥1} (−1)^{k+1} z^k / k^s, z ∈ (0, 1], summed with
/// the Cohen–Rodriguez Villegas–Zagier acceleration.
fn alternating_series(s: f64, z: f64) -> f64 {
    const N: usize = 48;
    let nf = N as f64;
    let mut d = (3.0 + 8.0f64.sqrt()).powi(N as i32);
    d = 0.5 * (d + 1.0 / d);
    let mut b = -1.0;
    let mut c = -d;
    let mut sum = 0.0;
    let mut zk = z;
    for k in 0..N {
        let kf = k as f64;
        c = b - c;
        sum += c * zk / (kf + 1.0).powf(s);
        b = (kf + nf) * (kf - nf) * b / ((kf + 0.5) * (kf + 1.0));
        zk *= z;
    }
    sum / d
}

/// f_s(z) = −Li_s(−z) for s ∈ {3/2, 5/2}.
///
/// Series for z ≤ 1; for z > 1 the integral representation shared with
/// [`pressure_ideal`] / [`density_ideal`].
pub fn polylog_fd(order: FdOrder, z: f64) -> Result<f64> {
    if !(z.is_finite() && z > 0.0) {
        return Err(invalid("fugacity must be finite and positive"));
    }
    if z <= 1.0 {
        return Ok(alternating_series(order.value(), z));
    }
    polylog_fd_ln(order, z.ln())
}

/// f_s(e^η), usable when e^η overflows.
pub fn polylog_fd_ln(order: FdOrder, eta: f64) -> Result<f64> {
    if !eta.is_finite() {
        return Err(invalid("ln z must be finite"));
    }
    if eta <= 0.0 {
        return Ok(alternating_series(order.value(), eta.exp()));
    }
    let sqrt_pi = PI.sqrt();
    match order {
        // Γ(5/2) f_{5/2} = (3/2) ∫ √t ln(1+ze^{-t}) dt
        FdOrder::FiveHalves => Ok(pressure_integral(eta)? * 2.0 / sqrt_pi),
        // Γ(3/2) f_{3/2} = ∫ √t n(t) dt
        FdOrder::ThreeHalves => Ok(density_integral(eta)? * 2.0 / sqrt_pi),
    }
}

/// f₂(z) = −Li₂(−z) = ∫₀^∞ ln(1 + z e^{−t}) dt, from ln z.
pub fn fermi_dirac_2(eta: f64) -> f64 {
    if eta <= 0.0 {
        alternating_series(2.0, eta.exp())
    } else {
        PI * PI / 6.0 + 0.5 * eta * eta - alternating_series(2.0, (-eta).exp())
    }
}

/// Limits for [`mu_from_density`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionOptions {
    /// Largest |βμ| the bracket search may reach.
    pub max_abs_eta: f64,
    pub rel_tol: f64,
}

impl Default for InversionOptions {
    fn default() -> Self {
        InversionOptions {
            max_abs_eta: 1e6,
            rel_tol: 1e-13,
        }
    }
}

/// μ with ϱ₀(β, μ, q) = ϱ.
pub fn mu_from_density(beta: f64, rho: f64, q: u32) -> Result<f64> {
    mu_from_density_with(beta, rho, q, &InversionOptions::default())
}

pub fn mu_from_density_with(beta: f64, rho: f64, q: u32, opts: &InversionOptions) -> Result<f64> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(invalid("density must be finite and positive"));
    }
    let probe = ThermoPoint::new(beta, 0.0, q)?;
    let scale = probe.qf() / (4.0 * PI * PI * beta.powf(1.5));
    let target = rho / scale;
    let g = |eta: f64| density_integral(eta).map(|v| v - target);

    // bracket in η
    let mut lo = -1.0;
    let mut hi = 1.0;
    let mut step = 2.0;
    while g(lo)? > 0.0 {
        lo -= step;
        step *= 2.0;
        if lo < -opts.max_abs_eta {
            return Err(numeric("no lower bracket for chemical potential", lo));
        }
    }
    step = 2.0;
    while g(hi)? < 0.0 {
        lo = lo.max(hi);
        hi += step;
        step *= 2.0;
        if hi > opts.max_abs_eta {
            return Err(numeric("no upper bracket for chemical potential", hi));
        }
    }

    // safeguarded Newton on η
    let mut eta = 0.5 * (lo + hi);
    for _ in 0..200 {
        let r = g(eta)?;
        if r.abs() <= opts.rel_tol * target {
            return Ok(eta / beta);
        }
        if r > 0.0 {
            hi = eta;
        } else {
            lo = eta;
        }
        let slope = density_slope_integral(eta)?;
        let newton = eta - r / slope;
        eta = if slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 4.0 * f64::EPSILON * eta.abs().max(1.0) {
            return Ok(eta / beta);
        }
    }
    Err(numeric("chemical potential inversion did not converge", hi - lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // ζ(s) by Euler–Maclaurin with N = 30 and three Bernoulli corrections.
    fn zeta(s: f64) -> f64 {
        let n = 30.0f64;
        let mut sum = 0.0;
        for k in 1..30 {
            sum += (k as f64).powf(-s);
        }
        sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
        sum += s / 12.0 * n.powf(-s - 1.0);
        sum -= s * (s + 1.0) * (s + 2.0) / 720.0 * n.powf(-s - 3.0);
        sum += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) / 30240.0 * n.powf(-s - 5.0);
        sum
    }

    #[test]
    fn series_at_one_matches_eta_function() {
        for s in [1.5, 2.5] {
            let want = (1.0 - 2.0f64.powf(1.0 - s)) * zeta(s);
            let got = alternating_series(s, 1.0);
            assert!(rel(got, want) < 1e-13, "s={s}: {got} vs {want}");
        }
    }

    #[test]
    fn quadrature_matches_series_at_unit_fugacity() {
        let s = polylog_fd(FdOrder::FiveHalves, 1.0).unwrap();
        let q = pressure_integral(0.0).unwrap() * 2.0 / PI.sqrt();
        assert!(rel(q, s) < 1e-12);
    }

    #[test]
    fn example_values() {
        // (1 − 2^{-3/2}) ζ(5/2) and (1 − 2^{-1/2}) ζ(3/2)
        assert!((polylog_fd(FdOrder::FiveHalves, 1.0).unwrap() - 0.867_199_889_012_184).abs() < 1e-12);
        assert!((polylog_fd(FdOrder::ThreeHalves, 1.0).unwrap() - 0.765_147_024_625_408).abs() < 1e-12);
    }

    #[test]
    fn unit_fugacity_pressure_and_density() {
        let pt = ThermoPoint::new(1.0, 0.0, 2).unwrap();
        assert!(rel(pressure_ideal(&pt).unwrap(), 0.038_934_483_093_740_5) < 1e-11);
        assert!(rel(density_ideal(&pt).unwrap(), 0.034_352_638_038_777_7) < 1e-11);
    }

    #[test]
    fn classical_limit() {
        let pt = ThermoPoint::from_fugacity(1.0, 1e-6, 2).unwrap();
        let want = 2.0 * 1e-6 * (4.0 * PI).powf(-1.5);
        // next series term is −z²/2^{5/2}
        assert!(rel(pressure_ideal(&pt).unwrap(), want) < 1e-6);
    }

    #[test]
    fn zero_temperature_density() {
        let pt = ThermoPoint::new(1e4, 1.0, 2).unwrap();
        let want = 1.0 / (3.0 * PI * PI);
        assert!(rel(density_ideal(&pt).unwrap(), want) < 1e-6);
    }

    #[test]
    fn fugacity_overflow_is_tolerated() {
        let pt = ThermoPoint::new(200.0, 9.57, 2).unwrap();
        assert!(pt.fugacity().is_infinite());
        assert!(pressure_ideal(&pt).unwrap().is_finite());
    }

    #[test]
    fn fermi_temperature_examples() {
        let tf = fermi_temperature(1.0, 2).unwrap();
        assert!(rel(tf, 9.570_780_000_627_304) < 1e-14);
        assert!(rel(fermi_temperature(8.0, 2).unwrap(), 4.0 * tf) < 1e-14);
        assert!(fermi_temperature(0.0, 2).is_err());
    }

    #[test]
    fn inversion_round_trip() {
        let pt = ThermoPoint::new(1.0, 0.5, 2).unwrap();
        let rho = density_ideal(&pt).unwrap();
        assert!(rel(mu_from_density(1.0, rho, 2).unwrap(), 0.5) < 1e-9);
    }

    #[test]
    fn inversion_zero_temperature() {
        let mu = mu_from_density(200.0, 1.0, 2).unwrap();
        assert!(rel(mu, fermi_temperature(1.0, 2).unwrap()) < 1e-2);
    }

    #[test]
    fn dilogarithm_branches_meet() {
        // f₂(1) = π²/12 from both sides
        let want = PI * PI / 12.0;
        assert!(rel(fermi_dirac_2(0.0), want) < 1e-14);
        assert!(rel(fermi_dirac_2(1e-9), want) < 1e-8);
        let q = integrate(|t: f64| softplus(3.0 - t), &[0.0, 3.0, 60.0], 1e-14, 0.0).unwrap();
        assert!(rel(fermi_dirac_2(3.0), q.value) < 1e-12);
    }

    #[test]
    fn rejects_bad_order() {
        assert!(FdOrder::from_f64(2.0).is_err());
    }
}
