//! Finite-volume spectral sums for the free gas, the Lemma 4 sandwich,
//! the finite-size gap, Fermi-sea curvature bounds, and a lattice two-body
//! check of the 8πa coupling.
//!
//! Mode sums run over shells |n|² = m with precomputed multiplicities, so a
//! sum costs O(m_max) evaluations rather than O(m_max^{3/2}). Every summand
//! handled here is bounded by z·e^{−βe}, which gives the Gaussian tail bound
//!
//! ```text
//! Σ_{|n|² > M} z e^{−βc|n|²} ≤ z e^{−βcM/2} Θ(βc/2)³
//! ```
//!
//! with Θ the one-axis theta sum (over n ≥ 1 for Dirichlet, n ∈ ℤ periodic).

#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;


use crate::error::{invalid, numeric, Error, Result};
use crate::ideal_gas::{
    density_ideal, fermi_dirac_2, logistic, polylog_fd_ln, pressure_ideal, softplus, FdOrder, ThermoPoint,
};
use crate::lanczos;
use crate::quadrature::{gauss10_points, integrate};
use crate::scattering::{scattering_length, RadialPotential};
use crate::suite::{run_random, SuiteReport, Tally};
use rand::Rng;

const PI: f64 = core::f64::consts::PI;
/// Relative size of the omitted tail we accept.
const TAIL_REL: f64 = 1e-13;
/// Largest shell index a table is allowed to hold.
pub const MAX_SHELL: usize = 4_000_000;

/// θ(x) = Σ_{n≥1} e^{−xn²}, x > 0.
pub fn theta(x: f64) -> f64 {
    if x < PI {
        // Jacobi: Σ_{n∈ℤ} e^{−xn²} = √(π/x) Σ_{k∈ℤ} e^{−π²k²/x}
        let mut s = 1.0;
        let mut k = 1.0;
        loop {
            let t = 2.0 * (-PI * PI * k * k / x).exp();
            s += t;
            if t < 1e-18 * s {
                break;
            }
            k += 1.0;
        }
        0.5 * ((PI / x).sqrt() * s - 1.0)
    } else {
        let mut s = 0.0;
        let mut n = 1.0;
        loop {
            let t = (-x * n * n).exp();
            s += t;
            if t < 1e-18 * s || t == 0.0 {
                break;
            }
            n += 1.0;
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Dirichlet,
    Periodic,
}

/// Cube of side ℓ. `cutoff`, when given, caps |n|² (per-axis |n| ≤ cutoff
/// bounds it by 3·cutoff²; we use cutoff² on the radius).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxSpec {
    pub side: f64,
    pub boundary: Boundary,
    pub cutoff: Option<usize>,
}

impl BoxSpec {
    pub fn new(side: f64, boundary: Boundary) -> Result<Self> {
        if !(side.is_finite() && side > 0.0) {
            return Err(invalid("box side must be finite and positive"));
        }
        Ok(BoxSpec {
            side,
            boundary,
            cutoff: None,
        })
    }

    /// Energy quantum: e = c·|n|².
    pub fn quantum(&self) -> f64 {
        match self.boundary {
            Boundary::Dirichlet => (PI / self.side).powi(2),
            Boundary::Periodic => (2.0 * PI / self.side).powi(2),
        }
    }

    fn axis_theta(&self, x: f64) -> f64 {
        match self.boundary {
            Boundary::Dirichlet => theta(x),
            Boundary::Periodic => 1.0 + 2.0 * theta(x),
        }
    }

    /// ln of the tail bound for shells beyond `m`.
    fn ln_tail(&self, beta: f64, ln_z: f64, m: f64) -> f64 {
        let bc = beta * self.quantum();
        ln_z - 0.5 * bc * m + 3.0 * self.axis_theta(0.5 * bc).ln()
    }
}

/// Shell multiplicities r(m) = #{n : |n|² = m} for n ∈ ℕ³ (Dirichlet,
/// components ≥ 1) or n ∈ ℤ³ (periodic).
#[derive(Debug, Clone)]
pub struct ShellTable {
    boundary: Boundary,
    counts: Vec<u32>,
}

impl ShellTable {
    pub fn new(boundary: Boundary, m_max: usize) -> Result<Self> {
        if m_max > MAX_SHELL {
            return Err(numeric(
                format!("shell table of size {m_max} exceeds the limit {MAX_SHELL}"),
                f64::INFINITY,
            ));
        }
        let mut counts = vec![0u32; m_max + 1];
        let n_max = (m_max as f64).sqrt() as usize + 1;
        let lo = match boundary {
            Boundary::Dirichlet => 1,
            Boundary::Periodic => 0,
        };
        // weight 2 per nonzero component accounts for signs in ℤ³
        let w = |k: usize| -> u32 {
            match boundary {
                Boundary::Periodic if k > 0 => 2,
                _ => 1,
            }
        };
        for i in lo..=n_max {
            let mi = i * i;
            if mi > m_max {
                break;
            }
            for j in lo..=n_max {
                let mij = mi + j * j;
                if mij > m_max {
                    break;
                }
                let wij = w(i) * w(j);
                for k in lo..=n_max {
                    let m = mij + k * k;
                    if m > m_max {
                        break;
                    }
                    counts[m] += wij * w(k);
                }
            }
        }
        Ok(ShellTable { boundary, counts })
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn m_max(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn count(&self, m: usize) -> u32 {
        self.counts.get(m).copied().unwrap_or(0)
    }
}

/// Σ_n term(c|n|²) over modes with energy ≤ `cap`, for summands bounded by
/// e^{ln_z − βe}. Returns the sum and the bound on what was omitted.
fn shell_sum<F: Fn(f64) -> f64>(
    table: &ShellTable,
    bx: &BoxSpec,
    beta: f64,
    ln_z: f64,
    cap: Option<f64>,
    term: F,
) -> Result<(f64, f64)> {
    let c = bx.quantum();
    let cap_m = cap.map(|e| (e / c).floor());
    if let Some(m) = cap_m {
        if m < 0.0 {
            return Ok((0.0, 0.0));
        }
    }
    // first occupied shell gives a floor for the sum
    let m0 = match bx.boundary {
        Boundary::Dirichlet => 3,
        Boundary::Periodic => 0,
    };
    if cap_m.is_some_and(|m| m < m0 as f64) {
        return Ok((0.0, 0.0));
    }
    let floor = term(c * m0 as f64);
    // shells needed so the Gaussian tail is below TAIL_REL·floor
    let need = if floor > 0.0 {
        let bc = beta * c;
        let excess = ln_z + 3.0 * bx.axis_theta(0.5 * bc).ln() - (TAIL_REL * floor).ln();
        (2.0 * excess / bc).ceil().max(m0 as f64)
    } else {
        0.0
    };
    let mut m_end = need;
    if let Some(m) = cap_m {
        m_end = m_end.min(m);
    }
    if let Some(nc) = bx.cutoff {
        m_end = m_end.min((nc * nc) as f64);
    }
    if m_end > table.m_max() as f64 {
        let tail = bx.ln_tail(beta, ln_z, table.m_max() as f64).exp();
        return Err(numeric(
            format!("mode cutoff insufficient: need shells up to {m_end}, table holds {}", table.m_max()),
            tail,
        ));
    }
    let m_end = m_end as usize;
    let mut sum = 0.0;
    let mut comp = 0.0;
    for m in 0..=m_end {
        let k = table.counts[m];
        if k == 0 {
            continue;
        }
        // Neumaier summation
        let t = k as f64 * term(c * m as f64);
        let s = sum + t;
        comp += if sum.abs() >= t.abs() { (sum - s) + t } else { (t - s) + sum };
        sum = s;
    }
    sum += comp;
    let capped = cap_m.is_some_and(|m| m as usize <= m_end);
    let tail = if capped {
        0.0
    } else {
        bx.ln_tail(beta, ln_z, m_end as f64).exp()
    };
    if floor > 0.0 && tail > 1e-12 * sum {
        return Err(numeric("mode cutoff insufficient", tail / sum));
    }
    Ok((sum, tail))
}

/// Shell table large enough for a sum at (β, ln z) in `bx`.
pub fn table_for(bx: &BoxSpec, beta: f64, ln_z: f64) -> Result<ShellTable> {
    let c = bx.quantum();
    let bc = beta * c;
    // the smallest summand is at least ~ min(1, z)·e^{−3βc}; size from that
    let floor_ln = ln_z.min(0.0) - 3.0 * bc - 1.0;
    let excess = ln_z + 3.0 * bx.axis_theta(0.5 * bc).ln() - TAIL_REL.ln() - floor_ln;
    let mut m = (2.0 * excess / bc).ceil().max(3.0) as usize;
    if let Some(nc) = bx.cutoff {
        m = m.min(nc * nc);
    }
    ShellTable::new(bx.boundary, m)
}

/// (2/βℓ³) Σ_modes ln(1 + z e^{−βe}), spin factor 2.
pub fn box_pressure(beta: f64, mu: f64, bx: &BoxSpec) -> Result<f64> {
    let pt = ThermoPoint::new(beta, mu, 2)?;
    let table = table_for(bx, beta, pt.ln_z())?;
    box_pressure_with(&table, beta, mu, bx)
}

pub fn box_pressure_with(table: &ShellTable, beta: f64, mu: f64, bx: &BoxSpec) -> Result<f64> {
    let pt = ThermoPoint::new(beta, mu, 2)?;
    let eta = pt.ln_z();
    let (s, _) = shell_sum(table, bx, beta, eta, None, |e| softplus(eta - beta * e))?;
    Ok(2.0 * s / (beta * bx.side.powi(3)))
}

/// Monotone decreasing test functions for Lemma 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    /// f ≡ 0.
    Zero,
    /// f(t) = e^{−βt}.
    Boltzmann { beta: f64 },
    /// f(t) = 1/(1 + e^{β(t−μ)}).
    Fermi { beta: f64, mu: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma4Report {
    /// (2π)^{-3} ∫ f(p²) dp.
    pub integral: f64,
    /// ℓ^{-3} Tr f(−Δ_D).
    pub trace_density: f64,
    /// (2π)^{-3} ∫ f(p²)[1 − 3π/(ℓ|p|)] dp.
    pub lower_bound: f64,
    pub pass: bool,
}

/// Both sides of the sandwich. Integrals in closed form:
/// ∫ √t f dt and ∫ f dt for the two families.
fn lemma4_integrals(f: TestFunction) -> Result<(f64, f64)> {
    let sqrt_pi = PI.sqrt();
    match f {
        TestFunction::Zero => Ok((0.0, 0.0)),
        TestFunction::Boltzmann { beta } => Ok((0.5 * sqrt_pi * beta.powf(-1.5), 1.0 / beta)),
        TestFunction::Fermi { beta, mu } => {
            let eta = beta * mu;
            let half = 0.5 * sqrt_pi * beta.powf(-1.5) * polylog_fd_ln(FdOrder::ThreeHalves, eta)?;
            Ok((half, softplus(eta) / beta))
        }
    }
}

pub fn lemma4_check(f: TestFunction, ell: f64) -> Result<Lemma4Report> {
    let bx = BoxSpec::new(ell, Boundary::Dirichlet)?;
    match f {
        TestFunction::Fermi { beta, mu } => {
            let table = table_for(&bx, beta, beta * mu)?;
            lemma4_check_with(&table, f, ell)
        }
        _ => lemma4_check_with(&ShellTable::new(Boundary::Dirichlet, 0)?, f, ell),
    }
}

/// As [`lemma4_check`], reusing a Dirichlet shell table.
pub fn lemma4_check_with(table: &ShellTable, f: TestFunction, ell: f64) -> Result<Lemma4Report> {
    let bx = BoxSpec::new(ell, Boundary::Dirichlet)?;
    let (i_half, i_flat) = lemma4_integrals(f)?;
    let norm = 1.0 / (8.0 * PI * PI * PI);
    let integral = norm * 2.0 * PI * i_half;
    let lower_bound = norm * (2.0 * PI * i_half - 3.0 * PI / ell * 2.0 * PI * i_flat);
    let trace_density = match f {
        TestFunction::Zero => 0.0,
        TestFunction::Boltzmann { beta } => (theta(beta * bx.quantum()) / ell).powi(3),
        TestFunction::Fermi { beta, mu } => {
            if !(beta > 0.0 && beta.is_finite() && mu.is_finite()) {
                return Err(invalid("Fermi test function needs finite β > 0 and μ"));
            }
            let eta = beta * mu;
            let (s, _) = shell_sum(table, &bx, beta, eta, None, |e| logistic(eta - beta * e))?;
            s / ell.powi(3)
        }
    };
    let slack = 1e-12 * integral;
    let pass = integral + slack >= trace_density && trace_density + slack >= lower_bound;
    Ok(Lemma4Report {
        integral,
        trace_density,
        lower_bound,
        pass,
    })
}

/// ϱ_Q: (2/ℓ³) Σ over Dirichlet modes with e ≤ Kϱ₀^{2/3} of the Fermi factor.
pub fn rho_q(beta: f64, mu: f64, ell: f64, k: f64, rho0_ref: f64) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(invalid("K must be finite and positive"));
    }
    if !(rho0_ref > 0.0 && rho0_ref.is_finite()) {
        return Err(invalid("reference density must be finite and positive"));
    }
    let pt = ThermoPoint::new(beta, mu, 2)?;
    let bx = BoxSpec::new(ell, Boundary::Dirichlet)?;
    let eta = pt.ln_z();
    let cap = k * rho0_ref.powf(2.0 / 3.0);
    let mut m = (cap / bx.quantum()).floor() as usize;
    let auto = table_for(&bx, beta, eta)?;
    m = m.min(auto.m_max());
    let table = ShellTable::new(Boundary::Dirichlet, m.max(3))?;
    let (s, _) = shell_sum(&table, &bx, beta, eta, Some(cap), |e| logistic(eta - beta * e))?;
    Ok(2.0 * s / ell.powi(3))
}

/// g(z) = ∫ dp |p|^{-1} ln(1 + z e^{−p²}) = 2π f₂(z).
pub fn g_of_z(ln_z: f64) -> f64 {
    2.0 * PI * fermi_dirac_2(ln_z)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    /// (3/(4π²)) g(z) / (β²ℓ).
    pub g_term: f64,
    /// z e^{−βKϱ₀^{2/3}/2} / (√2 π² β^{5/2}).
    pub exp_term: f64,
    pub gap: f64,
    pub p0: f64,
    /// (2/βℓ³) Σ_{e ≤ Kϱ₀^{2/3}} ln(1 + z e^{−βe}).
    pub box_pressure_q: f64,
    pub pass: bool,
}

pub fn finite_size_gap(beta: f64, mu: f64, ell: f64, k: f64) -> Result<GapReport> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(invalid("K must be finite and positive"));
    }
    let pt = ThermoPoint::new(beta, mu, 2)?;
    let bx = BoxSpec::new(ell, Boundary::Dirichlet)?;
    let eta = pt.ln_z();
    let p0 = pressure_ideal(&pt)?;
    let rho0 = density_ideal(&pt)?;
    let cap = k * rho0.powf(2.0 / 3.0);
    let g_term = 3.0 * g_of_z(eta) / (4.0 * PI * PI * beta * beta * ell);
    let exp_term = (eta - 0.5 * beta * cap).exp() / (2.0f64.sqrt() * PI * PI * beta.powf(2.5));
    let auto = table_for(&bx, beta, eta)?;
    let m = ((cap / bx.quantum()).floor() as usize).min(auto.m_max()).max(3);
    let table = ShellTable::new(Boundary::Dirichlet, m)?;
    let (s, _) = shell_sum(&table, &bx, beta, eta, Some(cap), |e| softplus(eta - beta * e))?;
    let box_pressure_q = 2.0 * s / (beta * ell.powi(3));
    let gap = g_term + exp_term;
    Ok(GapReport {
        g_term,
        exp_term,
        gap,
        p0,
        box_pressure_q,
        pass: box_pressure_q >= p0 - gap - 1e-12 * p0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureReport {
    pub lhs_r: f64,
    pub rhs_r: f64,
    pub lhs_s: f64,
    pub rhs_s: f64,
    pub pass: bool,
}

/// Thermodynamic limits of the Fermi-sea curvature bounds, per unit volume
/// and one spin state (e(μ)/V = −(2/5)μ^{5/2}/(6π²), Tr P_μ/V = μ^{3/2}/(6π²)).
pub fn fermi_sea_curvature(mu: f64, r: f64, s: f64) -> Result<CurvatureReport> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(invalid("mu must be finite and positive"));
    }
    if !(0.0..=mu).contains(&r) {
        return Err(invalid("r must lie in [0, mu]"));
    }
    if !(s >= 0.0 && s.is_finite()) {
        return Err(invalid("s must be finite and non-negative"));
    }
    let c = 1.0 / (6.0 * PI * PI);
    let f = |x: f64| 0.4 * x.max(0.0).powf(2.5);
    let lhs_r = c * (-f(mu - r) + f(mu) - r * mu.powf(1.5));
    let lhs_s = c * (-f(mu + s) + f(mu) + s * mu.powf(1.5));
    let k = 1.0 / (8.0 * PI * PI);
    let rhs_r = -k * mu.sqrt() * r * r;
    let rhs_s = -k * mu.sqrt() * s * s * (1.0 + s / mu).sqrt();
    let slack = |a: f64, b: f64| 1e-12 * a.abs().max(b.abs()).max(c * f(mu) * 1e-3);
    let pass = lhs_r >= rhs_r - slack(lhs_r, rhs_r) && lhs_s >= rhs_s - slack(lhs_s, rhs_s);
    Ok(CurvatureReport {
        lhs_r,
        rhs_r,
        lhs_s,
        rhs_s,
        pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaP0Report {
    /// −2P₀(β,μ) + P₀(β/2,μ) + P₀(∞,μ), q = 2.
    pub delta_p0: f64,
    /// (2/3π²)(μ^{1/2}/β²)(1 + 1/βμ).
    pub bound: f64,
    /// (4/π²)(μ^{1/2}/β²)(1 + 1/βμ): the same estimate with the spin factor
    /// and the radial integrals carried through exactly.
    pub corrected_bound: f64,
    /// ∫_{p² ≤ μ} ln(1 + z^{-1}e^{βp²}) dp and its stated bound.
    pub first_integral: f64,
    pub first_bound: f64,
    /// ∫_{p² ≥ μ} ln(1 + z e^{−βp²}) dp and its stated bound.
    pub second_integral: f64,
    pub second_bound: f64,
    pub intermediates_pass: bool,
    pub pass: bool,
}

/// P₀(∞, μ) for q = 2.
pub fn pressure_zero_temperature(mu: f64) -> f64 {
    2.0 / (15.0 * PI * PI) * mu.max(0.0).powf(2.5)
}

pub fn delta_p0_bound(beta: f64, mu: f64) -> Result<DeltaP0Report> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(invalid("mu must be finite and positive"));
    }
    let p = pressure_ideal(&ThermoPoint::new(beta, mu, 2)?)?;
    let p_half = pressure_ideal(&ThermoPoint::new(0.5 * beta, mu, 2)?)?;
    let delta_p0 = -2.0 * p + p_half + pressure_zero_temperature(mu);
    let shape = mu.sqrt() / (beta * beta) * (1.0 + 1.0 / (beta * mu));
    let bound = 2.0 / (3.0 * PI * PI) * shape;
    let corrected_bound = 4.0 / (PI * PI) * shape;

    let eta = beta * mu;
    let pf = mu.sqrt();
    let first = integrate(
        |p: f64| 4.0 * PI * p * p * softplus(beta * p * p - eta),
        &[0.0, 0.5 * pf, pf],
        1e-13,
        0.0,
    )?;
    let p_end = ((eta + 60.0) / beta).sqrt();
    let w = (4.0 / (beta * pf)).min(0.5 * (p_end - pf));
    let second = integrate(
        |p: f64| 4.0 * PI * p * p * softplus(eta - beta * p * p),
        &[pf, pf + w, p_end],
        1e-13,
        0.0,
    )?;
    let z_ratio = -(-eta).exp_m1(); // (z − 1)/z
    let first_bound = 2.0 * PI / 3.0 * pf / beta * z_ratio;
    let second_bound = 2.0 * PI / 3.0 * pf / beta * (1.0 + 1.0 / eta);
    let intermediates_pass = first.value <= first_bound && second.value <= second_bound;
    Ok(DeltaP0Report {
        delta_p0,
        bound,
        corrected_bound,
        first_integral: first.value,
        first_bound,
        second_integral: second.value,
        second_bound,
        intermediates_pass,
        pass: delta_p0 >= -1e-12 * p && delta_p0 <= bound,
    })
}

/// Relative two-body problem on a periodic lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeTwoBody {
    pub side: f64,
    pub n_grid: usize,
    pub potential: RadialPotential,
    /// Residual tolerance for the eigensolver.
    pub tol: f64,
}

impl LatticeTwoBody {
    pub fn new(side: f64, n_grid: usize, potential: RadialPotential) -> Self {
        LatticeTwoBody {
            side,
            n_grid,
            potential,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoBodyResult {
    /// Lowest eigenvalue of −2Δ_h + v (the free lattice ground state is 0).
    pub delta_e: f64,
    pub a: f64,
    /// ΔE·L³/(8πa); `None` for a vanishing potential.
    pub luscher_ratio: Option<f64>,
    pub max_vh2: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Lattice potential: the radial profile is integrated with a spherical
/// Gauss rule and each quadrature mass is spread to its 8 surrounding nodes
/// with trilinear weights. The total Σ V h³ equals ∫ v exactly.
fn deposit(v: &RadialPotential, n: usize, h: f64) -> Vec<f64> {
    let mut grid = vec![0.0; n * n * n];
    let n_cos = 48;
    let n_phi = 96;
    let cos_pts = gauss10_points(-1.0, 1.0, n_cos / 10 + 1);
    let dphi = 2.0 * PI / n_phi as f64;
    for seg in v.segments() {
        let panels = ((seg.r_end - seg.r_start) / (0.125 * h)).ceil().max(4.0) as usize;
        for (r, wr) in gauss10_points(seg.r_start, seg.r_end, panels) {
            let vr = seg.value(r);
            if vr == 0.0 {
                continue;
            }
            for &(ct, wc) in &cos_pts {
                let st = (1.0 - ct * ct).max(0.0).sqrt();
                for k in 0..n_phi {
                    let phi = (k as f64 + 0.5) * dphi;
                    let mass = vr * r * r * wr * wc * dphi;
                    let pos = [r * st * phi.cos(), r * st * phi.sin(), r * ct];
                    let mut base = [0usize; 3];
                    let mut frac = [0.0; 3];
                    for d in 0..3 {
                        let g = pos[d] / h;
                        let f = g.floor();
                        frac[d] = g - f;
                        base[d] = (f as i64).rem_euclid(n as i64) as usize;
                    }
                    for corner in 0..8 {
                        let mut w = mass;
                        let mut idx = [0usize; 3];
                        for d in 0..3 {
                            let up = (corner >> d) & 1 == 1;
                            w *= if up { frac[d] } else { 1.0 - frac[d] };
                            idx[d] = if up { (base[d] + 1) % n } else { base[d] };
                        }
                        grid[(idx[0] * n + idx[1]) * n + idx[2]] += w;
                    }
                }
            }
        }
    }
    let cell = h * h * h;
    grid.iter_mut().for_each(|x| *x /= cell);
    grid
}

pub fn two_body_shift(cfg: &LatticeTwoBody) -> Result<TwoBodyResult> {
    let v = &cfg.potential;
    let n = cfg.n_grid;
    let l = cfg.side;
    if n < 16 {
        return Err(invalid("n_grid must be at least 16"));
    }
    if !(l.is_finite() && l > 0.0) {
        return Err(invalid("box side must be finite and positive"));
    }
    if v.core_radius() > 0.0 {
        return Err(invalid("lattice check needs a soft potential (no hard core)"));
    }
    if v.range() >= 0.5 * l {
        return Err(invalid("potential range must be below L/2"));
    }
    let a = scattering_length(v)?.a;
    if a / l > 0.05 {
        return Err(Error::OutOfValidity(format!("a/L = {} exceeds 0.05", a / l)));
    }
    if v.tail_integral() == 0.0 {
        return Ok(TwoBodyResult {
            delta_e: 0.0,
            a,
            luscher_ratio: None,
            max_vh2: 0.0,
            iterations: 0,
            residual: 0.0,
        });
    }
    let h = l / n as f64;
    let pot = deposit(v, n, h);
    let max_vh2 = pot.iter().fold(0.0f64, |m, &x| m.max(x)) * h * h;
    if max_vh2 > 1.0 {
        return Err(Error::Resolution(format!("v·h² = {max_vh2} exceeds 1 at a node")));
    }
    let hop = 2.0 / (h * h);
    let apply = |x: &[f64], y: &mut [f64]| {
        for i in 0..n {
            let ip = (i + 1) % n;
            let im = (i + n - 1) % n;
            for j in 0..n {
                let jp = (j + 1) % n;
                let jm = (j + n - 1) % n;
                let row = (i * n + j) * n;
                for k in 0..n {
                    let kp = (k + 1) % n;
                    let km = (k + n - 1) % n;
                    let idx = row + k;
                    let nb = x[(ip * n + j) * n + k]
                        + x[(im * n + j) * n + k]
                        + x[(i * n + jp) * n + k]
                        + x[(i * n + jm) * n + k]
                        + x[row + kp]
                        + x[row + km];
                    y[idx] = hop * (6.0 * x[idx] - nb) + pot[idx] * x[idx];
                }
            }
        }
    };
    let start = vec![1.0; n * n * n];
    let eig = lanczos::lowest(apply, &start, 40, cfg.tol, 400)?;
    Ok(TwoBodyResult {
        delta_e: eig.value,
        a,
        luscher_ratio: Some(eig.value * l * l * l / (8.0 * PI * a)),
        max_vh2,
        iterations: eig.iterations,
        residual: eig.residual,
    })
}

/// Lemma 4 on random (β ∈ [0.1, 10], z ∈ [0.1, 10], ℓ ∈ [1, 50]) draws,
/// both test-function families per draw. Slack is relative to the integral.
pub fn lemma4_suite(seed: u64, instances: usize) -> Result<SuiteReport> {
    // one table sized for the hardest corner serves every draw
    let worst = BoxSpec::new(50.0, Boundary::Dirichlet)?;
    let table = table_for(&worst, 0.1, 10f64.ln())?;
    run_random("lemma4", seed, instances, |rng| {
        let beta = 10f64.powf(rng.random_range(-1.0..=1.0));
        let ln_z = rng.random_range(0.1f64.ln()..=10f64.ln());
        let ell = rng.random_range(1.0..=50.0);
        let mut pass = true;
        let mut slack = f64::INFINITY;
        for f in [TestFunction::Boltzmann { beta }, TestFunction::Fermi { beta, mu: ln_z / beta }] {
            let r = lemma4_check_with(&table, f, ell)?;
            pass &= r.pass;
            slack = slack.min((r.integral - r.trace_density).min(r.trace_density - r.lower_bound) / r.integral);
        }
        Ok((pass, slack))
    })
}

/// (r/μ, s/μ) on an n × n grid over (0, 1] × (0, 10], μ = 1.
pub fn curvature_suite(side: usize, limit: Option<usize>) -> Result<SuiteReport> {
    let mut t = Tally::new("curvature", 0);
    let total = limit.unwrap_or(side * side);
    'outer: for i in 1..=side {
        for j in 1..=side {
            if t.instances() >= total {
                break 'outer;
            }
            let r = i as f64 / side as f64;
            let s = 10.0 * j as f64 / side as f64;
            let c = fermi_sea_curvature(1.0, r, s)?;
            t.record(c.pass, (c.lhs_r - c.rhs_r).min(c.lhs_s - c.rhs_s));
        }
    }
    Ok(t.finish())
}

/// ΔP₀ on a log-spaced n × n grid of β, μ ∈ [1, 10] (βμ ∈ [1, 100]). The
/// first report checks the stated bound, the second the corrected one.
pub fn delta_p0_suite(side: usize, limit: Option<usize>) -> Result<(SuiteReport, SuiteReport)> {
    let mut stated = Tally::new("delta_p0", 0);
    let mut corrected = Tally::new("delta_p0_corrected", 0);
    let total = limit.unwrap_or(side * side);
    let at = |k: usize| if side > 1 { 10f64.powf(k as f64 / (side - 1) as f64) } else { 1.0 };
    let mut count = 0;
    'outer: for i in 0..side {
        for j in 0..side {
            if count >= total {
                break 'outer;
            }
            count += 1;
            let r = delta_p0_bound(at(i), at(j))?;
            let nonneg = r.delta_p0 >= -1e-12 * r.bound;
            stated.record(r.pass, (r.bound - r.delta_p0).min(r.delta_p0) / r.bound);
            corrected.record(
                nonneg && r.delta_p0 <= r.corrected_bound,
                (r.corrected_bound - r.delta_p0).min(r.delta_p0) / r.corrected_bound,
            );
        }
    }
    Ok((stated.finish(), corrected.finish()))
}
