//! Error ledgers for the lower and upper pressure bounds, and the
//! soft-potential objects (h, f_R, w_R, U) with their norm scalings.
//!
//! Budget terms are dimensionless: each is the corresponding error divided
//! by aϱ₀², with every unnamed constant set to 1. Exponents refer to the
//! dilution parameter x = aϱ₀^{1/3}.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::finite_box::g_of_z;
use crate::ideal_gas::{density_ideal, pressure_ideal, softplus, ThermoPoint};
use crate::quadrature::{gauss10, integrate};
use crate::suite::{instance_rng, SuiteReport, Tally};
use rand::Rng;

const PI: f64 = core::f64::consts::PI;

/// aR²/s³ + s²k + a/R + n^{8/3}(s/ℓ)⁵.
pub fn eval_e(r: f64, s: f64, n: f64, k: f64, ell: f64, a: f64) -> f64 {
    if a == 0.0 && k == 0.0 && n == 0.0 {
        return 0.0;
    }
    a * r * r / s.powi(3) + s * s * k + a / r + n.powf(8.0 / 3.0) * (s / ell).powi(5)
}

/// Least-squares slope of ln y against ln x.
pub fn fit_loglog(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetTerm {
    pub name: String,
    /// Error divided by aϱ₀².
    pub value: f64,
    /// Exponent in x when the term is an exact (or leading) power law.
    pub exponent: Option<f64>,
    /// ln of `value`, for terms evaluated in log space.
    pub ln_value: Option<f64>,
}

impl BudgetTerm {
    fn power(name: &str, value: f64, exponent: f64) -> Self {
        BudgetTerm {
            name: name.into(),
            value,
            exponent: Some(exponent),
            ln_value: None,
        }
    }

    fn plain(name: &str, value: f64) -> Self {
        BudgetTerm {
            name: name.into(),
            value,
            exponent: None,
            ln_value: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetReport {
    pub kind: &'static str,
    /// aϱ₀^{1/3}.
    pub x: f64,
    /// Schedule terms, summed into `total`.
    pub terms: Vec<BudgetTerm>,
    /// Terms that depend on z or β, reported beside the ledger.
    pub z_terms: Vec<BudgetTerm>,
    pub total: f64,
    pub target_exponent: f64,
    /// x^{target_exponent}.
    pub target: f64,
    pub ratio: f64,
    pub pass: bool,
    /// Largest x for which the schedule invariants hold.
    pub threshold: f64,
    pub constants_as_one: bool,
}

/// Largest total/target ratio accepted by [`lower_budget`].
pub const LOWER_RATIO_LIMIT: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerSchedule {
    pub a: f64,
    pub rho0: f64,
    pub beta: f64,
    pub epsilon: f64,
    /// Potential range entering the box correction; defaults to a.
    pub r0: f64,
}

/// Derived lower-bound lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerLengths {
    pub r: f64,
    pub s: f64,
    pub ell: f64,
    pub k: f64,
    /// n = K^{3/2}ϱ₀ℓ³.
    pub n: f64,
    /// k = Kϱ₀^{2/3}.
    pub k_energy: f64,
}

impl LowerSchedule {
    pub fn new(a: f64, rho0: f64, beta: f64, epsilon: f64) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite() && rho0 > 0.0 && rho0.is_finite()) {
            return Err(invalid("need a ≥ 0 and ϱ₀ > 0"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(invalid("beta must be finite and positive"));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(invalid("epsilon must be positive"));
        }
        Ok(LowerSchedule {
            a,
            rho0,
            beta,
            epsilon,
            r0: a,
        })
    }

    /// Schedule at dilution x = aϱ₀^{1/3} for the given a.
    pub fn from_x(x: f64, a: f64, beta: f64, epsilon: f64) -> Result<Self> {
        if !(x > 0.0 && a > 0.0) {
            return Err(invalid("need x > 0 and a > 0"));
        }
        Self::new(a, (x / a).powi(3), beta, epsilon)
    }

    /// Schedule with ϱ₀ = ϱ₀(β, ln z/β) at q = 2, so the z-dependent terms
    /// of [`lower_budget`] refer to the same state.
    pub fn at_fugacity(a: f64, beta: f64, z: f64, epsilon: f64) -> Result<Self> {
        let rho0 = density_ideal(&ThermoPoint::from_fugacity(beta, z, 2)?)?;
        Self::new(a, rho0, beta, epsilon)
    }

    pub fn x(&self) -> f64 {
        self.a * self.rho0.cbrt()
    }

    /// a³ϱ₀ below which R < s/2 < ℓ holds.
    pub fn y_threshold() -> f64 {
        2f64.powi(-9)
    }

    pub fn lengths(&self) -> Result<LowerLengths> {
        let a = self.a;
        let y = a.powi(3) * self.rho0;
        let r = a * y.powf(-1.0 / 81.0);
        let s = a * y.powf(-10.0 / 81.0);
        let ell = self.rho0.powf(-1.0 / 3.0) * y.powf(-28.0 / 81.0);
        let k = y.powf(-self.epsilon / 12.0);
        let ok = r > 0.0 && r < 0.5 * s && 0.5 * s < ell && [r, s, ell, k].iter().all(|v| v.is_finite());
        if !ok {
            return Err(Error::OutOfValidity(format!(
                "lower schedule needs R < s/2 < ℓ (a³ϱ₀ = {y:e}, limit {:e})",
                Self::y_threshold()
            )));
        }
        Ok(LowerLengths {
            r,
            s,
            ell,
            k,
            n: k.powf(1.5) * self.rho0 * ell.powi(3),
            k_energy: k * self.rho0.powf(2.0 / 3.0),
        })
    }
}

fn zero_report(kind: &'static str, target_exponent: f64, threshold: f64) -> BudgetReport {
    BudgetReport {
        kind,
        x: 0.0,
        terms: Vec::new(),
        z_terms: Vec::new(),
        total: 0.0,
        target_exponent,
        target: 0.0,
        ratio: 0.0,
        pass: true,
        threshold,
        constants_as_one: true,
    }
}

/// Lower-bound ledger at fugacity z.
pub fn lower_budget(sched: &LowerSchedule, z: f64) -> Result<BudgetReport> {
    let eps = sched.epsilon;
    let target_exponent = 1.0 / 27.0 - eps;
    let threshold = LowerSchedule::y_threshold().cbrt();
    if !(z > 0.0 && z.is_finite()) {
        return Err(invalid("z must be finite and positive"));
    }
    if sched.a == 0.0 {
        return Ok(zero_report("lower", target_exponent, threshold));
    }
    let LowerLengths {
        r,
        s,
        ell,
        k,
        n,
        k_energy,
    } = sched.lengths()?;
    let (a, rho0, beta) = (sched.a, sched.rho0, sched.beta);
    let x = sched.x();
    let terms = vec![
        BudgetTerm::power("inv_ell", 1.0 / (ell * rho0.cbrt()), 28.0 / 27.0),
        BudgetTerm::power(
            "kinetic_localization",
            k * k * rho0.cbrt() * s.powf(1.5) / a.sqrt(),
            4.0 / 9.0 - eps / 2.0,
        ),
        BudgetTerm::power("a_r2_over_s3", a * r * r / s.powi(3), 28.0 / 27.0),
        BudgetTerm::power("s2_k", s * s * k_energy, 34.0 / 27.0 - eps / 4.0),
        BudgetTerm::power("a_over_r", a / r, 1.0 / 27.0),
        BudgetTerm::power("n_s_over_ell", n.powf(8.0 / 3.0) * (s / ell).powi(5), 1.0 / 27.0 - eps),
    ];
    let total: f64 = terms.iter().map(|t| t.value).sum();

    let unit = a * rho0 * rho0;
    let big_a = a * r * r / s.powi(3) + s * s * k_energy;
    let big_b = ell.powi(3) * k.powi(4) * rho0 * (s.powi(3) * rho0).powf(5.0 / 3.0);
    let ln_chi = if big_a < 1.0 && big_b < 1.0 {
        -ell.powi(3) * k.powf(1.5) * rho0 * (-big_a).ln_1p() - (-big_b).ln_1p()
    } else {
        f64::INFINITY
    };
    let ln_z = z.ln();
    let mu = ln_z / beta;
    let p0 = pressure_ideal(&ThermoPoint::new(beta, mu, 2)?)?;
    let ln_exp = ln_z - 0.5 * beta * k_energy - 0.5 * 2f64.ln() - 2.0 * PI.ln() - 2.5 * beta.ln() - unit.ln();
    let z_terms = vec![
        BudgetTerm::power("ln_chi", ln_chi / (ell.powi(3) * beta * unit), 1.0 / 27.0 - 3.0 * eps / 8.0),
        BudgetTerm::power(
            "g_of_z",
            3.0 * g_of_z(ln_z) / (4.0 * PI * PI * beta * beta * ell * unit),
            1.0 / 27.0,
        ),
        BudgetTerm {
            name: "exponential".into(),
            value: ln_exp.exp(),
            exponent: None,
            ln_value: Some(ln_exp),
        },
        BudgetTerm::power("box", sched.r0 / ell * p0 / unit, 28.0 / 27.0),
    ];
    let target = x.powf(target_exponent);
    let ratio = total / target;
    Ok(BudgetReport {
        kind: "lower",
        x,
        terms,
        z_terms,
        total,
        target_exponent,
        target,
        ratio,
        pass: ratio <= LOWER_RATIO_LIMIT,
        threshold,
        constants_as_one: true,
    })
}

/// Constant bounding the number of overlapping balls.
pub const PACKING_C: f64 = 48.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperSchedule {
    pub a: f64,
    pub rho0: f64,
    pub beta: f64,
    pub mu: f64,
    pub nu: f64,
    /// Range of the potential (R₀ < R).
    pub r0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperLengths {
    pub r: f64,
    pub s: f64,
    pub epsilon: f64,
    pub kappa: f64,
    pub delta: f64,
}

impl UpperSchedule {
    pub fn new(a: f64, rho0: f64, beta: f64, mu: f64, nu: f64, r0: f64) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite() && rho0 > 0.0 && rho0.is_finite()) {
            return Err(invalid("need a ≥ 0 and ϱ₀ > 0"));
        }
        if !(beta > 0.0 && beta.is_finite() && mu.is_finite()) {
            return Err(invalid("need finite β > 0 and μ"));
        }
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(invalid("nu must be positive"));
        }
        if !(r0 >= 0.0 && r0.is_finite()) {
            return Err(invalid("R₀ must be finite and non-negative"));
        }
        Ok(UpperSchedule {
            a,
            rho0,
            beta,
            mu,
            nu,
            r0,
        })
    }

    pub fn from_x(x: f64, a: f64, beta: f64, mu: f64, nu: f64, r0: f64) -> Result<Self> {
        if !(x > 0.0 && a > 0.0) {
            return Err(invalid("need x > 0 and a > 0"));
        }
        Self::new(a, (x / a).powi(3), beta, mu, nu, r0)
    }

    /// Schedule with ϱ₀ = ϱ₀(β, μ) at q = 2.
    pub fn at_point(a: f64, beta: f64, mu: f64, nu: f64, r0: f64) -> Result<Self> {
        let rho0 = density_ideal(&ThermoPoint::new(beta, mu, 2)?)?;
        Self::new(a, rho0, beta, mu, nu, r0)
    }

    pub fn x(&self) -> f64 {
        self.a * self.rho0.cbrt()
    }

    /// Largest x with δ < 1 (ε, ϰ < 1 hold for every x < 1 when ν < 1/33).
    pub fn x_threshold() -> f64 {
        (8.0 * PI * PACKING_C).powf(-11.0 / 12.0)
    }

    pub fn lengths(&self) -> Result<UpperLengths> {
        let x = self.x();
        let l0 = self.rho0.powf(-1.0 / 3.0);
        let r = l0 * x.powf(1.0 / 22.0);
        let s = l0 * x.powf(1.0 / 66.0);
        let epsilon = x.powf(1.0 / 33.0);
        let kappa = x.powf(1.0 / 33.0 - self.nu);
        let delta = 2.0 * PI * self.a * PACKING_C * self.rho0 * (2.0 * r).powi(2);
        if !(delta < 1.0 && kappa < 1.0 && epsilon < 1.0) {
            return Err(Error::OutOfValidity(format!(
                "upper schedule needs δ, ε, ϰ < 1 (δ = {delta}, ϰ = {kappa}; x limit {:e}, ν < 1/33)",
                Self::x_threshold()
            )));
        }
        if self.r0 >= r {
            return Err(Error::OutOfValidity(format!("R₀ = {} must be below R = {r}", self.r0)));
        }
        Ok(UpperLengths {
            r,
            s,
            epsilon,
            kappa,
            delta,
        })
    }
}

/// ln of (1/(√2π²)) β^{−5/2} e^{−β((½−δ)ϰs^{−2} − μ)} / ((1−2δ)ϰ); `None`
/// when δ ≥ ½.
pub fn ln_upsilon_bound(beta: f64, mu: f64, s: f64, delta: f64, kappa: f64) -> Option<f64> {
    if delta >= 0.5 {
        return None;
    }
    Some(
        -0.5 * 2f64.ln() - 2.0 * PI.ln() - 2.5 * beta.ln() - ((1.0 - 2.0 * delta) * kappa).ln()
            - beta * ((0.5 - delta) * kappa / (s * s) - mu),
    )
}

/// Upper-bound ledger.
pub fn upper_budget(sched: &UpperSchedule) -> Result<BudgetReport> {
    let nu = sched.nu;
    let target_exponent = 1.0 / 33.0 - nu;
    let threshold = UpperSchedule::x_threshold();
    if sched.a == 0.0 {
        return Ok(zero_report("upper", target_exponent, threshold));
    }
    let UpperLengths {
        r,
        s,
        epsilon,
        kappa,
        delta,
    } = sched.lengths()?;
    let (a, rho0) = (sched.a, sched.rho0);
    let x = sched.x();
    let unit = a * rho0 * rho0;
    let shell = r.powi(3) - sched.r0.powi(3);
    let max_term = (1.0 / shell).max(1.0 / (epsilon * r * s * s)) / rho0;
    let tail_factor = x.powf(1.0 / 6.0 - nu);
    let mut max_bracket = BudgetTerm::plain("max_bracket", max_term * tail_factor);
    if sched.r0 == 0.0 {
        max_bracket.exponent = Some(1.0 / 33.0 - nu);
    }
    let terms = vec![
        BudgetTerm::power("two_pi_delta", 2.0 * PI * delta, 12.0 / 11.0),
        BudgetTerm::power("two_pi_epsilon", 2.0 * PI * epsilon, 1.0 / 33.0),
        BudgetTerm::power("two_pi_kappa", 2.0 * PI * kappa, 1.0 / 33.0 - nu),
        BudgetTerm::power("r2_over_eps_s2", r * r / (epsilon * s * s), 1.0 / 33.0),
        BudgetTerm::power("unit_bracket", tail_factor, 1.0 / 6.0 - nu),
        max_bracket,
    ];
    let total: f64 = terms.iter().map(|t| t.value).sum();

    let p0 = pressure_ideal(&ThermoPoint::new(sched.beta, sched.mu, 2)?)?;
    let delta_p0 = ((1.0 - delta).powf(-1.5) - 1.0) * p0 / unit;
    let tail = match ln_upsilon_bound(sched.beta, sched.mu, s, delta, kappa) {
        Some(l) => BudgetTerm {
            name: "upsilon_tail".into(),
            value: (l - unit.ln()).exp(),
            exponent: None,
            ln_value: Some(l - unit.ln()),
        },
        None => BudgetTerm::plain("upsilon_tail", f64::INFINITY),
    };
    let z_terms = vec![BudgetTerm::power("delta_p0", delta_p0, 1.0 / 11.0), tail];
    let target = x.powf(target_exponent);
    let ratio = total / target;
    Ok(BudgetReport {
        kind: "upper",
        x,
        terms,
        z_terms,
        total,
        target_exponent,
        target,
        ratio,
        pass: true,
        threshold,
        constants_as_one: true,
    })
}

/// Quintic smoothstep on [1, 2]: 0 below, 1 above.
pub fn eta(t: f64) -> f64 {
    if t <= 1.0 {
        0.0
    } else if t >= 2.0 {
        1.0
    } else {
        let u = t - 1.0;
        u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    }
}

fn j0(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn j1(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        x / 3.0 * (1.0 - x2 / 10.0 * (1.0 - x2 / 28.0))
    } else {
        (x.sin() - x * x.cos()) / (x * x)
    }
}

/// h = Fourier transform of 1 − χ, χ(p) = η(sp), as a radial function.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Transform {
    s: f64,
}

impl Transform {
    /// 4π/(2π)^{3/2} = √(2/π).
    fn norm() -> f64 {
        (2.0 / PI).sqrt()
    }

    fn weight(&self, p: f64) -> f64 {
        1.0 - eta(self.s * p)
    }

    fn panels(&self, r: f64) -> usize {
        let p_max = 2.0 / self.s;
        ((2.0 * p_max * r / PI).ceil() as usize).max(4)
    }

    fn radial<F: Fn(f64) -> f64>(&self, r: f64, f: F) -> f64 {
        // split at 1/s where the weight stops being 1
        let p1 = 1.0 / self.s;
        let n = self.panels(r);
        let mut sum = 0.0;
        for (lo, hi) in [(0.0, p1), (p1, 2.0 * p1)] {
            let w = (hi - lo) / n as f64;
            for i in 0..n {
                sum += gauss10(&f, lo + i as f64 * w, lo + (i + 1) as f64 * w);
            }
        }
        sum
    }

    /// (2π)^{-3/2} 4π ∫ p² (1−χ) j₀(pr) dp.
    fn h(&self, r: f64) -> f64 {
        Self::norm() * self.radial(r, |p| p * p * self.weight(p) * j0(p * r))
    }

    fn dh(&self, r: f64) -> f64 {
        -Self::norm() * self.radial(r, |p| p * p * p * self.weight(p) * j1(p * r))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoftPotentialProfile {
    pub s: f64,
    pub r: f64,
    pub r0: f64,
    /// Radius beyond which f_R is neglected.
    pub r_max: f64,
    /// Local extrema of h on [0, r_max + R], with h there.
    extrema: Vec<(f64, f64)>,
    pub f_sup: f64,
    /// ∫ f_R over ℝ³.
    pub f_l1: f64,
    pub w_sup: f64,
    pub w_l1: f64,
    /// Height of U on R₀ ≤ |x| ≤ R.
    pub u_height: f64,
    pub u_integral: f64,
}

/// Extent of the radial domain in units of s.
const R_MAX_OVER_S: f64 = 60.0;

impl SoftPotentialProfile {
    pub fn h(&self, r: f64) -> f64 {
        Transform { s: self.s }.h(r)
    }

    /// sup over radii in [max(0, r−R), r+R] of |h(r′) − h(r)|.
    pub fn f_r(&self, r: f64) -> f64 {
        let t = Transform { s: self.s };
        let lo = (r - self.r).max(0.0);
        let hi = r + self.r;
        let hr = t.h(r);
        let mut m = (t.h(lo) - hr).abs().max((t.h(hi) - hr).abs());
        for &(c, hc) in &self.extrema {
            if c > lo && c < hi {
                m = m.max((hc - hr).abs());
            }
        }
        m
    }

    /// w_R(r) = (2/π²) f_R(r) ∫ f_R.
    pub fn w(&self, r: f64) -> f64 {
        2.0 / (PI * PI) * self.f_r(r) * self.f_l1
    }

    fn breaks(&self) -> Vec<f64> {
        let mut b: Vec<f64> = Vec::new();
        let step = 0.25 * self.s;
        let mut r = 0.0;
        while r < self.r_max {
            b.push(r);
            r += step;
        }
        b.push(self.r_max);
        for &(c, _) in &self.extrema {
            for e in [c - self.r, c + self.r] {
                if e > 0.0 && e < self.r_max {
                    b.push(e);
                }
            }
        }
        if self.r < self.r_max {
            b.push(self.r);
        }
        b.sort_by(f64::total_cmp);
        b.dedup_by(|x, y| (*x - *y).abs() < 1e-12 * self.s);
        b
    }
}

fn find_extrema(t: &Transform, r_end: f64) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, t.h(0.0))];
    let step = t.s / 16.0;
    let mut r_prev = step;
    let mut d_prev = t.dh(r_prev);
    let mut r = r_prev + step;
    while r <= r_end {
        let d = t.dh(r);
        if d == 0.0 || d.signum() != d_prev.signum() {
            let (mut lo, mut hi, mut dlo) = (r_prev, r, d_prev);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let dm = t.dh(mid);
                if dm.signum() == dlo.signum() && dm != 0.0 {
                    lo = mid;
                    dlo = dm;
                } else {
                    hi = mid;
                }
            }
            let c = 0.5 * (lo + hi);
            out.push((c, t.h(c)));
        }
        r_prev = r;
        d_prev = d;
        r += step;
    }
    out
}

fn sup_on_grid(p: &SoftPotentialProfile, spacing: f64, r_end: f64) -> f64 {
    let mut best = (0.0, p.f_r(0.0));
    let mut r = spacing;
    while r <= r_end {
        let v = p.f_r(r);
        if v > best.1 {
            best = (r, v);
        }
        r += spacing;
    }
    // golden-section refinement around the best sample
    let (mut lo, mut hi) = ((best.0 - spacing).max(0.0), best.0 + spacing);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if p.f_r(m1) >= p.f_r(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    best.1.max(p.f_r(0.5 * (lo + hi)))
}

/// Build h, f_R, w_R and U for the given s, R, R₀ (η is the quintic
/// smoothstep on [1, 2]).
pub fn soft_potential_profile(s: f64, r: f64, r0: f64) -> Result<SoftPotentialProfile> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(invalid("s must be finite and positive"));
    }
    if !(r > 0.0 && r <= 0.25 * s * (1.0 + 1e-12)) {
        return Err(invalid("need 0 < R ≤ s/4"));
    }
    if !(r0 >= 0.0 && r0 < r) {
        return Err(invalid("need 0 ≤ R₀ < R"));
    }
    let t = Transform { s };
    let r_max = R_MAX_OVER_S * s;
    let extrema = find_extrema(&t, r_max + r);
    let mut prof = SoftPotentialProfile {
        s,
        r,
        r0,
        r_max,
        extrema,
        f_sup: 0.0,
        f_l1: 0.0,
        w_sup: 0.0,
        w_l1: 0.0,
        u_height: 3.0 / (r.powi(3) - r0.powi(3)),
        u_integral: 0.0,
    };
    let coarse = sup_on_grid(&prof, s / 64.0, 6.0 * s);
    let fine = sup_on_grid(&prof, s / 128.0, 6.0 * s);
    if (coarse - fine).abs() > 0.01 * fine {
        return Err(Error::Resolution(format!(
            "f_R supremum moved from {coarse:e} to {fine:e} under refinement"
        )));
    }
    prof.f_sup = fine.max(coarse);
    let l1 = integrate(
        |x: f64| 4.0 * PI * x * x * prof.f_r(x),
        &prof.breaks(),
        1e-9,
        0.0,
    )?;
    prof.f_l1 = l1.value;
    prof.w_sup = 2.0 / (PI * PI) * prof.f_sup * prof.f_l1;
    prof.w_l1 = 2.0 / (PI * PI) * prof.f_l1 * prof.f_l1;
    let u = prof.u_height;
    prof.u_integral = integrate(|x: f64| 4.0 * PI * x * x * u, &[r0, r], 1e-14, 0.0)?.value;
    Ok(prof)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PackedSum {
    /// Σ_k w_R(x − y_k) at the centre of a lattice cell.
    pub at_midpoint: f64,
    /// The same sum at a lattice point.
    pub at_lattice_point: f64,
    /// w_R at the distance from the midpoint to its nearest lattice points.
    pub central_term: f64,
    pub sum: f64,
    /// 1/(Rs²).
    pub bound_scale: f64,
    pub ratio: f64,
}

/// Σ_k w_R(x − y_k) for centres on a cubic lattice of spacing 2R, a
/// heuristic worst-case packing.
pub fn packed_sum_bound(p: &SoftPotentialProfile) -> Result<PackedSum> {
    let bound_scale = 1.0 / (p.r * p.s * p.s);
    if p.f_l1 == 0.0 {
        return Ok(PackedSum {
            at_midpoint: 0.0,
            at_lattice_point: 0.0,
            central_term: 0.0,
            sum: 0.0,
            bound_scale,
            ratio: 0.0,
        });
    }
    let r_cut = 20.0 * p.s;
    let dr = p.r.min(p.s) / 8.0;
    let n_tab = (r_cut / dr).ceil() as usize + 2;
    let table: Vec<f64> = (0..n_tab).map(|i| p.w(i as f64 * dr)).collect();
    let interp = |d: f64| -> f64 {
        let u = d / dr;
        let i = u.floor() as usize;
        if i + 1 >= n_tab {
            return 0.0;
        }
        let f = u - i as f64;
        table[i] * (1.0 - f) + table[i + 1] * f
    };
    let spacing = 2.0 * p.r;
    let m = (r_cut / spacing).ceil() as i64 + 1;
    let lattice_sum = |off: f64| -> f64 {
        let mut sum = 0.0;
        for i in -m..=m {
            let dx = i as f64 * spacing - off;
            for j in -m..=m {
                let dy = j as f64 * spacing - off;
                let dxy = dx * dx + dy * dy;
                if dxy > r_cut * r_cut {
                    continue;
                }
                for k in -m..=m {
                    let dz = k as f64 * spacing - off;
                    let d = (dxy + dz * dz).sqrt();
                    if d < r_cut {
                        sum += interp(d);
                    }
                }
            }
        }
        sum
    };
    // beyond r_cut the lattice sum is replaced by the density of centres
    // times the integral of w_R
    let tail = integrate(
        |x: f64| 4.0 * PI * x * x * p.w(x),
        &[r_cut, 0.5 * (r_cut + p.r_max), p.r_max],
        1e-6,
        0.0,
    )?
    .value
        / spacing.powi(3);
    let at_midpoint = lattice_sum(p.r) + tail;
    let at_lattice_point = lattice_sum(0.0) + tail;
    let sum = at_midpoint.max(at_lattice_point);
    Ok(PackedSum {
        at_midpoint,
        at_lattice_point,
        central_term: p.w(3f64.sqrt() * p.r),
        sum,
        bound_scale,
        ratio: sum / bound_scale,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpsilonTail {
    /// (2/((2π)³β)) ∫ dp ln[(1 + z e^{−βΥ(p)})/(1 + z e^{−β(1−δ)p²})].
    pub tail_integral: f64,
    pub paper_bound: f64,
    /// Same estimate with the ϰ-dependent prefactor (1−2δ)⁻¹ϰ^{−3/2}.
    pub corrected_bound: f64,
    pub pass: bool,
    pub corrected_pass: bool,
}

/// Υ(p) = (1−δ)p²(1 − (1−ϰ)χ(p)²) against the Gaussian tail bound.
pub fn upsilon_tail(beta: f64, mu: f64, s: f64, delta: f64, kappa: f64) -> Result<UpsilonTail> {
    if !(beta > 0.0 && beta.is_finite() && mu.is_finite() && s > 0.0 && s.is_finite()) {
        return Err(invalid("need finite β > 0, μ and s > 0"));
    }
    if !(delta > 0.0 && delta < 1.0 && kappa > 0.0 && kappa <= 1.0) {
        return Err(invalid("need 0 < δ < 1 and 0 < ϰ ≤ 1"));
    }
    let ln_bound = ln_upsilon_bound(beta, mu, s, delta, kappa)
        .ok_or_else(|| Error::OutOfValidity(format!("tail bound needs δ < 1/2 (δ = {delta})")))?;
    let paper_bound = ln_bound.exp();
    let corrected_bound = (ln_bound - 0.5 * kappa.ln()).exp();
    if kappa == 1.0 {
        return Ok(UpsilonTail {
            tail_integral: 0.0,
            paper_bound,
            corrected_bound,
            pass: true,
            corrected_pass: true,
        });
    }
    let eta_z = beta * mu;
    let c = 1.0 - delta;
    let integrand = |p: f64| {
        let chi = eta(s * p);
        let ups = c * p * p * (1.0 - (1.0 - kappa) * chi * chi);
        4.0 * PI * p * p * (softplus(eta_z - beta * ups) - softplus(eta_z - beta * c * p * p))
    };
    let p1 = 1.0 / s;
    // beyond p_end both logarithms are below e^{-60} of their peak
    let p_end = ((eta_z.max(0.0) + 60.0 + beta * c * kappa * p1 * p1) / (beta * c * kappa)).sqrt().max(2.0 * p1);
    let mut breaks = vec![p1, 1.5 * p1, 2.0 * p1];
    let width = 1.0 / (beta * c * kappa).sqrt();
    let mut b = 2.0 * p1 + width;
    while b < p_end {
        breaks.push(b);
        b += width;
    }
    breaks.push(p_end.max(2.0 * p1 + width));
    let scale = paper_bound.max(f64::MIN_POSITIVE);
    let est = integrate(integrand, &breaks, 1e-10, 1e-14 * scale)?;
    let tail_integral = 2.0 / (8.0 * PI * PI * PI * beta) * est.value;
    Ok(UpsilonTail {
        tail_integral,
        paper_bound,
        corrected_bound,
        pass: tail_integral <= paper_bound,
        corrected_pass: tail_integral <= corrected_bound,
    })
}

/// Random draws of the Υ tail comparison: β ∈ [0.2, 5], z ∈ [0.1, 10],
/// s ∈ [0.05, 1], δ ∈ (0, 0.45), ϰ ∈ (0.01, 1). Returns the reports for the
/// stated and the corrected bound.
pub fn upsilon_suite(seed: u64, instances: usize) -> Result<(SuiteReport, SuiteReport)> {
    let mut stated = Tally::new("upsilon_tail", seed);
    let mut corrected = Tally::new("upsilon_tail_corrected", seed);
    for i in 0..instances {
        let mut rng = instance_rng(seed, i as u64);
        let beta = rng.random_range(0.2..=5.0);
        let mu = rng.random_range(0.1f64.ln()..=10f64.ln()) / beta;
        let s = rng.random_range(0.05..=1.0);
        let delta = rng.random_range(1e-3..0.45);
        let kappa = rng.random_range(0.01..1.0);
        let r = upsilon_tail(beta, mu, s, delta, kappa)?;
        stated.record(r.pass, 1.0 - r.tail_integral / r.paper_bound);
        corrected.record(r.corrected_pass, 1.0 - r.tail_integral / r.corrected_bound);
    }
    Ok((stated.finish(), corrected.finish()))
}
