//! Finite-dimensional checks of the entropy and trace inequalities: the
//! Gibbs variational gap, the Klein kernel, the entropy bound for
//! non-orthogonal mixtures, the trace-norm chain, and refined
//! subadditivity for a measured subsystem.
//!
//! Everything is dense complex Hermitian algebra at small dimension.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::ideal_gas::{logistic, softplus};
pub use crate::suite::{instance_rng, SuiteReport};
use crate::suite::{run_random, Tally};

pub type CMatrix = DMatrix<Complex64>;

const HERM_TOL: f64 = 1e-12;
const SPEC_TOL: f64 = 1e-12;
const CHECK_TOL: f64 = 1e-10;

fn check_hermitian(m: &CMatrix, what: &str) -> Result<()> {
    if !m.is_square() {
        return Err(invalid(format!("{what} must be square")));
    }
    let scale = m.iter().fold(1.0f64, |s, z| s.max(z.norm()));
    let n = m.nrows();
    for i in 0..n {
        for j in i..n {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > HERM_TOL * scale {
                return Err(invalid(format!("{what} is not Hermitian at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.nrows(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

fn eigenvalues(m: &CMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// U diag(f(λ)) U*.
pub fn spectral_map<F: Fn(f64) -> f64>(m: &CMatrix, f: F) -> CMatrix {
    let (vals, u) = hermitian_eigen(m);
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|&x| Complex64::new(f(x), 0.0)));
    &u * CMatrix::from_diagonal(&d) * u.adjoint()
}

fn trace_re(m: &CMatrix) -> f64 {
    m.trace().re
}

pub fn trace_norm(m: &CMatrix) -> f64 {
    eigenvalues(m).iter().map(|x| x.abs()).sum()
}

pub fn hs_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn operator_norm(m: &CMatrix) -> f64 {
    eigenvalues(m).iter().fold(0.0f64, |s, x| s.max(x.abs()))
}

/// −Σ λ ln λ with 0 ln 0 = 0; tiny negative eigenvalues count as 0.
pub fn spectral_entropy(values: &[f64]) -> f64 {
    values.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

/// −x ln x − (1−x) ln(1−x), clamped to [0, 1].
pub fn binary_entropy(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    let t = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    t(x) + t(1.0 - x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_hermitian(&m, "density matrix")?;
        let vals = eigenvalues(&m);
        if vals.first().is_some_and(|&x| x < -SPEC_TOL) {
            return Err(invalid("density matrix has a negative eigenvalue"));
        }
        if (trace_re(&m) - 1.0).abs() > SPEC_TOL {
            return Err(invalid("density matrix must have unit trace"));
        }
        Ok(DensityMatrix { m })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneBodyDM {
    m: CMatrix,
}

impl OneBodyDM {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_hermitian(&m, "one-body density matrix")?;
        let vals = eigenvalues(&m);
        if vals.iter().any(|&x| !(-SPEC_TOL..=1.0 + SPEC_TOL).contains(&x)) {
            return Err(invalid("one-body density matrix spectrum must lie in [0, 1]"));
        }
        Ok(OneBodyDM { m })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }
}

pub fn vn_entropy(rho: &DensityMatrix) -> f64 {
    spectral_entropy(&eigenvalues(&rho.m))
}

pub fn fermi_entropy(gamma: &OneBodyDM) -> f64 {
    eigenvalues(&gamma.m).into_iter().map(binary_entropy).sum()
}

/// γ_h = (1 + e^h)^{-1} and f(h) = −Tr ln(1 + e^{−h}).
pub fn gibbs_state(h: &CMatrix) -> Result<(OneBodyDM, f64)> {
    check_hermitian(h, "h")?;
    let (vals, _) = hermitian_eigen(h);
    let gamma = spectral_map(h, |e| logistic(-e));
    let f = -vals.iter().map(|&e| softplus(-e)).sum::<f64>();
    Ok((OneBodyDM { m: gamma }, f))
}

/// Tr(hγ) − S̃[γ].
pub fn grand_potential(h: &CMatrix, gamma: &OneBodyDM) -> Result<f64> {
    if h.shape() != gamma.m.shape() {
        return Err(invalid("h and gamma dimensions differ"));
    }
    check_hermitian(h, "h")?;
    Ok(trace_re(&(h * &gamma.m)) - fermi_entropy(gamma))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma7Report {
    pub gap: f64,
    pub rhs_hs: f64,
    pub rhs_trace: f64,
    pub pass: bool,
}

impl Lemma7Report {
    pub fn slack(&self) -> f64 {
        (self.gap - self.rhs_hs).min(self.gap - self.rhs_trace)
    }
}

pub fn lemma7_check(h: &CMatrix, gamma: &OneBodyDM) -> Result<Lemma7Report> {
    let (gh, f) = gibbs_state(h)?;
    let e = grand_potential(h, gamma)?;
    let gap = e - f;
    let d = &gamma.m - &gh.m;
    let rhs_hs = 2.0 * hs_norm(&d).powi(2);
    let t = trace_re(&d).abs();
    let denom = t + trace_re(&gh.m);
    let rhs_trace = if denom > 0.0 { 0.5 * t * t / denom } else { 0.0 };
    let tol = CHECK_TOL * gap.abs().max(f.abs()).max(1.0);
    Ok(Lemma7Report {
        gap,
        rhs_hs,
        rhs_trace,
        pass: gap >= rhs_hs - tol && gap >= rhs_trace - tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KleinValue {
    pub g: f64,
    pub lb_quadratic: f64,
    pub lb_trace: f64,
    pub pass: bool,
}

/// g(x,y) = x ln(x/y) + (1−x) ln((1−x)/(1−y)), the integral of
/// (x−z)(1/z + 1/(1−z)) from y to x.
pub fn klein_kernel(x: f64, y: f64) -> Result<KleinValue> {
    if !((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y)) {
        return Err(invalid("klein_kernel needs x, y in [0, 1]"));
    }
    let d = x - y;
    if d == 0.0 {
        return Ok(KleinValue {
            g: 0.0,
            lb_quadratic: 0.0,
            lb_trace: 0.0,
            pass: true,
        });
    }
    let first = if x > 0.0 { x * (d / y).ln_1p() } else { 0.0 };
    let second = if x < 1.0 { (1.0 - x) * (-d / (1.0 - y)).ln_1p() } else { 0.0 };
    let g = first + second;
    let lb_quadratic = 2.0 * d * d;
    let lb_trace = 0.5 * d * d / (d.abs() + y);
    let tol = CHECK_TOL * lb_quadratic;
    Ok(KleinValue {
        g,
        lb_quadratic,
        lb_trace,
        pass: g >= lb_quadratic - tol && g >= lb_trace - tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Report {
    pub s_hat: f64,
    pub s: f64,
    pub log_norm: f64,
    pub pass: bool,
}

/// S[Σ λ_α |φ_α⟩⟨φ_α|] against −Σ λ ln λ − ln‖Σ |φ_α⟩⟨φ_α|‖.
pub fn lemma2_check(weights: &[f64], vectors: &[DVector<Complex64>]) -> Result<Lemma2Report> {
    if weights.is_empty() || weights.len() != vectors.len() {
        return Err(invalid("need one weight per vector and at least one vector"));
    }
    if weights.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
        return Err(invalid("weights must be finite and non-negative"));
    }
    if (weights.iter().sum::<f64>() - 1.0).abs() > SPEC_TOL {
        return Err(invalid("weights must sum to 1"));
    }
    let n = vectors[0].len();
    if n == 0 || vectors.iter().any(|v| v.len() != n) {
        return Err(invalid("vectors must share a positive dimension"));
    }
    if vectors.iter().any(|v| (v.norm() - 1.0).abs() > 1e-10) {
        return Err(invalid("vectors must be normalized"));
    }
    let mut gamma_hat = CMatrix::zeros(n, n);
    let mut sum_p = CMatrix::zeros(n, n);
    for (w, v) in weights.iter().zip(vectors) {
        let p = v * v.adjoint();
        gamma_hat += p.scale(*w);
        sum_p += p;
    }
    let s_hat = spectral_entropy(&eigenvalues(&gamma_hat));
    let s = spectral_entropy(weights);
    let log_norm = operator_norm(&sum_p).ln();
    Ok(Lemma2Report {
        s_hat,
        s,
        log_norm,
        pass: s_hat >= s - log_norm - CHECK_TOL * s.max(1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainReport {
    /// ‖A − B‖₁.
    pub lhs: f64,
    /// ‖P‖₂‖A − B‖₂.
    pub leading: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// ‖A−B‖₁ ≤ ‖P‖₂‖A−B‖₂ + 2(‖B‖₁ + |Tr(A−B)|)^{1/2}
/// (‖QBQ‖₁ + |Tr(A−B)| + ‖P‖₂‖A−B‖₂)^{1/2}, with Q = 1 − P.
pub fn trace_norm_chain_check(a: &CMatrix, b: &CMatrix, p: &CMatrix) -> Result<ChainReport> {
    if a.shape() != b.shape() || a.shape() != p.shape() {
        return Err(invalid("A, B and P must have the same dimension"));
    }
    for (m, name) in [(a, "A"), (b, "B")] {
        check_hermitian(m, name)?;
        let scale = operator_norm(m).max(1.0);
        if eigenvalues(m).first().is_some_and(|&x| x < -SPEC_TOL * scale) {
            return Err(invalid(format!("{name} is not positive semidefinite")));
        }
    }
    check_hermitian(p, "P")?;
    if hs_norm(&(p * p - p)) > 1e-10 {
        return Err(invalid("P is not a projection"));
    }
    let n = a.nrows();
    let q = CMatrix::identity(n, n) - p;
    let d = a - b;
    let lhs = trace_norm(&d);
    let leading = hs_norm(p) * hs_norm(&d);
    let tr_d = trace_re(&d).abs();
    let qbq = trace_norm(&(&q * b * &q));
    let rhs = leading + 2.0 * (trace_norm(b) + tr_d).sqrt() * (qbq + tr_d + leading).sqrt();
    Ok(ChainReport {
        lhs,
        leading,
        rhs,
        pass: lhs <= rhs + CHECK_TOL * lhs,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinedReport {
    pub s_joint: f64,
    pub s_a: f64,
    pub s_b: f64,
    /// p_b for each basis state of the second factor.
    pub probabilities: Vec<f64>,
    /// Σ_b p_b S(Γ_A|b).
    pub conditional: f64,
    pub refined_rhs: f64,
    pub plain_rhs: f64,
    /// Hilbert–Schmidt norm of the off-block part removed before the check.
    pub removed_norm: f64,
    pub pass: bool,
}

impl RefinedReport {
    pub fn slack(&self) -> f64 {
        (self.refined_rhs - self.s_joint).min(self.plain_rhs - self.refined_rhs)
    }
}

/// Joint state on ℂ^{d_a} ⊗ ℂ^{d_b}, index a·d_b + b, block diagonal in the
/// standard basis of the second factor. Off-block entries up to 1e-10 (HS
/// norm) are projected away; larger ones are rejected.
pub fn refined_subadditivity_check(joint: &DensityMatrix, dim_a: usize, dim_b: usize) -> Result<RefinedReport> {
    if dim_a == 0 || dim_b == 0 || dim_a * dim_b != joint.dim() {
        return Err(invalid("factor dimensions do not match the joint state"));
    }
    let m = joint.matrix();
    let n = joint.dim();
    let mut removed = 0.0;
    let mut proj = m.clone();
    for i in 0..n {
        for j in 0..n {
            if i % dim_b != j % dim_b {
                removed += m[(i, j)].norm_sqr();
                proj[(i, j)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    let removed_norm = removed.sqrt();
    if removed_norm > 1e-10 {
        return Err(invalid(format!(
            "joint state is not block diagonal in the measured basis (off-block norm {removed_norm:e})"
        )));
    }
    let s_joint = spectral_entropy(&eigenvalues(&proj));
    let rho_a = CMatrix::from_fn(dim_a, dim_a, |a, a2| {
        (0..dim_b).map(|b| proj[(a * dim_b + b, a2 * dim_b + b)]).sum()
    });
    let probabilities: Vec<f64> = (0..dim_b)
        .map(|b| (0..dim_a).map(|a| proj[(a * dim_b + b, a * dim_b + b)].re).sum())
        .collect();
    let s_a = spectral_entropy(&eigenvalues(&rho_a));
    let s_b = spectral_entropy(&probabilities);
    let mut conditional = 0.0;
    for (b, &pb) in probabilities.iter().enumerate() {
        if pb <= 0.0 {
            continue;
        }
        let block = CMatrix::from_fn(dim_a, dim_a, |a, a2| proj[(a * dim_b + b, a2 * dim_b + b)] / pb);
        conditional += pb * spectral_entropy(&eigenvalues(&block));
    }
    let refined_rhs = s_b + conditional;
    let plain_rhs = s_b + s_a;
    Ok(RefinedReport {
        s_joint,
        s_a,
        s_b,
        probabilities,
        conditional,
        refined_rhs,
        plain_rhs,
        removed_norm,
        pass: s_joint <= refined_rhs + CHECK_TOL && refined_rhs <= plain_rhs + CHECK_TOL,
    })
}

// Random instances.

fn complex_normal<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

fn ginibre<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Gaussian Hermitian matrix (X + X*)/2 times `scale`.
pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize, scale: f64) -> CMatrix {
    let x = ginibre(rng, n, n);
    (&x + x.adjoint()).scale(0.5 * scale)
}

/// Haar-distributed unitary: QR of a Ginibre matrix with R's diagonal phases
/// moved into Q.
pub fn haar_unitary<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let qr = ginibre(rng, n, n).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

fn with_spectrum(u: &CMatrix, spectrum: &[f64]) -> CMatrix {
    let d = DVector::from_iterator(spectrum.len(), spectrum.iter().map(|&x| Complex64::new(x, 0.0)));
    u * CMatrix::from_diagonal(&d) * u.adjoint()
}

/// 0 ≤ γ ≤ 1 in a Haar basis; each eigenvalue is 0, 1 or uniform.
pub fn random_one_body<R: Rng>(rng: &mut R, n: usize) -> OneBodyDM {
    let spectrum: Vec<f64> = (0..n)
        .map(|_| match rng.random_range(0..6u8) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random::<f64>(),
        })
        .collect();
    let u = haar_unitary(rng, n);
    let m = with_spectrum(&u, &spectrum);
    OneBodyDM {
        m: (&m + m.adjoint()).scale(0.5),
    }
}

/// W W* for an n × rank Ginibre W, times `scale`.
pub fn random_psd<R: Rng>(rng: &mut R, n: usize, rank: usize, scale: f64) -> CMatrix {
    let w = ginibre(rng, n, rank);
    let m = &w * w.adjoint();
    (&m + m.adjoint()).scale(0.5 * scale)
}

pub fn random_density<R: Rng>(rng: &mut R, n: usize, rank: usize) -> DensityMatrix {
    let m = random_psd(rng, n, rank.max(1), 1.0);
    let t = trace_re(&m);
    DensityMatrix { m: m.unscale(t) }
}

/// Orthogonal projection of the given rank onto a Haar-random subspace.
pub fn random_projection<R: Rng>(rng: &mut R, n: usize, rank: usize) -> CMatrix {
    let u = haar_unitary(rng, n);
    let cols = u.columns(0, rank.min(n)).into_owned();
    let p = &cols * cols.adjoint();
    (&p + p.adjoint()).scale(0.5)
}

fn random_unit_vector<R: Rng>(rng: &mut R, n: usize) -> DVector<Complex64> {
    loop {
        let v = DVector::from_fn(n, |_, _| complex_normal(rng));
        let norm = v.norm();
        if norm > 1e-8 {
            return v.unscale(norm);
        }
    }
}

// Suites.

pub fn lemma7_suite(seed: u64, instances: usize) -> Result<SuiteReport> {
    run_random("lemma7", seed, instances, |rng| {
        let n = rng.random_range(1..=8usize);
        let scale = 10f64.powf(rng.random_range(-1.0..1.0));
        let h = random_hermitian(rng, n, scale);
        let gamma = if rng.random_bool(0.25) {
            // near the minimizer, where both sides are small
            let (gh, _) = gibbs_state(&h)?;
            let eps = 10f64.powf(rng.random_range(-6.0..-1.0));
            let pert = random_hermitian(rng, n, eps);
            let m = spectral_map(&(gh.matrix() + pert), |x| x.clamp(0.0, 1.0));
            OneBodyDM::new(m)?
        } else {
            random_one_body(rng, n)
        };
        let r = lemma7_check(&h, &gamma)?;
        Ok((r.pass, r.slack()))
    })
}

pub fn klein_scan(seed: u64, points: usize) -> Result<SuiteReport> {
    let mut rng = instance_rng(seed, 0);
    let mut t = Tally::new("klein", seed);
    for _ in 0..points {
        let x: f64 = rng.random();
        let y: f64 = rng.random();
        let k = klein_kernel(x, y)?;
        t.record(k.pass, (k.g - k.lb_quadratic).min(k.g - k.lb_trace));
    }
    Ok(t.finish())
}

pub fn lemma2_suite(seed: u64, instances: usize) -> Result<SuiteReport> {
    run_random("lemma2", seed, instances, |rng| {
        let n = rng.random_range(1..=16usize);
        let k = rng.random_range(1..=8usize);
        let mut w: Vec<f64> = (0..k)
            .map(|_| if rng.random_bool(0.1) { 0.0 } else { -(-rng.random::<f64>()).ln_1p() + 1e-3 })
            .collect();
        if w.iter().all(|&x| x == 0.0) {
            w[0] = 1.0;
        }
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        let vectors: Vec<_> = (0..k).map(|_| random_unit_vector(rng, n)).collect();
        let r = lemma2_check(&w, &vectors)?;
        Ok((r.pass, r.s_hat - (r.s - r.log_norm)))
    })
}

pub fn trace_norm_chain_suite(seed: u64, instances: usize) -> Result<SuiteReport> {
    run_random("trace_norm_chain", seed, instances, |rng| {
        let n = rng.random_range(1..=12usize);
        let ra = rng.random_range(1..=n);
        let rb = rng.random_range(1..=n);
        let sa = 10f64.powf(rng.random_range(-2.0..1.0));
        let a = random_psd(rng, n, ra, sa);
        let b = if rng.random_bool(0.2) {
            a.clone() + random_psd(rng, n, 1, 1e-3 * sa)
        } else {
            let sb = sa * 10f64.powf(rng.random_range(-1.0..1.0));
            random_psd(rng, n, rb, sb)
        };
        let rank = rng.random_range(0..=n);
        let p = random_projection(rng, n, rank);
        let r = trace_norm_chain_check(&a, &b, &p)?;
        Ok((r.pass, r.rhs - r.lhs))
    })
}

pub fn refined_subadditivity_suite(seed: u64, instances: usize) -> Result<SuiteReport> {
    run_random("refined_subadditivity", seed, instances, |rng| {
        let da = rng.random_range(1..=4usize);
        let db = rng.random_range(1..=4usize);
        let n = da * db;
        let mut m = CMatrix::zeros(n, n);
        for b in 0..db {
            if rng.random_bool(0.15) {
                continue;
            }
            let rank = rng.random_range(1..=da);
            let scale = rng.random::<f64>() + 0.05;
            let block = random_psd(rng, da, rank, scale);
            for i in 0..da {
                for j in 0..da {
                    m[(i * db + b, j * db + b)] = block[(i, j)];
                }
            }
        }
        let t = trace_re(&m);
        if t == 0.0 {
            m[(0, 0)] = Complex64::new(1.0, 0.0);
        } else {
            m.unscale_mut(t);
        }
        let r = refined_subadditivity_check(&DensityMatrix::new(m)?, da, db)?;
        Ok((r.pass, r.slack()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::LN_2;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn diag(v: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|&x| c(x))))
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityMatrix::new(diag(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(vn_entropy(&pure), 0.0);
        let mixed = DensityMatrix::new(diag(&[0.25; 4])).unwrap();
        assert!((vn_entropy(&mixed) - 4f64.ln()).abs() < 1e-14);
        let d = DensityMatrix::new(diag(&[0.5, 0.25, 0.25])).unwrap();
        assert!((vn_entropy(&d) - 1.5 * LN_2).abs() < 1e-14);
    }

    #[test]
    fn fermi_entropy_examples() {
        let half = OneBodyDM::new(diag(&[0.5; 3])).unwrap();
        assert!((fermi_entropy(&half) - 3.0 * LN_2).abs() < 1e-14);
        let proj = OneBodyDM::new(diag(&[1.0, 0.0])).unwrap();
        assert_eq!(fermi_entropy(&proj), 0.0);
        let g = OneBodyDM::new(diag(&[0.9, 0.1])).unwrap();
        let expect = 2.0 * (-0.9 * 0.9f64.ln() - 0.1 * 0.1f64.ln());
        assert!((fermi_entropy(&g) - expect).abs() < 1e-14);
        assert!((expect - 0.650_165_946_782_896_4).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut m = diag(&[0.5, 0.5]);
        m[(0, 1)] = c(0.1);
        assert!(DensityMatrix::new(m).is_err());
        assert!(OneBodyDM::new(diag(&[1.2])).is_err());
        assert!(klein_kernel(1.1, 0.5).is_err());
        assert!(grand_potential(&diag(&[0.0]), &OneBodyDM::new(diag(&[0.5, 0.5])).unwrap()).is_err());
    }

    #[test]
    fn gibbs_examples() {
        let (g, f) = gibbs_state(&diag(&[0.0])).unwrap();
        assert!((g.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((f + LN_2).abs() < 1e-15);
        let e = core::f64::consts::E;
        let (g, f) = gibbs_state(&diag(&[1.0, -1.0])).unwrap();
        assert!((g.matrix()[(0, 0)].re - 1.0 / (1.0 + e)).abs() < 1e-15);
        assert!((g.matrix()[(1, 1)].re - 1.0 / (1.0 + 1.0 / e)).abs() < 1e-15);
        assert!((f + (1.0 + 1.0 / e).ln() + (1.0 + e).ln()).abs() < 1e-14);
        let h = diag(&[1.0, -1.0]);
        assert!((grand_potential(&h, &g).unwrap() - f).abs() < 1e-12);
    }

    #[test]
    fn grand_potential_examples() {
        let h = diag(&[0.0]);
        assert_eq!(grand_potential(&h, &OneBodyDM::new(diag(&[1.0])).unwrap()).unwrap(), 0.0);
        let v = grand_potential(&h, &OneBodyDM::new(diag(&[0.9])).unwrap()).unwrap();
        assert!((v + binary_entropy(0.9)).abs() < 1e-15);
        assert!((v + 0.325_082_973_391_448_2).abs() < 1e-15);
    }

    #[test]
    fn lemma7_examples() {
        let h = diag(&[0.0]);
        let r = lemma7_check(&h, &OneBodyDM::new(diag(&[1.0])).unwrap()).unwrap();
        assert!((r.gap - LN_2).abs() < 1e-15);
        assert!((r.rhs_hs - 0.5).abs() < 1e-15);
        assert!((r.rhs_trace - 0.125).abs() < 1e-15);
        assert!(r.pass);
        let h = diag(&[0.3, -2.0]);
        let (gh, _) = gibbs_state(&h).unwrap();
        let r = lemma7_check(&h, &gh).unwrap();
        assert!(r.gap.abs() < 1e-14 && r.rhs_hs < 1e-28 && r.rhs_trace < 1e-28 && r.pass);
    }

    #[test]
    fn klein_examples() {
        let k = klein_kernel(1.0, 0.5).unwrap();
        assert!((k.g - LN_2).abs() < 1e-15 && k.lb_quadratic == 0.5 && k.pass);
        let z = klein_kernel(0.3, 0.3).unwrap();
        assert_eq!((z.g, z.lb_quadratic, z.lb_trace), (0.0, 0.0, 0.0));
        assert!(klein_kernel(0.5, 0.0).unwrap().g.is_infinite());
        assert_eq!(klein_kernel(0.0, 0.5).unwrap().g, LN_2);
    }

    #[test]
    fn klein_matches_quadrature() {
        for &(x, y) in &[(0.2, 0.7), (0.9, 0.05), (0.5, 0.51)] {
            let q = crate::quadrature::integrate(
                |z: f64| (x - z) * (1.0 / z + 1.0 / (1.0 - z)),
                &[x.min(y), x.max(y)],
                1e-14,
                0.0,
            )
            .unwrap();
            let q = if x < y { -q.value } else { q.value };
            let g = klein_kernel(x, y).unwrap().g;
            assert!((g - q).abs() < 1e-12 * g, "{x} {y}");
        }
    }

    #[test]
    fn klein_grid_quadratic_bound() {
        let n = 1000;
        for i in 0..=n {
            for j in 0..=n {
                let k = klein_kernel(i as f64 / n as f64, j as f64 / n as f64).unwrap();
                assert!(k.pass, "({i}, {j})");
            }
        }
    }

    #[test]
    fn lemma2_examples() {
        let e0 = DVector::from_vec(vec![c(1.0), c(0.0)]);
        let e1 = DVector::from_vec(vec![c(0.0), c(1.0)]);
        let r = lemma2_check(&[0.3, 0.7], &[e0.clone(), e1]).unwrap();
        assert!((r.s_hat - r.s).abs() < 1e-14 && r.log_norm.abs() < 1e-14 && r.pass);
        let th = core::f64::consts::FRAC_PI_3;
        let v = DVector::from_vec(vec![c(th.cos()), c(th.sin())]);
        let r = lemma2_check(&[0.5, 0.5], &[e0, v]).unwrap();
        assert!((r.log_norm - 1.5f64.ln()).abs() < 1e-14);
        assert!(r.s_hat >= LN_2 - 1.5f64.ln() && r.pass);
        assert!(lemma2_check(&[0.5, 0.6], &[DVector::from_vec(vec![c(1.0)]), DVector::from_vec(vec![c(1.0)])]).is_err());
    }

    #[test]
    fn chain_examples() {
        let mut rng = instance_rng(7, 0);
        let a = random_psd(&mut rng, 4, 4, 1.0);
        let p = CMatrix::identity(4, 4);
        let r = trace_norm_chain_check(&a, &a, &p).unwrap();
        assert!(r.lhs < 1e-14 && r.pass);
        for _ in 0..20 {
            let a = random_psd(&mut rng, 4, 3, 1.0);
            let b = random_psd(&mut rng, 4, 2, 1.0);
            let r = trace_norm_chain_check(&a, &b, &p).unwrap();
            assert!((r.leading - 2.0 * hs_norm(&(&a - &b))).abs() < 1e-12);
            assert!(r.lhs <= r.leading * (1.0 + 1e-12) && r.pass);
        }
        let mut bad = diag(&[1.0, 0.0]);
        bad[(0, 0)] = c(0.5);
        assert!(trace_norm_chain_check(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0]), &bad).is_err());
    }

    #[test]
    fn refined_examples() {
        let mut rng = instance_rng(3, 0);
        let ra = random_density(&mut rng, 2, 2);
        let rb = diag(&[0.3, 0.7]);
        let prod = ra.matrix().kronecker(&rb);
        let r = refined_subadditivity_check(&DensityMatrix::new(prod).unwrap(), 2, 2).unwrap();
        assert!((r.s_joint - r.refined_rhs).abs() < 1e-12);
        assert!((r.refined_rhs - r.plain_rhs).abs() < 1e-12 && r.pass);

        let cc = diag(&[0.5, 0.0, 0.0, 0.5]);
        let r = refined_subadditivity_check(&DensityMatrix::new(cc).unwrap(), 2, 2).unwrap();
        assert!((r.s_joint - LN_2).abs() < 1e-14 && (r.s_b - LN_2).abs() < 1e-14);
        assert!(r.conditional.abs() < 1e-14);
        assert!((r.plain_rhs - r.refined_rhs - LN_2).abs() < 1e-14 && r.pass);

        let mut bell = diag(&[0.5, 0.0, 0.0, 0.5]);
        bell[(0, 3)] = c(0.5);
        bell[(3, 0)] = c(0.5);
        assert!(refined_subadditivity_check(&DensityMatrix::new(bell).unwrap(), 2, 2).is_err());
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = instance_rng(11, 0);
        let u = haar_unitary(&mut rng, 6);
        assert!(hs_norm(&(u.adjoint() * &u - CMatrix::identity(6, 6))) < 1e-13);
        let p = random_projection(&mut rng, 6, 2);
        assert!(hs_norm(&(&p * &p - &p)) < 1e-13);
        assert!((trace_re(&p) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn small_suites_pass_and_are_reproducible() {
        for r in [
            lemma7_suite(1, 50).unwrap(),
            lemma2_suite(1, 50).unwrap(),
            trace_norm_chain_suite(1, 50).unwrap(),
            refined_subadditivity_suite(1, 50).unwrap(),
            klein_scan(1, 1000).unwrap(),
        ] {
            assert_eq!(r.failures, 0, "{}", r.check);
            assert!(r.worst_slack >= -1e-9, "{}", r.check);
        }
        assert_eq!(lemma7_suite(5, 10).unwrap(), lemma7_suite(5, 10).unwrap());
    }
}
