//! Adaptive Gauss–Legendre panel quadrature.
//!
//! Each panel is integrated with the 10-point rule on the whole panel and on
//! its two halves; the difference is the panel's error estimate. The panel
//! with the largest estimate is split until the global target is met.

use alloc::vec::Vec;

use crate::error::{numeric, Result};

const NODES: [f64; 5] = [
    0.148_874_338_981_631_21,
    0.433_395_394_129_247_19,
    0.679_409_568_299_024_41,
    0.865_063_366_688_984_51,
    0.973_906_528_517_171_72,
];
const WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_87,
    0.269_266_719_309_996_36,
    0.219_086_362_515_982_04,
    0.149_451_349_150_580_59,
    0.066_671_344_308_688_14,
];

const MAX_PANELS: usize = 50_000;

/// Value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// 10-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss10<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for i in 0..5 {
        let d = h * NODES[i];
        s += WEIGHTS[i] * (f(c - d) + f(c + d));
    }
    s * h
}

/// Nodes and weights of the 10-point rule mapped to `[a, b]`, split into
/// `panels` equal panels.
pub fn gauss10_points(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(10 * panels);
    let w = (b - a) / panels as f64;
    for k in 0..panels {
        let c = a + (k as f64 + 0.5) * w;
        let h = 0.5 * w;
        for i in 0..5 {
            out.push((c - h * NODES[i], h * WEIGHTS[i]));
            out.push((c + h * NODES[i], h * WEIGHTS[i]));
        }
    }
    out
}

struct Panel {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    err: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64) -> Self {
        let m = 0.5 * (a + b);
        let left = gauss10(f, a, m);
        let right = gauss10(f, m, b);
        let err = (whole - (left + right)).abs();
        Panel {
            a,
            b,
            left,
            right,
            err,
        }
    }
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, with initial panel
/// boundaries at every entry of `breaks` (must be non-decreasing).
///
/// Stops when the summed estimate is below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Estimate> {
    let mut panels: Vec<Panel> = Vec::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let whole = gauss10(&f, w[0], w[1]);
            panels.push(Panel::new(&f, w[0], w[1], whole));
        }
    }
    loop {
        let mut total = 0.0;
        let mut err = 0.0;
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            total += p.left + p.right;
            err += p.err;
            if p.err > panels[worst].err {
                worst = i;
            }
        }
        if !total.is_finite() || !err.is_finite() {
            return Err(numeric("non-finite integrand", f64::INFINITY));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(Estimate { value: total, error: err });
        }
        if panels.len() >= MAX_PANELS {
            return Err(numeric("adaptive quadrature did not converge", err));
        }
        let p = panels.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            return Err(numeric("panel width underflow", err));
        }
        panels.push(Panel::new(&f, p.a, m, p.left));
        panels.push(Panel::new(&f, m, p.b, p.right));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x.powi(7) - 3.0 * x * x, &[0.0, 2.0], 1e-14, 0.0).unwrap();
        assert!((r.value - (32.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn sqrt_endpoint_singularity() {
        // ∫₀¹ √x dx = 2/3
        let r = integrate(|x: f64| x.sqrt(), &[0.0, 1.0], 1e-12, 0.0).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn gaussian_on_split_range() {
        let r = integrate(|x: f64| (-x * x).exp(), &[0.0, 1.0, 3.0, 12.0], 1e-14, 0.0).unwrap();
        let exact = 0.5 * core::f64::consts::PI.sqrt();
        assert!((r.value - exact).abs() < 1e-14);
    }

    #[test]
    fn points_sum_to_length() {
        let s: f64 = gauss10_points(1.0, 4.0, 3).iter().map(|p| p.1).sum();
        assert!((s - 3.0).abs() < 1e-14);
    }
}
