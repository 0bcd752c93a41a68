//! Zero-energy s-wave scattering for repulsive radial potentials.
//!
//! With u(r) = rφ(r) the scattering equation is u'' = ½ v u. Both solvers
//! carry the ratio w = u/u' (which satisfies w' = 1 − ½ v w²) and ln u',
//! so nothing overflows however strong the barrier. The scattering length is
//! a = R₀ − w(R₀).

#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;


use crate::error::{invalid, Error, Result};
use crate::ode;

/// One piece of the tail: value varies linearly from `v_start` to `v_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub r_start: f64,
    pub r_end: f64,
    pub v_start: f64,
    pub v_end: f64,
}

impl Segment {
    pub fn constant(r_start: f64, r_end: f64, v: f64) -> Self {
        Segment {
            r_start,
            r_end,
            v_start: v,
            v_end: v,
        }
    }

    pub fn ramp(r_start: f64, r_end: f64, v_start: f64, v_end: f64) -> Self {
        Segment {
            r_start,
            r_end,
            v_start,
            v_end,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.v_start == self.v_end
    }

    pub fn value(&self, r: f64) -> f64 {
        if self.is_constant() {
            return self.v_start;
        }
        let t = (r - self.r_start) / (self.r_end - self.r_start);
        self.v_start + t * (self.v_end - self.v_start)
    }
}

/// Hard core of radius `core_radius` plus a non-negative tail on
/// `[core_radius, range]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPotential {
    core_radius: f64,
    range: f64,
    segments: Vec<Segment>,
}

impl RadialPotential {
    pub fn new(core_radius: f64, range: f64, segments: Vec<Segment>) -> Result<Self> {
        if !(core_radius.is_finite() && core_radius >= 0.0) {
            return Err(invalid("core radius must be finite and non-negative"));
        }
        if !(range.is_finite() && range >= core_radius) {
            return Err(invalid("range must be finite and at least the core radius"));
        }
        let tol = 1e-12 * range.max(1.0);
        let mut at = core_radius;
        for (i, s) in segments.iter().enumerate() {
            if !(s.r_start.is_finite() && s.r_end.is_finite()) {
                return Err(invalid(format!("segment {i}: non-finite radius")));
            }
            if (s.r_start - at).abs() > tol {
                return Err(invalid(format!(
                    "segment {i}: starts at {} but previous coverage ends at {at}",
                    s.r_start
                )));
            }
            if s.r_end <= s.r_start {
                return Err(invalid(format!("segment {i}: empty or reversed interval")));
            }
            if !(s.v_start >= 0.0 && s.v_end >= 0.0 && s.v_start.is_finite() && s.v_end.is_finite()) {
                return Err(invalid(format!("segment {i}: values must be finite and non-negative")));
            }
            at = s.r_end;
        }
        if (at - range).abs() > tol {
            return Err(invalid(format!(
                "segments cover up to {at}, but range is {range}"
            )));
        }
        Ok(RadialPotential {
            core_radius,
            range,
            segments,
        })
    }

    /// v ≡ 0.
    pub fn free() -> Self {
        RadialPotential {
            core_radius: 0.0,
            range: 0.0,
            segments: Vec::new(),
        }
    }

    pub fn hard_core(radius: f64) -> Result<Self> {
        Self::new(radius, radius, Vec::new())
    }

    /// Constant `v` on `[0, range]`.
    pub fn square(range: f64, v: f64) -> Result<Self> {
        Self::new(0.0, range, vec![Segment::constant(0.0, range, v)])
    }

    pub fn core_radius(&self) -> f64 {
        self.core_radius
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_piecewise_constant(&self) -> bool {
        self.segments.iter().all(Segment::is_constant)
    }

    /// v(r); `+∞` inside the core, 0 beyond the range.
    pub fn value(&self, r: f64) -> f64 {
        if r < self.core_radius {
            return f64::INFINITY;
        }
        self.segments
            .iter()
            .find(|s| r >= s.r_start && r < s.r_end)
            .map_or(0.0, |s| s.value(r))
    }

    /// Dilation r → λr, v → v/λ².
    pub fn dilated(&self, lambda: f64) -> Result<Self> {
        let l2 = lambda * lambda;
        let segs = self
            .segments
            .iter()
            .map(|s| Segment::ramp(lambda * s.r_start, lambda * s.r_end, s.v_start / l2, s.v_end / l2))
            .collect();
        Self::new(lambda * self.core_radius, lambda * self.range, segs)
    }

    /// All tail values multiplied by `factor ≥ 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let segs = self
            .segments
            .iter()
            .map(|s| Segment::ramp(s.r_start, s.r_end, factor * s.v_start, factor * s.v_end))
            .collect();
        Self::new(self.core_radius, self.range, segs)
    }

    /// ∫ v d³r over the tail (the core excluded).
    pub fn tail_integral(&self) -> f64 {
        let pi = core::f64::consts::PI;
        self.segments
            .iter()
            .map(|s| {
                // ∫ 4π r² (v0 + k (r − r0)) dr, exact for a linear profile
                let k = (s.v_end - s.v_start) / (s.r_end - s.r_start);
                let c = s.v_start - k * s.r_start;
                let cube = s.r_end.powi(3) - s.r_start.powi(3);
                let quart = s.r_end.powi(4) - s.r_start.powi(4);
                4.0 * pi * (c * cube / 3.0 + k * quart / 4.0)
            })
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExactSegment,
    Ode,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::ExactSegment => "exact-segment",
            Method::Ode => "ode",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringResult {
    pub a: f64,
    pub range: f64,
    pub method: Method,
    pub error_estimate: f64,
    /// (r, u(r)) with u = rφ and φ → 1 at infinity.
    pub u_samples: Vec<(f64, f64)>,
}

const ODE_RTOL: f64 = 1e-11;
const SAMPLES: usize = 65;

#[derive(Debug, Clone, Copy)]
struct State {
    w: f64,
    ln_du: f64,
}

fn exact_step(s: State, v: f64, x: f64) -> State {
    let kappa = (0.5 * v).sqrt();
    if kappa == 0.0 {
        return State {
            w: s.w + x,
            ln_du: s.ln_du,
        };
    }
    let kx = kappa * x;
    let t = kx.tanh();
    let e = (-2.0 * kx).exp();
    State {
        w: (s.w + t / kappa) / (1.0 + s.w * kappa * t),
        ln_du: s.ln_du + kx + (0.5 * (1.0 + e) + 0.5 * s.w * kappa * (1.0 - e)).ln(),
    }
}

fn ode_step(s: State, seg: &Segment, r0: f64, r1: f64, atol: f64) -> Result<(State, f64)> {
    let out = ode::solve(
        |r, y: &[f64; 2]| {
            let v = seg.value(r);
            [1.0 - 0.5 * v * y[0] * y[0], 0.5 * v * y[0]]
        },
        r0,
        r1,
        [s.w, s.ln_du],
        ODE_RTOL,
        atol,
    )?;
    Ok((
        State {
            w: out.y[0],
            ln_du: out.y[1],
        },
        out.error,
    ))
}

/// Walks the potential from the core outwards, recording the state at each
/// radius of `stops` (sorted, all in `[r_c, R₀]`). Returns the stop states,
/// the state at R₀ and an error estimate.
fn propagate(v: &RadialPotential, stops: &[f64], method: Method) -> Result<(Vec<State>, State, f64)> {
    let atol = 1e-14 * v.range.max(1e-300);
    let mut s = State { w: 0.0, ln_du: 0.0 };
    let mut at = v.core_radius;
    let mut err = 0.0;
    let mut out = Vec::with_capacity(stops.len());
    let mut next = 0;
    for seg in &v.segments {
        let mut advance = |s: State, from: f64, to: f64| -> Result<State> {
            match method {
                Method::ExactSegment if seg.is_constant() => Ok(exact_step(s, seg.v_start, to - from)),
                _ => {
                    let (n, e) = ode_step(s, seg, from, to, atol)?;
                    err += e;
                    Ok(n)
                }
            }
        };
        while next < stops.len() && stops[next] < seg.r_end {
            let r = stops[next].max(at);
            s = advance(s, at, r)?;
            at = r;
            out.push(s);
            next += 1;
        }
        s = advance(s, at, seg.r_end)?;
        at = seg.r_end;
    }
    while out.len() < stops.len() {
        out.push(s);
    }
    let rounding = 8.0 * f64::EPSILON * v.range * (v.segments.len() as f64 + 1.0);
    Ok((out, s, err + rounding))
}

fn solve(v: &RadialPotential, method: Method) -> Result<ScatteringResult> {
    let r_c = v.core_radius;
    let span = v.range - r_c;
    let stops: Vec<f64> = if span > 0.0 {
        (0..SAMPLES)
            .map(|i| r_c + span * i as f64 / (SAMPLES - 1) as f64)
            .collect()
    } else {
        vec![r_c]
    };
    let (states, end, err) = propagate(v, &stops, method)?;
    if !(end.w.is_finite() && end.ln_du.is_finite()) {
        return Err(Error::Invariant("u'(R0) is not positive".into()));
    }
    let a = v.range - end.w;
    if !(-err..=v.range + err).contains(&a) {
        return Err(Error::Invariant(format!(
            "scattering length {a} outside [0, R0] for a repulsive potential"
        )));
    }
    let u_samples = stops
        .iter()
        .zip(&states)
        .map(|(&r, st)| (r, st.w * (st.ln_du - end.ln_du).exp()))
        .collect();
    Ok(ScatteringResult {
        a: a.clamp(0.0, v.range),
        range: v.range,
        method,
        error_estimate: err,
        u_samples,
    })
}

/// Scattering length; exact propagation when every segment is constant,
/// adaptive ODE integration otherwise.
pub fn scattering_length(v: &RadialPotential) -> Result<ScatteringResult> {
    let method = if v.is_piecewise_constant() {
        Method::ExactSegment
    } else {
        Method::Ode
    };
    solve(v, method)
}

/// Scattering length through the ODE path regardless of segment shape.
pub fn scattering_length_ode(v: &RadialPotential) -> Result<ScatteringResult> {
    solve(v, Method::Ode)
}

/// φ(r) on `grid`, normalized so that φ(r) = 1 − a/r for r ≥ R₀.
pub fn scattering_wavefunction(v: &RadialPotential, grid: &[f64]) -> Result<Vec<f64>> {
    if grid.iter().any(|&r| !(r.is_finite() && r > v.core_radius)) {
        return Err(invalid("grid points must lie beyond the core radius"));
    }
    let method = if v.is_piecewise_constant() {
        Method::ExactSegment
    } else {
        Method::Ode
    };
    let mut inner: Vec<(usize, f64)> = grid
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, r)| r < v.range)
        .collect();
    inner.sort_by(|x, y| x.1.total_cmp(&y.1));
    let stops: Vec<f64> = inner.iter().map(|p| p.1).collect();
    let (states, end, _) = propagate(v, &stops, method)?;
    let a = v.range - end.w;
    let mut phi: Vec<f64> = grid.iter().map(|&r| 1.0 - a / r).collect();
    for ((idx, r), st) in inner.iter().zip(&states) {
        phi[*idx] = st.w * (st.ln_du - end.ln_du).exp() / r;
    }
    Ok(phi)
}
