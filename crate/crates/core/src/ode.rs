//! Dormand–Prince 5(4) with step-size control, for small fixed-size systems.


#[allow(unused_imports)]
use num_traits::Float;
use crate::error::{numeric, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_STEPS: usize = 1_000_000;

pub(crate) struct Outcome<const N: usize> {
    pub y: [f64; N],
    /// Sum of accepted local error estimates (max-norm).
    pub error: f64,
}

/// Integrates y' = f(t, y) from `t0` to `t1` (t1 > t0).
pub(crate) fn solve<const N: usize, F>(
    f: F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    rtol: f64,
    atol: f64,
) -> Result<Outcome<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut t = t0;
    let mut y = y0;
    let mut h = (t1 - t0) * 1e-3;
    let mut acc_err = 0.0;
    if t1 <= t0 {
        return Ok(Outcome { y, error: 0.0 });
    }
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &y);
    for _ in 0..MAX_STEPS {
        if t >= t1 {
            return Ok(Outcome { y, error: acc_err });
        }
        // a remainder below rounding resolution is taken in one step
        let last = t + h >= t1 || t1 - t <= 4.0 * f64::EPSILON * t.abs().max(1.0);
        if last {
            h = t1 - t;
        }
        for s in 1..7 {
            let mut ys = y;
            for i in 0..N {
                let mut d = 0.0;
                for j in 0..s {
                    d += A[s][j] * k[j][i];
                }
                ys[i] += h * d;
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y_new = y;
        let mut err: f64 = 0.0;
        let mut abs_err: f64 = 0.0;
        for i in 0..N {
            let mut d = 0.0;
            let mut e = 0.0;
            for s in 0..6 {
                d += A[6][s] * k[s][i];
            }
            for s in 0..7 {
                e += E[s] * k[s][i];
            }
            y_new[i] += h * d;
            let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((h * e).abs() / sc);
            abs_err = abs_err.max((h * e).abs());
        }
        if !err.is_finite() {
            return Err(numeric("ODE step produced non-finite values", f64::INFINITY));
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + h };
            y = y_new;
            acc_err += abs_err;
            k[0] = k[6];
            if last {
                return Ok(Outcome { y, error: acc_err });
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h <= f64::EPSILON * t.abs().max(1.0) {
            return Err(numeric("ODE step size underflow", acc_err));
        }
    }
    Err(numeric("ODE step limit reached", acc_err))
}
