//! Zeros of `R_n` on the unit circle through the real functions `G_n`.
//!
//! With `z = e^{iθ}` and `x = cos(θ/2)`, `G_n(x) = (4z)^{-n/2} R_n(z)` is real
//! on `[-1, 1]` and satisfies
//! `G_{n+1} = (x - c_{n+1} √(1-x²)) G_n - d_{n+1} G_{n-1}`.
//! The zeros of consecutive `G_n` interlace, so level `k` brackets level
//! `k + 1` together with the endpoints `±1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::input::RecurrenceInput;
use crate::recurrence::eval_r_q;
use crate::C64;

/// Default bisection width in `x`.
pub const DEFAULT_TOL: f64 = 1e-13;

/// Zeros at one level, ordered by increasing angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub n: usize,
    /// Zeros of `G_n`, strictly decreasing in `(-1, 1)`.
    pub x: Vec<f64>,
    /// `θ = 2 arccos(x)`, strictly increasing in `(0, 2π)`.
    pub theta: Vec<f64>,
    pub z: Vec<C64>,
}

impl ZeroSet {
    fn from_x(n: usize, x: Vec<f64>) -> Self {
        let theta: Vec<f64> = x.iter().map(|v| 2.0 * v.acos()).collect();
        let z = theta.iter().map(|&t| C64::from_polar(1.0, t)).collect();
        ZeroSet { n, x, theta, z }
    }
}

/// `(G_n(x), G_n'(x))`. At `x = ±1` the derivative is infinite unless the
/// relevant `c_k` vanish; only interior derivatives are used downstream.
pub fn eval_g(input: &RecurrenceInput, n: usize, x: f64) -> Result<(f64, f64)> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} is outside [-1, 1]")));
    }
    input.require(n, "G_n evaluation")?;
    if n == 0 {
        return Ok((1.0, 0.0));
    }
    let s = (1.0 - x * x).sqrt();
    let ds = -x / s;
    let (mut g0, mut dg0) = (1.0, 0.0);
    let (mut g1, mut dg1) = (x - input.c(1) * s, 1.0 - input.c(1) * ds);
    for k in 1..n {
        let c = input.c(k + 1);
        let d = input.d(k + 1);
        let a = x - c * s;
        let da = 1.0 - c * ds;
        let g2 = a * g1 - d * g0;
        let dg2 = da * g1 + a * dg1 - d * dg0;
        (g0, dg0, g1, dg1) = (g1, dg1, g2, dg2);
    }
    Ok((g1, dg1))
}

fn g_value(c: &[f64], d: &[f64], n: usize, x: f64) -> f64 {
    let s = (1.0 - x * x).sqrt();
    let mut g0 = 1.0;
    let mut g1 = x - c[0] * s;
    for k in 1..n {
        let g2 = (x - c[k] * s) * g1 - d[k] * g0;
        g0 = g1;
        g1 = g2;
    }
    g1
}

/// Zeros for every level `1..=n`.
pub fn zero_levels(input: &RecurrenceInput, n: usize, tol: f64) -> Result<Vec<ZeroSet>> {
    if n == 0 {
        return Err(Error::InvalidInput("zeros need n >= 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    input.require(n, "zero location")?;
    let (c, d) = (input.c_values(), input.d_values());
    let mut levels: Vec<ZeroSet> = Vec::with_capacity(n);
    let mut prev: Vec<f64> = Vec::new();
    for k in 1..=n {
        let g = |x: f64| g_value(c, d, k, x);
        let mut ends = Vec::with_capacity(k + 1);
        ends.push(1.0);
        ends.extend_from_slice(&prev);
        ends.push(-1.0);
        let mut roots = Vec::with_capacity(k);
        for j in 0..k {
            let root =
                refine(&g, input, k, ends[j + 1], ends[j], tol).ok_or(Error::BracketFailure {
                    level: k,
                    bracket: j + 1,
                })?;
            roots.push(root);
        }
        levels.push(ZeroSet::from_x(k, roots.clone()));
        prev = roots;
    }
    Ok(levels)
}

/// Zeros of `R_n`.
pub fn zeros(input: &RecurrenceInput, n: usize, tol: f64) -> Result<ZeroSet> {
    Ok(zero_levels(input, n, tol)?.pop().expect("n >= 1 levels"))
}

// Bisection on [lo, hi] followed by one Newton step kept only if it stays
// inside the final bracket. None when the endpoints do not change sign.
fn refine<F: Fn(f64) -> f64>(
    g: &F,
    input: &RecurrenceInput,
    n: usize,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Option<f64> {
    let mut g_lo = g(lo);
    let g_hi = g(hi);
    if g_lo == 0.0 || g_hi == 0.0 || g_lo.signum() == g_hi.signum() || !g_lo.is_finite() {
        return None;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return Some(mid);
        }
        if gm.signum() == g_lo.signum() {
            lo = mid;
            g_lo = gm;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    let (v, dv) = eval_g(input, n, mid).ok()?;
    let polished = mid - v / dv;
    Some(if polished.is_finite() && (lo..=hi).contains(&polished) {
        polished
    } else {
        mid
    })
}

/// Smallest angular gap in the chain `θ_{n+1,1} < θ_{n,1} < ... < θ_{n+1,n+1}`;
/// negative when the levels fail to interlace.
pub fn interlacing_margin(lower: &ZeroSet, upper: &ZeroSet) -> Result<f64> {
    if upper.n != lower.n + 1 {
        return Err(Error::InvalidInput("levels must be consecutive".into()));
    }
    let mut merged = Vec::with_capacity(lower.n + upper.n);
    for j in 0..lower.n {
        merged.push(upper.theta[j]);
        merged.push(lower.theta[j]);
    }
    merged.push(upper.theta[lower.n]);
    Ok(merged
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min))
}

/// Wronskian values at the zeros of one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WronskianCheck {
    pub n: usize,
    /// `W_n(x_j) = G_n'(x_j) G_{n-1}(x_j)`.
    pub w_at_roots: Vec<f64>,
    /// Largest relative deviation of `W_{n+1}(x_j)` from `d_{n+1} W_n(x_j)`,
    /// when `d_{n+1}` is available.
    pub next_level_residual: Option<f64>,
    /// Largest relative deviation of `z^{-(n-2)} / (z - 1) R_n'(z) R_{n-1}(z)`
    /// from `2^{2n-3} W_n(x)` at the zeros.
    pub v_identity_residual: f64,
}

pub fn wronskian_check(input: &RecurrenceInput, zs: &ZeroSet) -> Result<WronskianCheck> {
    let n = zs.n;
    let has_next = n < input.len();
    let mut w = Vec::with_capacity(n);
    let mut next_res = 0.0f64;
    let mut v_res = 0.0f64;
    for (j, (&x, &z)) in zs.x.iter().zip(&zs.z).enumerate() {
        let (gn, dgn) = eval_g(input, n, x)?;
        let (gm, _) = eval_g(input, n - 1, x)?;
        let wn = dgn * gm;
        if !(wn > 0.0) {
            return Err(Error::PositivityViolation {
                what: format!("W_{n} at a zero"),
                index: j + 1,
                value: wn,
            });
        }
        if has_next {
            let (gp, dgp) = eval_g(input, n + 1, x)?;
            let wp = dgp * gn - gp * dgn;
            if !(wp > 0.0) {
                return Err(Error::PositivityViolation {
                    what: format!("W_{} at a zero of level {n}", n + 1),
                    index: j + 1,
                    value: wp,
                });
            }
            let target = input.d(n + 1) * wn;
            next_res = next_res.max((wp - target).abs() / target);
        }
        let rn = eval_r_q(input, n, z)?;
        let rm = eval_r_q(input, n - 1, z)?;
        let lhs = z.powi(2 - n as i32) / (z - 1.0) * rn.dr * rm.r;
        let rhs = 2f64.powi(2 * n as i32 - 3) * wn;
        v_res = v_res.max((lhs - rhs).norm() / rhs);
        w.push(wn);
    }
    Ok(WronskianCheck {
        n,
        w_at_roots: w,
        next_level_residual: has_next.then_some(next_res),
        v_identity_residual: v_res,
    })
}
