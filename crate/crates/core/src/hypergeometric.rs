//! Closed forms for the hypergeometric example family, `b = λ + iη`.
//!
//! Everything here is computed from explicit formulas and never calls the
//! recurrence pipeline, so it serves as ground truth for it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::input::RecurrenceInput;
use crate::C64;

/// Parameters of the example family: `λ > -1/2`, real `η`, `0 <= t < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExampleParams {
    pub lambda: f64,
    pub eta: f64,
    pub t: f64,
}

impl ExampleParams {
    pub fn new(lambda: f64, eta: f64, t: f64) -> Result<Self> {
        if !(lambda > -0.5) || !lambda.is_finite() {
            return Err(Error::InvalidInput(format!(
                "lambda = {lambda} must exceed -1/2"
            )));
        }
        if !eta.is_finite() {
            return Err(Error::InvalidInput("eta must be finite".into()));
        }
        if !(0.0..1.0).contains(&t) {
            return Err(Error::InvalidInput(format!("t = {t} must lie in [0, 1)")));
        }
        Ok(ExampleParams { lambda, eta, t })
    }

    pub fn b(&self) -> C64 {
        C64::new(self.lambda, self.eta)
    }

    /// `c_n = η / (λ + n)`.
    pub fn c(&self, n: usize) -> f64 {
        self.eta / (self.lambda + n as f64)
    }

    /// `d_n`, 1-based. Only `d_1` depends on `t`.
    pub fn d(&self, n: usize) -> f64 {
        let l = self.lambda;
        if n <= 1 {
            return 0.5 * (2.0 * l + 1.0) / (l + 1.0) * (1.0 - self.t);
        }
        let k = (n - 1) as f64;
        0.25 * k * (2.0 * l + k + 1.0) / ((l + k) * (l + k + 1.0))
    }

    /// The `c`/`d` prefix of length `n`.
    pub fn sequences(&self, n: usize) -> Result<RecurrenceInput> {
        RecurrenceInput::new(
            (1..=n).map(|k| self.c(k)).collect(),
            (1..=n).map(|k| self.d(k)).collect(),
        )
    }
}

/// `(a)_n` for signed `n`; negative `n` is `1 / ((a-1)(a-2)...(a-|n|))`.
pub fn pochhammer(a: C64, n: i64) -> Result<C64> {
    if n >= 0 {
        return Ok((0..n).fold(C64::new(1.0, 0.0), |acc, k| acc * (a + k as f64)));
    }
    let mut den = C64::new(1.0, 0.0);
    for k in 1..=(-n) {
        den *= a - k as f64;
    }
    if den == C64::new(0.0, 0.0) {
        return Err(Error::Pole(format!(
            "({a})_{n} has a vanishing denominator"
        )));
    }
    Ok(den.inv())
}

/// `(num)_n / (den)_n` for signed `n`, as a single product.
///
/// For negative `n = -m` this is `∏_{k=1}^{m} (den - k) / (num - k)`, so a
/// vanishing factor in `den` produces an exact zero rather than `inf / inf`.
pub fn pochhammer_ratio(num: C64, den: C64, n: i64) -> Result<C64> {
    let mut acc = C64::new(1.0, 0.0);
    if n >= 0 {
        for k in 0..n {
            let q = den + k as f64;
            if q == C64::new(0.0, 0.0) {
                return Err(Error::Pole(format!("({den})_{n} vanishes")));
            }
            acc *= (num + k as f64) / q;
        }
    } else {
        for k in 1..=(-n) {
            let q = num - k as f64;
            if q == C64::new(0.0, 0.0) {
                return Err(Error::Pole(format!(
                    "({num})_{n} has a vanishing denominator"
                )));
            }
            acc *= (den - k as f64) / q;
        }
    }
    Ok(acc)
}

/// Terminating `₂F₁(-n, a; c; x)`, summed in nested (Horner) form.
pub fn hyp2f1_terminating(n: usize, a: C64, c: C64, x: C64) -> Result<C64> {
    let one = C64::new(1.0, 0.0);
    let mut acc = one;
    for k in (0..n).rev() {
        let kf = k as f64;
        let ck = c + kf;
        if ck == C64::new(0.0, 0.0) {
            return Err(Error::Pole(format!(
                "({c})_{} vanishes in the 2F1 sum",
                k + 1
            )));
        }
        let ratio = (kf - n as f64) * (a + kf) / (ck * (kf + 1.0));
        acc = one + ratio * x * acc;
    }
    Ok(acc)
}

/// `M_0 = t`, `M_n = (2λ + n) / (2(λ + n))`, for `n = 0..=n_max`.
pub fn example_maximal(p: &ExampleParams, n_max: usize) -> Vec<f64> {
    let l = p.lambda;
    std::iter::once(p.t)
        .chain((1..=n_max).map(|n| 0.5 * (2.0 * l + n as f64) / (l + n as f64)))
        .collect()
}

/// `R_n(z) = (2λ+2)_n / (λ+1)_n · ₂F₁(-n, b+1; 2λ+2; 1-z)`.
pub fn example_r(p: &ExampleParams, n: usize, z: C64) -> Result<C64> {
    let l = p.lambda;
    let scale = pochhammer_ratio(C64::from(2.0 * l + 2.0), C64::from(l + 1.0), n as i64)?;
    let f = hyp2f1_terminating(n, p.b() + 1.0, C64::from(2.0 * l + 2.0), 1.0 - z)?;
    Ok(scale * f)
}

/// `ν_n = (2λ+1)/(b+1) · (-b-1)_n / (b̄+1)_n · (1-t)`, any integer `n`.
pub fn example_nu(p: &ExampleParams, n: i64) -> Result<C64> {
    let b = p.b();
    let ratio = pochhammer_ratio(-b - 1.0, b.conj() + 1.0, n)?;
    Ok((2.0 * p.lambda + 1.0) / (b + 1.0) * ratio * (1.0 - p.t))
}

/// `μ_n = t + (1-t) (-b)_n / (b̄+1)_n` for `n >= 0`, `μ_{-n} = conj(μ_n)`.
pub fn example_mu(p: &ExampleParams, n: i64) -> Result<C64> {
    if n < 0 {
        return example_mu(p, -n).map(|v| v.conj());
    }
    let b = p.b();
    let ratio = pochhammer_ratio(-b, b.conj() + 1.0, n)?;
    Ok(p.t + (1.0 - p.t) * ratio)
}

/// Density of the absolutely continuous part on `(0, 2π)`, already scaled
/// by `1 - t`; the remaining mass `t` sits at `θ = 0`.
pub fn example_weight_density(p: &ExampleParams, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 2.0 * PI) {
        return Err(Error::Domain(format!("theta = {theta} is outside (0, 2π)")));
    }
    let l = p.lambda;
    let g = gamma(p.b() + 1.0).norm_sqr();
    let norm = 2f64.powf(2.0 * l) * g / (2.0 * PI * gamma(C64::from(2.0 * l + 1.0)).re);
    let s2 = (theta / 2.0).sin().powi(2);
    Ok((1.0 - p.t) * norm * ((PI - theta) * p.eta).exp() * s2.powf(l))
}

/// Monic orthogonal polynomial for `t = 0`:
/// `(2λ+1)_n / (b+1)_n · ₂F₁(-n, b+1; 2λ+1; 1-z)`.
pub fn example_s0(p: &ExampleParams, n: usize, z: C64) -> Result<C64> {
    if p.t != 0.0 {
        return Err(Error::InvalidInput(
            "the closed-form OPUC needs t = 0".into(),
        ));
    }
    let b = p.b();
    let c = C64::from(2.0 * p.lambda + 1.0);
    let scale = pochhammer_ratio(c, b + 1.0, n as i64)?;
    Ok(scale * hyp2f1_terminating(n, b + 1.0, c, 1.0 - z)?)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Complex Γ by the Lanczos approximation, reflected for `Re z < 1/2`.
pub fn gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return C64::from(PI) / (s * gamma(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = C64::from(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}
