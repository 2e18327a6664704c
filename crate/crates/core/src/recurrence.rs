//! The three-term recurrence for `R_n` and `Q_n`.
//!
//! `R_{n+1} = [(1 + i c_{n+1}) z + (1 - i c_{n+1})] R_n - 4 d_{n+1} z R_{n-1}`
//! with `R_0 = 1, R_1 = (1 + i c_1) z + (1 - i c_1)`; `Q_n` follows the same
//! recurrence from `Q_0 = 0, Q_1 = 2 d_1`.
//!
//! Coefficient vectors are ascending in powers of `z` and limited to degree
//! [`COEFF_DEGREE_LIMIT`]; pointwise evaluation has no degree limit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::input::RecurrenceInput;
use crate::C64;

/// Largest degree served in coefficient mode.
pub const COEFF_DEGREE_LIMIT: usize = 64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Coefficients of `R_n` (length `n + 1`) and `Q_n` (length `n`, empty for `n = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyPair {
    pub degree: usize,
    pub r: Vec<C64>,
    pub q: Vec<C64>,
}

impl PolyPair {
    pub fn eval_r(&self, z: C64) -> C64 {
        horner(&self.r, z)
    }

    pub fn eval_q(&self, z: C64) -> C64 {
        horner(&self.q, z)
    }

    /// `r_{n,n}`.
    pub fn leading(&self) -> C64 {
        self.r[self.degree]
    }
}

/// Values of `R_n, R_n', Q_n, Q_n'` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValues {
    pub r: C64,
    pub dr: C64,
    pub q: C64,
    pub dq: C64,
}

pub fn horner(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}

/// `P*(z) = z^degree conj(P(1 / conj z))`: conjugated coefficients in reverse.
pub fn reciprocal(coeffs: &[C64], degree: usize) -> Vec<C64> {
    let mut padded = coeffs.to_vec();
    padded.resize(degree + 1, ZERO);
    padded.iter().rev().map(|c| c.conj()).collect()
}

fn check_degree(input: &RecurrenceInput, n: usize) -> Result<()> {
    if n > COEFF_DEGREE_LIMIT {
        return Err(Error::DegreeTooLarge {
            degree: n,
            limit: COEFF_DEGREE_LIMIT,
        });
    }
    input.require(n, "polynomial generation")
}

// One step of the recurrence on coefficient vectors: returns
// [(ρ z + conj ρ)] cur - 4 d z prev, where ρ = 1 + i c.
fn step(cur: &[C64], prev: &[C64], rho: C64, d: f64, degree: usize) -> Vec<C64> {
    let mut next = vec![ZERO; degree + 1];
    let rho_bar = rho.conj();
    for (j, &a) in cur.iter().enumerate() {
        next[j] += rho_bar * a;
        next[j + 1] += rho * a;
    }
    for (j, &a) in prev.iter().enumerate() {
        next[j + 1] -= 4.0 * d * a;
    }
    next
}

/// Coefficient tables for degrees `0..=n`.
pub fn poly_tables(input: &RecurrenceInput, n: usize) -> Result<Vec<PolyPair>> {
    check_degree(input, n)?;
    let mut out = Vec::with_capacity(n + 1);
    out.push(PolyPair {
        degree: 0,
        r: vec![ONE],
        q: vec![],
    });
    if n == 0 {
        return Ok(out);
    }
    let rho1 = input.rho(1);
    out.push(PolyPair {
        degree: 1,
        r: vec![rho1.conj(), rho1],
        q: vec![C64::from(2.0 * input.d(1))],
    });
    for k in 1..n {
        let rho = input.rho(k + 1);
        let d = input.d(k + 1);
        let r = step(&out[k].r, &out[k - 1].r, rho, d, k + 1);
        let mut q = step(&out[k].q, &out[k - 1].q, rho, d, k + 1);
        q.truncate(k + 1);
        out.push(PolyPair {
            degree: k + 1,
            r,
            q,
        });
    }
    Ok(out)
}

/// Coefficients of `R_n`.
pub fn generate_r(input: &RecurrenceInput, n: usize) -> Result<Vec<C64>> {
    Ok(poly_tables(input, n)?.pop().expect("nonempty").r)
}

/// Coefficients of `Q_n`.
pub fn generate_q(input: &RecurrenceInput, n: usize) -> Result<Vec<C64>> {
    Ok(poly_tables(input, n)?.pop().expect("nonempty").q)
}

/// `(R_n(z), R_n'(z), Q_n(z), Q_n'(z))` by running the recurrence and its
/// termwise derivative at `z`.
pub fn eval_r_q(input: &RecurrenceInput, n: usize, z: C64) -> Result<PointValues> {
    input.require(n, "pointwise evaluation")?;
    let mut prev = PointValues {
        r: ONE,
        dr: ZERO,
        q: ZERO,
        dq: ZERO,
    };
    if n == 0 {
        return Ok(prev);
    }
    let rho1 = input.rho(1);
    let mut cur = PointValues {
        r: rho1 * z + rho1.conj(),
        dr: rho1,
        q: C64::from(2.0 * input.d(1)),
        dq: ZERO,
    };
    for k in 1..n {
        let rho = input.rho(k + 1);
        let lin = rho * z + rho.conj();
        let four_d = 4.0 * input.d(k + 1);
        let next = PointValues {
            r: lin * cur.r - four_d * z * prev.r,
            dr: rho * cur.r + lin * cur.dr - four_d * (prev.r + z * prev.dr),
            q: lin * cur.q - four_d * z * prev.q,
            dq: rho * cur.q + lin * cur.dq - four_d * (prev.q + z * prev.dq),
        };
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `2^{2n-1} d_1 ... d_n`, the coefficient of the determinant monomial.
pub fn determinant_constant(input: &RecurrenceInput, n: usize) -> f64 {
    (1..=n).fold(0.5, |acc, k| acc * 4.0 * input.d(k))
}

/// Largest coefficient deviation of `U_n = Q_n R_{n-1} - Q_{n-1} R_n` from the
/// monomial `2^{2n-1} d_1...d_n z^{n-1}`, relative to that monomial.
pub fn determinant_residual(tables: &[PolyPair], input: &RecurrenceInput, n: usize) -> f64 {
    let u = determinant_coeffs(&tables[n], &tables[n - 1]);
    let expected = determinant_constant(input, n);
    u.iter()
        .enumerate()
        .map(|(j, &c)| {
            let target = if j == n - 1 { expected } else { 0.0 };
            (c - target).norm() / expected
        })
        .fold(0.0, f64::max)
}

fn determinant_coeffs(cur: &PolyPair, prev: &PolyPair) -> Vec<C64> {
    let n = cur.degree;
    let mut u = vec![ZERO; 2 * n];
    for (i, &q) in cur.q.iter().enumerate() {
        for (j, &r) in prev.r.iter().enumerate() {
            u[i + j] += q * r;
        }
    }
    for (i, &q) in prev.q.iter().enumerate() {
        for (j, &r) in cur.r.iter().enumerate() {
            u[i + j] -= q * r;
        }
    }
    u
}

/// Relative tolerance for [`determinant_u`].
pub const DETERMINANT_TOL: f64 = 1e-10;

/// Coefficients of `U_n`, verified against the monomial form.
pub fn determinant_u(input: &RecurrenceInput, n: usize) -> Result<Vec<C64>> {
    if n == 0 {
        return Err(Error::InvalidInput("U_n needs n >= 1".into()));
    }
    let tables = poly_tables(input, n)?;
    let residual = determinant_residual(&tables, input, n);
    if !(residual <= DETERMINANT_TOL) {
        return Err(Error::IdentityViolation {
            what: format!("determinant formula at n = {n}"),
            residual,
        });
    }
    Ok(determinant_coeffs(&tables[n], &tables[n - 1]))
}

/// Relative tolerance of the `γ` cross-identity.
pub const GAMMA_TOL: f64 = 1e-12;

/// `γ_0..γ_{n_max}` from `γ_0 = 2 d_1 / (1 + i c_1)`,
/// `γ_n = 4 d_{n+1} / (1 + i c_{n+1}) γ_{n-1}`, checked against
/// `γ_{n-1} = 2^{2n-1} d_1...d_n / r_{n,n}`.
pub fn gamma_sequence(input: &RecurrenceInput, n_max: usize) -> Result<Vec<C64>> {
    input.require(n_max + 1, "the gamma sequence")?;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut g = 2.0 * input.d(1) / input.rho(1);
    out.push(g);
    for n in 1..=n_max {
        g *= 4.0 * input.d(n + 1) / input.rho(n + 1);
        out.push(g);
    }
    let mut lead = ONE;
    for n in 1..=n_max + 1 {
        lead *= input.rho(n);
        let direct = determinant_constant(input, n) / lead;
        let residual = (out[n - 1] - direct).norm() / direct.norm();
        if !(residual <= GAMMA_TOL) {
            return Err(Error::IdentityViolation {
                what: format!("gamma cross-identity at n = {}", n - 1),
                residual,
            });
        }
    }
    Ok(out)
}

/// Reconstructs `c_1..c_{K+1}` and `d_1..d_{K+1}` from `γ_0..γ_K`.
pub fn recover_sequences(gamma: &[C64]) -> Result<RecurrenceInput> {
    let Some(&g0) = gamma.first() else {
        return Err(Error::InvalidInput("empty gamma sequence".into()));
    };
    let inv0 = g0.inv();
    let d1 = 1.0 / (inv0 + inv0.conj()).re;
    let mut c = vec![(inv0 - inv0.conj()).im * d1];
    let mut d = vec![d1];
    for w in gamma.windows(2) {
        let ratio = w[0] / w[1];
        let dn = 1.0 / (2.0 * (ratio + ratio.conj()).re);
        c.push((ratio - ratio.conj()).im * 2.0 * dn);
        d.push(dn);
    }
    RecurrenceInput::new(c, d)
}
