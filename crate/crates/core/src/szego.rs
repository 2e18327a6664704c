//! Monic orthogonal polynomials on the unit circle and their Verblunsky
//! coefficients, built from `R_n` and the minimal parameters.
//!
//! `S_n ∏_{k<=n} (1 + i c_k) = R_n - 2 (1 - m_n) R_{n-1}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::input::RecurrenceInput;
use crate::measure::MomentTable;
use crate::recurrence::{poly_tables, reciprocal};
use crate::C64;

/// Agreement required between the two routes to `α`.
pub const ALPHA_ROUTE_TOL: f64 = 1e-10;
/// Relative size allowed for off-diagonal Gram entries.
pub const GRAM_TOL: f64 = 1e-9;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// `S_0..S_N` (ascending coefficients) and `α_0..α_{N-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SzegoFamily {
    pub s: Vec<Vec<C64>>,
    pub alpha: Vec<C64>,
}

impl SzegoFamily {
    /// Builds `S_0..S_{n_max}` and the closed-form `α`, checking the two
    /// routes to `α` against each other.
    pub fn build(input: &RecurrenceInput, m: &[f64], n_max: usize) -> Result<Self> {
        let s = szego_polynomials(input, m, n_max)?;
        let alpha = verblunsky_checked(input, m, &s)?;
        Ok(SzegoFamily { s, alpha })
    }

    pub fn degree(&self) -> usize {
        self.s.len() - 1
    }
}

fn check_minimal(m: &[f64], n_max: usize) -> Result<()> {
    if m.len() <= n_max {
        return Err(Error::InvalidInput(format!(
            "minimal parameters up to index {n_max} needed, {} supplied",
            m.len()
        )));
    }
    Ok(())
}

/// Coefficients of `S_0..S_{n_max}`.
pub fn szego_polynomials(
    input: &RecurrenceInput,
    m: &[f64],
    n_max: usize,
) -> Result<Vec<Vec<C64>>> {
    check_minimal(m, n_max)?;
    let tables = poly_tables(input, n_max)?;
    let mut out = vec![vec![C64::new(1.0, 0.0)]];
    let mut lead = C64::new(1.0, 0.0);
    for n in 1..=n_max {
        lead *= input.rho(n);
        let scale = 2.0 * (1.0 - m[n]);
        let mut s = tables[n].r.clone();
        for (j, &r) in tables[n - 1].r.iter().enumerate() {
            s[j] -= scale * r;
        }
        out.push(s.into_iter().map(|c| c / lead).collect());
    }
    Ok(out)
}

/// `α_{n-1} = (1 - 2 m_n - i c_n) / (1 + i c_n) · ∏_{k<=n} (1 + i c_k) / (1 - i c_k)`
/// for `n = 1..=n_max`. The product is kept as a unit-modulus running phase.
pub fn verblunsky_closed_form(
    input: &RecurrenceInput,
    m: &[f64],
    n_max: usize,
) -> Result<Vec<C64>> {
    check_minimal(m, n_max)?;
    input.require(n_max, "Verblunsky coefficients")?;
    let mut phase = C64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(n_max);
    for (n, &mn) in m.iter().enumerate().take(n_max + 1).skip(1) {
        let rho = input.rho(n);
        let step = rho / rho.conj();
        phase *= step / step.norm();
        out.push(C64::new(1.0 - 2.0 * mn, -input.c(n)) / rho * phase);
    }
    Ok(out)
}

fn verblunsky_checked(input: &RecurrenceInput, m: &[f64], s: &[Vec<C64>]) -> Result<Vec<C64>> {
    let alpha = verblunsky_closed_form(input, m, s.len() - 1)?;
    for (i, a) in alpha.iter().enumerate() {
        let route = -s[i + 1][0].conj();
        let residual = (route - a).norm();
        if !(residual <= ALPHA_ROUTE_TOL) {
            return Err(Error::Mismatch { index: i, residual });
        }
    }
    Ok(alpha)
}

/// `α_0..α_{n_max-1}` from the closed form, cross-checked against `-conj(S_n(0))`.
pub fn verblunsky(input: &RecurrenceInput, m: &[f64], n_max: usize) -> Result<Vec<C64>> {
    let s = szego_polynomials(input, m, n_max)?;
    verblunsky_checked(input, m, &s)
}

/// Largest coefficient residuals of
/// `S_n = z S_{n-1} - conj(α_{n-1}) S*_{n-1}` and
/// `S_n = (1 - |α_{n-1}|²) z S_{n-1} - conj(α_{n-1}) S*_n`, in that order.
pub fn szego_recurrence_residual(family: &SzegoFamily, n: usize) -> Result<(f64, f64)> {
    if n == 0 || n > family.degree() {
        return Err(Error::InvalidInput(format!(
            "degree {n} is not in 1..={}",
            family.degree()
        )));
    }
    let (cur, prev) = (&family.s[n], &family.s[n - 1]);
    let a = family.alpha[n - 1];
    let prev_star = reciprocal(prev, n - 1);
    let cur_star = reciprocal(cur, n);
    let shifted = |j: usize| if j == 0 { ZERO } else { prev[j - 1] };
    let shrink = 1.0 - a.norm_sqr();
    let mut first = 0.0f64;
    let mut second = 0.0f64;
    for j in 0..=n {
        let star = prev_star.get(j).copied().unwrap_or(ZERO);
        first = first.max((cur[j] - (shifted(j) - a.conj() * star)).norm());
        second = second.max((cur[j] - (shrink * shifted(j) - a.conj() * cur_star[j])).norm());
    }
    Ok((first, second))
}

/// Gram matrix `G_{mn} = Σ_{j,k} conj(s_{m,j}) s_{n,k} μ_{j-k}` of `S_0..S_{n_max}`.
///
/// Fails when a diagonal entry is not positive or an off-diagonal entry
/// exceeds [`GRAM_TOL`] relative to `√(G_mm G_nn)`.
pub fn gram_matrix(
    family: &SzegoFamily,
    table: &MomentTable,
    n_max: usize,
) -> Result<Vec<Vec<C64>>> {
    if n_max > family.degree() || n_max > table.k_max {
        return Err(Error::InvalidInput(format!(
            "Gram matrix up to {n_max} needs that many polynomials and moments"
        )));
    }
    let mut g = vec![vec![ZERO; n_max + 1]; n_max + 1];
    for (a, row) in g.iter_mut().enumerate() {
        for (b, entry) in row.iter_mut().enumerate() {
            let mut acc = ZERO;
            for (j, sa) in family.s[a].iter().enumerate() {
                for (k, sb) in family.s[b].iter().enumerate() {
                    acc += sa.conj() * sb * table.mu(j as i64 - k as i64);
                }
            }
            *entry = acc;
        }
    }
    for (i, row) in g.iter().enumerate() {
        let d = row[i];
        if !(d.re > 0.0) || d.im.abs() > GRAM_TOL * d.re {
            return Err(Error::PositivityViolation {
                what: "Gram diagonal".into(),
                index: i,
                value: d.re,
            });
        }
    }
    for a in 0..=n_max {
        for b in 0..=n_max {
            if a == b {
                continue;
            }
            let residual = g[a][b].norm() / (g[a][a].re * g[b][b].re).sqrt();
            if !(residual <= GRAM_TOL) {
                return Err(Error::OrthogonalityViolation {
                    row: a,
                    col: b,
                    residual,
                });
            }
        }
    }
    Ok(g)
}
