//! Moments of the induced measure and its discrete approximants.
//!
//! Moment convention: `∫ ζ^k dμ = μ_{-k}`. The `ν_k` are the values of the
//! auxiliary functional on `ζ^{-k}` and come from the expansion of
//! `Q_M / R_M` at the origin: `ν_{k+1} = -[z^k](Q_M / R_M)` for `k < M - 1`.

use serde::{Deserialize, Serialize};

use crate::chain::minimal_parameters;
use crate::error::{Error, Result};
use crate::input::{ChainSource, RecurrenceInput};
use crate::recurrence::{eval_r_q, gamma_sequence, poly_tables};
use crate::zeros::{eval_g, zeros, ZeroSet, DEFAULT_TOL};
use crate::C64;

/// Residual bound for the series division.
pub const DIVISION_TOL: f64 = 1e-9;
/// Bound for the internal moment relations.
pub const RELATION_TOL: f64 = 1e-12;
/// Bound for the weight normalization.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Relative bound for the `γ̂` recursion.
pub const HAT_GAMMA_TOL: f64 = 1e-10;
/// Relative agreement between the residue and Wronskian forms of the weights.
pub const WEIGHT_CROSS_TOL: f64 = 1e-8;

fn slot(k_max: usize, k: i64) -> usize {
    assert!(
        k.unsigned_abs() as usize <= k_max,
        "index {k} outside ±{k_max}"
    );
    (k + k_max as i64) as usize
}

/// `ν_k` for `k ∈ [-K, K]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuTable {
    pub k_max: usize,
    /// Values for `k = -K..=K`.
    pub values: Vec<C64>,
}

impl NuTable {
    pub fn nu(&self, k: i64) -> C64 {
        self.values[slot(self.k_max, k)]
    }
}

/// `ν_k` and `μ_k` for `k ∈ [-K, K]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub k_max: usize,
    /// `ν_{-K}..ν_K`.
    pub nu: Vec<C64>,
    /// `μ_{-K}..μ_K`.
    pub mu: Vec<C64>,
}

impl MomentTable {
    pub fn nu(&self, k: i64) -> C64 {
        self.nu[slot(self.k_max, k)]
    }

    pub fn mu(&self, k: i64) -> C64 {
        self.mu[slot(self.k_max, k)]
    }
}

/// First `len` Taylor coefficients of `num / den` at the origin, with the
/// largest relative residual of `den · quotient - num` over those orders.
fn series_divide(num: &[C64], den: &[C64], len: usize) -> (Vec<C64>, f64) {
    let at = |v: &[C64], i: usize| v.get(i).copied().unwrap_or_default();
    let mut out = Vec::with_capacity(len);
    for k in 0..len {
        let mut acc = at(num, k);
        for j in 1..=k.min(den.len() - 1) {
            acc -= den[j] * out[k - j];
        }
        out.push(acc / den[0]);
    }
    let mut residual = 0.0f64;
    for k in 0..len {
        let mut acc = -at(num, k);
        let mut scale = at(num, k).norm();
        for j in 0..=k.min(den.len() - 1) {
            acc += den[j] * out[k - j];
            scale += (den[j] * out[k - j]).norm();
        }
        if scale > 0.0 {
            residual = residual.max(acc.norm() / scale);
        }
    }
    (out, residual)
}

/// `ν_{-K}..ν_K` from `Q_{K+2} / R_{K+2}`.
pub fn nu_moments(input: &RecurrenceInput, k_max: usize) -> Result<NuTable> {
    nu_moments_with_degree(input, k_max, k_max + 2)
}

/// As [`nu_moments`] with an explicit convergent degree `M >= K + 2`.
pub fn nu_moments_with_degree(
    input: &RecurrenceInput,
    k_max: usize,
    degree: usize,
) -> Result<NuTable> {
    if k_max == 0 {
        return Err(Error::InvalidInput("moment tables need K >= 1".into()));
    }
    if degree < k_max + 2 {
        return Err(Error::InvalidInput(format!(
            "convergent degree {degree} is below K + 2 = {}",
            k_max + 2
        )));
    }
    let tables = poly_tables(input, degree)?;
    let top = &tables[degree];
    let (series, div_residual) = series_divide(&top.q, &top.r, k_max + 1);
    let gamma0 = gamma_sequence(input, 0)?[0];

    // positive side: ν_{k+1} = -series[k]
    let positive: Vec<C64> = series.iter().map(|&s| -s).collect();
    let reflect = (gamma0 + positive[0].conj()).norm() / gamma0.norm();
    let residual = div_residual.max(reflect);
    if !(residual <= DIVISION_TOL) {
        return Err(Error::PrecisionLoss { residual });
    }

    let mut values = vec![C64::default(); 2 * k_max + 1];
    values[slot(k_max, 0)] = gamma0;
    for k in 1..=k_max {
        values[slot(k_max, k as i64)] = positive[k - 1];
        values[slot(k_max, -(k as i64))] = -positive[k].conj();
    }
    Ok(NuTable { k_max, values })
}

/// Fills `μ` from `ν` and checks the symmetry and difference relations.
pub fn mu_moments(table: &NuTable) -> Result<MomentTable> {
    let k_max = table.k_max;
    let kk = k_max as i64;
    let mut mu = vec![C64::default(); 2 * k_max + 1];
    mu[slot(k_max, 0)] = C64::new(1.0, 0.0);
    let mut up = C64::new(1.0, 0.0);
    let mut down = C64::new(1.0, 0.0);
    for n in 1..=kk {
        up += table.nu(n);
        down -= table.nu(1 - n);
        mu[slot(k_max, n)] = up;
        mu[slot(k_max, -n)] = down;
    }
    let out = MomentTable {
        k_max,
        nu: table.values.clone(),
        mu,
    };

    let rel = |a: C64, b: C64| (a - b).norm() / b.norm().max(1.0);
    for j in 1..=kk {
        let r = rel(out.nu(j), -out.nu(1 - j).conj());
        check_relation(r, || format!("ν_{j} = -conj(ν_{})", 1 - j))?;
    }
    for k in 0..=kk {
        let r = rel(out.mu(-k), out.mu(k).conj());
        check_relation(r, || format!("μ_-{k} = conj(μ_{k})"))?;
    }
    for k in 0..kk {
        let r = rel(out.nu(-k), out.mu(-k) - out.mu(-k - 1));
        check_relation(r, || format!("ν_-{k} = μ_-{k} - μ_-{}", k + 1))?;
    }
    Ok(out)
}

fn check_relation(residual: f64, what: impl FnOnce() -> String) -> Result<()> {
    if residual <= RELATION_TOL {
        Ok(())
    } else {
        Err(Error::RelationViolation {
            what: what(),
            residual,
        })
    }
}

/// `ν` and `μ` on `[-K, K]` in one call.
pub fn moment_table(input: &RecurrenceInput, k_max: usize) -> Result<MomentTable> {
    mu_moments(&nu_moments(input, k_max)?)
}

/// The discrete measure `ψ_n`: mass at `z = 1` plus weights at the zeros of `R_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    pub n: usize,
    pub mass_at_one: f64,
    /// Angles in `(0, 2π)`, increasing.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// `∫ ζ^k dψ_n`, to be compared with `μ_{-k}`.
    pub fn moment(&self, k: i64) -> C64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(C64::from(self.mass_at_one), |acc, (&t, &w)| {
                acc + w * C64::from_polar(1.0, k as f64 * t)
            })
    }

    /// The step function `ψ_n(θ)` on `[0, 2π]`, right-continuous.
    pub fn cumulative(&self, theta: f64) -> f64 {
        if theta < 0.0 {
            return 0.0;
        }
        self.mass_at_one
            + self
                .nodes
                .iter()
                .zip(&self.weights)
                .filter(|(&t, _)| t <= theta)
                .map(|(_, &w)| w)
                .sum::<f64>()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass_at_one + self.weights.iter().sum::<f64>()
    }

    /// Largest `|∫ ζ^k dψ_n - μ_{-k}|` over `|k| <= min(n, K)`.
    pub fn moment_residual(&self, table: &MomentTable) -> f64 {
        let kk = self.n.min(table.k_max) as i64;
        (-kk..=kk)
            .map(|k| (self.moment(k) - table.mu(-k)).norm())
            .fold(0.0, f64::max)
    }
}

/// `ψ_n` from the zeros of `R_n`.
pub fn quadrature(input: &RecurrenceInput, n: usize) -> Result<DiscreteMeasure> {
    let zs = zeros(input, n, DEFAULT_TOL)?;
    quadrature_from_zeros(input, &zs)
}

/// `λ_{n,0} = 1 - Q_n(1)/R_n(1)` and `λ_{n,j} = Q_n(z_j) / ((1 - z_j) R_n'(z_j))`,
/// with positivity, normalization and the Wronskian form
/// `λ_{n,j} = d_1...d_n / (W_n(x_j) sin²(θ_j / 2))` checked.
pub fn quadrature_from_zeros(input: &RecurrenceInput, zs: &ZeroSet) -> Result<DiscreteMeasure> {
    let n = zs.n;
    let at_one = eval_r_q(input, n, C64::new(1.0, 0.0))?;
    let mass_at_one = 1.0 - at_one.q.re / at_one.r.re;
    if !(mass_at_one > 0.0) {
        return Err(Error::PositivityViolation {
            what: "mass at z = 1".into(),
            index: 0,
            value: mass_at_one,
        });
    }
    let prod_d: f64 = input.d_values()[..n].iter().product();
    let mut weights = Vec::with_capacity(n);
    for (j, (&z, (&x, &theta))) in zs.z.iter().zip(zs.x.iter().zip(&zs.theta)).enumerate() {
        let v = eval_r_q(input, n, z)?;
        let w = (v.q / ((1.0 - z) * v.dr)).re;
        if !(w > 0.0) {
            return Err(Error::PositivityViolation {
                what: "quadrature weight".into(),
                index: j + 1,
                value: w,
            });
        }
        let (_, dg) = eval_g(input, n, x)?;
        let (gm, _) = eval_g(input, n - 1, x)?;
        let from_wronskian = prod_d / (dg * gm * (theta / 2.0).sin().powi(2));
        let residual = (from_wronskian - w).abs() / w;
        if !(residual <= WEIGHT_CROSS_TOL) {
            return Err(Error::IdentityViolation {
                what: format!("Wronskian form of weight {}", j + 1),
                residual,
            });
        }
        weights.push(w);
    }
    let measure = DiscreteMeasure {
        n,
        mass_at_one,
        nodes: zs.theta.clone(),
        weights,
    };
    let sum = measure.total_mass();
    if !((sum - 1.0).abs() <= NORMALIZATION_TOL) {
        return Err(Error::NormalizationViolation { sum });
    }
    Ok(measure)
}

/// Slack allowed above `1 - M_0` when `M_0` is itself a numerical estimate.
pub const LIMIT_SLACK: f64 = 1e-9;

/// `Q_n(1) / R_n(1)` for `n = 1..=n_max` (element `n - 1`).
///
/// At `z = 1` the recurrence is real and independent of `c`:
/// `R_{n+1}(1) = 2 R_n(1) - 4 d_{n+1} R_{n-1}(1)`. The pair is rescaled
/// whenever it grows large. The sequence must increase; a decrease beyond a
/// few ulps is a [`Error::MonotonicityViolation`], while equal neighbours
/// (saturation at the limit) are tolerated. With `limit = Some(1 - M_0)` every
/// value must stay below it, up to [`LIMIT_SLACK`].
pub fn convergents_at_one<S: ChainSource + ?Sized>(
    src: &S,
    n_max: usize,
    limit: Option<f64>,
) -> Result<Vec<f64>> {
    let d = |k: usize| {
        src.d(k).ok_or_else(|| {
            Error::InvalidInput(format!(
                "{n_max} convergents requested but the source ends at {}",
                k - 1
            ))
        })
    };
    let mut out = Vec::with_capacity(n_max);
    if n_max == 0 {
        return Ok(out);
    }
    let (mut r0, mut r1) = (1.0f64, 2.0f64);
    let (mut q0, mut q1) = (0.0f64, 2.0 * d(1)?);
    out.push(q1 / r1);
    for k in 1..n_max {
        let four_d = 4.0 * d(k + 1)?;
        let r2 = 2.0 * r1 - four_d * r0;
        let q2 = 2.0 * q1 - four_d * q0;
        (r0, r1, q0, q1) = (r1, r2, q1, q2);
        if r1.abs() > 1e150 {
            let s = r1.abs().recip();
            r0 *= s;
            r1 *= s;
            q0 *= s;
            q1 *= s;
        }
        let v = q1 / r1;
        let prev = out[k - 1];
        if !(v >= prev - 8.0 * f64::EPSILON * prev.abs()) {
            return Err(Error::MonotonicityViolation { index: k + 1 });
        }
        out.push(v);
    }
    if let Some(lim) = limit {
        if let Some((i, &v)) = out
            .iter()
            .enumerate()
            .find(|(_, &v)| v >= lim + LIMIT_SLACK)
        {
            return Err(Error::IdentityViolation {
                what: format!("convergent {} exceeds 1 - M_0 = {lim}", i + 1),
                residual: v - lim,
            });
        }
    }
    Ok(out)
}

/// `γ̂_n = Σ_j r_{n,j} μ_{-j}` for `n = 0..=n_max`, checked against
/// `γ̂_n = 2 (1 - m_n) γ̂_{n-1}`.
pub fn hat_gamma_check(
    input: &RecurrenceInput,
    table: &MomentTable,
    n_max: usize,
) -> Result<Vec<C64>> {
    if n_max > table.k_max {
        return Err(Error::InvalidInput(format!(
            "moments up to {n_max} needed, table has {}",
            table.k_max
        )));
    }
    let tables = poly_tables(input, n_max)?;
    let m = minimal_parameters(&input.d_values()[..n_max])?;
    let values: Vec<C64> = tables
        .iter()
        .map(|p| {
            p.r.iter()
                .enumerate()
                .map(|(j, &r)| r * table.mu(-(j as i64)))
                .sum()
        })
        .collect();
    for n in 1..=n_max {
        let predicted = 2.0 * (1.0 - m[n]) * values[n - 1];
        let residual = (values[n] - predicted).norm() / values[n].norm();
        if !(residual <= HAT_GAMMA_TOL) {
            return Err(Error::RecursionViolation { index: n, residual });
        }
    }
    Ok(values)
}
