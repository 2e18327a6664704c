//! Positive chain sequences: minimal, maximal and shifted parameter sequences.
//!
//! A sequence `d_1, d_2, ...` is a positive chain sequence when it admits
//! parameters `g_0 ∈ [0, 1)`, `g_n ∈ (0, 1)` with `d_n = (1 - g_{n-1}) g_n`.
//! The minimal parameters start from `g_0 = 0` and follow by forward
//! recursion. The maximal parameters are the limit of the backward
//! recursion `g_{k-1} = 1 - d_k / g_k` seeded with `g_D = 1` as the depth
//! `D` grows; those approximants decrease monotonically in `D`.

use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::input::ChainSource;

/// Default convergence tolerance for [`maximal_parameters`].
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default depth ceiling for [`maximal_parameters`].
pub const DEFAULT_MAX_DEPTH: usize = 1 << 22;
/// Environment variable overriding [`DEFAULT_MAX_DEPTH`].
pub const MAX_DEPTH_ENV: &str = "OPUC_MAX_DEPTH";

const FIRST_DEPTH: usize = 64;

/// Minimal parameters `m_0 = 0, m_n = d_n / (1 - m_{n-1})` for the prefix `d`.
///
/// Fails with [`Error::ChainViolation`] at the first `n` with `m_n ∉ (0, 1)`;
/// parameters landing exactly on 0 or 1 are rejected as well.
pub fn minimal_parameters(d: &[f64]) -> Result<Vec<f64>> {
    let mut m = Vec::with_capacity(d.len() + 1);
    m.push(0.0);
    let mut prev = 0.0;
    for (i, &dn) in d.iter().enumerate() {
        let next = dn / (1.0 - prev);
        if !(next > 0.0 && next < 1.0) {
            return Err(Error::ChainViolation {
                index: i + 1,
                value: next,
            });
        }
        m.push(next);
        prev = next;
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaximalOptions {
    /// Stop once successive estimates differ by less than this in every component.
    pub tol: f64,
    /// Depth ceiling; exceeding it yields [`Error::NoConvergence`].
    pub max_depth: usize,
}

impl Default for MaximalOptions {
    fn default() -> Self {
        MaximalOptions {
            tol: DEFAULT_TOL,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

impl MaximalOptions {
    /// Defaults, with the ceiling taken from `OPUC_MAX_DEPTH` when it parses.
    pub fn from_env() -> Self {
        let mut opts = MaximalOptions::default();
        if let Some(depth) = std::env::var(MAX_DEPTH_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            opts.max_depth = depth.max(1);
        }
        opts
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Maximal parameters `M_0..M_n` with the depth and accuracy reached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalParams {
    pub values: Vec<f64>,
    pub depth_used: usize,
    /// Largest change between the last two estimates (for a finite source,
    /// the change in `M_0` from dropping the last term).
    pub tol_achieved: f64,
    /// Whether the values come from Δ² extrapolation over the depth sequence
    /// rather than a single raw approximant.
    pub extrapolated: bool,
}

/// Raw approximants `g_0..g_n` from the backward recursion seeded with
/// `g_depth = 1`. These are upper bounds for `M_0..M_n`.
pub fn backward_approximant<S: ChainSource + ?Sized>(
    src: &S,
    depth: usize,
    n: usize,
) -> Result<Vec<f64>> {
    if depth < n {
        return Err(Error::InvalidInput(format!(
            "depth {depth} is below the requested index {n}"
        )));
    }
    let mut out = vec![1.0; n + 1];
    let mut g = Dd::ONE;
    for k in (1..=depth).rev() {
        let dk = src.d(k).ok_or_else(|| {
            Error::InvalidInput(format!("chain source ends before depth {depth} (at {k})"))
        })?;
        g = g.one_minus_ratio(dk);
        let value = g.to_f64();
        if !(value >= 0.0) || (k > 1 && value <= 0.0) {
            return Err(Error::ChainViolation { index: k, value });
        }
        if k - 1 <= n {
            out[k - 1] = value;
        }
    }
    Ok(out)
}

/// Maximal parameters `M_0..M_n`.
///
/// A finite source of length `L` is read as the whole sequence: the depth is
/// `L` and the result is the single approximant seeded at `g_L = 1`.
/// Unbounded sources double the depth from 64. Along the doubling sequence
/// each algebraic error term `D^{-p}` is geometric, so repeated Δ² passes
/// remove them one at a time: one pass once three depths exist, two passes
/// from five depths on. Extrapolated values are kept inside
/// `[m_k, raw approximant]`. The loop stops when two successive estimates of
/// the same kind agree within `opts.tol` in every component.
pub fn maximal_parameters<S: ChainSource + ?Sized>(
    src: &S,
    n: usize,
    opts: &MaximalOptions,
) -> Result<MaximalParams> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let prefix = read_prefix(src, n)?;
    let minimal = minimal_parameters(&prefix)?;

    if let Some(len) = src.available() {
        let values = backward_approximant(src, len, n)?;
        let shallower = if len > n {
            backward_approximant(src, len - 1, n)?[0]
        } else {
            1.0
        };
        return Ok(MaximalParams {
            tol_achieved: (shallower - values[0]).abs(),
            values,
            depth_used: len,
            extrapolated: false,
        });
    }

    let mut depth = FIRST_DEPTH.max((n + 1).next_power_of_two());
    let mut raws: Vec<Vec<f64>> = Vec::new();
    let mut previous: Option<(usize, Vec<f64>)> = None;
    let mut best_change = f64::INFINITY;
    let mut last_depth = depth;

    while depth <= opts.max_depth {
        raws.push(backward_approximant(src, depth, n)?);
        if raws.len() > EXTRAPOLATION_WINDOW {
            raws.remove(0);
        }
        last_depth = depth;
        let passes = match raws.len() {
            0..=2 => 0,
            3 | 4 => 1,
            _ => 2,
        };
        let raw = raws.last().expect("just pushed");
        let estimate: Vec<f64> = (0..=n)
            .map(|k| {
                let column: Vec<f64> = raws.iter().map(|r| r[k]).collect();
                repeated_aitken(&column, passes).clamp(minimal[k], raw[k])
            })
            .collect();
        if let Some((prev_passes, prev)) = &previous {
            if *prev_passes == passes {
                let change = prev
                    .iter()
                    .zip(&estimate)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                best_change = best_change.min(change);
                if change < opts.tol {
                    return Ok(MaximalParams {
                        values: estimate,
                        depth_used: depth,
                        tol_achieved: change,
                        extrapolated: passes > 0,
                    });
                }
            }
        }
        previous = Some((passes, estimate));
        depth *= 2;
    }
    Err(Error::NoConvergence {
        depth: last_depth,
        achieved: best_change,
    })
}

const EXTRAPOLATION_WINDOW: usize = 5;

fn aitken(a0: f64, a1: f64, a2: f64) -> f64 {
    let d1 = a1 - a0;
    let d2 = a2 - a1;
    let den = d2 - d1;
    if den == 0.0 || !den.is_finite() || d2 == 0.0 {
        return a2;
    }
    a2 - d2 * d2 / den
}

// Newest element after `passes` rounds of Δ² over the whole column.
fn repeated_aitken(column: &[f64], passes: usize) -> f64 {
    let mut seq = column.to_vec();
    for _ in 0..passes {
        if seq.len() < 3 {
            break;
        }
        seq = seq.windows(3).map(|w| aitken(w[0], w[1], w[2])).collect();
    }
    *seq.last().expect("nonempty column")
}

fn read_prefix<S: ChainSource + ?Sized>(src: &S, n: usize) -> Result<Vec<f64>> {
    (1..=n)
        .map(|k| {
            src.d(k).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "{n} parameters requested but the source ends at {}",
                    k - 1
                ))
            })
        })
        .collect()
}

/// `m̂_n = 1 - R_{n+1}(1) / (2 R_n(1))` from the values `R_0(1), R_1(1), ...`.
///
/// The result is the minimal parameter sequence of the shifted chain
/// sequence `d_{n+1}`; one fewer term than the input.
pub fn shifted_minimal_from_r(r_at_one: &[f64]) -> Result<Vec<f64>> {
    if let Some(i) = r_at_one.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::Domain(format!(
            "R_{i}(1) = {} is not positive",
            r_at_one[i]
        )));
    }
    Ok(r_at_one
        .windows(2)
        .map(|w| 1.0 - w[1] / (2.0 * w[0]))
        .collect())
}

/// Minimal, maximal and shifted-minimal parameter tables for `d_1..d_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    /// `m_0..m_N`.
    pub m: Vec<f64>,
    /// `M_0..M_N`.
    #[serde(rename = "M")]
    pub big_m: Vec<f64>,
    /// `m̂_0..m̂_{N-1}`, minimal parameters of `d_{n+1}`.
    pub m_hat: Vec<f64>,
    pub depth_used: usize,
    pub tol_achieved: f64,
}

impl ChainParams {
    pub fn compute<S: ChainSource + ?Sized>(
        src: &S,
        n: usize,
        opts: &MaximalOptions,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("at least one term is needed".into()));
        }
        let prefix = read_prefix(src, n)?;
        let m = minimal_parameters(&prefix)?;
        let maximal = maximal_parameters(src, n, opts)?;
        let m_hat = minimal_parameters(&prefix[1..])?;
        Ok(ChainParams {
            m,
            big_m: maximal.values,
            m_hat,
            depth_used: maximal.depth_used,
            tol_achieved: maximal.tol_achieved,
        })
    }

    /// Largest relative residual of `d_n = (1 - g_{n-1}) g_n` over both the
    /// minimal and the maximal parameters.
    pub fn reconstruction_residual(&self, d: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (i, &dn) in d.iter().enumerate().take(self.m.len() - 1) {
            let from_m = (1.0 - self.m[i]) * self.m[i + 1];
            let from_big = (1.0 - self.big_m[i]) * self.big_m[i + 1];
            worst = worst
                .max(((from_m - dn) / dn).abs())
                .max(((from_big - dn) / dn).abs());
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn minimal_constant_quarter() {
        let m = minimal_parameters(&[0.25; 4]).unwrap();
        assert!(close(&m, &[0.0, 0.25, 1.0 / 3.0, 0.375, 0.4], 1e-15));
    }

    #[test]
    fn minimal_rejects_half_half() {
        let err = minimal_parameters(&[0.5, 0.5]).unwrap_err();
        assert!(matches!(err, Error::ChainViolation { index: 2, value } if value == 1.0));
    }

    #[test]
    fn minimal_rejects_exact_zero() {
        assert!(matches!(
            minimal_parameters(&[0.0]),
            Err(Error::ChainViolation { index: 1, .. })
        ));
    }

    #[test]
    fn single_term_prefix_takes_one_backward_step() {
        let d = [0.3];
        let p = maximal_parameters(&d[..], 1, &MaximalOptions::default()).unwrap();
        assert_eq!(p.values[0], 1.0 - 0.3);
        assert_eq!(p.values[1], 1.0);
        assert_eq!(p.depth_used, 1);
    }

    #[test]
    fn backward_approximants_decrease_with_depth() {
        let d: Vec<f64> = vec![0.25; 4096];
        let mut prev = backward_approximant(&d, 8, 3).unwrap();
        for depth in [16usize, 32, 64, 1024, 4096] {
            let next = backward_approximant(&d, depth, 3).unwrap();
            for k in 0..=3 {
                assert!(next[k] <= prev[k]);
                assert!(next[k] >= 0.5);
            }
            prev = next;
        }
    }

    #[test]
    fn backward_approximant_constant_quarter_closed_form() {
        // g_0 at depth D is (D + 2) / (2D + 2) for d ≡ 1/4.
        let d = vec![0.25; 1000];
        for depth in [1usize, 2, 10, 1000] {
            let g = backward_approximant(&d, depth, 0).unwrap();
            let exact = (depth as f64 + 2.0) / (2.0 * depth as f64 + 2.0);
            assert!((g[0] - exact).abs() < 1e-15, "depth {depth}");
        }
    }

    #[test]
    fn constant_quarter_maximal_is_half() {
        let src = crate::input::Family::constant(0.25, 0.0).unwrap();
        let opts = MaximalOptions::default().with_tol(1e-9);
        let p = maximal_parameters(&src, 5, &opts).unwrap();
        for v in &p.values {
            assert!((v - 0.5).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn geometric_case_converges_raw() {
        // d ≡ 0.2: parameters 1/2 ± sqrt(1/20), maximal is the larger root.
        let src = crate::input::Family::constant(0.2, 0.0).unwrap();
        let p = maximal_parameters(&src, 3, &MaximalOptions::default()).unwrap();
        let root = 0.5 + (0.25f64 - 0.2).sqrt();
        assert!(!p.extrapolated);
        for v in &p.values {
            assert!((v - root).abs() < 1e-12);
        }
    }

    #[test]
    fn ceiling_is_reported() {
        let src = crate::input::Family::constant(0.25, 0.0).unwrap();
        let opts = MaximalOptions {
            tol: 1e-15,
            max_depth: 256,
        };
        assert!(matches!(
            maximal_parameters(&src, 2, &opts),
            Err(Error::NoConvergence { depth: 256, .. })
        ));
    }

    #[test]
    fn shifted_from_r_values() {
        let mh = shifted_minimal_from_r(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(close(&mh, &[0.0, 0.25, 1.0 / 3.0], 1e-15));
        // strictly below m_{n+1} = (.., 1/3, 3/8)
        assert!(mh[1] < 1.0 / 3.0);
        assert!(matches!(
            shifted_minimal_from_r(&[1.0, 0.0]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn shifted_sequence_satisfies_its_own_recursion() {
        let d = [0.25; 6];
        let mh = shifted_minimal_from_r(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        for n in 1..mh.len() {
            let expect = d[n] / (1.0 - mh[n - 1]);
            assert!((mh[n] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn chain_params_tables() {
        let d = vec![0.25; 8];
        let p = ChainParams::compute(&d, 8, &MaximalOptions::default()).unwrap();
        assert_eq!(p.m.len(), 9);
        assert_eq!(p.big_m.len(), 9);
        assert_eq!(p.m_hat.len(), 8);
        assert!(p.reconstruction_residual(&d) < 1e-12);
        for n in 1..8 {
            assert!(p.m_hat[n] < p.m[n + 1]);
            assert!(p.m[n] <= p.big_m[n]);
        }
    }
}
