//! The acceptance criteria as executable checks.
//!
//! Each criterion returns a [`CriterionResult`] holding every sub-check as a
//! measured value against its tolerance. The CLI prints these as a table and
//! the acceptance tests assert on them.

use std::fmt;
use std::time::Instant;

use serde::Serialize;

use crate::chain::{maximal_parameters, MaximalOptions};
use crate::error::Result;
use crate::hypergeometric::{example_maximal, example_mu, example_nu, ExampleParams};
use crate::input::{Family, RecurrenceInput};
use crate::measure::{convergents_at_one, hat_gamma_check, moment_table, quadrature_from_zeros};
use crate::recurrence::{determinant_residual, eval_r_q, poly_tables};
use crate::szego::{gram_matrix, szego_recurrence_residual, SzegoFamily};
use crate::zeros::{interlacing_margin, zero_levels, DEFAULT_TOL};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        })
    }
}

/// One measured quantity. `upper` bounds are met when `value <= bound`,
/// lower bounds when `value > bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub upper: bool,
}

impl Measurement {
    pub fn holds(&self) -> bool {
        if self.upper {
            self.value <= self.bound
        } else {
            self.value > self.bound
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub status: Status,
    pub measurements: Vec<Measurement>,
    /// Errors raised by the pipeline while running the check.
    pub errors: Vec<String>,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// One line: id, status, title, then every measurement.
    pub fn line(&self) -> String {
        let mut s = format!("C{:<2} {} {}", self.id, self.status, self.title);
        for m in &self.measurements {
            let op = match (m.upper, m.holds()) {
                (true, true) => "<=",
                (true, false) => ">",
                (false, true) => ">",
                (false, false) => "<=",
            };
            s += &format!(" | {} {:.3e} {op} {:.1e}", m.name, m.value, m.bound);
        }
        for e in &self.errors {
            s += &format!(" | error: {e}");
        }
        s
    }
}

struct Tally {
    id: u8,
    title: &'static str,
    measurements: Vec<Measurement>,
    errors: Vec<String>,
    started: Instant,
    skipped: bool,
}

impl Tally {
    fn new(id: u8, title: &'static str) -> Self {
        Tally {
            id,
            title,
            measurements: Vec::new(),
            errors: Vec::new(),
            started: Instant::now(),
            skipped: false,
        }
    }

    fn entry(&mut self, name: &str, bound: f64, upper: bool) -> &mut Measurement {
        if let Some(i) = self.measurements.iter().position(|m| m.name == name) {
            return &mut self.measurements[i];
        }
        self.measurements.push(Measurement {
            name: name.to_string(),
            value: if upper { 0.0 } else { f64::INFINITY },
            bound,
            upper,
        });
        self.measurements.last_mut().expect("just pushed")
    }

    /// Keeps the worst (largest) value seen under `name`.
    fn at_most(&mut self, name: &str, value: f64, bound: f64) {
        let m = self.entry(name, bound, true);
        if value.is_nan() || value > m.value {
            m.value = value;
        }
    }

    /// Keeps the worst (smallest) value seen under `name`.
    fn above(&mut self, name: &str, value: f64, bound: f64) {
        let m = self.entry(name, bound, false);
        if value.is_nan() || value < m.value {
            m.value = value;
        }
    }

    fn guard<T>(&mut self, context: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.errors.push(format!("{context}: {e}"));
                None
            }
        }
    }

    fn skip(mut self, why: &str) -> CriterionResult {
        self.skipped = true;
        self.errors.push(why.to_string());
        self.finish(None)
    }

    fn finish(mut self, budget: Option<f64>) -> CriterionResult {
        let seconds = self.started.elapsed().as_secs_f64();
        if let Some(b) = budget {
            self.at_most("runtime s", seconds, b);
        }
        let status = if self.skipped {
            Status::Skip
        } else if self.errors.is_empty() && self.measurements.iter().all(Measurement::holds) {
            Status::Pass
        } else {
            Status::Fail
        };
        CriterionResult {
            id: self.id,
            title: self.title,
            status,
            measurements: self.measurements,
            errors: self.errors,
            seconds,
        }
    }
}

/// The `(λ, η, t)` grid used for the example family.
pub fn example_grid() -> Vec<ExampleParams> {
    let mut out = Vec::new();
    for lambda in [-0.25, 0.0, 0.5, 1.0] {
        for eta in [-1.0, 0.0, 1.0] {
            for t in [0.0, 0.3, 0.7] {
                out.push(ExampleParams::new(lambda, eta, t).expect("grid values are valid"));
            }
        }
    }
    out
}

/// The example grid plus the constant family `d ≡ 1/4, c ≡ 0`.
pub fn default_families() -> Vec<Family> {
    let mut out: Vec<Family> = example_grid().into_iter().map(Family::Example).collect();
    out.push(Family::constant(0.25, 0.0).expect("valid constant family"));
    out
}

pub fn family_label(f: &Family) -> String {
    match f {
        Family::Constant { d, c } => format!("constant(d={d}, c={c})"),
        Family::Example(p) => format!("example(λ={}, η={}, t={})", p.lambda, p.eta, p.t),
        Family::Explicit(input) => format!("file(N={})", input.len()),
    }
}

// First min(n, available) terms; a file input shorter than n is used whole.
fn prefix(f: &Family, n: usize) -> Result<RecurrenceInput> {
    match f {
        Family::Explicit(input) => input.truncate(n.min(input.len())),
        _ => f.input(n),
    }
}

fn examples(families: &[Family]) -> Vec<ExampleParams> {
    families
        .iter()
        .filter_map(|f| match f {
            Family::Example(p) => Some(*p),
            _ => None,
        })
        .collect()
}

/// Maximal parameters against the closed form, `n <= 50`, within 1 s.
pub fn chain_parameters(families: &[Family]) -> CriterionResult {
    const TOL: f64 = 1e-9;
    let mut tally = Tally::new(1, "maximal parameters vs closed form");
    let grid = examples(families);
    if grid.is_empty() {
        return tally.skip("no example family given");
    }
    let opts = MaximalOptions::from_env().with_tol(TOL);
    // η does not enter d_n, so parameters sharing (λ, t) share one computation.
    let mut done: Vec<(f64, f64, Vec<f64>)> = Vec::new();
    for p in &grid {
        let values = match done.iter().find(|(l, t, _)| *l == p.lambda && *t == p.t) {
            Some((_, _, v)) => v.clone(),
            None => {
                let label = family_label(&Family::Example(*p));
                let Some(m) =
                    tally.guard(&label, maximal_parameters(&Family::Example(*p), 50, &opts))
                else {
                    continue;
                };
                done.push((p.lambda, p.t, m.values.clone()));
                m.values
            }
        };
        let exact = example_maximal(p, 50);
        let err = values
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        tally.at_most("max|M - closed form|", err, TOL);
    }
    tally.finish(Some(1.0))
}

/// Zeros on the circle and strict interlacing for `n <= 50`, within 5 s.
pub fn zero_interlacing(families: &[Family]) -> CriterionResult {
    let mut tally = Tally::new(2, "zeros on |z| = 1, interlacing");
    for f in families {
        let label = family_label(f);
        let Some(input) = tally.guard(&label, prefix(f, 50)) else {
            continue;
        };
        let Some(levels) = tally.guard(&label, zero_levels(&input, input.len(), DEFAULT_TOL))
        else {
            continue;
        };
        for lv in &levels {
            for z in &lv.z {
                tally.at_most("max||z| - 1|", (z.norm() - 1.0).abs(), 1e-12);
            }
        }
        for w in levels.windows(2) {
            if let Some(m) = tally.guard(&label, interlacing_margin(&w[0], &w[1])) {
                tally.above("min interlacing gap", m, 1e-10);
            }
        }
    }
    tally.finish(Some(5.0))
}

/// `U_{n+1} = 2^{2n+1} d_1...d_{n+1} z^n` coefficientwise, `n <= 30`.
pub fn determinant_formula(families: &[Family]) -> CriterionResult {
    let mut tally = Tally::new(3, "determinant formula");
    for f in families {
        let label = family_label(f);
        let Some(input) = tally.guard(&label, prefix(f, 31)) else {
            continue;
        };
        let Some(tables) = tally.guard(&label, poly_tables(&input, input.len())) else {
            continue;
        };
        for n in 1..=input.len() {
            tally.at_most(
                "max relative residual",
                determinant_residual(&tables, &input, n),
                1e-10,
            );
        }
    }
    tally.finish(None)
}

/// Convergents at `z = 1` for `d ≡ 1/4` up to `n = 10^4`: strictly increasing
/// and within 1e-6 of `1 - M_0 = 1/2`, within 1 s.
pub fn convergents_limit() -> CriterionResult {
    const N: usize = 10_000;
    let mut tally = Tally::new(4, "convergents at z = 1 approach 1 - M_0");
    let family = Family::constant(0.25, 0.0).expect("valid");
    let opts = MaximalOptions::from_env().with_tol(1e-9);
    let Some(m) = tally.guard("M_0", maximal_parameters(&family, 0, &opts)) else {
        return tally.finish(Some(1.0));
    };
    let limit = 1.0 - m.values[0];
    if let Some(v) = tally.guard("convergents", convergents_at_one(&family, N, Some(limit))) {
        let non_increasing = v.windows(2).filter(|w| !(w[1] > w[0])).count();
        tally.at_most("non-increasing steps", non_increasing as f64, 0.0);
        tally.at_most(
            "|Q_n(1)/R_n(1) - (1 - M_0)| at n = 10^4",
            (limit - v[N - 1]).abs(),
            1e-6,
        );
    }
    tally.finish(Some(1.0))
}

/// `ν` and `μ` against the closed forms for `|n| <= 40`; internal relations.
pub fn moment_tables(families: &[Family]) -> CriterionResult {
    const K: usize = 40;
    let mut tally = Tally::new(5, "moment tables vs closed form");
    let grid = examples(families);
    if grid.is_empty() {
        return tally.skip("no example family given");
    }
    for p in &grid {
        let label = family_label(&Family::Example(*p));
        let Some(input) = tally.guard(&label, p.sequences(K + 2)) else {
            continue;
        };
        let Some(table) = tally.guard(&label, moment_table(&input, K)) else {
            continue;
        };
        let rel = |a: C64, b: C64| (a - b).norm() / b.norm().max(1.0);
        for k in -(K as i64)..=(K as i64) {
            if let Some(nu) = tally.guard(&label, example_nu(p, k)) {
                tally.at_most("max|ν - closed form|", rel(table.nu(k), nu), 1e-10);
            }
            if let Some(mu) = tally.guard(&label, example_mu(p, k)) {
                tally.at_most("max|μ - closed form|", rel(table.mu(k), mu), 1e-10);
            }
        }
        for j in 1..=(K as i64) {
            tally.at_most("symmetry", rel(table.nu(j), -table.nu(1 - j).conj()), 1e-12);
            tally.at_most("symmetry", rel(table.mu(-j), table.mu(j).conj()), 1e-12);
        }
        for k in 0..(K as i64) {
            tally.at_most(
                "difference relation",
                rel(table.nu(-k), table.mu(-k) - table.mu(-k - 1)),
                1e-12,
            );
        }
        for n in 1..=(K as i64) {
            let partial: C64 = (1..=n).map(|j| table.nu(j)).sum();
            tally.at_most(
                "partial-sum relation",
                rel(table.mu(n), partial + 1.0),
                1e-12,
            );
        }
    }
    tally.finish(None)
}

/// Quadrature weights, normalization, moment exactness for `n <= 40`, and
/// the mass at one decreasing toward `M_0`.
pub fn quadrature_rules(families: &[Family]) -> CriterionResult {
    const N: usize = 40;
    let mut tally = Tally::new(6, "quadrature weights and moments");
    let opts = MaximalOptions::from_env().with_tol(1e-9);
    for f in families {
        let label = family_label(f);
        let Some(input) = tally.guard(&label, prefix(f, N + 2)) else {
            continue;
        };
        let n_max = N.min(input.len().saturating_sub(2));
        if n_max == 0 {
            tally
                .errors
                .push(format!("{label}: too short for moment checks"));
            continue;
        }
        let m0 = match f {
            Family::Example(p) => p.t,
            _ => match tally.guard(&label, maximal_parameters(f, 0, &opts)) {
                Some(m) => m.values[0],
                None => continue,
            },
        };
        let Some(table) = tally.guard(&label, moment_table(&input, n_max)) else {
            continue;
        };
        let Some(levels) = tally.guard(&label, zero_levels(&input, n_max, DEFAULT_TOL)) else {
            continue;
        };
        let mut prev_mass = f64::INFINITY;
        for zs in &levels {
            let Some(q) = tally.guard(&label, quadrature_from_zeros(&input, zs)) else {
                break;
            };
            let min_w = q.weights.iter().copied().fold(q.mass_at_one, f64::min);
            tally.above("min weight", min_w, 0.0);
            tally.at_most("|Σλ - 1|", (q.total_mass() - 1.0).abs(), 1e-12);
            tally.at_most("max moment residual", q.moment_residual(&table), 1e-9);
            tally.above("mass-at-one decrease", prev_mass - q.mass_at_one, 0.0);
            tally.above(
                "mass-at-one above M_0 (1e-9 slack)",
                q.mass_at_one - m0 + 1e-9,
                0.0,
            );
            prev_mass = q.mass_at_one;
        }
    }
    tally.finish(None)
}

/// `γ̂_n = 2 (1 - m_n) γ̂_{n-1}` for `n <= 40`.
pub fn hat_gamma_recursion(families: &[Family]) -> CriterionResult {
    const N: usize = 40;
    let mut tally = Tally::new(7, "integrals of R_n recursion");
    for f in families {
        let label = family_label(f);
        let Some(input) = tally.guard(&label, prefix(f, N + 2)) else {
            continue;
        };
        let n_max = N.min(input.len().saturating_sub(2));
        let Some(table) = tally.guard(&label, moment_table(&input, n_max)) else {
            continue;
        };
        let Some(values) = tally.guard(&label, hat_gamma_check(&input, &table, n_max)) else {
            continue;
        };
        let m = crate::chain::minimal_parameters(input.d_values()).expect("validated input");
        for n in 1..values.len() {
            let predicted = 2.0 * (1.0 - m[n]) * values[n - 1];
            tally.at_most(
                "max relative residual",
                (values[n] - predicted).norm() / values[n].norm(),
                1e-10,
            );
        }
    }
    tally.finish(None)
}

/// Orthogonality, both Szegő recurrences, two routes to `α`, `|α| < 1`.
pub fn szego_structure(families: &[Family]) -> CriterionResult {
    const N: usize = 30;
    let mut tally = Tally::new(8, "OPUC orthogonality and Szegő recurrences");
    for f in families {
        let label = family_label(f);
        let Some(input) = tally.guard(&label, prefix(f, N + 2)) else {
            continue;
        };
        let n_max = N.min(input.len().saturating_sub(2));
        let m = crate::chain::minimal_parameters(input.d_values()).expect("validated input");
        let Some(fam) = tally.guard(&label, SzegoFamily::build(&input, &m, n_max)) else {
            continue;
        };
        for (i, a) in fam.alpha.iter().enumerate() {
            tally.at_most(
                "α route difference",
                (*a + fam.s[i + 1][0].conj()).norm(),
                1e-10,
            );
            tally.above("1 - max|α|", 1.0 - a.norm(), 0.0);
        }
        for n in 1..=n_max {
            if let Some((first, second)) = tally.guard(&label, szego_recurrence_residual(&fam, n)) {
                tally.at_most("Szegő form 1", first, 1e-11);
                tally.at_most("Szegő form 2", second, 1e-11);
            }
        }
        let Some(table) = tally.guard(&label, moment_table(&input, n_max)) else {
            continue;
        };
        let Some(g) = tally.guard(&label, gram_matrix(&fam, &table, n_max)) else {
            continue;
        };
        for a in 0..=n_max {
            for b in 0..=n_max {
                if a != b {
                    let r = g[a][b].norm() / (g[a][a].re * g[b][b].re).sqrt();
                    tally.at_most("Gram off-diagonal", r, 1e-9);
                }
            }
        }
    }
    tally.finish(None)
}

/// `λ = η = t = 0`: `α_n = 0` and `S_n = z^n` for `n <= 30`.
pub fn lebesgue_case() -> CriterionResult {
    const N: usize = 30;
    let mut tally = Tally::new(9, "Lebesgue case");
    let p = ExampleParams::new(0.0, 0.0, 0.0).expect("valid");
    let Some(input) = tally.guard("input", p.sequences(N)) else {
        return tally.finish(None);
    };
    let m = crate::chain::minimal_parameters(input.d_values()).expect("validated input");
    if let Some(fam) = tally.guard("OPUC", SzegoFamily::build(&input, &m, N)) {
        for a in &fam.alpha {
            tally.at_most("max|α|", a.norm(), 1e-12);
        }
        for (n, s) in fam.s.iter().enumerate() {
            for (j, c) in s.iter().enumerate() {
                let target = if j == n { 1.0 } else { 0.0 };
                tally.at_most("max|S_n - z^n|", (c - target).norm(), 1e-12);
            }
        }
    }
    tally.finish(None)
}

/// `λ = η = 0, t = 1/2`: `α_{n-1} = 1/(n+1)` and the mass at one near 1/2
/// at `n = 1000` by pointwise evaluation.
pub fn mass_point_case() -> CriterionResult {
    let mut tally = Tally::new(10, "mass-point case");
    let p = ExampleParams::new(0.0, 0.0, 0.5).expect("valid");
    let n_alpha = crate::recurrence::COEFF_DEGREE_LIMIT;
    if let Some(input) = tally.guard("input", p.sequences(n_alpha)) {
        let m = crate::chain::minimal_parameters(input.d_values()).expect("validated input");
        if let Some(alpha) = tally.guard("α", crate::szego::verblunsky(&input, &m, n_alpha)) {
            for (i, a) in alpha.iter().enumerate() {
                let n = (i + 1) as f64;
                tally.at_most(
                    "max|α_{n-1} - 1/(n+1)|",
                    (a - 1.0 / (n + 1.0)).norm(),
                    1e-11,
                );
            }
        }
    }
    if let Some(input) = tally.guard("input", p.sequences(1000)) {
        if let Some(v) = tally.guard("R, Q at 1", eval_r_q(&input, 1000, C64::new(1.0, 0.0))) {
            let mass = 1.0 - v.q.re / v.r.re;
            tally.at_most("|λ_{1000,0} - 1/2|", (mass - 0.5).abs(), 1e-3);
        }
    }
    tally.finish(None)
}

/// Every criterion in order. Family-dependent criteria use `families`;
/// criteria tied to a specific family use their own.
pub fn run_suite(families: &[Family]) -> Vec<CriterionResult> {
    vec![
        chain_parameters(families),
        zero_interlacing(families),
        determinant_formula(families),
        convergents_limit(),
        moment_tables(families),
        quadrature_rules(families),
        hat_gamma_recursion(families),
        szego_structure(families),
        lebesgue_case(),
        mass_point_case(),
    ]
}

/// The suite rendered one line per criterion, in order.
pub fn render_table(results: &[CriterionResult]) -> String {
    let mut out = String::new();
    for r in results {
        out += &r.line();
        out += &format!(" ({:.2} s)\n", r.seconds);
    }
    out
}
