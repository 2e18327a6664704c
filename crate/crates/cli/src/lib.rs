//! Argument handling and stage dispatch for the `opuc` binary.

pub mod report;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use opuc_core::verify::{render_table, run_suite, Status};
use opuc_core::{
    measure, minimal_parameters, moment_table, poly_tables, szego_polynomials, verblunsky, zeros,
    ChainParams, ExampleParams, Family, MaximalOptions, RecurrenceInput,
};
use serde_json::{json, Value};

use report::{complexes, ints, reals, Cell, Column, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    /// Constant `c_n = c`, `d_n = d`.
    Constant,
    /// The hypergeometric example family in `λ`, `η`, `t`.
    Example6,
    /// `{"c": [...], "d": [...]}` read from `--file`.
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stage {
    /// Minimal, maximal and shifted-minimal chain parameters.
    Params,
    /// Coefficients of R_n and Q_n for every degree up to n.
    Poly,
    /// Zeros of R_n.
    Zeros,
    /// Quadrature nodes and weights at level n.
    Measure,
    /// ν_k and μ_k for |k| <= K.
    Moments,
    /// Coefficients of the monic OPUC S_0..S_n.
    Opuc,
    /// α_0..α_{n-1}.
    Verblunsky,
    /// The sequences c_1..c_n, d_1..d_n in the file-input format.
    Input,
    /// The acceptance suite on this family.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "opuc",
    version,
    about = "OPUC, quadrature and Verblunsky coefficients from a chain-sequence recurrence",
    after_help = "Environment:\n  OPUC_MAX_DEPTH  ceiling on the backward-recursion depth for maximal parameters\n\n\
                  Exit status: 0 ok, 1 invalid input, 2 numerical failure, 3 I/O failure."
)]
pub struct Args {
    #[arg(long, value_enum, default_value_t = FamilyKind::Example6)]
    pub family: FamilyKind,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    #[arg(long, default_value_t = 0.25)]
    pub d: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub stage: Stage,
    /// Degree or level.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Moment range for the moments stage.
    #[arg(long = "K", default_value_t = 10)]
    pub k: usize,
    /// Tolerance for maximal parameters (params) or zero bracketing (zeros, measure).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Defaults to json, or a plain table for verify.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<opuc_core::Error> for CliError {
    fn from(e: opuc_core::Error) -> Self {
        if e.is_input_error() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

/// Rendered output, and whether a verification criterion failed.
pub struct Output {
    pub text: String,
    pub failed: bool,
}

struct Job {
    family: Family,
    label: Value,
    n: usize,
    k: usize,
    tol: Option<f64>,
}

fn load_family(args: &Args) -> Result<(Family, Value), CliError> {
    match args.family {
        FamilyKind::Constant => Ok((
            Family::constant(args.d, args.c)?,
            json!({"kind": "constant", "d": args.d, "c": args.c}),
        )),
        FamilyKind::Example6 => {
            let p = ExampleParams::new(args.lambda, args.eta, args.t)?;
            Ok((
                Family::Example(p),
                json!({"kind": "example6", "lambda": p.lambda, "eta": p.eta, "t": p.t}),
            ))
        }
        FamilyKind::File => {
            let path = args
                .file
                .as_ref()
                .ok_or_else(|| CliError::Validation("--family file needs --file".into()))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            let input = RecurrenceInput::from_json_str(&text)?;
            let label =
                json!({"kind": "file", "path": path.display().to_string(), "N": input.len()});
            Ok((Family::Explicit(input), label))
        }
    }
}

fn validate(args: &Args) -> Result<(), CliError> {
    if args.n == 0 {
        return Err(CliError::Validation("--n must be at least 1".into()));
    }
    if args.k == 0 {
        return Err(CliError::Validation("--K must be at least 1".into()));
    }
    if let Some(tol) = args.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Validation(format!(
                "--tol must be positive, got {tol}"
            )));
        }
    }
    Ok(())
}

pub fn run(args: &Args) -> Result<Output, CliError> {
    validate(args)?;
    let (family, label) = load_family(args)?;
    let job = Job {
        family,
        label,
        n: args.n,
        k: args.k,
        tol: args.tol,
    };
    if args.stage == Stage::Verify {
        return verify(&job, args.format);
    }
    let report = match args.stage {
        Stage::Params => params(&job)?,
        Stage::Poly => poly(&job)?,
        Stage::Zeros => zero_set(&job)?,
        Stage::Measure => quadrature(&job)?,
        Stage::Moments => moments(&job)?,
        Stage::Opuc => opuc(&job)?,
        Stage::Verblunsky => alpha(&job)?,
        Stage::Input => input(&job)?,
        Stage::Verify => unreachable!("handled above"),
    };
    let text = match args.format.unwrap_or(Format::Json) {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    Ok(Output {
        text,
        failed: false,
    })
}

fn indices(range: std::ops::RangeInclusive<usize>) -> impl Iterator<Item = Cell> {
    ints(range.map(|i| i as i64))
}

fn params(job: &Job) -> Result<Report, CliError> {
    let mut opts = MaximalOptions::from_env();
    if let Some(tol) = job.tol {
        opts = opts.with_tol(tol);
    }
    let p = ChainParams::compute(&job.family, job.n, &opts)?;
    let input = job.family.input(job.n)?;
    let seq = |v: &[f64]| std::iter::once(Cell::Missing).chain(reals(v));
    Ok(Report::new("params", job.label.clone())
        .scalar("depth_used", Cell::Int(p.depth_used as i64))
        .scalar("tol_achieved", Cell::Real(p.tol_achieved))
        .column(Column::new("index", indices(0..=job.n)))
        .column(Column::new("c", seq(input.c_values())))
        .column(Column::new("d", seq(input.d_values())))
        .column(Column::new("m", reals(&p.m)))
        .column(Column::new("M", reals(&p.big_m)))
        .column(Column::new(
            "m_hat",
            reals(&p.m_hat).into_iter().chain([Cell::Missing]),
        )))
}

fn long_table<'a>(polys: impl Iterator<Item = &'a [opuc_core::C64]>) -> (Vec<Cell>, Vec<Cell>) {
    let (mut degree, mut power) = (Vec::new(), Vec::new());
    for (k, p) in polys.enumerate() {
        for j in 0..p.len() {
            degree.push(Cell::Int(k as i64));
            power.push(Cell::Int(j as i64));
        }
    }
    (degree, power)
}

fn poly(job: &Job) -> Result<Report, CliError> {
    let input = job.family.input(job.n)?;
    let tables = poly_tables(&input, job.n)?;
    let (degree, power) = long_table(tables.iter().map(|t| t.r.as_slice()));
    let mut r = Vec::new();
    let mut q = Vec::new();
    for t in &tables {
        for j in 0..t.r.len() {
            r.push(Cell::Complex(t.r[j]));
            q.push(t.q.get(j).map_or(Cell::Missing, |&v| Cell::Complex(v)));
        }
    }
    Ok(Report::new("poly", job.label.clone())
        .column(Column::new("degree", degree))
        .column(Column::new("power", power))
        .column(Column::new("r", r))
        .column(Column::new("q", q)))
}

fn zero_set(job: &Job) -> Result<Report, CliError> {
    let input = job.family.input(job.n)?;
    let zs = zeros::zeros(&input, job.n, job.tol.unwrap_or(zeros::DEFAULT_TOL))?;
    Ok(Report::new("zeros", job.label.clone())
        .scalar("n", Cell::Int(job.n as i64))
        .column(Column::new("j", indices(1..=job.n)))
        .column(Column::new("x", reals(&zs.x)))
        .column(Column::new("theta", reals(&zs.theta)))
        .column(Column::new("z", complexes(&zs.z))))
}

fn quadrature(job: &Job) -> Result<Report, CliError> {
    let input = job.family.input(job.n)?;
    let zs = zeros::zeros(&input, job.n, job.tol.unwrap_or(zeros::DEFAULT_TOL))?;
    let q = measure::quadrature_from_zeros(&input, &zs)?;
    Ok(Report::new("measure", job.label.clone())
        .scalar("n", Cell::Int(job.n as i64))
        .scalar("mass_at_one", Cell::Real(q.mass_at_one))
        .column(Column::new("j", indices(1..=job.n)))
        .column(Column::new("theta", reals(&q.nodes)))
        .column(Column::new("weight", reals(&q.weights))))
}

fn moments(job: &Job) -> Result<Report, CliError> {
    let input = job.family.input(job.k + 2)?;
    let table = moment_table(&input, job.k)?;
    let k = job.k as i64;
    Ok(Report::new("moments", job.label.clone())
        .scalar("K", Cell::Int(k))
        .column(Column::new("k", ints(-k..=k)))
        .column(Column::new("nu", complexes(&table.nu)))
        .column(Column::new("mu", complexes(&table.mu))))
}

fn opuc(job: &Job) -> Result<Report, CliError> {
    let input = job.family.input(job.n)?;
    let m = minimal_parameters(input.d_values())?;
    let s = szego_polynomials(&input, &m, job.n)?;
    let (degree, power) = long_table(s.iter().map(Vec::as_slice));
    Ok(Report::new("opuc", job.label.clone())
        .column(Column::new("degree", degree))
        .column(Column::new("power", power))
        .column(Column::new("s", complexes(&s.concat()))))
}

fn alpha(job: &Job) -> Result<Report, CliError> {
    let input = job.family.input(job.n)?;
    let m = minimal_parameters(input.d_values())?;
    let a = verblunsky(&input, &m, job.n)?;
    Ok(Report::new("verblunsky", job.label.clone())
        .column(Column::new("index", indices(0..=job.n - 1)))
        .column(Column::new("alpha", complexes(&a))))
}

fn input(job: &Job) -> Result<Report, CliError> {
    let input = job.family.input(job.n)?;
    Ok(Report::new("input", job.label.clone())
        .column(Column::new("index", indices(1..=job.n)))
        .column(Column::new("c", reals(input.c_values())))
        .column(Column::new("d", reals(input.d_values()))))
}

fn verify(job: &Job, format: Option<Format>) -> Result<Output, CliError> {
    let results = run_suite(std::slice::from_ref(&job.family));
    let failed = results.iter().any(|r| r.status == Status::Fail);
    let text = match format {
        None => render_table(&results),
        Some(Format::Json) => {
            let mut s = serde_json::to_string_pretty(&json!({
                "stage": "verify",
                "family": job.label,
                "criteria": results,
            }))
            .expect("plain values");
            s.push('\n');
            s
        }
        Some(Format::Csv) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "id",
                "title",
                "status",
                "measurement",
                "value",
                "bound",
                "seconds",
            ])
            .expect("in-memory write");
            for r in &results {
                for m in &r.measurements {
                    w.write_record([
                        r.id.to_string(),
                        r.title.to_string(),
                        r.status.to_string(),
                        m.name.clone(),
                        m.value.to_string(),
                        m.bound.to_string(),
                        r.seconds.to_string(),
                    ])
                    .expect("in-memory write");
                }
                for e in &r.errors {
                    w.write_record([
                        r.id.to_string(),
                        r.title.to_string(),
                        r.status.to_string(),
                        format!("error: {e}"),
                        String::new(),
                        String::new(),
                        r.seconds.to_string(),
                    ])
                    .expect("in-memory write");
                }
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
        }
    };
    Ok(Output { text, failed })
}
