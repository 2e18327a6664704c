//! Input sequences: the validated `(c, d)` prefix and the named families.

use serde::{Deserialize, Serialize};

use crate::chain::minimal_parameters;
use crate::error::{Error, Result};
use crate::hypergeometric::ExampleParams;
use crate::C64;

/// Read access to a chain sequence `d_1, d_2, ...` by 1-based index.
pub trait ChainSource {
    /// `d_n` for `n >= 1`, or `None` past the end of a finite source.
    fn d(&self, n: usize) -> Option<f64>;

    /// Number of available terms, `None` for an unbounded source.
    fn available(&self) -> Option<usize>;
}

impl ChainSource for [f64] {
    fn d(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.get(i).copied())
    }

    fn available(&self) -> Option<usize> {
        Some(self.len())
    }
}

impl ChainSource for Vec<f64> {
    fn d(&self, n: usize) -> Option<f64> {
        self.as_slice().d(n)
    }

    fn available(&self) -> Option<usize> {
        Some(self.len())
    }
}

/// A real sequence `c_1..c_N` and a positive chain sequence prefix `d_1..d_N`.
///
/// Construction validates equal lengths, finiteness, `d_n > 0` and the
/// chain condition on the prefix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInput")]
pub struct RecurrenceInput {
    c: Vec<f64>,
    d: Vec<f64>,
}

#[derive(Deserialize)]
struct RawInput {
    c: Vec<f64>,
    d: Vec<f64>,
}

impl TryFrom<RawInput> for RecurrenceInput {
    type Error = Error;

    fn try_from(raw: RawInput) -> Result<Self> {
        RecurrenceInput::new(raw.c, raw.d)
    }
}

impl RecurrenceInput {
    pub fn new(c: Vec<f64>, d: Vec<f64>) -> Result<Self> {
        if c.len() != d.len() {
            return Err(Error::InvalidInput(format!(
                "c has {} terms but d has {}",
                c.len(),
                d.len()
            )));
        }
        if d.is_empty() {
            return Err(Error::InvalidInput("empty sequences".into()));
        }
        if let Some(i) = c.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("c_{} is not finite", i + 1)));
        }
        if let Some(i) = d.iter().position(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::InvalidInput(format!(
                "d_{} = {} must be positive and finite",
                i + 1,
                d[i]
            )));
        }
        minimal_parameters(&d)?;
        Ok(RecurrenceInput { c, d })
    }

    /// Parses the `{"c": [...], "d": [...]}` interchange format.
    pub fn from_json_str(s: &str) -> Result<Self> {
        // Parse then validate, so chain failures keep their own variant.
        let raw: RawInput =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        raw.try_into()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("plain f64 vectors always serialize")
    }

    /// Truncation length N.
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// `c_n`, 1-based.
    pub fn c(&self, n: usize) -> f64 {
        self.c[n - 1]
    }

    /// `d_n`, 1-based.
    pub fn d(&self, n: usize) -> f64 {
        self.d[n - 1]
    }

    pub fn c_values(&self) -> &[f64] {
        &self.c
    }

    pub fn d_values(&self) -> &[f64] {
        &self.d
    }

    /// `1 + i c_n`.
    pub fn rho(&self, n: usize) -> C64 {
        C64::new(1.0, self.c(n))
    }

    /// The first `n` terms as a new input.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::InvalidInput(format!(
                "cannot take {} terms of a length-{} input",
                n,
                self.len()
            )));
        }
        Ok(RecurrenceInput {
            c: self.c[..n].to_vec(),
            d: self.d[..n].to_vec(),
        })
    }

    pub(crate) fn require(&self, n: usize, what: &str) -> Result<()> {
        if n > self.len() {
            Err(Error::InvalidInput(format!(
                "{what} needs {n} terms but the input has {}",
                self.len()
            )))
        } else {
            Ok(())
        }
    }
}

impl ChainSource for RecurrenceInput {
    fn d(&self, n: usize) -> Option<f64> {
        self.d.as_slice().d(n)
    }

    fn available(&self) -> Option<usize> {
        Some(self.len())
    }
}

/// Sequence families understood by the CLI and the verification runner.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `c_n = c`, `d_n = d` for all n; requires `0 < d <= 1/4`.
    Constant { d: f64, c: f64 },
    /// The hypergeometric example family.
    Example(ExampleParams),
    /// A caller-supplied finite prefix.
    Explicit(RecurrenceInput),
}

impl Family {
    pub fn constant(d: f64, c: f64) -> Result<Self> {
        if !(d > 0.0 && d <= 0.25) || !c.is_finite() {
            return Err(Error::InvalidInput(format!(
                "constant family needs 0 < d <= 1/4 and finite c (got d = {d}, c = {c})"
            )));
        }
        Ok(Family::Constant { d, c })
    }

    pub fn c_term(&self, n: usize) -> Option<f64> {
        match self {
            Family::Constant { c, .. } => Some(*c),
            Family::Example(p) => Some(p.c(n)),
            Family::Explicit(input) => (n >= 1 && n <= input.len()).then(|| input.c(n)),
        }
    }

    /// The first `n` terms. Explicit inputs must hold at least `n` terms.
    pub fn input(&self, n: usize) -> Result<RecurrenceInput> {
        match self {
            Family::Explicit(input) => input.truncate(n),
            Family::Example(p) => p.sequences(n),
            Family::Constant { d, c } => RecurrenceInput::new(vec![*c; n], vec![*d; n]),
        }
    }
}

impl ChainSource for Family {
    fn d(&self, n: usize) -> Option<f64> {
        if n == 0 {
            return None;
        }
        match self {
            Family::Constant { d, .. } => Some(*d),
            Family::Example(p) => Some(p.d(n)),
            Family::Explicit(input) => ChainSource::d(input, n),
        }
    }

    fn available(&self) -> Option<usize> {
        match self {
            Family::Explicit(input) => Some(input.len()),
            _ => None,
        }
    }
}
