//! Shared fixtures for the benchmarks.

use opuc_core::{ExampleParams, Family, RecurrenceInput};

/// A representative member of the example family, away from the special cases.
pub fn example() -> ExampleParams {
    ExampleParams::new(0.5, 1.0, 0.3).expect("valid parameters")
}

pub fn example_input(n: usize) -> RecurrenceInput {
    example().sequences(n).expect("valid sequences")
}

/// `d ≡ 1/4`, `c ≡ 0`.
pub fn quarter() -> Family {
    Family::constant(0.25, 0.0).expect("valid constant family")
}
