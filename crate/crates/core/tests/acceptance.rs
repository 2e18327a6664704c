//! Acceptance criteria at their stated tolerances.
//!
//! Runs without the libtest harness so that every criterion prints its
//! PASS/FAIL line, passing or not. Exits non-zero if any criterion fails.
//! Positional arguments filter by criterion id, e.g. `-- C4 C10`.

use std::process::ExitCode;

use opuc_core::verify::{self, CriterionResult};
use opuc_core::Family;

type Check = fn(&[Family]) -> CriterionResult;

const CRITERIA: [(&str, Check); 10] = [
    ("C1", verify::chain_parameters),
    ("C2", verify::zero_interlacing),
    ("C3", verify::determinant_formula),
    ("C4", |_| verify::convergents_limit()),
    ("C5", verify::moment_tables),
    ("C6", verify::quadrature_rules),
    ("C7", verify::hat_gamma_recursion),
    ("C8", verify::szego_structure),
    ("C9", |_| verify::lebesgue_case()),
    ("C10", |_| verify::mass_point_case()),
];

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let families = verify::default_families();
    let mut failed = 0;
    let mut ran = 0;
    for (id, check) in CRITERIA {
        if !filters.is_empty() && !filters.iter().any(|f| f.eq_ignore_ascii_case(id)) {
            continue;
        }
        let r = check(&families);
        println!("{} ({:.2} s)", r.line(), r.seconds);
        ran += 1;
        if !r.passed() {
            failed += 1;
        }
    }
    println!("\nacceptance: {} passed; {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
