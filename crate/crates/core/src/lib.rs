//! Orthogonal polynomials on the unit circle from a three-term recurrence
//! driven by a real sequence `c_n` and a positive chain sequence `d_n`.
//!
//! The pipeline runs
//! input → chain parameters → `R_n`, `Q_n` → zeros → moments and quadrature
//! → monic OPUC and Verblunsky coefficients, with the hypergeometric example
//! family available in closed form for cross-checking.
//!
//! ```
//! use opuc_core::{minimal_parameters, verblunsky, RecurrenceInput};
//!
//! let input = RecurrenceInput::new(vec![0.0; 4], vec![0.25; 4]).unwrap();
//! let m = minimal_parameters(input.d_values()).unwrap();
//! let alpha = verblunsky(&input, &m, 4).unwrap();
//! assert!((alpha[0].re - 0.5).abs() < 1e-15);
//! ```

// `!(x <= tol)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
mod dd;
pub mod error;
pub mod hypergeometric;
pub mod input;
pub mod measure;
pub mod recurrence;
pub mod szego;
pub mod verify;
pub mod zeros;

pub type C64 = num_complex::Complex64;

pub use chain::{
    backward_approximant, maximal_parameters, minimal_parameters, shifted_minimal_from_r,
    ChainParams, MaximalOptions, MaximalParams,
};
pub use error::{Error, Result};
pub use hypergeometric::ExampleParams;
pub use input::{ChainSource, Family, RecurrenceInput};
pub use measure::{
    convergents_at_one, hat_gamma_check, moment_table, mu_moments, nu_moments, quadrature,
    DiscreteMeasure, MomentTable, NuTable,
};
pub use recurrence::{
    determinant_u, eval_r_q, gamma_sequence, generate_q, generate_r, poly_tables, PointValues,
    PolyPair, COEFF_DEGREE_LIMIT,
};
pub use szego::{
    gram_matrix, szego_polynomials, szego_recurrence_residual, verblunsky, SzegoFamily,
};
pub use zeros::{eval_g, wronskian_check, zero_levels, zeros, WronskianCheck, ZeroSet};
