//! Semi-analytical series engine for the modified nonlinear Schrodinger
//! equation with second-order spatio-temporal dispersion, formulated with
//! either Caputo or conformable fractional derivatives.
//!
//! The solution procedure is a double-Laplace / Adomian decomposition
//! recursion carried out exactly on a closed symbolic basis of terms
//! `coeff * x^q * exp(i k tau) * E(t, h, c)`, where `E` is the two-index
//! Mittag-Leffler helper `E(t,h,c) = t^h E_{1,h+1}(c t)`. Every closed-form
//! rule is paired with an independent numeric oracle (quadrature or limit
//! differencing) so the symbolic layer can be cross-validated end to end.
//!
//! Module map:
//!
//! - [`special_functions`]: gamma / reciprocal gamma and the complex
//!   Mittag-Leffler family.
//! - [`fractional_operators`]: Caputo quadrature, Riemann-Liouville integral
//!   and conformable derivative/integral rules plus their numeric oracles.
//! - [`term_algebra`]: the closed term basis with exact multiplication,
//!   conjugation, fractional derivatives and x-integration.
//! - [`adm_solver`]: the Adomian recursion, transcribed reference series and
//!   a term-level comparator.
//! - [`reporting`]: grid evaluation, reference-table reproduction and
//!   CSV/JSON export.

// Negated float comparisons like `!(t > 0.0)` are used on purpose in
// domain checks: they reject NaN together with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adm_solver;
pub mod fractional_operators;
mod numfmt;
pub mod reporting;
pub mod special_functions;
pub mod term_algebra;

pub use adm_solver::{
    ComparisonReport, Experiment, ProblemSpec, Provenance, SeriesSolution, SolveError,
};
pub use fractional_operators::{FractionalOrder, OperatorError, ScalarFunction, Sense};
pub use special_functions::{ComplexValue, MLArgs, SpecialFunctionError};
pub use term_algebra::{ExpAtom, MleAtom, SymbolicTerm, TermError, TermSum};
