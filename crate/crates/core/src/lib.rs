//! Numerical toolkit for the first-order equation `-y' + q(x) y = f(x)` on the
//! whole real line: solvability indicators, the Green operator and its `L_p`
//! norms, the half-width function `d(x)`, asymptotic majorants, and verdicts on
//! strip decay and resolvent compactness.

pub mod asymptotics;
pub mod cli;
pub mod coefficient;
pub mod diagnostics;
pub mod error;
pub mod green;
pub mod quadrature;

pub use error::{Error, Result};
