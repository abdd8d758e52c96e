//! Exact truncated power-series and Laurent-series arithmetic over the
//! rationals, polynomial arithmetic in a second variable `u` over the series
//! field, and Newton iteration for algebraic series roots.
//!
//! Every value carries an explicit truncation window and all coefficients are
//! exact `BigRational`s, so equality of series is decidable coefficient-wise.
//! Binary operations truncate to the smaller window (min-order semantics)
//! rather than erroring on mismatched orders.

mod laurent;
mod newton;
mod truncated;
mod upoly;

pub use laurent::LaurentSeries;
pub use newton::newton_algebraic_root;
pub use truncated::TruncatedSeries;
pub use upoly::UPolynomial;

use num::BigRational;
use thiserror::Error;

/// Errors raised by series arithmetic.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("not invertible as power series; use LaurentSeries division")]
    NotInvertible,
    #[error("division by zero series")]
    DivisionByZero,
    #[error("singular Newton step: derivative is not invertible")]
    SingularNewtonStep,
    #[error("seed is not an approximate root (P(seed) has a nonzero constant term)")]
    SeedNotRoot,
    #[error("Newton iteration failed to double its valid order (got {got}, expected >= {expected})")]
    NewtonStalled { got: usize, expected: usize },
    #[error("series has negative valuation {valuation}; not a power series")]
    NegativeValuation { valuation: i64 },
    #[error("polynomial division by zero polynomial")]
    ZeroDivisor,
}

/// Shorthand for an exact rational taken from an integer.
pub fn qi(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Shorthand for the exact rational `n/d`.
pub fn qr(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}
