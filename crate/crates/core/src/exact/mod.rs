//! Exact arithmetic substrate: arbitrary-precision rationals, sparse
//! multivariate Laurent polynomials, small matrices over them, and monomial
//! substitution maps.
//!
//! All coefficients are [`num_rational::BigRational`]; nothing here ever
//! rounds. Exponent vectors are plain integer tuples, so negative exponents
//! (Laurent monomials) are first-class.

mod matrix;
mod monomap;
mod poly;

pub use matrix::LaurentMatrix;
pub use monomap::MonomialMap;
pub use poly::{is_regular_on_cone, ExpVec, LaurentPolynomial};

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

/// Exact scalar: arbitrary-precision rational. The representation is always
/// reduced with a positive denominator.
pub type Rat = BigRational;

/// Shorthand for a rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integer rational.
pub fn rat_int(num: i64) -> Rat {
    Rat::from(BigInt::from(num))
}

/// Parse a rational written as `p` or `p/q`.
pub fn parse_rat(s: &str) -> Result<Rat, AlgebraError> {
    let s = s.trim();
    let mk_err = || AlgebraError::BadRational(s.to_string());
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().map_err(|_| mk_err())?;
            Ok(Rat::from(n))
        }
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| mk_err())?;
            let q: BigInt = q.trim().parse().map_err(|_| mk_err())?;
            if q == BigInt::from(0) {
                return Err(mk_err());
            }
            Ok(Rat::new(p, q))
        }
    }
}

/// Errors raised by the exact-arithmetic layer.
#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("variable context mismatch: {0} vs {1} variables")]
    ContextMismatch(usize, usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not invertible over the Laurent ring; determinant = {det}")]
    NotInvertible { det: String },
    #[error("polynomial is not a unit (single nonzero term required): {0}")]
    NotAUnit(String),
    #[error("monomial map is not invertible over the integers (determinant {0})")]
    NonUnimodular(i64),
    #[error("cannot parse rational from {0:?}")]
    BadRational(String),
}
