//! Exact polynomial algebra over Q on homogeneous forms, up to
//! irreducible factorization and multivariate resultants.

pub mod factor;
pub mod gcd;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod resultant;
pub mod univariate;
pub mod zassenhaus;

use num_traits::ToPrimitive;

/// Exact rational coefficient.
pub type Rational = num_rational::BigRational;

pub use factor::{factor, is_irreducible, square_free, Factorization, DEFAULT_FACTOR_CAP};
pub use poly::{HomogPoly, Monomial};
pub use resultant::resultant;

pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}
