//! Exact rational, quadratic-irrational and p-adic arithmetic.

mod crt;
mod padic;
mod prime;
mod real;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use crt::{crt_coset, Congruence, Coset};
pub use padic::{
    is_supported_on, padic_abs, padic_fractional_part, padic_valuation, prime_power, weil_product,
    Valuation,
};
pub use prime::{Prime, PrimeSet};
pub use real::{parse_rational, ExactReal};

/// Arbitrary-precision rationals in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Shorthand for a small rational literal. Panics on a zero denominator.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Greatest integer <= x.
pub fn floor_exact(x: &ExactReal) -> BigInt {
    x.floor()
}
