//! Exact integer and rational arithmetic plus the small number-theoretic
//! kernels used everywhere else: valuations, factorization, primality,
//! modular exponentiation and primitive roots.
//!
//! Nothing in here touches floating point.

mod factor;
mod modular;
mod primes;
mod rat;

pub use factor::{factorize, Factorization};
pub use modular::{
    gcd_u64, mod_inverse, mod_mul, mod_pow, multiplicative_order, rat_mod, smallest_primitive_root,
};
pub use primes::{is_prime, is_prime_u64, primes_in_class, PrimesInClass};
pub use rat::{
    is_perfect_square, parse_rat, rat_pow, rational_sqrt, render_rat, valuation, valuation_int,
    Rat,
};

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("argument must be nonzero")]
    ZeroArgument,
    #[error("{0} is not prime")]
    NotPrime(BigInt),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: BigInt, m: u64 },
    #[error("residue {residue} is not coprime to modulus {modulus}")]
    BadResidueClass { residue: i64, modulus: u64 },
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}
