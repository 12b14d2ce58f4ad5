use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{is_prime, ArithError};

/// Exact rational in lowest terms with a positive denominator.
pub type Rat = BigRational;

/// Parses `"n"` or `"n/d"` (optional leading sign, no whitespace inside).
pub fn parse_rat(text: &str) -> Result<Rat, ArithError> {
    let bad = || ArithError::Parse(text.to_string());
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(num, den))
}

/// Canonical text form: `"-3/2"`, `"5"`.
pub fn render_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Exponent of `p` in a nonzero integer. `p` is assumed prime.
pub fn valuation_int(n: &BigInt, p: &BigUint) -> u64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from_biguint(Sign::Plus, p.clone());
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn valuation(x: &Rat, p: &BigUint) -> Result<i64, ArithError> {
    if x.is_zero() {
        return Err(ArithError::ZeroArgument);
    }
    if !is_prime(&BigInt::from(p.clone())) {
        return Err(ArithError::NotPrime(BigInt::from(p.clone())));
    }
    Ok(valuation_int(x.numer(), p) as i64 - valuation_int(x.denom(), p) as i64)
}

/// `x^e` for any integer `e`; a zero base with negative exponent panics.
pub fn rat_pow(x: &Rat, e: i64) -> Rat {
    let mut base = if e < 0 { x.recip() } else { x.clone() };
    let mut e = e.unsigned_abs();
    let mut acc = Rat::one();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

pub fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}

/// Nonnegative rational square root when it exists.
pub fn rational_sqrt(x: &Rat) -> Option<Rat> {
    let n = is_perfect_square(x.numer())?;
    let d = is_perfect_square(x.denom())?;
    Some(Rat::new(n, d))
}
