use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::factor::factor_u64;
use super::{is_prime_u64, ArithError, Rat};

#[inline]
pub fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// `a^e mod m`, result in `0..m`.
pub fn mod_pow(a: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut base = a % m;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        e >>= 1;
    }
    acc
}

fn reduce(a: &BigInt, m: u64) -> u64 {
    a.mod_floor(&BigInt::from(m))
        .to_u64()
        .expect("residue below a u64 modulus")
}

/// Inverse of `a` modulo `m`.
pub fn mod_inverse(a: &BigInt, m: u64) -> Result<u64, ArithError> {
    let r = reduce(a, m) as i128;
    let not_invertible = || ArithError::NotInvertible {
        a: a.clone(),
        m,
    };
    if m < 2 {
        return Err(not_invertible());
    }
    let (mut old_r, mut cur_r) = (r, m as i128);
    let (mut old_s, mut cur_s) = (1i128, 0i128);
    while cur_r != 0 {
        let q = old_r / cur_r;
        (old_r, cur_r) = (cur_r, old_r - q * cur_r);
        (old_s, cur_s) = (cur_s, old_s - q * cur_s);
    }
    if old_r != 1 {
        return Err(not_invertible());
    }
    Ok(old_s.rem_euclid(m as i128) as u64)
}

/// Image of a rational in `Z/m`, or `None` when the denominator is not a unit.
pub fn rat_mod(x: &Rat, m: u64) -> Option<u64> {
    if x.is_zero() {
        return Some(0);
    }
    let inv = mod_inverse(x.denom(), m).ok()?;
    Some(mod_mul(reduce(x.numer(), m), inv, m))
}

/// Order of `a` in `(Z/p)^*` for a prime `p` not dividing `a`.
pub fn multiplicative_order(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 || !is_prime_u64(p) {
        return None;
    }
    let mut order = p - 1;
    for (q, _) in factor_u64(p - 1) {
        while order % q == 0 && mod_pow(a, order / q, p) == 1 {
            order /= q;
        }
    }
    Some(order)
}

/// Smallest `g >= 2` generating `(Z/r)^*`.
pub fn smallest_primitive_root(r: u64) -> Result<u64, ArithError> {
    if r == 2 || !is_prime_u64(r) {
        return Err(ArithError::NotOddPrime(r));
    }
    let cofactors: Vec<u64> = factor_u64(r - 1).into_iter().map(|(q, _)| (r - 1) / q).collect();
    (2..r)
        .find(|&g| cofactors.iter().all(|&c| mod_pow(g, c, r) != 1))
        .ok_or(ArithError::NotOddPrime(r))
}
