use num_bigint::{BigInt, BigUint, RandBigInt};
use num_traits::{One, Signed, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{gcd_u64, mod_mul, mod_pow, ArithError};

const SMALL_PRIMES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller-Rabin rounds with random bases for inputs beyond the proven
/// deterministic range; the error probability is below 4^-64.
const RANDOM_ROUNDS: usize = 64;

fn strong_probable_prime_u64(n: u64, base: u64) -> bool {
    let base = base % n;
    if base == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = mod_pow(base, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mod_mul(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality for every `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    // bases {2,3,5,7} are exact below 3_215_031_751
    let bases: &[u64] = if n < 3_215_031_751 {
        &SMALL_PRIMES[..4]
    } else {
        &SMALL_PRIMES[..12]
    };
    bases.iter().all(|&b| strong_probable_prime_u64(n, b))
}

fn strong_probable_prime_big(n: &BigUint, base: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = base.modpow(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = x.modpow(&BigUint::from(2u8), n);
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Primality of an arbitrary integer (negative numbers are never prime).
///
/// Exact below 3.3 * 10^24 (the first 13 primes form a proven witness
/// set there); above that, 64 extra Miller-Rabin rounds with bases drawn
/// from an RNG seeded by `n`, so repeated calls agree.
pub fn is_prime(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let n = n.magnitude();
    if SMALL_PRIMES.iter().any(|&p| (n % p).to_u64() == Some(0)) {
        return false;
    }
    if !SMALL_PRIMES
        .iter()
        .all(|&b| strong_probable_prime_big(n, &BigUint::from(b)))
    {
        return false;
    }
    let bound: BigUint = "3317044064679887385961981".parse().unwrap();
    if *n < bound {
        return true;
    }
    let seed = n.iter_u64_digits().fold(0u64, |h, d| h.rotate_left(7) ^ d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two = BigUint::from(2u8);
    let upper = n - &two;
    (0..RANDOM_ROUNDS).all(|_| {
        let base = rng.gen_biguint_range(&two, &upper);
        strong_probable_prime_big(n, &base)
    })
}

/// Increasing primes `p > start` with `p ≡ residue (mod modulus)`.
///
/// `modulus == 1` places no constraint on the class.
pub fn primes_in_class(start: i64, modulus: u64, residue: i64) -> Result<PrimesInClass, ArithError> {
    let modulus = modulus.max(1);
    let residue_mod = residue.rem_euclid(modulus as i64) as u64;
    if modulus > 1 && gcd_u64(residue_mod, modulus) != 1 {
        return Err(ArithError::BadResidueClass { residue, modulus });
    }
    // first candidate > start in the class
    let floor = start.max(0) as u64 + 1;
    let offset = (residue_mod + modulus - floor % modulus) % modulus;
    Ok(PrimesInClass {
        next: Some(floor + offset),
        step: modulus,
    })
}

#[derive(Debug, Clone)]
pub struct PrimesInClass {
    next: Option<u64>,
    step: u64,
}

impl Iterator for PrimesInClass {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            let candidate = self.next?;
            self.next = candidate.checked_add(self.step);
            if is_prime_u64(candidate) {
                return Some(candidate);
            }
        }
    }
}

/// Sieve of Eratosthenes; test oracle for the probabilistic routines.
#[cfg(test)]
pub(crate) fn sieve(limit: usize) -> Vec<bool> {
    let mut flags = vec![true; limit + 1];
    flags[0] = false;
    if limit >= 1 {
        flags[1] = false;
    }
    let mut i = 2;
    while i * i <= limit {
        if flags[i] {
            for j in (i * i..=limit).step_by(i) {
                flags[j] = false;
            }
        }
        i += 1;
    }
    flags
}
