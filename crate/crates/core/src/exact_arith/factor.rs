use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{is_prime, ArithError};

const TRIAL_LIMIT: u64 = 1_000_000;

/// Prime factorization of the magnitude of a nonzero integer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Factorization {
    pub factors: BTreeMap<BigUint, u32>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.keys()
    }

    pub fn product(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, (p, &e)| acc * p.pow(e))
    }

    fn push(&mut self, p: BigUint, e: u32) {
        *self.factors.entry(p).or_insert(0) += e;
    }
}

/// Trial division below 10^6, then Pollard rho (Brent) on the cofactor with
/// primality confirmed for each split.
pub fn factorize(n: &BigInt) -> Result<Factorization, ArithError> {
    if n.is_zero() {
        return Err(ArithError::ZeroArgument);
    }
    let mut out = Factorization::default();
    let mut rest = n.magnitude().clone();
    if let Some(small) = rest.to_u64() {
        for (p, e) in factor_u64(small) {
            out.push(BigUint::from(p), e);
        }
        return Ok(out);
    }
    let mut d = 2u64;
    while d < TRIAL_LIMIT && BigUint::from(d * d) <= rest {
        let mut e = 0;
        while (&rest % d).is_zero() {
            rest /= d;
            e += 1;
        }
        if e > 0 {
            out.push(BigUint::from(d), e);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&BigInt::from(m.clone())) {
            out.push(m, 1);
            continue;
        }
        let f = pollard_brent(&m);
        stack.push(&m / &f);
        stack.push(f);
    }
    Ok(out)
}

/// Small-number factorization: trial division below 10^6, rho above.
pub(crate) fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d <= TRIAL_LIMIT && d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    // no factor below 10^6 remains, so a cofactor under 10^12 is prime
    if n > 1 {
        if n < TRIAL_LIMIT * TRIAL_LIMIT || super::is_prime_u64(n) {
            out.push((n, 1));
        } else {
            let mut sub = BTreeMap::new();
            split_u64_cofactor(n, &mut sub);
            out.extend(sub);
        }
    }
    out
}

fn split_u64_cofactor(n: u64, acc: &mut BTreeMap<u64, u32>) {
    if n == 1 {
        return;
    }
    if super::is_prime_u64(n) {
        *acc.entry(n).or_insert(0) += 1;
        return;
    }
    let f = pollard_brent(&BigUint::from(n)).to_u64().expect("divisor of a u64");
    split_u64_cofactor(f, acc);
    split_u64_cofactor(n / f, acc);
}

/// Nontrivial divisor of a composite `n` with no small factors.
fn pollard_brent(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u8);
    }
    let one = BigUint::one();
    for c in 1u64.. {
        let c = BigUint::from(c);
        let step = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u8);
        let mut r = 1u64;
        let mut q = one.clone();
        let mut g = one.clone();
        let mut x = y.clone();
        let mut ys = y.clone();
        let block = 128u64;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = step(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..block.min(r - k) {
                    y = step(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += block;
            }
            r *= 2;
        }
        if g == *n {
            loop {
                ys = step(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if g != *n {
            return g;
        }
    }
    unreachable!("some polynomial constant splits every composite")
}
