//! n-th power residue symbols at rational primes `r ≡ 1 (mod n)`.
//!
//! The residue field at a degree-one prime above `r` is `Z/r`, so the
//! symbol of `a` is the n-th root of unity congruent to `a^((r-1)/n)`.
//! Roots of unity are labelled by exponents of a fixed generator
//! `zeta = g^((r-1)/n)`, `g` the smallest primitive root mod `r`; the
//! symbol is returned as that exponent in `0..n`.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::classifier::{Pivot, ValMatrix};
use crate::exact_arith::{
    is_prime_u64, mod_inverse, mod_mul, mod_pow, rat_mod, smallest_primitive_root, Rat,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolError {
    #[error("symbol modulus {0} must be an odd prime")]
    BadExponent(u64),
    #[error("{r} must be a prime congruent to 1 mod {n}")]
    BadPrime { r: u64, n: u64 },
    #[error("symbol undefined: argument not coprime to {0}")]
    SymbolUndefined(u64),
    #[error("pivot system is singular modulo {0}")]
    SingularModN(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolContext {
    n: u64,
    r: u64,
    zeta: u64,
    /// `zeta^e mod r` for `e in 0..n`.
    powers: Vec<u64>,
}

impl SymbolContext {
    pub fn new(n: u64, r: u64) -> Result<Self, SymbolError> {
        if n < 3 || !is_prime_u64(n) {
            return Err(SymbolError::BadExponent(n));
        }
        if r == n || r % n != 1 || !is_prime_u64(r) {
            return Err(SymbolError::BadPrime { r, n });
        }
        let g = smallest_primitive_root(r).map_err(|_| SymbolError::BadPrime { r, n })?;
        let zeta = mod_pow(g, (r - 1) / n, r);
        let mut powers = Vec::with_capacity(n as usize);
        let mut acc = 1;
        for _ in 0..n {
            powers.push(acc);
            acc = mod_mul(acc, zeta, r);
        }
        Ok(Self { n, r, zeta, powers })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn zeta(&self) -> u64 {
        self.zeta
    }

    /// Exponent of a unit residue mod `r`.
    pub fn exponent_of_residue(&self, x: u64) -> Result<u64, SymbolError> {
        let x = x % self.r;
        if x == 0 {
            return Err(SymbolError::SymbolUndefined(self.r));
        }
        let v = mod_pow(x, (self.r - 1) / self.n, self.r);
        let e = self
            .powers
            .iter()
            .position(|&z| z == v)
            .expect("a^((r-1)/n) is an n-th root of unity");
        Ok(e as u64)
    }

    pub fn exponent_of_int(&self, a: &BigInt) -> Result<u64, SymbolError> {
        let x = rat_mod(&Rat::from_integer(a.clone()), self.r).expect("integer");
        self.exponent_of_residue(x)
    }
}

/// `e` with `(a/r)_n = zeta^e`.
pub fn symbol_exponent(a: &Rat, ctx: &SymbolContext) -> Result<u64, SymbolError> {
    if a.is_zero() {
        return Err(SymbolError::SymbolUndefined(ctx.r));
    }
    mod_inverse(a.denom(), ctx.r).map_err(|_| SymbolError::SymbolUndefined(ctx.r))?;
    let x = rat_mod(a, ctx.r).ok_or(SymbolError::SymbolUndefined(ctx.r))?;
    ctx.exponent_of_residue(x)
}

fn smallest_odd_prime_not_dividing(value: i64) -> u64 {
    (3u64..)
        .step_by(2)
        .find(|&n| is_prime_u64(n) && value.unsigned_abs() % n != 0)
        .expect("infinitely many primes")
}

/// Smallest odd prime coprime to `2 v_{p'}(B)` (top row zero) or `2d` (rank 2).
pub fn choose_modulus(pivot: &Pivot, matrix: &ValMatrix) -> u64 {
    let constraint = match pivot {
        Pivot::TopRowZero { p } => matrix.column(p).expect("pivot in T").1,
        Pivot::Rank2 { d, .. } => *d,
    };
    smallest_odd_prime_not_dividing(constraint)
}

/// Required symbol exponents at the pivot primes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolTargets {
    /// Exponent `a` at `p'`; any nonzero class works at search time.
    TopRowZero { a: u64 },
    /// `a v_{p'}(C) + b v_{q'}(C) ≡ 0` and `a v_{p'}(B) + b v_{q'}(B) ≡ 1 (mod n)`.
    Rank2 { a: u64, b: u64 },
}

/// Solves `[[v_p'(C), v_q'(C)], [v_p'(B), v_q'(B)]] (a, b)^T ≡ (0, 1)^T (mod n)`.
pub fn solve_targets(minor: [[i64; 2]; 2], n: u64) -> Result<SymbolTargets, SymbolError> {
    let modulus = n as i64;
    let det = (minor[0][0] * minor[1][1] - minor[0][1] * minor[1][0]).rem_euclid(modulus);
    let inv = mod_inverse(&BigInt::from(det), n).map_err(|_| SymbolError::SingularModN(n))? as i64;
    // Cramer: a = -m01 / det, b = m00 / det
    let a = (-minor[0][1]).rem_euclid(modulus) * inv % modulus;
    let b = minor[0][0].rem_euclid(modulus) * inv % modulus;
    let check = |row: [i64; 2]| (a * row[0] + b * row[1]).rem_euclid(modulus);
    debug_assert_eq!((check(minor[0]), check(minor[1])), (0, 1 % modulus));
    Ok(SymbolTargets::Rank2 {
        a: a as u64,
        b: b as u64,
    })
}

/// Targets for a pivot: the solved system for rank 2, exponent 1 otherwise.
pub fn targets_for(pivot: &Pivot, matrix: &ValMatrix, n: u64) -> Result<SymbolTargets, SymbolError> {
    match pivot {
        Pivot::TopRowZero { .. } => Ok(SymbolTargets::TopRowZero { a: 1 }),
        Pivot::Rank2 { p, q, .. } => {
            let (cp, bp) = matrix.column(p).expect("pivot in T");
            let (cq, bq) = matrix.column(q).expect("pivot in T");
            solve_targets([[cp, cq], [bp, bq]], n)
        }
    }
}
