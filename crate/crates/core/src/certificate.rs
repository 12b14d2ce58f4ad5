//! Certificate data: the recurrence it talks about, the claim, and the
//! witness that backs it. Plain data; building and checking live elsewhere.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;

use crate::exact_arith::{rat_pow, Rat};
use crate::recurrence::{coeffs_from_roots, LinearRecurrence};
use crate::verifier::ScanReport;

pub const CERTIFICATE_VERSION: u32 = 1;

/// The sequence a certificate is about.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Subject {
    /// `u_{n+2} = a1 u_{n+1} + a2 u_n`.
    Quadratic {
        a1: Rat,
        a2: Rat,
        u0: Rat,
        u1: Rat,
        base: BigUint,
    },
    /// `u_n = u0 a1^n`.
    Order1 { a1: Rat, u0: Rat, base: BigUint },
    /// `u_n = b1 c1^n + (b2 + (-1)^n b3) c2^n`.
    Cubic {
        b1: Rat,
        b2: Rat,
        b3: Rat,
        c1: Rat,
        c2: Rat,
        base: BigUint,
    },
}

impl Subject {
    pub fn base(&self) -> &BigUint {
        match self {
            Subject::Quadratic { base, .. }
            | Subject::Order1 { base, .. }
            | Subject::Cubic { base, .. } => base,
        }
    }

    /// The subject as an explicit recurrence with initial window.
    pub fn recurrence(&self) -> LinearRecurrence {
        match self {
            Subject::Quadratic { a1, a2, u0, u1, .. } => {
                LinearRecurrence::new(vec![a1.clone(), a2.clone()], vec![u0.clone(), u1.clone()])
            }
            Subject::Order1 { a1, u0, .. } => LinearRecurrence::new(vec![a1.clone()], vec![u0.clone()]),
            Subject::Cubic { c1, c2, .. } => {
                let coeffs = coeffs_from_roots(&[c1.clone(), c2.clone(), -c2.clone()]);
                let init = (0..3).map(|n| self.cubic_term(n)).collect();
                LinearRecurrence::new(coeffs, init)
            }
        }
    }

    fn cubic_term(&self, n: i64) -> Rat {
        let Subject::Cubic { b1, b2, b3, c1, c2, .. } = self else {
            unreachable!("cubic subject")
        };
        let sign = if n % 2 == 0 { Rat::one() } else { -Rat::one() };
        b1 * rat_pow(c1, n) + (b2 + sign * b3) * rat_pow(c2, n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Claim {
    ZeroTerm,
    NoZeroTerm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `u_n = 0` at this index.
    Index(i64),
    /// No term lies in `m Z[1/b]` for the prime `m`. `n_used` and the symbol
    /// exponents record how the prime was found (absent for direct scans).
    PrimeModulus {
        m: u64,
        n_used: Option<u64>,
        symbol_exponents: BTreeMap<BigUint, u64>,
    },
    /// Product of per-parity primes.
    CompositeModulus { m: u64, factors: Vec<(u64, Parity)> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub version: u32,
    pub subject: Subject,
    pub claim: Claim,
    pub witness: Witness,
    /// Period scan backing a `NoZeroTerm` claim.
    pub scan: Option<ScanReport>,
    pub metadata: BTreeMap<String, String>,
}

impl Certificate {
    pub fn zero_term(subject: Subject, index: i64) -> Self {
        Self {
            version: CERTIFICATE_VERSION,
            subject,
            claim: Claim::ZeroTerm,
            witness: Witness::Index(index),
            scan: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn no_zero_term(subject: Subject, witness: Witness, scan: ScanReport) -> Self {
        Self {
            version: CERTIFICATE_VERSION,
            subject,
            claim: Claim::NoZeroTerm,
            witness,
            scan: Some(scan),
            metadata: BTreeMap::new(),
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        match self.witness {
            Witness::Index(_) => None,
            Witness::PrimeModulus { m, .. } | Witness::CompositeModulus { m, .. } => Some(m),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<String>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }
}
