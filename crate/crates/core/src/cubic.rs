//! Degenerate cubics with roots `c1, c2, -c2`.
//!
//! `u_n = b1 c1^n + (b2 + (-1)^n b3) c2^n` splits into two quadratic
//! subsequences `u_{2k}` and `u_{2k+1}` with roots `c1^2, c2^2`, each of
//! which is certified on its own; the two results are then combined into a
//! certificate for the whole sequence.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::certificate::{Certificate, Parity, Subject, Witness};
use crate::certifier::{certify_outcome, CertifyConfig, CertifyError, PrimeWitness, QuadraticOutcome};
use crate::classifier::{classify, support_of_closed, SupportSet};
use crate::exact_arith::{factorize, is_prime_u64, Rat};
use crate::recurrence::{coeffs_from_roots, ClosedForm, Order1, RatioPair, ValidatedRecurrence};
use crate::verifier::period_scan;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CubicError {
    #[error("roots must be nonzero with c1 != ±c2")]
    DegenerateRoots,
    #[error("b1, b2 and b3 must be nonzero")]
    ZeroCoefficient,
    #[error("{0:?} subsequence is first order")]
    DegenerateToOrder1(Parity),
    #[error("prime {0} divides a denominator but not the base")]
    DenominatorOutsideBase(BigUint),
}

fn check_roots(c1: &Rat, c2: &Rat) -> Result<(), CubicError> {
    if c1.is_zero() || c2.is_zero() || c1 == c2 || *c1 == -c2.clone() {
        return Err(CubicError::DegenerateRoots);
    }
    Ok(())
}

/// `(a1, a2, a3)` with `(x - c1)(x - c2)(x + c2) = x^3 - a1 x^2 - a2 x - a3`.
pub fn cubic_coeffs(c1: &Rat, c2: &Rat) -> Result<(Rat, Rat, Rat), CubicError> {
    check_roots(c1, c2)?;
    let mut a = coeffs_from_roots(&[c1.clone(), c2.clone(), -c2.clone()]).into_iter();
    let (a1, a2, a3) = (a.next().unwrap(), a.next().unwrap(), a.next().unwrap());
    Ok((a1, a2, a3))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicFamily {
    pub b1: Rat,
    pub b2: Rat,
    pub b3: Rat,
    pub c1: Rat,
    pub c2: Rat,
    pub base: BigUint,
}

fn denominator_primes(values: &[&Rat]) -> Vec<BigUint> {
    let mut out = Vec::new();
    for v in values {
        out.extend(factorize(v.denom()).expect("nonzero").primes().cloned());
    }
    out
}

impl CubicFamily {
    /// Checks the family hypotheses. Without a base, the smallest one
    /// containing every prime of `c1`, `c2` and of the denominators of
    /// `b1, b2, b3` is used, which keeps all terms of both tails in `Z[1/b]`.
    pub fn new(b1: Rat, b2: Rat, b3: Rat, c1: Rat, c2: Rat, base: Option<BigUint>) -> Result<Self, CubicError> {
        check_roots(&c1, &c2)?;
        if b1.is_zero() || b2.is_zero() || b3.is_zero() {
            return Err(CubicError::ZeroCoefficient);
        }
        let base = match base {
            Some(b) => {
                if b.is_zero() {
                    return Err(CubicError::DenominatorOutsideBase(BigUint::zero()));
                }
                let dens = denominator_primes(&[&b1, &b2, &b3, &c1, &c2]);
                if let Some(p) = dens.into_iter().find(|p| !(&b % p).is_zero()) {
                    return Err(CubicError::DenominatorOutsideBase(p));
                }
                b
            }
            None => {
                let mut primes = denominator_primes(&[&b1, &b2, &b3, &c1, &c2]);
                for c in [&c1, &c2] {
                    primes.extend(factorize(c.numer()).expect("nonzero").primes().cloned());
                }
                primes.sort();
                primes.dedup();
                primes.into_iter().product()
            }
        };
        Ok(Self { b1, b2, b3, c1, c2, base })
    }

    pub fn coeffs(&self) -> (Rat, Rat, Rat) {
        cubic_coeffs(&self.c1, &self.c2).expect("validated roots")
    }

    pub fn b_plus(&self) -> Rat {
        -(&self.b2 + &self.b3) / &self.b1
    }

    pub fn b_minus(&self) -> Rat {
        -(&self.b2 - &self.b3) / &self.b1
    }

    pub fn c_ratio(&self) -> Rat {
        &self.c1 / &self.c2
    }

    pub fn term(&self, n: i64) -> Rat {
        let sign = if n.rem_euclid(2) == 0 { Rat::one() } else { -Rat::one() };
        &self.b1 * crate::exact_arith::rat_pow(&self.c1, n)
            + (&self.b2 + sign * &self.b3) * crate::exact_arith::rat_pow(&self.c2, n)
    }

    pub fn subject(&self) -> Subject {
        Subject::Cubic {
            b1: self.b1.clone(),
            b2: self.b2.clone(),
            b3: self.b3.clone(),
            c1: self.c1.clone(),
            c2: self.c2.clone(),
            base: self.base.clone(),
        }
    }

    /// Unordered closed-form coefficients of `u_{2k}` and `u_{2k+1}`.
    fn half_coefficients(&self, parity: Parity) -> (Rat, Rat) {
        match parity {
            Parity::Even => (self.b1.clone(), &self.b2 + &self.b3),
            Parity::Odd => (&self.b1 * &self.c1, (&self.b2 - &self.b3) * &self.c2),
        }
    }

    /// Closed form of one parity, or `None` when that half is first order.
    pub fn half_closed(&self, parity: Parity) -> Option<ClosedForm> {
        match self.half(parity) {
            Half::Quadratic(rec) => Some(rec.closed),
            Half::Order1(_) => None,
        }
    }

    fn half(&self, parity: Parity) -> Half {
        let (beta1, beta2) = self.half_coefficients(parity);
        let (g1, g2) = (&self.c1 * &self.c1, &self.c2 * &self.c2);
        if beta2.is_zero() {
            return Half::Order1(Order1 {
                a1: g1,
                u0: beta1,
                base: self.base.clone(),
            });
        }
        let closed = ClosedForm::ordered(beta1, beta2, g1, g2);
        Half::Quadratic(ValidatedRecurrence::from_closed_form(closed, self.base.clone()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Half {
    Quadratic(ValidatedRecurrence),
    Order1(Order1),
}

/// Closed forms of the even and odd subsequences.
pub fn split(fam: &CubicFamily) -> Result<(ClosedForm, ClosedForm), CubicError> {
    let closed = |parity| fam.half_closed(parity).ok_or(CubicError::DegenerateToOrder1(parity));
    Ok((closed(Parity::Even)?, closed(Parity::Odd)?))
}

/// Per-parity result: a zero at subsequence index `k`, or a prime.
fn certify_half(half: &Half, config: &CertifyConfig) -> Result<(String, QuadraticOutcome), CertifyError> {
    match half {
        Half::Quadratic(rec) => {
            let (label, outcome) = certify_outcome(rec, config)?;
            Ok((label.to_string(), outcome))
        }
        Half::Order1(o) => {
            let cert = crate::certifier::certify_order1(&o.a1, &o.u0, &o.base)?;
            let (Witness::PrimeModulus { m, .. }, Some(scan)) = (cert.witness, cert.scan) else {
                return Err(CertifyError::Internal("order-1 half with nonzero head".into()));
            };
            Ok((
                "Order1".into(),
                QuadraticOutcome::Prime(PrimeWitness {
                    m,
                    n_used: None,
                    symbol_exponents: Default::default(),
                    scan,
                    method: "coprime-prime",
                }),
            ))
        }
    }
}

fn corollary_label(fam: &CubicFamily, b: Rat) -> String {
    let pair = RatioPair::new(b, fam.c_ratio());
    if pair.b.is_zero() {
        return "B=0".into();
    }
    let support = SupportSet::of_values(&fam.base, [&pair.b, &pair.c]);
    classify(&pair, &support).to_string()
}

pub fn certify_cubic(fam: &CubicFamily, config: &CertifyConfig) -> Result<Certificate, CertifyError> {
    let even = certify_half(&fam.half(Parity::Even), config);
    let odd = certify_half(&fam.half(Parity::Odd), config);
    let meta = |cert: Certificate, even_label: &str, odd_label: &str| {
        cert.with_meta("even_case", even_label)
            .with_meta("odd_case", odd_label)
            .with_meta("corollary_case_plus", corollary_label(fam, fam.b_plus()))
            .with_meta("corollary_case_minus", corollary_label(fam, fam.b_minus()))
            .with_meta("mode", config.mode.to_string())
    };
    for (parity, result) in [(Parity::Even, &even), (Parity::Odd, &odd)] {
        if let Ok((_, QuadraticOutcome::Zero { index })) = result {
            let n = match parity {
                Parity::Even => 2 * index,
                Parity::Odd => 2 * index + 1,
            };
            if !fam.term(n).is_zero() {
                return Err(CertifyError::Internal(format!("u_{n} is not zero")));
            }
            let label = |r: &Result<(String, QuadraticOutcome), CertifyError>| match r {
                Ok((l, _)) => l.clone(),
                Err(e) => e.to_string(),
            };
            return Ok(meta(
                Certificate::zero_term(fam.subject(), n),
                &label(&even),
                &label(&odd),
            ));
        }
    }
    let (even_label, even_out) = even?;
    let (odd_label, odd_out) = odd?;
    let (QuadraticOutcome::Prime(we), QuadraticOutcome::Prime(wo)) = (even_out, odd_out) else {
        unreachable!("zero outcomes handled above")
    };
    let rec = fam.subject().recurrence();
    for w in [&we, &wo] {
        if let Ok(scan) = period_scan(&rec, &fam.base, w.m) {
            if scan.is_zero_free() {
                let cert = Certificate::no_zero_term(fam.subject(), w.witness(), scan)
                    .with_meta("method", w.method);
                return Ok(meta(cert, &even_label, &odd_label));
            }
        }
    }
    let m = we
        .m
        .checked_mul(wo.m)
        .ok_or_else(|| CertifyError::Internal("composite modulus overflows u64".into()))?;
    let scan = period_scan(&rec, &fam.base, m).map_err(|e| CertifyError::Internal(e.to_string()))?;
    if !scan.is_zero_free() {
        return Err(CertifyError::Internal(format!(
            "composite modulus {m} has a zero residue"
        )));
    }
    debug_assert!(is_prime_u64(we.m) && is_prime_u64(wo.m));
    let witness = Witness::CompositeModulus {
        m,
        factors: vec![(we.m, Parity::Even), (wo.m, Parity::Odd)],
    };
    let cert = Certificate::no_zero_term(fam.subject(), witness, scan).with_meta("method", "parity-product");
    Ok(meta(cert, &even_label, &odd_label))
}

/// Support set of one parity's closed form.
pub fn half_support(fam: &CubicFamily, parity: Parity) -> Option<SupportSet> {
    match fam.half(parity) {
        Half::Quadratic(rec) => Some(support_of_closed(&rec.base, &rec.closed)),
        Half::Order1(_) => None,
    }
}
