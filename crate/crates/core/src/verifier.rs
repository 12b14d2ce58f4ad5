//! Certificate checking that relies only on exact arithmetic and a direct
//! scan of the sequence modulo `m`.
//!
//! When `m` is coprime to the base, to every denominator in the recurrence
//! and to the trailing coefficient, the state map is invertible mod `m`, so
//! the two-sided sequence is purely periodic and one period covers every
//! index in `Z`. This module must not depend on the residue-symbol code.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::certificate::{Certificate, Claim, Witness};
use crate::exact_arith::{gcd_u64, is_prime_u64, mod_inverse, mod_mul, rat_mod, render_rat, Rat};
use crate::recurrence::LinearRecurrence;

/// Residues kept in a report.
pub const SAMPLE_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport {
    pub modulus: u64,
    pub period: u64,
    pub zero_indices_in_period: Vec<u64>,
    /// First `min(period, 64)` residues.
    pub residues_sample: Vec<u64>,
}

impl ScanReport {
    pub fn is_zero_free(&self) -> bool {
        self.zero_indices_in_period.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScanError {
    #[error("bad modulus {modulus}: {reason}")]
    BadModulus { modulus: u64, reason: String },
    #[error("no period found within {0} steps")]
    CapExceeded(u128),
}

fn big_mod(x: &BigUint, m: u64) -> u64 {
    (x % m).to_u64().expect("below modulus")
}

/// Reduces the recurrence mod `m` after checking the invertibility
/// preconditions.
fn reduce(rec: &LinearRecurrence, base: &BigUint, m: u64) -> Result<(Vec<u64>, Vec<u64>), ScanError> {
    let bad = |reason: String| ScanError::BadModulus { modulus: m, reason };
    if m < 2 {
        return Err(bad("modulus must be at least 2".into()));
    }
    if gcd_u64(big_mod(base, m), m) != 1 {
        return Err(bad(format!("not coprime to the base {base}")));
    }
    let last = rec.coeffs.last().expect("order >= 1");
    if last.is_zero() || mod_inverse(last.numer(), m).is_err() {
        return Err(bad(format!(
            "not coprime to the trailing coefficient {}",
            render_rat(last)
        )));
    }
    let reduce_all = |xs: &[Rat], what: &str| {
        xs.iter()
            .map(|x| {
                rat_mod(x, m)
                    .ok_or_else(|| bad(format!("divides the denominator of {what} {}", render_rat(x))))
            })
            .collect::<Result<Vec<u64>, ScanError>>()
    };
    Ok((reduce_all(&rec.coeffs, "coefficient")?, reduce_all(&rec.init, "initial term")?))
}

/// Iterates the state map mod `m` from the initial window until it recurs
/// and reports every zero residue in that period.
pub fn period_scan(rec: &LinearRecurrence, base: &BigUint, m: u64) -> Result<ScanReport, ScanError> {
    let (coeffs, init) = reduce(rec, base, m)?;
    let d = coeffs.len();
    let cap = (m as u128).saturating_pow(d as u32);
    let mut window = init.clone();
    let mut zeros = Vec::new();
    let mut sample = Vec::new();
    let mut n: u64 = 0;
    loop {
        let current = window[0];
        if current == 0 {
            zeros.push(n);
        }
        if sample.len() < SAMPLE_LEN {
            sample.push(current);
        }
        let next = coeffs
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &a)| (acc + mod_mul(a, window[d - 1 - i], m)) % m);
        window.rotate_left(1);
        window[d - 1] = next;
        n += 1;
        if window == init {
            break;
        }
        if n as u128 >= cap {
            return Err(ScanError::CapExceeded(cap));
        }
    }
    Ok(ScanReport {
        modulus: m,
        period: n,
        zero_indices_in_period: zeros,
        residues_sample: sample,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected(String),
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }
}

fn check_modulus(cert: &Certificate, m: u64) -> Verdict {
    let rec = cert.subject.recurrence();
    let report = match period_scan(&rec, cert.subject.base(), m) {
        Ok(r) => r,
        Err(e) => return Verdict::Rejected(e.to_string()),
    };
    if let Some(&i) = report.zero_indices_in_period.first() {
        return Verdict::Rejected(format!("zero residue at index {i} modulo {m}"));
    }
    match &cert.scan {
        Some(attached) if *attached != report => {
            Verdict::Rejected(format!("attached scan does not match the scan modulo {m}"))
        }
        _ => Verdict::Accepted,
    }
}

/// Rechecks a certificate from its subject and witness alone.
pub fn verify_certificate(cert: &Certificate) -> Verdict {
    if cert.version != crate::certificate::CERTIFICATE_VERSION {
        return Verdict::Rejected(format!("unsupported version {}", cert.version));
    }
    if cert.subject.base().is_zero() {
        return Verdict::Rejected("base must be positive".into());
    }
    match (&cert.claim, &cert.witness) {
        (Claim::ZeroTerm, Witness::Index(n)) => match cert.subject.recurrence().term(*n) {
            Some(v) if v.is_zero() => Verdict::Accepted,
            Some(v) => Verdict::Rejected(format!("term {n} is {}, not zero", render_rat(&v))),
            None => Verdict::Rejected(format!("term {n} is undefined")),
        },
        (Claim::NoZeroTerm, Witness::PrimeModulus { m, .. }) => {
            if !is_prime_u64(*m) {
                return Verdict::Rejected(format!("modulus {m} is not prime"));
            }
            check_modulus(cert, *m)
        }
        (Claim::NoZeroTerm, Witness::CompositeModulus { m, factors }) => {
            if let Some((p, _)) = factors.iter().find(|(p, _)| !is_prime_u64(*p)) {
                return Verdict::Rejected(format!("factor {p} is not prime"));
            }
            let product = factors
                .iter()
                .try_fold(1u64, |acc, (p, _)| acc.checked_mul(*p));
            if product != Some(*m) {
                return Verdict::Rejected(format!("factors do not multiply to {m}"));
            }
            check_modulus(cert, *m)
        }
        _ => Verdict::Rejected("claim and witness kinds do not match".into()),
    }
}

/// Convenience for quadratic data given as rationals.
pub fn period_scan_quadratic(
    a1: &Rat,
    a2: &Rat,
    u0: &Rat,
    u1: &Rat,
    base: &BigUint,
    m: u64,
) -> Result<ScanReport, ScanError> {
    let rec = LinearRecurrence::new(vec![a1.clone(), a2.clone()], vec![u0.clone(), u1.clone()]);
    period_scan(&rec, base, m)
}

/// Value of a rational mod `m`, for spot checks against scans.
pub fn residue(x: &Rat, m: u64) -> Option<u64> {
    rat_mod(x, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::Subject;
    use crate::exact_arith::parse_rat;
    use std::collections::BTreeMap;

    fn q(s: &str) -> Rat {
        parse_rat(s).unwrap()
    }

    fn lin(a1: &str, a2: &str, u0: &str, u1: &str) -> LinearRecurrence {
        LinearRecurrence::new(vec![q(a1), q(a2)], vec![q(u0), q(u1)])
    }

    fn two() -> BigUint {
        BigUint::from(2u8)
    }

    #[test]
    fn scan_examples() {
        let r = period_scan(&lin("3", "-2", "-2", "-1"), &two(), 7).unwrap();
        assert_eq!((r.period, r.residues_sample.clone()), (3, vec![5, 6, 1]));
        assert!(r.is_zero_free());
        let r = period_scan(&lin("4", "-4", "1", "6"), &two(), 5).unwrap();
        assert!(r.zero_indices_in_period.contains(&2));
        let r = period_scan(&lin("3", "-2", "-2", "-1"), &two(), 31).unwrap();
        assert_eq!(r.period, 5);
        assert_eq!(r.residues_sample, vec![29, 30, 1, 5, 13]);
        assert!(r.is_zero_free());
    }

    #[test]
    fn scan_preconditions() {
        let rec = lin("3", "-2", "-2", "-1");
        assert!(matches!(
            period_scan(&rec, &two(), 2),
            Err(ScanError::BadModulus { .. })
        ));
        assert!(matches!(
            period_scan(&rec, &BigUint::from(3u8), 3),
            Err(ScanError::BadModulus { .. })
        ));
        assert!(matches!(
            period_scan(&lin("3", "-2", "1/5", "1"), &BigUint::from(10u8), 7)
                .map(|r| r.modulus),
            Ok(7)
        ));
        assert!(matches!(
            period_scan(&lin("3", "-2", "1/7", "1"), &BigUint::from(1u8), 7),
            Err(ScanError::BadModulus { .. })
        ));
        assert!(matches!(
            period_scan(&rec, &two(), 1),
            Err(ScanError::BadModulus { .. })
        ));
    }

    fn quadratic_subject(a1: &str, a2: &str, u0: &str, u1: &str) -> Subject {
        Subject::Quadratic {
            a1: q(a1),
            a2: q(a2),
            u0: q(u0),
            u1: q(u1),
            base: two(),
        }
    }

    #[test]
    fn verify_examples() {
        let subject = quadratic_subject("3", "-2", "-2", "-1");
        let scan = period_scan(&subject.recurrence(), &two(), 31).unwrap();
        let witness = |m| Witness::PrimeModulus {
            m,
            n_used: Some(3),
            symbol_exponents: BTreeMap::new(),
        };
        let good = Certificate::no_zero_term(subject.clone(), witness(31), scan.clone());
        assert_eq!(verify_certificate(&good), Verdict::Accepted);

        let mut tampered = good.clone();
        tampered.witness = witness(5);
        match verify_certificate(&tampered) {
            Verdict::Rejected(reason) => assert!(reason.contains("index 3"), "{reason}"),
            v => panic!("{v:?}"),
        }
        let zero = Certificate::zero_term(quadratic_subject("3", "-2", "-7", "-6"), 3);
        assert_eq!(verify_certificate(&zero), Verdict::Accepted);
        let wrong = Certificate::zero_term(quadratic_subject("3", "-2", "-7", "-6"), 2);
        assert!(!verify_certificate(&wrong).is_accepted());
    }

    #[test]
    fn composite_and_mismatched_witnesses() {
        let subject = quadratic_subject("3", "-2", "-2", "-1");
        // 7 * 31: both zero-free, so the product is too
        let scan = period_scan(&subject.recurrence(), &two(), 217).unwrap();
        let cert = Certificate::no_zero_term(
            subject.clone(),
            Witness::CompositeModulus {
                m: 217,
                factors: vec![(7, crate::certificate::Parity::Even), (31, crate::certificate::Parity::Odd)],
            },
            scan.clone(),
        );
        assert_eq!(verify_certificate(&cert), Verdict::Accepted);
        let mut bad = cert.clone();
        bad.witness = Witness::CompositeModulus {
            m: 217,
            factors: vec![(7, crate::certificate::Parity::Even)],
        };
        assert!(!verify_certificate(&bad).is_accepted());
        let mut mixed = cert;
        mixed.claim = Claim::ZeroTerm;
        assert!(!verify_certificate(&mixed).is_accepted());
    }
}
