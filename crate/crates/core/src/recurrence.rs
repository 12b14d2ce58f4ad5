//! Order-2 recurrences with rational roots, their closed forms, and the
//! generic order-d representation the verifier iterates.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact_arith::{factorize, rat_pow, rational_sqrt, Rat};

/// Raw user data for `u_{n+2} = a1 u_{n+1} + a2 u_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceInput {
    pub a1: Rat,
    pub a2: Rat,
    pub u0: Rat,
    pub u1: Rat,
    /// Denominator base; inferred when absent.
    pub base: Option<BigUint>,
}

impl RecurrenceInput {
    pub fn new(a1: Rat, a2: Rat, u0: Rat, u1: Rat) -> Self {
        Self {
            a1,
            a2,
            u0,
            u1,
            base: None,
        }
    }

    pub fn with_base(mut self, base: BigUint) -> Self {
        self.base = Some(base);
        self
    }
}

/// `u_n = b1 c1^n + b2 c2^n` with `|c1| > |c2|`, or `c1 = -c2 > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedForm {
    pub b1: Rat,
    pub b2: Rat,
    pub c1: Rat,
    pub c2: Rat,
}

impl ClosedForm {
    /// Builds a closed form, swapping the two exponentials if needed so the
    /// root ordering convention holds.
    pub fn ordered(b1: Rat, b2: Rat, c1: Rat, c2: Rat) -> Self {
        if root_precedes(&c1, &c2) {
            Self { b1, b2, c1, c2 }
        } else {
            Self {
                b1: b2,
                b2: b1,
                c1: c2,
                c2: c1,
            }
        }
    }

    pub fn term(&self, n: i64) -> Rat {
        &self.b1 * rat_pow(&self.c1, n) + &self.b2 * rat_pow(&self.c2, n)
    }

    /// `(a1, a2)` with `x^2 - a1 x - a2 = (x - c1)(x - c2)`.
    pub fn coefficients(&self) -> (Rat, Rat) {
        (&self.c1 + &self.c2, -(&self.c1 * &self.c2))
    }

    pub fn ratio_pair(&self) -> RatioPair {
        ratio_pair(self)
    }
}

/// `c1` comes first when `|c1| > |c2|`, ties broken by `c1 > 0`.
fn root_precedes(c1: &Rat, c2: &Rat) -> bool {
    let (m1, m2) = (c1.abs(), c2.abs());
    m1 > m2 || (m1 == m2 && c1.is_positive())
}

/// The pair `(B, C) = (-b2/b1, c1/c2)`; `u_n = 0` exactly when `C^n = B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioPair {
    pub b: Rat,
    pub c: Rat,
}

impl RatioPair {
    pub fn new(b: Rat, c: Rat) -> Self {
        Self { b, c }
    }
}

pub fn ratio_pair(cf: &ClosedForm) -> RatioPair {
    RatioPair {
        b: -(&cf.b2 / &cf.b1),
        c: &cf.c1 / &cf.c2,
    }
}

/// Data of a first-order sequence `u_n = u0 a1^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Order1 {
    pub a1: Rat,
    pub u0: Rat,
    pub base: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("a2 must be nonzero")]
    ZeroA2,
    #[error("repeated root: a1^2 + 4 a2 = 0 (see u_n = (2n+1) 2^n, which has no zero term yet vanishes modulo every odd m)")]
    RepeatedRoot,
    #[error("characteristic roots are not rational (discriminant {0})")]
    IrrationalRoots(String),
    #[error("one exponential vanishes; the sequence is first order")]
    DegenerateToOrder1(Order1),
    #[error("prime {0} divides an input denominator but not the base")]
    DenominatorOutsideBase(BigUint),
    #[error("base must be a positive integer")]
    BadBase,
    #[error("roots must be nonzero and distinct")]
    DegenerateRoots,
}

/// A recurrence that satisfies every precondition of the main theorem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedRecurrence {
    pub a1: Rat,
    pub a2: Rat,
    pub u0: Rat,
    pub u1: Rat,
    pub base: BigUint,
    pub closed: ClosedForm,
}

impl ValidatedRecurrence {
    pub fn ratio_pair(&self) -> RatioPair {
        ratio_pair(&self.closed)
    }

    pub fn linear(&self) -> LinearRecurrence {
        LinearRecurrence::new(
            vec![self.a1.clone(), self.a2.clone()],
            vec![self.u0.clone(), self.u1.clone()],
        )
    }

    /// Builds the recurrence satisfied by a closed form with the given base.
    pub fn from_closed_form(closed: ClosedForm, base: BigUint) -> Self {
        let (a1, a2) = closed.coefficients();
        Self {
            a1,
            a2,
            u0: closed.term(0),
            u1: closed.term(1),
            base,
            closed,
        }
    }
}

fn distinct_primes(x: &BigInt, out: &mut Vec<BigUint>) {
    if x.is_zero() {
        return;
    }
    let f = factorize(x).expect("nonzero");
    out.extend(f.primes().cloned());
}

/// Radical of every prime that can appear in a denominator of the
/// two-sided sequence: input denominators plus the numerator of `a2`,
/// which is divided out when stepping backwards.
pub fn infer_base(a1: &Rat, a2: &Rat, u0: &Rat, u1: &Rat) -> BigUint {
    let mut primes = Vec::new();
    for x in [a1, a2, u0, u1] {
        distinct_primes(x.denom(), &mut primes);
    }
    distinct_primes(a2.numer(), &mut primes);
    primes.sort();
    primes.dedup();
    primes.into_iter().product()
}

/// Roots of `x^2 - a1 x - a2` with the ordering convention applied, or the
/// reason they are unusable.
fn rational_roots(a1: &Rat, a2: &Rat) -> Result<(Rat, Rat), ValidationError> {
    if a2.is_zero() {
        return Err(ValidationError::ZeroA2);
    }
    let disc = a1 * a1 + Rat::from_integer(4.into()) * a2;
    if disc.is_zero() {
        return Err(ValidationError::RepeatedRoot);
    }
    let root = rational_sqrt(&disc)
        .ok_or_else(|| ValidationError::IrrationalRoots(crate::exact_arith::render_rat(&disc)))?;
    let two = Rat::from_integer(2.into());
    let (r1, r2) = ((a1 + &root) / &two, (a1 - &root) / &two);
    Ok(if root_precedes(&r1, &r2) {
        (r1, r2)
    } else {
        (r2, r1)
    })
}

pub fn to_closed_form(a1: &Rat, a2: &Rat, u0: &Rat, u1: &Rat) -> Result<ClosedForm, ValidationError> {
    let (c1, c2) = rational_roots(a1, a2)?;
    let b1 = (u1 - &c2 * u0) / (&c1 - &c2);
    let b2 = u0 - &b1;
    Ok(ClosedForm { b1, b2, c1, c2 })
}

pub fn validate(input: &RecurrenceInput) -> Result<ValidatedRecurrence, ValidationError> {
    let RecurrenceInput { a1, a2, u0, u1, .. } = input;
    let closed = to_closed_form(a1, a2, u0, u1)?;
    let base = match &input.base {
        Some(b) if b.is_zero() => return Err(ValidationError::BadBase),
        Some(b) => {
            let mut primes = Vec::new();
            for x in [a1, a2, u0, u1] {
                distinct_primes(x.denom(), &mut primes);
            }
            if let Some(p) = primes.into_iter().find(|p| !(b % p).is_zero()) {
                return Err(ValidationError::DenominatorOutsideBase(p));
            }
            b.clone()
        }
        None => infer_base(a1, a2, u0, u1),
    };
    if closed.b1.is_zero() || closed.b2.is_zero() {
        let (a1, u0) = if closed.b1.is_zero() && !closed.b2.is_zero() {
            (closed.c2.clone(), closed.b2.clone())
        } else {
            (closed.c1.clone(), closed.b1.clone())
        };
        return Err(ValidationError::DegenerateToOrder1(Order1 { a1, u0, base }));
    }
    Ok(ValidatedRecurrence {
        a1: a1.clone(),
        a2: a2.clone(),
        u0: u0.clone(),
        u1: u1.clone(),
        base,
        closed,
    })
}

pub fn term(rec: &ValidatedRecurrence, n: i64) -> Rat {
    rec.closed.term(n)
}

/// Coefficients `(a1, …, ad)` with `prod (x - r) = x^d - a1 x^{d-1} - … - ad`,
/// obtained by expanding the product.
pub fn coeffs_from_roots(roots: &[Rat]) -> Vec<Rat> {
    // monic polynomial, highest degree first
    let mut poly = vec![Rat::one()];
    for r in roots {
        let mut next = poly.clone();
        next.push(Rat::zero());
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] -= c * r;
        }
        poly = next;
    }
    poly.into_iter().skip(1).map(|c| -c).collect()
}

/// `u_{n+d} = coeffs[0] u_{n+d-1} + … + coeffs[d-1] u_n` with `init = (u_0, …, u_{d-1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRecurrence {
    pub coeffs: Vec<Rat>,
    pub init: Vec<Rat>,
}

impl LinearRecurrence {
    pub fn new(coeffs: Vec<Rat>, init: Vec<Rat>) -> Self {
        assert_eq!(coeffs.len(), init.len(), "order mismatch");
        assert!(!coeffs.is_empty(), "order must be positive");
        Self { coeffs, init }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Exact term by stepping from the initial window; `None` for negative
    /// indices when the trailing coefficient is zero.
    pub fn term(&self, n: i64) -> Option<Rat> {
        let d = self.order();
        let mut window: Vec<Rat> = self.init.clone();
        if n >= 0 {
            let n = n as usize;
            if n < d {
                return Some(window[n].clone());
            }
            for _ in d..=n {
                let next = self.step_forward(&window);
                window.remove(0);
                window.push(next);
            }
            return window.last().cloned();
        }
        let last = &self.coeffs[d - 1];
        if last.is_zero() {
            return None;
        }
        for _ in 0..n.unsigned_abs() {
            // u_n = (u_{n+d} - a1 u_{n+d-1} - … - a_{d-1} u_{n+1}) / a_d
            let mut acc = window[d - 1].clone();
            for i in 0..d - 1 {
                acc -= &self.coeffs[i] * &window[d - 2 - i];
            }
            window.pop();
            window.insert(0, acc / last);
        }
        Some(window[0].clone())
    }

    fn step_forward(&self, window: &[Rat]) -> Rat {
        let d = self.order();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| a * &window[d - 1 - i])
            .sum()
    }
}
