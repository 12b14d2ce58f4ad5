//! Which hypothesis of the main theorem applies to a ratio pair `(B, C)`.
//!
//! The classification is driven entirely by p-adic valuation vectors over
//! the support set `T`: a multiplicative relation `B^k C^l = ±1` exists
//! exactly when the two vectors are linearly dependent.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exact_arith::{factorize, rat_pow, render_rat, valuation_int, Rat};
use crate::recurrence::{ClosedForm, RatioPair, ValidatedRecurrence};

/// Sorted distinct primes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SupportSet {
    pub primes: Vec<BigUint>,
}

impl SupportSet {
    pub fn from_primes(mut primes: Vec<BigUint>) -> Self {
        primes.sort();
        primes.dedup();
        Self { primes }
    }

    /// Primes dividing a numerator or denominator of any of the values,
    /// plus the primes of `base`.
    pub fn of_values<'a>(base: &BigUint, values: impl IntoIterator<Item = &'a Rat>) -> Self {
        let mut primes = Vec::new();
        let mut add = |n: &BigInt| {
            if !n.is_zero() {
                primes.extend(factorize(n).expect("nonzero").primes().cloned());
            }
        };
        add(&BigInt::from(base.clone()));
        for v in values {
            add(v.numer());
            add(v.denom());
        }
        Self::from_primes(primes)
    }

    /// Support of a bare ratio pair (used when no recurrence is given).
    pub fn of_pair(pair: &RatioPair) -> Self {
        Self::of_values(&BigUint::one(), [&pair.b, &pair.c])
    }

    pub fn contains(&self, p: &BigUint) -> bool {
        self.primes.binary_search(p).is_ok()
    }

    pub fn contains_u64(&self, p: u64) -> bool {
        self.contains(&BigUint::from(p))
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

impl fmt::Display for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.primes.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub fn support_set(rec: &ValidatedRecurrence) -> SupportSet {
    support_of_closed(&rec.base, &rec.closed)
}

pub fn support_of_closed(base: &BigUint, cf: &ClosedForm) -> SupportSet {
    SupportSet::of_values(base, [&cf.b1, &cf.b2, &cf.c1, &cf.c2])
}

fn rat_valuation(x: &Rat, p: &BigUint) -> i64 {
    valuation_int(x.numer(), p) as i64 - valuation_int(x.denom(), p) as i64
}

/// Two rows of valuations, `v_p(C)` on top and `v_p(B)` below, one column
/// per prime of `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValMatrix {
    pub primes: Vec<BigUint>,
    pub c_row: Vec<i64>,
    pub b_row: Vec<i64>,
}

impl ValMatrix {
    pub fn new(pair: &RatioPair, support: &SupportSet) -> Self {
        Self {
            primes: support.primes.clone(),
            c_row: support.primes.iter().map(|p| rat_valuation(&pair.c, p)).collect(),
            b_row: support.primes.iter().map(|p| rat_valuation(&pair.b, p)).collect(),
        }
    }

    pub fn column(&self, p: &BigUint) -> Option<(i64, i64)> {
        let i = self.primes.iter().position(|q| q == p)?;
        Some((self.c_row[i], self.b_row[i]))
    }

    /// `v_p(C) v_q(B) - v_q(C) v_p(B)`.
    pub fn minor(&self, p: &BigUint, q: &BigUint) -> Option<i64> {
        let (cp, bp) = self.column(p)?;
        let (cq, bq) = self.column(q)?;
        Some(cp * bq - cq * bp)
    }

    pub fn top_row_zero(&self) -> bool {
        self.c_row.iter().all(|&v| v == 0)
    }
}

/// `B^k C^l = sign` with `k > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Relation {
    pub k: i64,
    pub l: i64,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pivot {
    /// `v_p(C) = 0` everywhere and `v_p(B) != 0` at `p`.
    TopRowZero { p: BigUint },
    /// Columns `p < q` with nonzero determinant `d`.
    Rank2 { p: BigUint, q: BigUint, d: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CaseLabel {
    /// `C^m = B`, so `u_m = 0`.
    Case1 { m: i64 },
    /// `(C, B) = (1, -1)`.
    Case2,
    /// No relation `B^k C^l = ±1` with `k != 0`.
    Case3(Pivot),
    /// A relation exists and neither of the other cases holds.
    NotCovered(Relation),
}

impl fmt::Display for Pivot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pivot::TopRowZero { p } => write!(f, "TopRowZero(p'={p})"),
            Pivot::Rank2 { p, q, d } => write!(f, "Rank2(p'={p}, q'={q}, d={d})"),
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseLabel::Case1 { m } => write!(f, "Case1(m={m})"),
            CaseLabel::Case2 => write!(f, "Case2"),
            CaseLabel::Case3(p) => write!(f, "Case3 {p}"),
            CaseLabel::NotCovered(r) => {
                write!(f, "NotCovered(k={}, l={}, sign={})", r.k, r.l, r.sign)
            }
        }
    }
}

/// Some `m` with `C^m = B`.
///
/// When `|C| != 1` the exponent is pinned by any prime with `v_p(C) != 0`.
/// For `C = ±1` the smallest nonnegative solution is returned.
pub fn zero_index(pair: &RatioPair) -> Option<i64> {
    let RatioPair { b, c } = pair;
    if b.is_zero() || c.is_zero() {
        return None;
    }
    let one = Rat::one();
    if c.abs() == one {
        return if *b == one {
            Some(0)
        } else if *b == -one.clone() && c.is_negative() {
            Some(1)
        } else {
            None
        };
    }
    let support = SupportSet::of_values(&BigUint::one(), [c]);
    let p = support
        .primes
        .iter()
        .find(|p| rat_valuation(c, p) != 0)
        .expect("|C| != 1 has a prime with nonzero valuation");
    let (vb, vc) = (rat_valuation(b, p), rat_valuation(c, p));
    if vb % vc != 0 {
        return None;
    }
    let m = vb / vc;
    (rat_pow(c, m) == *b).then_some(m)
}

fn sign_of(x: &Rat) -> Option<i8> {
    if x.is_one() {
        Some(1)
    } else if *x == -Rat::one() {
        Some(-1)
    } else {
        None
    }
}

/// A relation `B^k C^l = ±1` with `k != 0`, if one exists.
pub fn find_relation(pair: &RatioPair, support: &SupportSet) -> Option<Relation> {
    // widen T with the primes of B and C so a short support cannot hide a
    // valuation
    let mut primes = support.primes.clone();
    primes.extend(SupportSet::of_pair(pair).primes);
    let wide = SupportSet::from_primes(primes);
    let m = ValMatrix::new(pair, &wide);
    if m.b_row.iter().all(|&v| v == 0) {
        let sign = sign_of(&pair.b).expect("B with zero valuation vector is ±1");
        return Some(Relation { k: 1, l: 0, sign });
    }
    let i = m.c_row.iter().position(|&v| v != 0)?;
    let (mut k, mut l) = (m.c_row[i], -m.b_row[i]);
    let g = k.gcd(&l);
    k /= g;
    l /= g;
    if k < 0 {
        k = -k;
        l = -l;
    }
    let dependent = m
        .b_row
        .iter()
        .zip(&m.c_row)
        .all(|(&vb, &vc)| k * vb + l * vc == 0);
    if !dependent {
        return None;
    }
    let value = rat_pow(&pair.b, k) * rat_pow(&pair.c, l);
    let sign = sign_of(&value).expect("dependent valuation vectors give ±1");
    Some(Relation { k, l, sign })
}

/// Assigns exactly one label to every nonzero pair, with precedence
/// Case1, Case2, then Case3 or NotCovered.
pub fn classify(pair: &RatioPair, support: &SupportSet) -> CaseLabel {
    if let Some(m) = zero_index(pair) {
        return CaseLabel::Case1 { m };
    }
    if pair.c.is_one() && pair.b == -Rat::one() {
        return CaseLabel::Case2;
    }
    if let Some(rel) = find_relation(pair, support) {
        return CaseLabel::NotCovered(rel);
    }
    let m = ValMatrix::new(pair, support);
    if m.top_row_zero() {
        let i = m
            .b_row
            .iter()
            .position(|&v| v != 0)
            .expect("no relation means B has a nonzero valuation");
        return CaseLabel::Case3(Pivot::TopRowZero {
            p: m.primes[i].clone(),
        });
    }
    for (i, p) in m.primes.iter().enumerate() {
        for q in &m.primes[i + 1..] {
            let d = m.minor(p, q).unwrap();
            if d != 0 {
                return CaseLabel::Case3(Pivot::Rank2 {
                    p: p.clone(),
                    q: q.clone(),
                    d,
                });
            }
        }
    }
    unreachable!("independent valuation rows have a nonzero 2x2 minor")
}

impl Relation {
    pub fn render(&self) -> String {
        format!("({}, {}, {})", self.k, self.l, self.sign)
    }
}

/// Human-readable pair, e.g. `B=3, C=2`.
pub fn render_pair(pair: &RatioPair) -> String {
    format!("B={}, C={}", render_rat(&pair.b), render_rat(&pair.c))
}
