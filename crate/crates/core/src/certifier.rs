//! Builds certificates.
//!
//! For a pair `(B, C)` with no relation `B^k C^l = ±1`, an odd prime `n` and
//! target symbol exponents at the pivot primes are chosen so that any prime
//! `r ≡ 1 (mod n)` realizing them has `(C/r)_n = 1` and `(B/r)_n ≠ 1`; then
//! `C^k ≡ B (mod r)` has no solution and `r` is a certificate. Every prime
//! found this way is rechecked by a direct period scan before it is emitted.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::certificate::{Certificate, Subject, Witness};
use crate::classifier::{classify, support_set, CaseLabel, Pivot, Relation, SupportSet, ValMatrix};
use crate::exact_arith::{is_prime_u64, mod_pow, primes_in_class, Rat};
use crate::recurrence::{
    validate, LinearRecurrence, Order1, RatioPair, RecurrenceInput, ValidatedRecurrence,
    ValidationError,
};
use crate::residue_symbol::{choose_modulus, targets_for, SymbolContext, SymbolError, SymbolTargets};
use crate::verifier::{period_scan, ScanReport};

pub const DEFAULT_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Only instances covered by the main theorem.
    Theorem,
    /// Direct scan for the smallest working prime, whatever the case.
    Fallback,
    /// Theorem route when it applies, direct scan otherwise.
    #[default]
    Auto,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Theorem => "theorem",
            Mode::Fallback => "fallback",
            Mode::Auto => "auto",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "theorem" => Ok(Mode::Theorem),
            "fallback" => Ok(Mode::Fallback),
            "auto" => Ok(Mode::Auto),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertifyConfig {
    /// Largest candidate prime tried.
    pub bound: u64,
    pub mode: Mode,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            bound: DEFAULT_BOUND,
            mode: Mode::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("not covered by the theorem: B^{} C^{} = {}, relation (k, l, sign) = {}", .0.k, .0.l, .0.sign, .0.render())]
    NotCoveredByTheorem(Relation),
    #[error("no certificate prime up to {0}")]
    SearchExhausted(u64),
    #[error("invalid input: {0}")]
    Invalid(#[from] ValidationError),
    #[error("symbol computation failed: {0}")]
    Symbol(#[from] SymbolError),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// Everything the prime search needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchPlan {
    pub support: SupportSet,
    pub matrix: ValMatrix,
    pub pivot: Pivot,
    /// Odd prime degree of the residue symbols.
    pub n: u64,
    pub targets: SymbolTargets,
    pub bound: u64,
}

pub fn build_plan(
    label: &CaseLabel,
    pair: &RatioPair,
    support: &SupportSet,
    bound: u64,
) -> Option<SearchPlan> {
    let CaseLabel::Case3(pivot) = label else {
        return None;
    };
    let matrix = ValMatrix::new(pair, support);
    let n = choose_modulus(pivot, &matrix);
    let targets = targets_for(pivot, &matrix, n).expect("n is coprime to the pivot determinant");
    Some(SearchPlan {
        support: support.clone(),
        matrix,
        pivot: pivot.clone(),
        n,
        targets,
        bound,
    })
}

/// Symbol exponents of every prime of `T` at `r`.
pub fn support_exponents(
    plan: &SearchPlan,
    ctx: &SymbolContext,
) -> Result<BTreeMap<BigUint, u64>, SymbolError> {
    plan.support
        .primes
        .iter()
        .map(|p| Ok((p.clone(), ctx.exponent_of_int(&BigInt::from(p.clone()))?)))
        .collect()
}

/// Whether the exponents realize the plan, either exactly (`t = 1`) or up to
/// a nonzero scalar `t`.
fn realizes(plan: &SearchPlan, exps: &BTreeMap<BigUint, u64>, exact: bool) -> bool {
    let n = plan.n;
    let pivots = pivot_primes(plan);
    let wanted = match plan.targets {
        SymbolTargets::TopRowZero { a } => vec![a],
        SymbolTargets::Rank2 { a, b } => vec![a, b],
    };
    let others_trivial = exps
        .iter()
        .filter(|(p, _)| !pivots.contains(p))
        .all(|(_, &e)| e == 0);
    if !others_trivial {
        return false;
    }
    let got: Vec<u64> = pivots.iter().map(|p| exps[*p]).collect();
    if exact {
        return got == wanted;
    }
    // got == t * wanted for some t in 1..n
    (1..n).any(|t| got.iter().zip(&wanted).all(|(&g, &w)| g == t * w % n))
}

/// Candidate primes `r ≡ 1 (mod n)` outside `T`, up to the bound.
fn candidates(plan: &SearchPlan, limit: u64) -> impl Iterator<Item = u64> + '_ {
    primes_in_class(1, plan.n, 1)
        .expect("1 is a unit")
        .take_while(move |&r| r <= limit)
        .filter(move |&r| r != plan.n && !plan.support.contains_u64(r))
}

fn pivot_primes(plan: &SearchPlan) -> Vec<&BigUint> {
    match &plan.pivot {
        Pivot::TopRowZero { p } => vec![p],
        Pivot::Rank2 { p, q, .. } => vec![p, q],
    }
}

/// Cheap necessary condition: every non-pivot prime of `T` is an n-th power
/// residue mod `r`. Avoids building a primitive root for most candidates.
fn nonpivots_trivial(plan: &SearchPlan, pivots: &[&BigUint], r: u64) -> bool {
    let e = (r - 1) / plan.n;
    plan.support
        .primes
        .iter()
        .filter(|p| !pivots.contains(p))
        .all(|p| mod_pow((p % r).to_u64().expect("below r"), e, r) == 1)
}

/// Smallest prime `r` whose symbols at `T` realize the plan up to a
/// nonzero scalar; returns it with the exponents observed.
pub fn search_certificate_prime(
    plan: &SearchPlan,
) -> Result<(u64, BTreeMap<BigUint, u64>), CertifyError> {
    let pivots = pivot_primes(plan);
    for r in candidates(plan, plan.bound) {
        if !nonpivots_trivial(plan, &pivots, r) {
            continue;
        }
        let ctx = SymbolContext::new(plan.n, r)?;
        let exps = support_exponents(plan, &ctx)?;
        if realizes(plan, &exps, false) {
            return Ok((r, exps));
        }
    }
    Err(CertifyError::SearchExhausted(plan.bound))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DensityCount {
    /// Primes `r <= X` realizing the exact targets.
    pub count: u64,
    /// Primes `r <= X` with `r ≡ 1 (mod n)`, `r` outside `T ∪ {n}`.
    pub eligible: u64,
}

impl DensityCount {
    pub fn fraction(&self) -> Option<(u64, u64)> {
        (self.eligible > 0).then_some((self.count, self.eligible))
    }
}

/// Counts primes up to `x` realizing the plan's targets exactly (`t = 1`).
pub fn density_count(plan: &SearchPlan, x: u64) -> Result<DensityCount, CertifyError> {
    let mut out = DensityCount {
        count: 0,
        eligible: 0,
    };
    let pivots = pivot_primes(plan);
    for r in candidates(plan, x) {
        out.eligible += 1;
        if !nonpivots_trivial(plan, &pivots, r) {
            continue;
        }
        let ctx = SymbolContext::new(plan.n, r)?;
        if realizes(plan, &support_exponents(plan, &ctx)?, true) {
            out.count += 1;
        }
    }
    Ok(out)
}

/// Smallest prime `m <= bound` outside `T` whose period scan has no zero.
pub fn fallback_scan_linear(
    rec: &LinearRecurrence,
    base: &BigUint,
    support: &SupportSet,
    bound: u64,
) -> Result<(u64, ScanReport), CertifyError> {
    for m in primes_in_class(1, 1, 0).expect("trivial class") {
        if m > bound {
            break;
        }
        if support.contains_u64(m) {
            continue;
        }
        // a modulus failing the coprimality preconditions is skipped
        if let Ok(report) = period_scan(rec, base, m) {
            if report.is_zero_free() {
                return Ok((m, report));
            }
        }
    }
    Err(CertifyError::SearchExhausted(bound))
}

pub fn fallback_scan(rec: &ValidatedRecurrence, bound: u64) -> Result<u64, CertifyError> {
    fallback_scan_linear(&rec.linear(), &rec.base, &support_set(rec), bound).map(|(m, _)| m)
}

pub fn quadratic_subject(rec: &ValidatedRecurrence) -> Subject {
    Subject::Quadratic {
        a1: rec.a1.clone(),
        a2: rec.a2.clone(),
        u0: rec.u0.clone(),
        u1: rec.u1.clone(),
        base: rec.base.clone(),
    }
}

/// How a no-zero-term prime was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeWitness {
    pub m: u64,
    pub n_used: Option<u64>,
    pub symbol_exponents: BTreeMap<BigUint, u64>,
    pub scan: ScanReport,
    pub method: &'static str,
}

impl PrimeWitness {
    pub fn witness(&self) -> Witness {
        Witness::PrimeModulus {
            m: self.m,
            n_used: self.n_used,
            symbol_exponents: self.symbol_exponents.clone(),
        }
    }
}

/// Outcome of certifying a validated quadratic, before it is wrapped into
/// a certificate with a subject.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuadraticOutcome {
    Zero { index: i64 },
    Prime(PrimeWitness),
}

/// Runs classification and the selected route for one quadratic.
pub fn certify_outcome(
    rec: &ValidatedRecurrence,
    config: &CertifyConfig,
) -> Result<(CaseLabel, QuadraticOutcome), CertifyError> {
    let pair = rec.ratio_pair();
    let support = support_set(rec);
    let label = classify(&pair, &support);
    let direct = |label: CaseLabel, method: &'static str| -> Result<(CaseLabel, QuadraticOutcome), CertifyError> {
        let (m, scan) = fallback_scan_linear(&rec.linear(), &rec.base, &support, config.bound)?;
        Ok((
            label,
            QuadraticOutcome::Prime(PrimeWitness {
                m,
                n_used: None,
                symbol_exponents: BTreeMap::new(),
                scan,
                method,
            }),
        ))
    };
    match &label {
        CaseLabel::Case1 { m } => {
            if !rec.closed.term(*m).is_zero() {
                return Err(CertifyError::Internal(format!("u_{m} is not zero")));
            }
            Ok((label.clone(), QuadraticOutcome::Zero { index: *m }))
        }
        CaseLabel::NotCovered(rel) if config.mode == Mode::Theorem => {
            Err(CertifyError::NotCoveredByTheorem(*rel))
        }
        CaseLabel::NotCovered(_) | CaseLabel::Case2 => direct(label.clone(), "direct-scan"),
        CaseLabel::Case3(_) if config.mode == Mode::Fallback => direct(label.clone(), "direct-scan"),
        CaseLabel::Case3(_) => {
            let plan = build_plan(&label, &pair, &support, config.bound).expect("Case3");
            let (r, exps) = match search_certificate_prime(&plan) {
                Ok(found) => found,
                // the symbol construction needs every non-pivot symbol trivial,
                // which gets rare as |T| grows; any zero-free prime will do
                Err(CertifyError::SearchExhausted(_)) if config.mode == Mode::Auto => {
                    return direct(label.clone(), "direct-scan-after-exhausted-search");
                }
                Err(e) => return Err(e),
            };
            let scan = period_scan(&rec.linear(), &rec.base, r)
                .map_err(|e| CertifyError::Internal(format!("scan of symbol prime {r}: {e}")))?;
            if !scan.is_zero_free() {
                return Err(CertifyError::Internal(format!(
                    "symbol search accepted {r} but the sequence vanishes there"
                )));
            }
            Ok((
                label.clone(),
                QuadraticOutcome::Prime(PrimeWitness {
                    m: r,
                    n_used: Some(plan.n),
                    symbol_exponents: exps,
                    scan,
                    method: "symbol-search",
                }),
            ))
        }
    }
}

fn case_metadata(cert: Certificate, label: &CaseLabel, support: &SupportSet) -> Certificate {
    let cert = cert
        .with_meta("case", label.to_string())
        .with_meta("support", support.to_string());
    match label {
        CaseLabel::NotCovered(rel) => cert.with_meta("relation", rel.render()),
        _ => cert,
    }
}

pub fn certify(rec: &ValidatedRecurrence, config: &CertifyConfig) -> Result<Certificate, CertifyError> {
    let (label, outcome) = certify_outcome(rec, config)?;
    let subject = quadratic_subject(rec);
    let cert = match outcome {
        QuadraticOutcome::Zero { index } => Certificate::zero_term(subject, index),
        QuadraticOutcome::Prime(w) => {
            Certificate::no_zero_term(subject, w.witness(), w.scan.clone()).with_meta("method", w.method)
        }
    };
    Ok(case_metadata(cert, &label, &support_set(rec)).with_meta("mode", config.mode.to_string()))
}

fn coprime_to(p: u64, x: &BigInt) -> bool {
    x.is_zero() || !(x % p).is_zero()
}

/// `u_n = u0 a1^n`: zero at index 0 when `u0 = 0`, otherwise the smallest
/// prime coprime to the base, `a1` and `u0` (all but finitely many work).
pub fn certify_order1(a1: &Rat, u0: &Rat, base: &BigUint) -> Result<Certificate, CertifyError> {
    let subject = Subject::Order1 {
        a1: a1.clone(),
        u0: u0.clone(),
        base: base.clone(),
    };
    if u0.is_zero() {
        return Ok(Certificate::zero_term(subject, 0).with_meta("case", "Order1"));
    }
    if a1.is_zero() {
        return Err(CertifyError::Internal("order-1 ratio must be nonzero".into()));
    }
    let base_int = BigInt::from(base.clone());
    let m = (2u64..)
        .filter(|&p| is_prime_u64(p))
        .find(|&p| {
            [&base_int, a1.numer(), a1.denom(), u0.numer(), u0.denom()]
                .into_iter()
                .all(|x| coprime_to(p, x))
        })
        .expect("finitely many primes excluded");
    let rec = subject.recurrence();
    let scan = period_scan(&rec, base, m).map_err(|e| CertifyError::Internal(e.to_string()))?;
    if !scan.is_zero_free() {
        return Err(CertifyError::Internal(format!("order-1 scan vanished mod {m}")));
    }
    let witness = Witness::PrimeModulus {
        m,
        n_used: None,
        symbol_exponents: BTreeMap::new(),
    };
    Ok(Certificate::no_zero_term(subject, witness, scan)
        .with_meta("case", "Order1")
        .with_meta("method", "coprime-prime"))
}

pub fn certify_order1_data(o: &Order1) -> Result<Certificate, CertifyError> {
    certify_order1(&o.a1, &o.u0, &o.base)
}

/// Validates and certifies raw input, rerouting first-order degenerations.
pub fn certify_input(input: &RecurrenceInput, config: &CertifyConfig) -> Result<Certificate, CertifyError> {
    match validate(input) {
        Ok(rec) => certify(&rec, config),
        Err(ValidationError::DegenerateToOrder1(o)) => {
            Ok(certify_order1_data(&o)?.with_meta("mode", config.mode.to_string()))
        }
        Err(e) => Err(e.into()),
    }
}

/// One-line summary of a plan.
pub fn describe_plan(plan: &SearchPlan) -> String {
    let targets = match plan.targets {
        SymbolTargets::TopRowZero { a } => format!("exponent {a} (any nonzero) at p'"),
        SymbolTargets::Rank2 { a, b } => format!("(a, b) = ({a}, {b})"),
    };
    format!(
        "T = {}, pivot {}, n = {}, targets {}",
        plan.support, plan.pivot, plan.n, targets
    )
}
