//! Acceptance criteria, one PASS/FAIL line each. Oracles here are written
//! independently of the library: exact iteration of the recurrence, naive
//! modular arithmetic, brute-force cube tables.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skolem_cli::certfile;
use skolem_core::certificate::{Certificate, Claim, Witness};
use skolem_core::certifier::{build_plan, certify, density_count, CertifyConfig, Mode};
use skolem_core::classifier::{classify, support_set, CaseLabel};
use skolem_core::cubic::{cubic_coeffs, split, certify_cubic, CubicFamily};
use skolem_core::exact_arith::{is_prime_u64, parse_rat, Rat};
use skolem_core::recurrence::{
    validate, ClosedForm, LinearRecurrence, RecurrenceInput, ValidatedRecurrence, ValidationError,
};
use skolem_core::residue_symbol::{symbol_exponent, SymbolContext};
use skolem_core::verifier::{period_scan, verify_certificate, Verdict};

type Outcome = Result<String, String>;

fn q(s: &str) -> Rat {
    parse_rat(s).unwrap()
}

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

fn quad(a1: &str, a2: &str, u0: &str, u1: &str) -> ValidatedRecurrence {
    validate(&RecurrenceInput::new(q(a1), q(a2), q(u0), q(u1))).unwrap()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Exact two-sided iteration of `u_{n+2} = a1 u_{n+1} + a2 u_n`.
fn iterate(a1: &Rat, a2: &Rat, u0: &Rat, u1: &Rat, n: i64) -> Rat {
    let (mut x, mut y) = (u0.clone(), u1.clone());
    if n >= 0 {
        for _ in 0..n {
            let z = a1 * &y + a2 * &x;
            x = std::mem::replace(&mut y, z);
        }
    } else {
        for _ in 0..-n {
            let w = (&y - a1 * &x) / a2;
            y = std::mem::replace(&mut x, w);
        }
    }
    x
}

fn inv_mod(a: u64, m: u64) -> Option<u64> {
    (1..m).find(|&x| (a as u128 * x as u128 % m as u128) == 1)
}

fn reduce(x: &Rat, m: u64) -> Option<u64> {
    let mm = BigInt::from(m);
    let num = ((x.numer() % &mm) + &mm) % &mm;
    let den = ((x.denom() % &mm) + &mm) % &mm;
    let (num, den): (u64, u64) = (num.try_into().unwrap(), den.try_into().unwrap());
    Some(num * inv_mod(den, m)? % m)
}

/// Independent zero-freeness check: iterate the reduced recurrence from the
/// initial window until it returns, reporting the first zero residue.
fn oracle_zero_free(rec: &LinearRecurrence, m: u64) -> Result<bool, String> {
    let coeffs: Vec<u64> = rec.coeffs.iter().map(|c| reduce(c, m)).collect::<Option<_>>().ok_or("coefficient not invertible")?;
    let init: Vec<u64> = rec.init.iter().map(|c| reduce(c, m)).collect::<Option<_>>().ok_or("initial term not invertible")?;
    let d = coeffs.len();
    let mut w = init.clone();
    for _ in 0..(m as u128).pow(d as u32) {
        if w[0] == 0 {
            return Ok(false);
        }
        let next = (0..d).fold(0u128, |acc, i| (acc + coeffs[i] as u128 * w[d - 1 - i] as u128) % m as u128) as u64;
        w.rotate_left(1);
        w[d - 1] = next;
        if w == init {
            return Ok(true);
        }
    }
    Err("no period found".into())
}

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut full = vec!["skolem"];
    full.extend_from_slice(args);
    let code = skolem_cli::run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn criterion_1(certs: &mut Vec<Certificate>) -> Outcome {
    let start = Instant::now();
    let config = CertifyConfig {
        mode: Mode::Theorem,
        ..Default::default()
    };
    let cert = certify(&quad("3", "-2", "-2", "-1"), &config).map_err(|e| e.to_string())?;
    let Witness::PrimeModulus { m, n_used, symbol_exponents } = &cert.witness else {
        return Err(format!("unexpected witness {:?}", cert.witness));
    };
    let exps: Vec<(String, u64)> = symbol_exponents.iter().map(|(p, e)| (p.to_string(), *e)).collect();
    ensure(*m == 31 && *n_used == Some(3), format!("m = {m}, n = {n_used:?}"))?;
    ensure(exps == [("2".to_string(), 0), ("3".to_string(), 1)], format!("exponents {exps:?}"))?;
    ensure(verify_certificate(&cert).is_accepted(), "verify rejected")?;
    let scan = cert.scan.clone().ok_or("no scan")?;
    ensure(
        scan.period == 5 && scan.residues_sample == [29, 30, 1, 5, 13],
        format!("scan {scan:?}"),
    )?;
    // oracle: 2^n - 3 mod 31 over one period of 2
    let oracle: Vec<u64> = (0..5).map(|n| ((1u64 << n) + 31 - 3) % 31).collect();
    ensure(oracle == scan.residues_sample, format!("oracle {oracle:?}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    certs.push(cert);
    Ok(format!("m = 31, n = 3, exponents (0, 1), period 5, {elapsed:.1?}"))
}

fn criterion_2(certs: &mut Vec<Certificate>) -> Outcome {
    let cert = certify(&quad("3", "-2", "-7", "-6"), &CertifyConfig::default()).map_err(|e| e.to_string())?;
    ensure(cert.claim == Claim::ZeroTerm && cert.witness == Witness::Index(3), format!("{:?}", cert.witness))?;
    ensure(verify_certificate(&cert).is_accepted(), "verify rejected")?;
    let zeros: Vec<i64> = (-50..=50)
        .filter(|&n| iterate(&q("3"), &q("-2"), &q("-7"), &q("-6"), n) == rat(0, 1))
        .collect();
    ensure(zeros == [3], format!("brute zeros {zeros:?}"))?;
    certs.push(cert);
    Ok("zero term at n = 3, brute scan over [-50, 50] finds only n = 3".into())
}

fn criterion_3() -> Outcome {
    let rec = LinearRecurrence::new(vec![q("4"), q("-4")], vec![q("1"), q("6")]);
    for m in [3u64, 5, 7] {
        let scan = period_scan(&rec, &2u32.into(), m).map_err(|e| e.to_string())?;
        let k = (m - 1) / 2;
        ensure(scan.zero_indices_in_period.contains(&k), format!("m = {m}: zeros {:?}", scan.zero_indices_in_period))?;
        // oracle: (2k + 1) 2^k
        ensure(((2 * k + 1) << k) % m == 0, format!("oracle disagrees at m = {m}"))?;
    }
    let err = validate(&RecurrenceInput::new(q("4"), q("-4"), q("1"), q("6")));
    ensure(err == Err(ValidationError::RepeatedRoot), format!("{err:?}"))?;
    Ok("zeros at (m-1)/2 for m = 3, 5, 7; RepeatedRoot on validation".into())
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut contexts = 0;
    for (n, limit) in [(3u64, 200u64), (5, 300)] {
        for r in (2..limit).filter(|&r| is_prime_u64(r) && r % n == 1) {
            let ctx = SymbolContext::new(n, r).map_err(|e| e.to_string())?;
            contexts += 1;
            let powers: BTreeSet<u64> = (1..r).map(|x| (0..n).fold(1, |acc, _| acc * x % r)).collect();
            let exps: Vec<u64> = (0..r)
                .map(|a| if a == 0 { 0 } else { symbol_exponent(&rat(a as i64, 1), &ctx).unwrap() })
                .collect();
            for a in 1..r {
                ensure((exps[a as usize] == 0) == powers.contains(&a), format!("n={n} r={r} a={a}"))?;
                for b in 1..r {
                    ensure(
                        exps[(a * b % r) as usize] == (exps[a as usize] + exps[b as usize]) % n,
                        format!("multiplicativity n={n} r={r} a={a} b={b}"),
                    )?;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"))?;
    Ok(format!("{contexts} contexts exhaustive, {elapsed:.1?}"))
}

fn random_rat(rng: &mut ChaCha8Rng, bound: i64) -> Rat {
    let mut n = 0;
    while n == 0 {
        n = rng.gen_range(-bound..=bound);
    }
    rat(n, rng.gen_range(1..=bound))
}

fn random_closed(rng: &mut ChaCha8Rng, bound: i64) -> Option<ValidatedRecurrence> {
    let (b1, b2, c1, c2) = (
        random_rat(rng, bound),
        random_rat(rng, bound),
        random_rat(rng, bound),
        random_rat(rng, bound),
    );
    let input = RecurrenceInput::new(&c1 + &c2, -(&c1 * &c2), &b1 + &b2, &b1 * &c1 + &b2 * &c2);
    validate(&input).ok()
}

fn criterion_5(certs: &mut Vec<Certificate>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut methods: BTreeMap<String, usize> = BTreeMap::new();
    let mut done = 0;
    while done < 100 {
        let Some(rec) = random_closed(&mut rng, 50) else { continue };
        if !matches!(classify(&rec.ratio_pair(), &support_set(&rec)), CaseLabel::Case3(_)) {
            continue;
        }
        let cert = certify(&rec, &CertifyConfig::default()).map_err(|e| format!("{rec:?}: {e}"))?;
        let m = cert.modulus().ok_or("no modulus")?;
        ensure(oracle_zero_free(&rec.linear(), m)?, format!("modulus {m} hits a zero for {rec:?}"))?;
        *methods.entry(cert.metadata["method"].clone()).or_default() += 1;
        certs.push(cert);
        done += 1;
    }
    Ok(format!("100/100 sound; methods {methods:?}"))
}

fn criterion_6(certs: &mut Vec<Certificate>) -> Outcome {
    let args = ["certify", "--a1", "3", "--a2", "-2", "--u0", "3", "--u1", "4"];
    let mut theorem = args.to_vec();
    theorem.extend(["--mode", "theorem"]);
    let (code, _, err) = run_cli(&theorem);
    ensure(code == 2 && err.contains("(1, -1, -1)"), format!("theorem mode: exit {code}, {err}"))?;
    let (code, out, err) = run_cli(&args);
    ensure(code == 0, format!("auto mode: exit {code}, {err}"))?;
    let cert = certfile::from_json(&out).map_err(|e| e.to_string())?;
    ensure(cert.modulus() == Some(7), format!("auto modulus {:?}", cert.modulus()))?;
    certs.push(cert);

    let config = CertifyConfig {
        mode: Mode::Fallback,
        ..Default::default()
    };
    let cert = certify(&quad("5", "-6", "2", "5"), &config).map_err(|e| e.to_string())?;
    ensure(cert.modulus() == Some(19), format!("2^n + 3^n modulus {:?}", cert.modulus()))?;
    // oracle: 2^n + 3^n vanishes somewhere mod each rejected prime
    for p in [5u64, 7, 11, 13, 17] {
        let hit = (0..p).any(|n| (mod_pow(2, n, p) + mod_pow(3, n, p)) % p == 0);
        ensure(hit, format!("{p} should have been rejected"))?;
    }
    ensure((0..18).all(|n| (mod_pow(2, n, 19) + mod_pow(3, n, 19)) % 19 != 0), "19 oracle")?;
    certs.push(cert);
    Ok("theorem mode exits 2 with (1, -1, -1); auto gives 7; 2^n + 3^n gives 19".into())
}

fn mod_pow(b: u64, e: u64, m: u64) -> u64 {
    (0..e).fold(1, |acc, _| acc * b % m)
}

fn criterion_7(certs: &mut Vec<Certificate>) -> Outcome {
    let coeffs = cubic_coeffs(&q("3"), &q("2")).map_err(|e| e.to_string())?;
    ensure(coeffs == (q("3"), q("4"), q("-12")), format!("{coeffs:?}"))?;
    let fam = CubicFamily::new(q("1"), q("-5"), q("1"), q("3"), q("2"), None).map_err(|e| e.to_string())?;
    let (even, odd) = split(&fam).map_err(|e| e.to_string())?;
    let cf = |b1, b2, c1, c2| ClosedForm::ordered(q(b1), q(b2), q(c1), q(c2));
    ensure(even == cf("1", "-4", "9", "4") && odd == cf("3", "-12", "9", "4"), format!("{even:?} {odd:?}"))?;
    let config = CertifyConfig {
        mode: Mode::Fallback,
        ..Default::default()
    };
    let cert = certify_cubic(&fam, &config).map_err(|e| e.to_string())?;
    let scan = cert.scan.clone().ok_or("no scan")?;
    ensure(cert.modulus() == Some(5), format!("modulus {:?}", cert.modulus()))?;
    ensure(scan.period == 4 && scan.residues_sample == [2, 1, 3, 4], format!("{scan:?}"))?;
    // oracle: 3^n + (-5 + (-1)^n) 2^n mod 5
    let oracle: Vec<u64> = (0..4u64)
        .map(|n| {
            let s: i64 = if n % 2 == 0 { -4 } else { -6 };
            ((mod_pow(3, n, 5) as i64 + s * mod_pow(2, n, 5) as i64).rem_euclid(5)) as u64
        })
        .collect();
    ensure(oracle == [2, 1, 3, 4], format!("oracle {oracle:?}"))?;
    ensure(verify_certificate(&cert).is_accepted(), "verify rejected")?;
    certs.push(cert);
    Ok("coefficients (3, 4, -12), split matches, m = 5 with period 4".into())
}

fn criterion_8() -> Outcome {
    let rec = quad("3", "-2", "-2", "-1");
    let pair = rec.ratio_pair();
    let support = support_set(&rec);
    let plan = build_plan(&classify(&pair, &support), &pair, &support, 10_000).ok_or("no plan")?;
    let d = density_count(&plan, 10_000).map_err(|e| e.to_string())?;
    let fraction = d.count as f64 / d.eligible as f64;
    ensure(d.count >= 20, format!("count {}", d.count))?;
    ensure((0.1..=0.4).contains(&fraction), format!("fraction {fraction}"))?;
    Ok(format!("count {} of {} primes = 1 mod 3, fraction {fraction:.4}", d.count, d.eligible))
}

fn criterion_9(certs: &[Certificate]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut done = 0;
    while done < 1000 {
        let Some(rec) = random_closed(&mut rng, 50) else { continue };
        let cf = &rec.closed;
        // closed form back to the recurrence
        let (a1, a2) = cf.coefficients();
        ensure(a1 == rec.a1 && a2 == rec.a2, "coefficients")?;
        ensure(cf.term(0) == rec.u0 && cf.term(1) == rec.u1, "initial terms")?;
        for n in [-3i64, -1, 2, 5] {
            ensure(cf.term(n) == iterate(&rec.a1, &rec.a2, &rec.u0, &rec.u1, n), format!("term {n}"))?;
        }
        // ratio pair back to the closed form, given b1 and c2
        let pair = cf.ratio_pair();
        let rebuilt = ClosedForm {
            b1: cf.b1.clone(),
            b2: -(&pair.b * &cf.b1),
            c1: &pair.c * &cf.c2,
            c2: cf.c2.clone(),
        };
        ensure(&rebuilt == cf, "ratio pair")?;
        done += 1;
    }
    for cert in certs {
        let text = certfile::to_json(cert);
        let back = certfile::from_json(&text).map_err(|e| e.to_string())?;
        ensure(&back == cert && certfile::to_json(&back) == text, "certificate round trip")?;
    }
    let mut tampered = certs.first().ok_or("no certificates")?.clone();
    tampered.witness = Witness::PrimeModulus {
        m: 5,
        n_used: Some(3),
        symbol_exponents: BTreeMap::new(),
    };
    match verify_certificate(&tampered) {
        Verdict::Rejected(reason) if reason.contains("zero residue at index 3") => {}
        v => return Err(format!("tampered certificate: {v:?}")),
    }
    Ok(format!("1000 quadratic round trips, {} certificate files byte-identical, tamper rejected at index 3", certs.len()))
}

fn main() {
    let mut certs = Vec::new();
    let mut results: Vec<(u32, Outcome)> = Vec::new();
    let mut check = |id: u32, f: &mut dyn FnMut() -> Outcome| {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        results.push((id, outcome));
    };
    check(1, &mut || criterion_1(&mut certs));
    check(2, &mut || criterion_2(&mut certs));
    check(3, &mut criterion_3);
    check(4, &mut criterion_4);
    check(5, &mut || criterion_5(&mut certs));
    check(6, &mut || criterion_6(&mut certs));
    check(7, &mut || criterion_7(&mut certs));
    check(8, &mut criterion_8);
    check(9, &mut || criterion_9(&certs));

    let mut stdout = std::io::stdout().lock();
    let mut failed = 0;
    for (id, outcome) in &results {
        let line = match outcome {
            Ok(detail) => format!("criterion {id}: PASS  {detail}"),
            Err(reason) => {
                failed += 1;
                format!("criterion {id}: FAIL  {reason}")
            }
        };
        writeln!(stdout, "{line}").unwrap();
    }
    writeln!(stdout, "acceptance: {}/{} passed", results.len() - failed, results.len()).unwrap();
    if failed > 0 {
        std::process::exit(1);
    }
}
