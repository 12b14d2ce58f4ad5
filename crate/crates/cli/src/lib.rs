//! `skolem` command-line front end.
//!
//! Exit codes: 0 ok or accepted, 1 rejected, 2 not covered by the theorem,
//! 3 search exhausted, 4 invalid input.

pub mod certfile;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde_json::json;
use thiserror::Error;

use skolem_core::certificate::{Certificate, Claim, Parity, Witness};
use skolem_core::certifier::{
    build_plan, certify_input, density_count, describe_plan, CertifyConfig,
    CertifyError, Mode, DEFAULT_BOUND,
};
use skolem_core::classifier::{
    classify, render_pair, support_set, zero_index, CaseLabel, Pivot, SupportSet, ValMatrix,
};
use skolem_core::cubic::{certify_cubic, half_support, CubicError, CubicFamily};
use skolem_core::exact_arith::{parse_rat, render_rat};
use skolem_core::recurrence::{validate, RatioPair, RecurrenceInput, ValidationError};
use skolem_core::verifier::{verify_certificate, Verdict};
use skolem_core::Rat;

use certfile::FileError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_NOT_COVERED: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;
pub const EXIT_INVALID: i32 = 4;

fn rat_arg(s: &str) -> Result<Rat, String> {
    parse_rat(s).map_err(|_| format!("{s:?} is not a rational of the form num or num/den"))
}

#[derive(Parser, Debug)]
#[command(name = "skolem", version, about = "Zero-term certificates for rational linear recurrences")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct InputArgs {
    #[arg(long, value_parser = rat_arg, allow_hyphen_values = true)]
    a1: Option<Rat>,
    #[arg(long, value_parser = rat_arg, allow_hyphen_values = true)]
    a2: Option<Rat>,
    #[arg(long, value_parser = rat_arg, allow_hyphen_values = true)]
    u0: Option<Rat>,
    #[arg(long, value_parser = rat_arg, allow_hyphen_values = true)]
    u1: Option<Rat>,
    /// Denominator base; inferred from the data when absent.
    #[arg(long = "b")]
    base: Option<BigUint>,
    /// Raw ratio B = -b2/b1.
    #[arg(long = "B", value_parser = rat_arg, allow_hyphen_values = true)]
    big_b: Option<Rat>,
    /// Raw ratio C = c1/c2.
    #[arg(long = "C", value_parser = rat_arg, allow_hyphen_values = true)]
    big_c: Option<Rat>,
    /// Cubic family b1 c1^n + (b2 + (-1)^n b3) c2^n.
    #[arg(long)]
    cubic: bool,
    #[arg(long, value_parser = rat_arg, allow_hyphen_values = true)]
    b1: Option<Rat>,
    #[arg(long, value_parser = rat_arg, allow_hyphen_values = true)]
    b2: Option<Rat>,
    #[arg(long, value_parser = rat_arg, allow_hyphen_values = true)]
    b3: Option<Rat>,
    #[arg(long, value_parser = rat_arg, allow_hyphen_values = true)]
    c1: Option<Rat>,
    #[arg(long, value_parser = rat_arg, allow_hyphen_values = true)]
    c2: Option<Rat>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, default_value_t = Mode::Auto)]
    mode: Mode,
    /// Largest candidate prime.
    #[arg(long, env = "SKOLEM_SEARCH_BOUND", default_value_t = DEFAULT_BOUND)]
    bound: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report which case of the theorem applies.
    Classify {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        json: bool,
    },
    /// Emit a certificate as JSON.
    Certify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a certificate file.
    Verify { path: PathBuf },
    /// Count primes realizing the symbol targets up to X.
    Density {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        max: u64,
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Direct search for the smallest prime with a zero-free period.
    Scan {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, env = "SKOLEM_SEARCH_BOUND", default_value_t = DEFAULT_BOUND)]
        bound: u64,
        #[arg(long)]
        json: bool,
    },
    /// Find the zero term, if any.
    Zero {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Cubic(#[from] CubicError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    File(#[from] FileError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Certify(CertifyError::NotCoveredByTheorem(_)) => EXIT_NOT_COVERED,
            CliError::Certify(CertifyError::SearchExhausted(_)) => EXIT_EXHAUSTED,
            CliError::Certify(CertifyError::Invalid(_)) => EXIT_INVALID,
            // a result that failed its own cross-check is never emitted
            CliError::Certify(CertifyError::Symbol(_) | CertifyError::Internal(_)) => EXIT_REJECTED,
            _ => EXIT_INVALID,
        }
    }
}

enum Subject {
    Quadratic(RecurrenceInput),
    Pair { pair: RatioPair, base: BigUint },
    Cubic(CubicFamily),
}

fn resolve(args: &InputArgs) -> Result<Subject, CliError> {
    let quad = [&args.a1, &args.a2, &args.u0, &args.u1];
    let pair = [&args.big_b, &args.big_c];
    let cubic = [&args.b1, &args.b2, &args.b3, &args.c1, &args.c2];
    let any = |xs: &[&Option<Rat>]| xs.iter().any(|x| x.is_some());
    let all = |xs: &[&Option<Rat>]| xs.iter().all(|x| x.is_some());
    let groups = [any(&quad), any(&pair), args.cubic || any(&cubic)];
    if groups.iter().filter(|&&g| g).count() != 1 {
        return Err(CliError::Usage(
            "give exactly one of --a1/--a2/--u0/--u1, --B/--C, or --cubic with --b1/--b2/--b3/--c1/--c2".into(),
        ));
    }
    let get = |x: &Option<Rat>| x.clone().expect("checked");
    if groups[0] {
        if !all(&quad) {
            return Err(CliError::Usage("--a1, --a2, --u0 and --u1 are all required".into()));
        }
        let mut input = RecurrenceInput::new(get(&args.a1), get(&args.a2), get(&args.u0), get(&args.u1));
        input.base = args.base.clone();
        return Ok(Subject::Quadratic(input));
    }
    if groups[1] {
        if !all(&pair) {
            return Err(CliError::Usage("--B and --C are both required".into()));
        }
        let (b, c) = (get(&args.big_b), get(&args.big_c));
        if b.numer().sign() == num_bigint::Sign::NoSign || c.numer().sign() == num_bigint::Sign::NoSign {
            return Err(CliError::Usage("B and C must be nonzero".into()));
        }
        let base = args.base.clone().unwrap_or_else(|| BigUint::from(1u8));
        if base == BigUint::from(0u8) {
            return Err(ValidationError::BadBase.into());
        }
        return Ok(Subject::Pair { pair: RatioPair::new(b, c), base });
    }
    if !args.cubic || !all(&cubic) {
        return Err(CliError::Usage("the cubic family needs --cubic and all of --b1 --b2 --b3 --c1 --c2".into()));
    }
    let fam = CubicFamily::new(
        get(&args.b1),
        get(&args.b2),
        get(&args.b3),
        get(&args.c1),
        get(&args.c2),
        args.base.clone(),
    )?;
    Ok(Subject::Cubic(fam))
}

fn pivot_json(label: &CaseLabel) -> serde_json::Value {
    match label {
        CaseLabel::Case3(Pivot::TopRowZero { p }) => json!({"kind": "top-row-zero", "p": p.to_string()}),
        CaseLabel::Case3(Pivot::Rank2 { p, q, d }) => {
            json!({"kind": "rank2", "p": p.to_string(), "q": q.to_string(), "d": d})
        }
        _ => serde_json::Value::Null,
    }
}

fn label_json(pair: &RatioPair, support: &SupportSet, label: &CaseLabel) -> serde_json::Value {
    let case = match label {
        CaseLabel::Case1 { .. } => "Case1",
        CaseLabel::Case2 => "Case2",
        CaseLabel::Case3(_) => "Case3",
        CaseLabel::NotCovered(_) => "NotCovered",
    };
    let relation = match label {
        CaseLabel::NotCovered(r) => json!({"k": r.k, "l": r.l, "sign": r.sign}),
        _ => serde_json::Value::Null,
    };
    let zero = match label {
        CaseLabel::Case1 { m } => json!(m),
        _ => serde_json::Value::Null,
    };
    let m = ValMatrix::new(pair, support);
    json!({
        "case": case,
        "label": label.to_string(),
        "B": render_rat(&pair.b),
        "C": render_rat(&pair.c),
        "support": support.primes.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "valuations_c": m.c_row,
        "valuations_b": m.b_row,
        "pivot": pivot_json(label),
        "relation": relation,
        "zero_index": zero,
    })
}

fn label_text(pair: &RatioPair, support: &SupportSet, label: &CaseLabel) -> String {
    let m = ValMatrix::new(pair, support);
    let mut s = format!(
        "{label}\n  {}\n  T = {support}\n  v_p(C) = {:?}\n  v_p(B) = {:?}\n",
        render_pair(pair),
        m.c_row,
        m.b_row
    );
    if let CaseLabel::NotCovered(r) = label {
        s.push_str(&format!("  relation (k, l, sign) = {}\n", r.render()));
    }
    s
}

fn cmd_classify(input: &InputArgs, as_json: bool) -> Result<String, CliError> {
    let one = |pair: &RatioPair, support: &SupportSet| {
        let label = classify(pair, support);
        if as_json {
            label_json(pair, support, &label)
        } else {
            serde_json::Value::String(label_text(pair, support, &label))
        }
    };
    let render = |v: serde_json::Value| match v {
        serde_json::Value::String(s) => s,
        other => format!("{}\n", serde_json::to_string_pretty(&other).expect("json")),
    };
    match resolve(input)? {
        Subject::Quadratic(raw) => match validate(&raw) {
            Ok(rec) => Ok(render(one(&rec.ratio_pair(), &support_set(&rec)))),
            Err(ValidationError::DegenerateToOrder1(o)) => {
                let text = format!("u_n = {} * ({})^n", render_rat(&o.u0), render_rat(&o.a1));
                Ok(if as_json {
                    render(json!({"case": "Order1", "label": text}))
                } else {
                    format!("Order1\n  {text}\n")
                })
            }
            Err(e) => Err(e.into()),
        },
        Subject::Pair { pair, base } => {
            let support = SupportSet::of_values(&base, [&pair.b, &pair.c]);
            Ok(render(one(&pair, &support)))
        }
        Subject::Cubic(fam) => {
            let mut parts = Vec::new();
            for (name, parity) in [("even", Parity::Even), ("odd", Parity::Odd)] {
                let value = match (fam.half_closed(parity), half_support(&fam, parity)) {
                    (Some(cf), Some(support)) => one(&cf.ratio_pair(), &support),
                    _ => serde_json::Value::String("Order1\n".into()),
                };
                parts.push((name, value));
            }
            if as_json {
                let obj: serde_json::Map<_, _> = parts.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
                Ok(render(serde_json::Value::Object(obj)))
            } else {
                Ok(parts
                    .into_iter()
                    .map(|(k, v)| format!("{k}: {}", render(v)))
                    .collect())
            }
        }
    }
}

fn certify_subject(input: &InputArgs, config: &CertifyConfig) -> Result<Certificate, CliError> {
    match resolve(input)? {
        Subject::Quadratic(raw) => Ok(certify_input(&raw, config)?),
        Subject::Cubic(fam) => Ok(certify_cubic(&fam, config)?),
        Subject::Pair { .. } => Err(CliError::Usage(
            "certificates need a recurrence; --B/--C only work with classify, density and zero".into(),
        )),
    }
}

fn write_output(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => out.write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn cmd_verify(path: &Path) -> Result<(i32, String), CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let cert = certfile::from_json(&text)?;
    Ok(match verify_certificate(&cert) {
        Verdict::Accepted => (EXIT_OK, "accepted\n".into()),
        Verdict::Rejected(reason) => (EXIT_REJECTED, format!("rejected: {reason}\n")),
    })
}

/// Checkpoints 10, 100, ... below `max`, then `max` itself.
fn checkpoints(max: u64) -> Vec<u64> {
    let mut xs: Vec<u64> = std::iter::successors(Some(10u64), |x| x.checked_mul(10))
        .take_while(|&x| x < max)
        .collect();
    xs.push(max);
    xs
}

fn cmd_density(input: &InputArgs, max: u64, csv: bool) -> Result<String, CliError> {
    let (pair, support) = match resolve(input)? {
        Subject::Quadratic(raw) => {
            let rec = validate(&raw)?;
            (rec.ratio_pair(), support_set(&rec))
        }
        Subject::Pair { pair, base } => {
            let support = SupportSet::of_values(&base, [&pair.b, &pair.c]);
            (pair, support)
        }
        Subject::Cubic(_) => {
            return Err(CliError::Usage("density works on a quadratic or a raw pair".into()))
        }
    };
    let label = classify(&pair, &support);
    let plan = match (&label, build_plan(&label, &pair, &support, max)) {
        (_, Some(plan)) => plan,
        (CaseLabel::NotCovered(rel), None) => return Err(CertifyError::NotCoveredByTheorem(*rel).into()),
        (_, None) => return Err(CliError::Usage(format!("density needs a Case3 instance, got {label}"))),
    };
    let mut rows = Vec::new();
    for x in checkpoints(max) {
        rows.push((x, density_count(&plan, x)?));
    }
    let mut s = String::new();
    if csv {
        s.push_str("x,n,count,eligible,fraction\n");
        for (x, d) in &rows {
            let frac = d.fraction().map_or(String::new(), |(c, e)| format!("{:.6}", c as f64 / e as f64));
            s.push_str(&format!("{x},{},{},{},{frac}\n", plan.n, d.count, d.eligible));
        }
    } else {
        s.push_str(&format!("{}\n{}\n", label, describe_plan(&plan)));
        for (x, d) in &rows {
            let frac = match d.fraction() {
                Some((c, e)) => format!("{c}/{e} = {:.4}", c as f64 / e as f64),
                None => "undefined (no eligible primes)".into(),
            };
            s.push_str(&format!(
                "X = {x}: count = {}, eligible primes = 1 mod {} = {}, fraction {frac}\n",
                d.count, plan.n, d.eligible
            ));
        }
    }
    Ok(s)
}

fn cmd_scan(input: &InputArgs, bound: u64, as_json: bool) -> Result<String, CliError> {
    let config = CertifyConfig {
        bound,
        mode: Mode::Fallback,
    };
    let cert = certify_subject(input, &config)?;
    if as_json {
        let v = match (&cert.witness, &cert.scan) {
            (Witness::Index(n), _) => json!({"zero_index": n}),
            (w, Some(scan)) => json!({
                "modulus": cert.modulus(),
                "composite": matches!(w, Witness::CompositeModulus { .. }),
                "period": scan.period,
                "residues_sample": scan.residues_sample,
            }),
            _ => unreachable!("no-zero-term certificates carry a scan"),
        };
        return Ok(format!("{}\n", serde_json::to_string_pretty(&v).expect("json")));
    }
    Ok(match (&cert.claim, &cert.witness, &cert.scan) {
        (Claim::ZeroTerm, Witness::Index(n), _) => format!("zero term at n = {n}\n"),
        (_, w, Some(scan)) => {
            let kind = match w {
                Witness::CompositeModulus { factors, .. } => format!(
                    " (product of {})",
                    factors.iter().map(|(p, _)| p.to_string()).collect::<Vec<_>>().join(" and ")
                ),
                _ => String::new(),
            };
            let residues: Vec<String> = scan.residues_sample.iter().map(u64::to_string).collect();
            format!(
                "m = {}{kind}\nperiod = {}\nresidues = {}\n",
                scan.modulus,
                scan.period,
                residues.join(" ")
            )
        }
        _ => unreachable!("no-zero-term certificates carry a scan"),
    })
}

fn cmd_zero(input: &InputArgs, as_json: bool) -> Result<String, CliError> {
    let index: Option<i64> = match resolve(input)? {
        Subject::Quadratic(raw) => match validate(&raw) {
            Ok(rec) => zero_index(&rec.ratio_pair()),
            Err(ValidationError::DegenerateToOrder1(o)) => (o.u0.numer().sign() == num_bigint::Sign::NoSign).then_some(0),
            Err(e) => return Err(e.into()),
        },
        Subject::Pair { pair, .. } => zero_index(&pair),
        Subject::Cubic(fam) => cubic_zero(&fam),
    };
    Ok(match (as_json, index) {
        (true, i) => format!("{}\n", json!({ "zero_index": i })),
        (false, Some(n)) => format!("zero term at n = {n}\n"),
        (false, None) => "no zero term\n".into(),
    })
}

fn cubic_zero(fam: &CubicFamily) -> Option<i64> {
    [(Parity::Even, 0), (Parity::Odd, 1)].into_iter().find_map(|(parity, offset)| {
        let cf = fam.half_closed(parity)?;
        zero_index(&cf.ratio_pair()).map(|k| 2 * k + offset)
    })
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let text = match cli.command {
        Command::Classify { input, json } => cmd_classify(&input, json)?,
        Command::Certify { input, search, out: path } => {
            let config = CertifyConfig {
                bound: search.bound,
                mode: search.mode,
            };
            let cert = certify_subject(&input, &config)?;
            write_output(out, path.as_deref(), &certfile::to_json(&cert))?;
            return Ok(EXIT_OK);
        }
        Command::Verify { path } => {
            let (code, text) = cmd_verify(&path)?;
            write_output(out, None, &text)?;
            return Ok(code);
        }
        Command::Density { input, max, csv, out: path } => {
            let text = cmd_density(&input, max, csv)?;
            write_output(out, path.as_deref(), &text)?;
            return Ok(EXIT_OK);
        }
        Command::Scan { input, bound, json } => cmd_scan(&input, bound, json)?,
        Command::Zero { input, json } => cmd_zero(&input, json)?,
    };
    write_output(out, None, &text)?;
    Ok(EXIT_OK)
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
