//! JSON certificate files.
//!
//! Rationals are `"num/den"` strings in lowest terms (`"5"` when the
//! denominator is 1) and big integers are decimal strings, so nothing passes
//! through floating point. Output is canonical: pretty-printed with a fixed
//! key order and a trailing newline, so serialize, parse, serialize is
//! byte-identical.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use skolem_core::certificate::{Certificate, Claim, Parity, Subject, Witness};
use skolem_core::exact_arith::{parse_rat, render_rat};
use skolem_core::verifier::ScanReport;
use skolem_core::Rat;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("malformed certificate: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed certificate: bad rational {0:?}")]
    Rational(String),
    #[error("malformed certificate: bad integer {0:?}")]
    Integer(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateDto {
    version: u32,
    subject: SubjectDto,
    claim: ClaimDto,
    witness: WitnessDto,
    scan: Option<ScanDto>,
    metadata: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum SubjectDto {
    Quadratic {
        a1: String,
        a2: String,
        u0: String,
        u1: String,
        base: String,
    },
    Order1 {
        a1: String,
        u0: String,
        base: String,
    },
    Cubic {
        b1: String,
        b2: String,
        b3: String,
        c1: String,
        c2: String,
        base: String,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ClaimDto {
    ZeroTerm,
    NoZeroTerm,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ParityDto {
    Even,
    Odd,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorDto {
    p: u64,
    parity: ParityDto,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum WitnessDto {
    Index {
        n: i64,
    },
    PrimeModulus {
        m: u64,
        n_used: Option<u64>,
        symbol_exponents: BTreeMap<String, u64>,
    },
    CompositeModulus {
        m: u64,
        factors: Vec<FactorDto>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanDto {
    modulus: u64,
    period: u64,
    zero_indices_in_period: Vec<u64>,
    residues_sample: Vec<u64>,
}

fn rat_out(x: &Rat) -> String {
    render_rat(x)
}

fn rat_in(s: &str) -> Result<Rat, FileError> {
    parse_rat(s).map_err(|_| FileError::Rational(s.to_string()))
}

fn big_in(s: &str) -> Result<BigUint, FileError> {
    s.parse().map_err(|_| FileError::Integer(s.to_string()))
}

impl From<&Subject> for SubjectDto {
    fn from(s: &Subject) -> Self {
        match s {
            Subject::Quadratic { a1, a2, u0, u1, base } => SubjectDto::Quadratic {
                a1: rat_out(a1),
                a2: rat_out(a2),
                u0: rat_out(u0),
                u1: rat_out(u1),
                base: base.to_string(),
            },
            Subject::Order1 { a1, u0, base } => SubjectDto::Order1 {
                a1: rat_out(a1),
                u0: rat_out(u0),
                base: base.to_string(),
            },
            Subject::Cubic { b1, b2, b3, c1, c2, base } => SubjectDto::Cubic {
                b1: rat_out(b1),
                b2: rat_out(b2),
                b3: rat_out(b3),
                c1: rat_out(c1),
                c2: rat_out(c2),
                base: base.to_string(),
            },
        }
    }
}

impl TryFrom<SubjectDto> for Subject {
    type Error = FileError;

    fn try_from(s: SubjectDto) -> Result<Self, FileError> {
        Ok(match s {
            SubjectDto::Quadratic { a1, a2, u0, u1, base } => Subject::Quadratic {
                a1: rat_in(&a1)?,
                a2: rat_in(&a2)?,
                u0: rat_in(&u0)?,
                u1: rat_in(&u1)?,
                base: big_in(&base)?,
            },
            SubjectDto::Order1 { a1, u0, base } => Subject::Order1 {
                a1: rat_in(&a1)?,
                u0: rat_in(&u0)?,
                base: big_in(&base)?,
            },
            SubjectDto::Cubic { b1, b2, b3, c1, c2, base } => Subject::Cubic {
                b1: rat_in(&b1)?,
                b2: rat_in(&b2)?,
                b3: rat_in(&b3)?,
                c1: rat_in(&c1)?,
                c2: rat_in(&c2)?,
                base: big_in(&base)?,
            },
        })
    }
}

impl From<&Witness> for WitnessDto {
    fn from(w: &Witness) -> Self {
        match w {
            Witness::Index(n) => WitnessDto::Index { n: *n },
            Witness::PrimeModulus { m, n_used, symbol_exponents } => WitnessDto::PrimeModulus {
                m: *m,
                n_used: *n_used,
                symbol_exponents: symbol_exponents
                    .iter()
                    .map(|(p, e)| (p.to_string(), *e))
                    .collect(),
            },
            Witness::CompositeModulus { m, factors } => WitnessDto::CompositeModulus {
                m: *m,
                factors: factors
                    .iter()
                    .map(|(p, parity)| FactorDto {
                        p: *p,
                        parity: match parity {
                            Parity::Even => ParityDto::Even,
                            Parity::Odd => ParityDto::Odd,
                        },
                    })
                    .collect(),
            },
        }
    }
}

impl TryFrom<WitnessDto> for Witness {
    type Error = FileError;

    fn try_from(w: WitnessDto) -> Result<Self, FileError> {
        Ok(match w {
            WitnessDto::Index { n } => Witness::Index(n),
            WitnessDto::PrimeModulus { m, n_used, symbol_exponents } => Witness::PrimeModulus {
                m,
                n_used,
                symbol_exponents: symbol_exponents
                    .into_iter()
                    .map(|(p, e)| Ok((big_in(&p)?, e)))
                    .collect::<Result<_, FileError>>()?,
            },
            WitnessDto::CompositeModulus { m, factors } => Witness::CompositeModulus {
                m,
                factors: factors
                    .into_iter()
                    .map(|f| {
                        let parity = match f.parity {
                            ParityDto::Even => Parity::Even,
                            ParityDto::Odd => Parity::Odd,
                        };
                        (f.p, parity)
                    })
                    .collect(),
            },
        })
    }
}

impl From<&ScanReport> for ScanDto {
    fn from(s: &ScanReport) -> Self {
        ScanDto {
            modulus: s.modulus,
            period: s.period,
            zero_indices_in_period: s.zero_indices_in_period.clone(),
            residues_sample: s.residues_sample.clone(),
        }
    }
}

impl From<ScanDto> for ScanReport {
    fn from(s: ScanDto) -> Self {
        ScanReport {
            modulus: s.modulus,
            period: s.period,
            zero_indices_in_period: s.zero_indices_in_period,
            residues_sample: s.residues_sample,
        }
    }
}

pub fn to_json(cert: &Certificate) -> String {
    let dto = CertificateDto {
        version: cert.version,
        subject: (&cert.subject).into(),
        claim: match cert.claim {
            Claim::ZeroTerm => ClaimDto::ZeroTerm,
            Claim::NoZeroTerm => ClaimDto::NoZeroTerm,
        },
        witness: (&cert.witness).into(),
        scan: cert.scan.as_ref().map(Into::into),
        metadata: cert.metadata.clone(),
    };
    let mut out = serde_json::to_string_pretty(&dto).expect("plain data serializes");
    out.push('\n');
    out
}

pub fn from_json(text: &str) -> Result<Certificate, FileError> {
    let dto: CertificateDto = serde_json::from_str(text)?;
    Ok(Certificate {
        version: dto.version,
        subject: dto.subject.try_into()?,
        claim: match dto.claim {
            ClaimDto::ZeroTerm => Claim::ZeroTerm,
            ClaimDto::NoZeroTerm => Claim::NoZeroTerm,
        },
        witness: dto.witness.try_into()?,
        scan: dto.scan.map(Into::into),
        metadata: dto.metadata,
    })
}
