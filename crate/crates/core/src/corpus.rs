//! Regression corpus: named cases with expected outcomes, run as a batch.
//!
//! A corpus file is JSON:
//!
//! ```json
//! {"schema": 1, "cases": [
//!   {"name": "cube witnesses", "kind": "first-witnesses",
//!    "poly": "T - 2", "k": 3, "hi": 40, "expected": [7, 13, 19, 37]}
//! ]}
//! ```
//!
//! Each case reports pass or fail with a one-line detail. See `FORMATS.md`
//! for every case kind.

use serde::{Deserialize, Serialize};

use crate::arith::IntPoly;
use crate::chebmodel::{build_model, fpf_fraction};
use crate::groups::{catalog_up_to, reiter_sweep};
use crate::ksearch::{find_k_certified, validate, KSearchError, SearchOptions};
use crate::powers::{binomial_factor, capelli_irreducible, Rational};
use crate::primediv::{
    divisor_chain_violations, implication_violations, sieve, DensityReport, Fraction, SieveJob,
};

/// The corpus shipped with the crate.
pub const DEFAULT_CORPUS: &str = include_str!("../corpus/default.json");

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("malformed corpus: {0}")]
    Malformed(String),
    #[error("corpus has no cases")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub schema: u32,
    pub cases: Vec<Case>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub name: String,
    #[serde(flatten)]
    pub check: Check,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Check {
    /// (H2) fails exactly for cyclic p-groups, over the catalog up to
    /// `max_order` plus `extra`.
    H2Sweep {
        max_order: usize,
        #[serde(default)]
        extra: Vec<String>,
    },
    /// Capelli agrees with bounded factor search for `k <= k_max`,
    /// `2 <= |t| <= t_max`.
    CapelliOracle { k_max: u32, t_max: i64 },
    /// Witness density of `T - t` against `expected` (the model fraction when
    /// absent), within `sigmas` standard errors.
    Density {
        t: i64,
        k: u32,
        cap: u64,
        #[serde(default)]
        expected: Option<Fraction>,
        sigmas: f64,
    },
    /// Exact witness count in `[lo, hi)`.
    WitnessCount {
        poly: String,
        k: u32,
        #[serde(default = "two")]
        lo: u64,
        hi: u64,
        expected: u64,
    },
    /// Exact witness list below `hi`.
    FirstWitnesses {
        poly: String,
        k: u32,
        hi: u64,
        expected: Vec<u64>,
    },
    /// The certified search rejects `poly` with the named error.
    KsearchError { poly: String, expected: String },
    /// The certified search succeeds with at least `witnesses` validated
    /// witnesses below `cap`.
    Certified {
        poly: String,
        witnesses: usize,
        cap: u64,
        #[serde(default)]
        expected_k: Option<u64>,
    },
    /// No record divides `P(T^k)` without dividing `P(T)` or `P(T^d)`, `d | k`.
    Implication { poly: String, k: u32, hi: u64 },
    /// Serial and parallel sieves agree record for record.
    Determinism { poly: String, k: u32, hi: u64 },
}

fn two() -> u64 {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub name: String,
    pub kind: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub passed: usize,
    pub failed: usize,
    pub cases: Vec<CaseResult>,
}

pub fn parse(text: &str) -> Result<Corpus, CorpusError> {
    let corpus: Corpus =
        serde_json::from_str(text).map_err(|e| CorpusError::Malformed(e.to_string()))?;
    if corpus.schema != 1 {
        return Err(CorpusError::Malformed(format!("unsupported schema {}", corpus.schema)));
    }
    if corpus.cases.is_empty() {
        return Err(CorpusError::Empty);
    }
    Ok(corpus)
}

/// Error name as written in corpus files, e.g. `root-at-zero`.
pub fn error_name(e: &KSearchError) -> &'static str {
    match e {
        KSearchError::RootAtZero => "root-at-zero",
        KSearchError::RootAtOne => "root-at-one",
        KSearchError::NotSquarefree => "not-squarefree",
        KSearchError::IrrationalRoots { .. } => "irrational-roots",
        KSearchError::ConstantTooLarge(_) => "constant-too-large",
        KSearchError::BoundOverflow => "bound-overflow",
        KSearchError::KTooLarge(_) => "k-too-large",
        KSearchError::CapExhausted(_) => "cap-exhausted",
        KSearchError::NoKFound { .. } => "no-k-found",
    }
}

fn kind_name(c: &Check) -> String {
    serde_json::to_value(c).ok().and_then(|v| v["kind"].as_str().map(String::from)).unwrap_or_default()
}

fn poly(text: &str) -> Result<IntPoly, String> {
    text.parse().map_err(|e| format!("bad polynomial {text:?}: {e}"))
}

fn run_check(check: &Check, workers: Option<usize>) -> Result<(bool, String), String> {
    Ok(match check {
        Check::H2Sweep { max_order, extra } => {
            let mut names = catalog_up_to(*max_order);
            names.extend(extra.iter().cloned());
            let rows = reiter_sweep(&names).map_err(|e| e.to_string())?;
            let bad: Vec<&str> = rows.iter().filter(|r| !r.consistent).map(|r| r.name.as_str()).collect();
            (bad.is_empty(), format!("{} groups, {} exceptions {bad:?}", rows.len(), bad.len()))
        }
        Check::CapelliOracle { k_max, t_max } => {
            let mut n = 0;
            let mut bad = Vec::new();
            for k in 1..=*k_max {
                for t in (2..=*t_max).flat_map(|t| [t, -t]) {
                    n += 1;
                    if capelli_irreducible(&Rational::from(t), k) != binomial_factor(t, k).is_none() {
                        bad.push((t, k));
                    }
                }
            }
            (bad.is_empty(), format!("{n} binomials, mismatches {bad:?}"))
        }
        Check::Density {
            t,
            k,
            cap,
            expected,
            sigmas,
        } => {
            let expected = match expected {
                Some(f) => *f,
                None => fpf_fraction(&build_model(*t, *k).map_err(|e| e.to_string())?).fpf_fraction,
            };
            let p = IntPoly::from_roots(&[*t]).map_err(|e| e.to_string())?;
            let job = SieveJob::new(p, *k, 2, *cap);
            let r = DensityReport::from_records(&job, &sieve(&job, workers)).map_err(|e| e.to_string())?;
            let dev = (r.observed_value - expected.value()).abs() / r.stderr;
            (
                dev <= *sigmas,
                format!("observed {:.5} vs {expected}, {dev:.2} stderr", r.observed_value),
            )
        }
        Check::WitnessCount {
            poly: text,
            k,
            lo,
            hi,
            expected,
        } => {
            let job = SieveJob::new(poly(text)?, *k, *lo, *hi);
            let n = sieve(&job, workers).iter().filter(|r| r.is_witness()).count() as u64;
            (n == *expected, format!("{n} witnesses, expected {expected}"))
        }
        Check::FirstWitnesses {
            poly: text,
            k,
            hi,
            expected,
        } => {
            let job = SieveJob::new(poly(text)?, *k, 2, *hi);
            let got: Vec<u64> =
                sieve(&job, workers).iter().filter(|r| r.is_witness()).map(|r| r.p).collect();
            (got == *expected, format!("witnesses {got:?}"))
        }
        Check::KsearchError { poly: text, expected } => {
            match find_k_certified(&poly(text)?, &SearchOptions { witnesses: 1, cap: 1000, workers, ..Default::default() }) {
                Ok(c) => (false, format!("succeeded with k = {}", c.k)),
                Err(e) => (error_name(&e) == expected, format!("error {}", error_name(&e))),
            }
        }
        Check::Certified {
            poly: text,
            witnesses,
            cap,
            expected_k,
        } => {
            let opts = SearchOptions {
                witnesses: *witnesses,
                cap: *cap,
                workers,
                ..Default::default()
            };
            match find_k_certified(&poly(text)?, &opts) {
                Err(e) => (false, e.to_string()),
                Ok(c) => {
                    let v = validate(&c);
                    let k_ok = expected_k.is_none_or(|k| k == c.k);
                    (
                        v.valid && k_ok && c.witnesses.len() >= *witnesses,
                        format!("k = {}, {} witnesses, valid = {}", c.k, c.witnesses.len(), v.valid),
                    )
                }
            }
        }
        Check::Implication { poly: text, k, hi } => {
            let job = SieveJob::new(poly(text)?, *k, 2, *hi);
            let recs = sieve(&job, workers);
            let a = implication_violations(&recs);
            let b = divisor_chain_violations(&job, &recs);
            (
                a.is_empty() && b.is_empty(),
                format!("{} records, violations {a:?} {b:?}", recs.len()),
            )
        }
        Check::Determinism { poly: text, k, hi } => {
            let job = SieveJob::new(poly(text)?, *k, 2, *hi);
            let serial = sieve(&job, Some(1));
            let parallel = sieve(&job, workers);
            (serial == parallel, format!("{} records", serial.len()))
        }
    })
}

pub fn run(corpus: &Corpus, workers: Option<usize>) -> CorpusSummary {
    let cases: Vec<CaseResult> = corpus
        .cases
        .iter()
        .map(|c| {
            let (pass, detail) = run_check(&c.check, workers).unwrap_or_else(|e| (false, e));
            CaseResult {
                name: c.name.clone(),
                kind: kind_name(&c.check),
                pass,
                detail,
            }
        })
        .collect();
    let passed = cases.iter().filter(|c| c.pass).count();
    CorpusSummary {
        passed,
        failed: cases.len() - passed,
        cases,
    }
}
