//! The `kwitness` command line.
//!
//! Every report is one JSON document with a top-level `"schema": 1`, written
//! to stdout or to `--out`. Exit codes: `0` success, `1` mathematical
//! negative (no exponent found, too few witnesses, failed check), `2` usage
//! or input error.

use std::fs;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::arith::IntPoly;
use crate::chebmodel::{harness_lemma23, ChebError};
use crate::corpus::{self, CorpusError, DEFAULT_CORPUS};
use crate::groups::{catalog, catalog_up_to, h2_check, reiter_sweep, ConjClass, FiniteGroup, GroupError, GroupSource, Verdict};
use crate::ksearch::{self, find_k_certified, find_k_heuristic, KCertificate, KSearchError, ProbeStat, SearchOptions};
use crate::powers::{capelli_irreducible, power_bound, weil_height, HeightValue, Rational};
use crate::primediv::{implication_violations, sieve, DensityReport, SieveCache, SieveJob, CACHE_ENV};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Parsed command line. Serializes to JSON and back unchanged.
#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "kwitness", version, about = "Witness primes for P(T) versus P(T^k)")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Omit the `generated_at` field so repeated runs are byte-identical.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    /// Sieve worker threads [default: available parallelism].
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Sieve a prime range for witnesses of (P, k).
    Sieve(SieveArgs),
    /// Find an exponent k with witnesses, or validate a certificate.
    Ksearch(KsearchArgs),
    /// Capelli irreducibility of T^k - t.
    Capelli {
        #[arg(long, allow_hyphen_values = true)]
        t: Rational,
        #[arg(long)]
        k: u32,
    },
    /// Weil height of a rational.
    Height {
        #[arg(long, allow_hyphen_values = true)]
        t: Rational,
    },
    /// Largest k for which t can be a k-th power.
    Powerbound {
        #[arg(long, allow_hyphen_values = true)]
        t: Rational,
    },
    /// Decide the (H2) condition for a finite group.
    H2check(H2Args),
    /// Compare the Galois model of T^k - t with the sieve.
    Lemma23 {
        #[arg(long, allow_hyphen_values = true)]
        t: i64,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1_000_000)]
        cap: u64,
    },
    /// Run a regression corpus [default: the bundled one].
    Corpus { path: Option<PathBuf> },
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SieveArgs {
    /// Monic polynomial in T, e.g. "(T-2)*(T-3)" or "[6, -5, 1]".
    #[arg(long, allow_hyphen_values = true)]
    pub poly: IntPoly,
    #[arg(long)]
    pub k: u32,
    #[arg(long, default_value_t = 2)]
    pub lo: u64,
    /// Exclusive upper end of the prime range.
    #[arg(long, default_value_t = 1_000_000)]
    pub hi: u64,
    /// Print the witness list as CSV instead of a JSON report.
    #[arg(long)]
    pub csv: bool,
    /// Cache directory [default: $KWITNESS_CACHE, unset means no cache].
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
pub struct KsearchArgs {
    #[command(subcommand)]
    pub action: Option<KsearchAction>,
    #[arg(long, required = true, allow_hyphen_values = true)]
    pub poly: Option<IntPoly>,
    /// Witnesses to put in the certificate.
    #[arg(long, default_value_t = ksearch::DEFAULT_WITNESSES)]
    pub witnesses: usize,
    /// Largest prime searched for witnesses.
    #[arg(long, default_value_t = ksearch::DEFAULT_CAP)]
    pub cap: u64,
    /// Probe k = 2..=kmax instead of the certified construction.
    #[arg(long)]
    pub heuristic: bool,
    #[arg(long, default_value_t = 60)]
    pub kmax: u32,
    /// Primes per heuristic probe.
    #[arg(long, default_value_t = ksearch::DEFAULT_PROBE_PRIMES)]
    pub probe_primes: usize,
    /// Extra exponents to list in `further_k`.
    #[arg(long, default_value_t = 0)]
    pub more: usize,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KsearchAction {
    /// Re-check a certificate from scratch.
    Validate {
        #[arg(long)]
        cert: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(args_conflicts_with_subcommands = true)]
#[command(group = clap::ArgGroup::new("source").args(["group", "cayley", "gens"]))]
pub struct H2Args {
    #[command(subcommand)]
    pub action: Option<H2Action>,
    /// Catalog name, e.g. "symmetric:4" or "cyclic:2 x cyclic:4".
    #[arg(long)]
    pub group: Option<String>,
    /// Group JSON file with a Cayley table.
    #[arg(long)]
    pub cayley: Option<PathBuf>,
    /// Permutation generator in cycle notation; repeat for more.
    #[arg(long = "gen")]
    pub gens: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum H2Action {
    /// Check that (H2) fails exactly on cyclic p-groups across the catalog.
    Sweep {
        #[arg(long, default_value_t = 24)]
        max_order: usize,
        /// Extra catalog names to include.
        #[arg(long)]
        extra: Vec<String>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    schema: u32,
    command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<u64>,
    #[serde(flatten)]
    report: T,
}

#[derive(Serialize)]
struct ErrorReport {
    error: String,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    probes: Option<Vec<ProbeStat>>,
}

#[derive(Serialize)]
struct SieveReport {
    #[serde(flatten)]
    density: DensityReport,
    implication_violations: Vec<u64>,
    witnesses: Vec<u64>,
}

#[derive(Serialize)]
struct CapelliReport<'a> {
    t: &'a Rational,
    k: u32,
    irreducible: bool,
}

#[derive(Serialize)]
struct HeightReport<'a> {
    t: &'a Rational,
    #[serde(flatten)]
    height: HeightValue,
}

#[derive(Serialize)]
struct PowerBoundReport<'a> {
    t: &'a Rational,
    power_bound: u64,
}

#[derive(Serialize)]
struct H2Report {
    group: String,
    order: usize,
    source: GroupSource,
    cyclic_p_group: bool,
    exponent: u64,
    class_sizes: Vec<usize>,
    verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<ConjClass>,
    generating_classes: Vec<ConjClass>,
    /// Labels of the representatives of `c` and the generating classes.
    labels: Vec<String>,
}

#[derive(Serialize)]
struct SweepReport {
    max_order: usize,
    groups: usize,
    exceptions: usize,
    rows: Vec<crate::groups::SweepRow>,
}

#[derive(Serialize)]
struct SieveOnlyReport {
    t: i64,
    k: u32,
    predicted: Option<()>,
    reason: String,
    n_primes: u64,
    n_witnesses: u64,
    observed: crate::primediv::Fraction,
    observed_value: f64,
    verdict: &'static str,
}

struct Output<'a> {
    cfg: &'a RunConfig,
}

impl Output<'_> {
    fn timestamp(&self) -> Option<u64> {
        if self.cfg.no_timestamp {
            return None;
        }
        SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
    }

    fn write(&self, text: String) -> Result<(), CliError> {
        match &self.cfg.out {
            Some(path) => fs::write(path, text).map_err(|e| usage(format!("--out {}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn json<T: Serialize>(&self, command: &str, report: T) -> Result<(), CliError> {
        let env = Envelope {
            schema: 1,
            command,
            generated_at: self.timestamp(),
            report,
        };
        self.write(to_json(&env))
    }

    fn certificate(&self, mut cert: KCertificate) -> Result<(), CliError> {
        cert.generated_at = self.timestamp();
        self.write(to_json(&cert))
    }

    fn error(&self, command: &str, error: &str, message: String, probes: Option<Vec<ProbeStat>>) -> Result<i32, CliError> {
        self.json(
            command,
            ErrorReport {
                error: error.to_string(),
                message,
                probes,
            },
        )?;
        Ok(EXIT_NEGATIVE)
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn read(path: &PathBuf, flag: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| usage(format!("{flag} {}: {e}", path.display())))
}

fn run_sieve(out: &Output, a: &SieveArgs) -> Result<i32, CliError> {
    if a.k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    if a.hi > 1 << 62 {
        return Err(usage("--hi must be at most 2^62"));
    }
    let job = SieveJob::new(a.poly.clone(), a.k, a.lo, a.hi);
    let cache = a.cache_dir.clone().map(SieveCache::new).or_else(SieveCache::from_env);
    let records = match cache {
        Some(c) => c
            .sieve(&job, out.cfg.workers)
            .map_err(|e| usage(format!("cache ({CACHE_ENV} or --cache-dir): {e}")))?,
        None => sieve(&job, out.cfg.workers),
    };
    let witnesses: Vec<u64> = records.iter().filter(|r| r.is_witness()).map(|r| r.p).collect();
    if a.csv {
        let mut s = String::from("p\n");
        for p in &witnesses {
            s.push_str(&format!("{p}\n"));
        }
        out.write(s)?;
        return Ok(EXIT_OK);
    }
    let density = DensityReport::from_records(&job, &records)
        .map_err(|e| usage(format!("--lo/--hi: {e}")))?;
    out.json(
        "sieve",
        SieveReport {
            density,
            implication_violations: implication_violations(&records),
            witnesses,
        },
    )?;
    Ok(EXIT_OK)
}

fn run_ksearch(out: &Output, a: &KsearchArgs) -> Result<i32, CliError> {
    if let Some(KsearchAction::Validate { cert }) = &a.action {
        let text = read(cert, "--cert")?;
        let cert: KCertificate =
            serde_json::from_str(&text).map_err(|e| usage(format!("--cert: not a certificate: {e}")))?;
        let v = ksearch::validate(&cert);
        let code = if v.valid { EXIT_OK } else { EXIT_NEGATIVE };
        out.json("ksearch-validate", v)?;
        return Ok(code);
    }
    let poly = a.poly.as_ref().ok_or_else(|| usage("--poly is required"))?;
    if a.witnesses == 0 {
        return Err(usage("--witnesses must be at least 1"));
    }
    let opts = SearchOptions {
        witnesses: a.witnesses,
        cap: a.cap,
        workers: out.cfg.workers,
        more: a.more,
        probe_primes: a.probe_primes,
    };
    let result = if a.heuristic {
        find_k_heuristic(poly, a.kmax, &opts)
    } else {
        find_k_certified(poly, &opts)
    };
    match result {
        Ok(cert) => {
            out.certificate(cert)?;
            Ok(EXIT_OK)
        }
        Err(KSearchError::CapExhausted(cert)) => {
            eprintln!("kwitness: only {} of {} witnesses below {}", cert.witnesses.len(), cert.witness_target, cert.cap);
            out.certificate(*cert)?;
            Ok(EXIT_NEGATIVE)
        }
        Err(e) => {
            let probes = match &e {
                KSearchError::NoKFound { probes, .. } => Some(probes.clone()),
                _ => None,
            };
            out.error("ksearch", corpus::error_name(&e), e.to_string(), probes)
        }
    }
}

fn load_group(a: &H2Args) -> Result<(String, FiniteGroup), CliError> {
    let group_err = |flag: &str, e: GroupError| usage(format!("{flag}: {e}"));
    if let Some(name) = &a.group {
        return Ok((name.clone(), catalog(name).map_err(|e| group_err("--group", e))?));
    }
    if let Some(path) = &a.cayley {
        let g = FiniteGroup::from_json(&read(path, "--cayley")?).map_err(|e| group_err("--cayley", e))?;
        return Ok((path.display().to_string(), g));
    }
    if !a.gens.is_empty() {
        let g = FiniteGroup::from_permutations(&a.gens).map_err(|e| group_err("--gen", e))?;
        return Ok((format!("<{}>", a.gens.join(", ")), g));
    }
    Err(usage("one of --group, --cayley or --gen is required"))
}

fn run_h2(out: &Output, a: &H2Args) -> Result<i32, CliError> {
    if let Some(H2Action::Sweep { max_order, extra }) = &a.action {
        let mut names = catalog_up_to(*max_order);
        names.extend(extra.iter().cloned());
        let rows = reiter_sweep(&names).map_err(|e| usage(format!("--extra: {e}")))?;
        let exceptions = rows.iter().filter(|r| !r.consistent).count();
        out.json(
            "h2check-sweep",
            SweepReport {
                max_order: *max_order,
                groups: rows.len(),
                exceptions,
                rows,
            },
        )?;
        return Ok(if exceptions == 0 { EXIT_OK } else { EXIT_NEGATIVE });
    }
    let (name, g) = load_group(a)?;
    let w = match h2_check(&g) {
        Ok(w) => w,
        Err(e) => return out.error("h2check", "trivial-group", e.to_string(), None),
    };
    let labels = w
        .c
        .iter()
        .chain(&w.generating_classes)
        .map(|c| g.label(c.representative))
        .collect();
    out.json(
        "h2check",
        H2Report {
            group: name,
            order: g.order(),
            source: g.source(),
            cyclic_p_group: g.is_cyclic_p_group(),
            exponent: g.exponent(),
            class_sizes: g.conjugacy_classes().iter().map(ConjClass::size).collect(),
            verdict: w.verdict,
            c: w.c,
            generating_classes: w.generating_classes,
            labels,
        },
    )?;
    Ok(EXIT_OK)
}

fn run_lemma23(out: &Output, t: i64, k: u32, cap: u64) -> Result<i32, CliError> {
    if k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    match harness_lemma23(t, k, cap, out.cfg.workers) {
        Ok(r) => {
            let code = if r.verdict == "pass" { EXIT_OK } else { EXIT_NEGATIVE };
            out.json("lemma23", r)?;
            Ok(code)
        }
        Err(ChebError::UnsupportedCase { reason, .. }) => {
            let poly = IntPoly::from_roots(&[t]).map_err(|e| usage(format!("--t: {e}")))?;
            let job = SieveJob::new(poly, k, 2, cap);
            let r = DensityReport::from_records(&job, &sieve(&job, out.cfg.workers))
                .map_err(|e| usage(format!("--cap: {e}")))?;
            out.json(
                "lemma23",
                SieveOnlyReport {
                    t,
                    k,
                    predicted: None,
                    reason,
                    n_primes: r.n_primes,
                    n_witnesses: r.n_witnesses,
                    observed: r.observed,
                    observed_value: r.observed_value,
                    verdict: "sieve-only",
                },
            )?;
            Ok(EXIT_OK)
        }
        Err(ChebError::Sieve(e)) => Err(usage(format!("--cap: {e}"))),
    }
}

fn run_corpus(out: &Output, path: Option<&PathBuf>) -> Result<i32, CliError> {
    let text = match path {
        Some(p) => read(p, "corpus")?,
        None => DEFAULT_CORPUS.to_string(),
    };
    let c = corpus::parse(&text).map_err(|e: CorpusError| usage(e.to_string()))?;
    let summary = corpus::run(&c, out.cfg.workers);
    let code = if summary.failed == 0 { EXIT_OK } else { EXIT_NEGATIVE };
    out.json("corpus", summary)?;
    Ok(code)
}

/// Runs a parsed configuration and returns the exit code.
pub fn run(cfg: &RunConfig) -> i32 {
    let out = Output { cfg };
    let result = match &cfg.command {
        Command::Sieve(a) => run_sieve(&out, a),
        Command::Ksearch(a) => run_ksearch(&out, a),
        Command::Capelli { t, k } => {
            if *k == 0 {
                Err(usage("--k must be at least 1"))
            } else {
                out.json(
                    "capelli",
                    CapelliReport {
                        t,
                        k: *k,
                        irreducible: capelli_irreducible(t, *k),
                    },
                )
                .map(|_| EXIT_OK)
            }
        }
        Command::Height { t } => out
            .json("height", HeightReport { t, height: weil_height(t) })
            .map(|_| EXIT_OK),
        Command::Powerbound { t } => match power_bound(t) {
            Ok(b) => out.json("powerbound", PowerBoundReport { t, power_bound: b }).map(|_| EXIT_OK),
            Err(e) => out.error("powerbound", "no-bound", e.to_string(), None),
        },
        Command::H2check(a) => run_h2(&out, a),
        Command::Lemma23 { t, k, cap } => run_lemma23(&out, *t, *k, *cap),
        Command::Corpus { path } => run_corpus(&out, path.as_ref()),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("kwitness: {msg}");
            EXIT_USAGE
        }
    }
}

/// Parses `args` (including the program name) and runs them.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let _ = e.print();
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("kwitness").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn configs_round_trip_through_json() {
        for args in [
            &["sieve", "--poly", "T-8", "--k", "3", "--hi", "100000"][..],
            &["ksearch", "--poly", "(T-2)*(T-3)", "--witnesses", "4", "--no-timestamp"],
            &["ksearch", "validate", "--cert", "c.json"],
            &["capelli", "--t", "-4", "--k", "4"],
            &["height", "--t", "3/2"],
            &["h2check", "--gen", "(1 2)", "--gen", "(1 2 3)"],
            &["h2check", "sweep", "--max-order", "12"],
            &["lemma23", "--t", "-2", "--k", "3", "--workers", "1"],
            &["corpus"],
        ] {
            let cfg = parse(args);
            let text = serde_json::to_string(&cfg).unwrap();
            let back: RunConfig = serde_json::from_str(&text).unwrap();
            assert_eq!(back, cfg, "{args:?}");
        }
    }

    #[test]
    fn defaults() {
        let cfg = parse(&["sieve", "--poly", "T-2", "--k", "3"]);
        let Command::Sieve(a) = cfg.command else { panic!() };
        assert_eq!((a.lo, a.hi, a.csv), (2, 1_000_000, false));
        let cfg = parse(&["ksearch", "--poly", "T-2"]);
        let Command::Ksearch(a) = cfg.command else { panic!() };
        assert_eq!((a.witnesses, a.cap, a.kmax, a.probe_primes), (10, 1_000_000, 60, 2000));
    }

    #[test]
    fn usage_errors_exit_2() {
        for args in [
            &["kwitness"][..],
            &["kwitness", "sieve", "--poly", "2*T - 1", "--k", "2"],
            &["kwitness", "sieve", "--k", "2"],
            &["kwitness", "ksearch"],
            &["kwitness", "capelli", "--t", "x", "--k", "2"],
            &["kwitness", "frobnicate"],
        ] {
            assert_eq!(main_with_args(args.iter().copied()), EXIT_USAGE, "{args:?}");
        }
    }
}
