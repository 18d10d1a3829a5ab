//! Searching for exponents `k` such that infinitely many primes divide `P(T)`
//! but not `P(T^k)`.
//!
//! The certified branch handles polynomials whose roots are all rational
//! (hence integers) and walks the roots one at a time, keeping a running
//! degree bound `D`:
//!
//! * the root `-1` takes `k_j` = the least power of two above `D`; every
//!   non-trivial Galois element of `T^(k_j) + 1` then moves every root;
//! * any other root `t` takes `k_j` = the least prime above
//!   `max(power_bound(t), D)`, which makes `T^(k_j) - t` irreducible by Capelli;
//!
//! after which `D <- D * k_j * phi(k_j)`. The exponent is `k = lcm(k_j)`.
//! The certificate carries witness primes found by the sieve; [`validate`]
//! re-derives the bookkeeping and re-checks every witness from scratch, so a
//! certificate that validates is correct regardless of how it was produced.
//!
//! The heuristic branch accepts any `P` and probes `k = 2, 3, ...` with a
//! short sieve until a witness appears.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::modular::{divisors, is_prime, lcm, next_prime_above, totient};
use crate::arith::{has_root_mod_with, prime_stream, zpoly, IntPoly, RootStrategy};
use crate::powers::{capelli_irreducible, minimal_irreducible_prime, power_bound, Rational};
use crate::primediv::{default_workers, first_witnesses, sieve, SieveError, SieveJob};

/// Default number of witnesses a certificate carries.
pub const DEFAULT_WITNESSES: usize = 10;
/// Default prime bound for the witness scan.
pub const DEFAULT_CAP: u64 = 1_000_000;
/// Default number of primes in a heuristic probe.
pub const DEFAULT_PROBE_PRIMES: usize = 2000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KSearchError {
    #[error("P(0) = 0: every prime divides both P(T) and P(T^k)")]
    RootAtZero,
    #[error("P(1) = 0: the root 1 is a k-th power for every k")]
    RootAtOne,
    #[error("P is not squarefree")]
    NotSquarefree,
    #[error("P has irrational roots (cofactor {cofactor}); use the heuristic search")]
    IrrationalRoots { cofactor: String },
    #[error("constant term {0} is too large to enumerate its divisors")]
    ConstantTooLarge(BigInt),
    #[error("exponent bookkeeping overflowed 64 bits")]
    BoundOverflow,
    #[error("exponent k = {0} is too large to sieve")]
    KTooLarge(u64),
    #[error("only {} of {} witnesses below {}", .0.witnesses.len(), .0.witness_target, .0.cap)]
    CapExhausted(Box<KCertificate>),
    #[error("no k <= {kmax} produced a witness in the probe")]
    NoKFound { kmax: u32, probes: Vec<ProbeStat> },
}

/// Rational roots with multiplicity and the cofactor carrying the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootInventory {
    /// Sorted by `(|t|, t)`.
    pub rational_roots: Vec<(BigInt, u32)>,
    /// Monic; `[1]` when every root is rational.
    pub irrational_part: Vec<BigInt>,
}

impl RootInventory {
    pub fn all_rational(&self) -> bool {
        self.irrational_part.len() == 1
    }
}

/// Integer roots of a monic `P` by divisor scan of the constant term.
///
/// ```
/// use kwitness::ksearch::inventory;
/// let inv = inventory(&"T^2 - T - 2".parse().unwrap()).unwrap();
/// let roots: Vec<i64> = inv.rational_roots.iter().map(|(r, _)| r.try_into().unwrap()).collect();
/// assert_eq!(roots, [-1, 2]);
/// assert!(inv.all_rational());
/// ```
pub fn inventory(poly: &IntPoly) -> Result<RootInventory, KSearchError> {
    let mut rest: Vec<BigInt> = poly.coeffs().to_vec();
    let mut roots: BTreeMap<(BigInt, BigInt), u32> = BTreeMap::new();
    let mut zeros = 0;
    while rest.len() > 1 && rest[0].is_zero() {
        rest.remove(0);
        zeros += 1;
    }
    if zeros > 0 {
        roots.insert((BigInt::zero(), BigInt::zero()), zeros);
    }
    if rest.len() > 1 {
        let c0 = rest[0].magnitude().to_u64().ok_or_else(|| KSearchError::ConstantTooLarge(rest[0].clone()))?;
        for d in divisors(c0) {
            for r in [-BigInt::from(d), BigInt::from(d)] {
                let lin = [-r.clone(), BigInt::one()];
                loop {
                    if rest.len() <= 1 || !zpoly::eval(&rest, &r).is_zero() {
                        break;
                    }
                    let (q, rem) = zpoly::div_rem_monic(&rest, &lin);
                    debug_assert!(rem.is_empty());
                    rest = q;
                    *roots.entry((r.abs(), r.clone())).or_default() += 1;
                }
            }
        }
    }
    Ok(RootInventory {
        rational_roots: roots.into_iter().map(|((_, r), m)| (r, m)).collect(),
        irrational_part: rest,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// The root is `-1`; `k_j` is a power of two.
    Unity,
    /// `|t| >= 2`; `k_j` is a prime above the power bound.
    NonUnity,
}

/// Per-root step of the certified construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub root: Rational,
    pub branch: Branch,
    pub k_j: u64,
    /// `D` before this root was processed.
    pub degree_bound_before: u64,
    pub power_bound: Option<u64>,
    pub capelli_irreducible: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CombinedRule {
    Lcm,
    Heuristic,
}

/// Witness count of one heuristic probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeStat {
    pub k: u32,
    pub primes_probed: u64,
    pub witnesses: u64,
}

/// A finite, checkable record that `P(T)` and `P(T^k)` have different prime
/// divisors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KCertificate {
    pub schema: u32,
    pub poly: IntPoly,
    pub k: u64,
    pub combined_rule: CombinedRule,
    pub branch_log: Vec<BranchRecord>,
    /// Final `D` of the certified construction.
    pub degree_bound: Option<u64>,
    pub witness_target: usize,
    pub cap: u64,
    pub witnesses: Vec<u64>,
    /// Fewer than `witness_target` witnesses exist below `cap`.
    pub partial: bool,
    /// More exponents with the same property: `k * q` for primes `q > D`.
    pub further_k: Vec<u64>,
    pub probes: Vec<ProbeStat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub witnesses: usize,
    pub cap: u64,
    pub workers: Option<usize>,
    /// How many extra exponents to list in `further_k`.
    pub more: usize,
    pub probe_primes: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            witnesses: DEFAULT_WITNESSES,
            cap: DEFAULT_CAP,
            workers: None,
            more: 0,
            probe_primes: DEFAULT_PROBE_PRIMES,
        }
    }
}

fn admissible(poly: &IntPoly) -> Result<(), KSearchError> {
    if poly.constant_term().is_zero() {
        return Err(KSearchError::RootAtZero);
    }
    if poly.eval(&BigInt::one()).is_zero() {
        return Err(KSearchError::RootAtOne);
    }
    Ok(())
}

fn mul_checked(a: u64, b: u64) -> Result<u64, KSearchError> {
    a.checked_mul(b).ok_or(KSearchError::BoundOverflow)
}

/// Exponent choice for one root given the running bound `d`.
fn branch_for(root: &Rational, d: u64) -> Result<BranchRecord, KSearchError> {
    if root.is_root_of_unity() {
        // only -1 reaches here: 1 is rejected up front
        let mut k_j = 2u64;
        while k_j <= d {
            k_j = mul_checked(k_j, 2)?;
        }
        return Ok(BranchRecord {
            root: root.clone(),
            branch: Branch::Unity,
            k_j,
            degree_bound_before: d,
            power_bound: None,
            capelli_irreducible: None,
        });
    }
    let bound = power_bound(root).expect("root is neither 0 nor a root of unity");
    let k_j = minimal_irreducible_prime(root, d).expect("checked above");
    Ok(BranchRecord {
        root: root.clone(),
        branch: Branch::NonUnity,
        k_j,
        degree_bound_before: d,
        power_bound: Some(bound),
        capelli_irreducible: Some(capelli_irreducible(root, k_j as u32)),
    })
}

fn next_bound(d: u64, k_j: u64) -> Result<u64, KSearchError> {
    mul_checked(d, mul_checked(k_j, totient(k_j))?)
}

fn further_exponents(k: u64, d: u64, more: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(more);
    let mut q = d;
    while out.len() < more {
        q = next_prime_above(q);
        match k.checked_mul(q) {
            Some(v) => out.push(v),
            None => break,
        }
    }
    out
}

fn attach_witnesses(mut cert: KCertificate, opts: &SearchOptions) -> Result<KCertificate, KSearchError> {
    let k = u32::try_from(cert.k).map_err(|_| KSearchError::KTooLarge(cert.k))?;
    match first_witnesses(&cert.poly, k, opts.witnesses, opts.cap, opts.workers) {
        Ok(w) => {
            cert.witnesses = w;
            Ok(cert)
        }
        Err(SieveError::CapExhausted { found, .. }) => {
            cert.witnesses = found;
            cert.partial = true;
            Err(KSearchError::CapExhausted(Box::new(cert)))
        }
        Err(e @ SieveError::EmptyRange { .. }) => unreachable!("{e}"),
    }
}

/// Certified construction for polynomials whose roots are all rational.
///
/// ```
/// use kwitness::ksearch::{find_k_certified, validate, SearchOptions};
/// let opts = SearchOptions { witnesses: 4, ..Default::default() };
/// let cert = find_k_certified(&"T - 2".parse().unwrap(), &opts).unwrap();
/// assert_eq!(cert.k, 2);
/// assert_eq!(cert.witnesses, [3, 5, 11, 13]);
/// assert!(validate(&cert).valid);
/// ```
pub fn find_k_certified(poly: &IntPoly, opts: &SearchOptions) -> Result<KCertificate, KSearchError> {
    admissible(poly)?;
    if !poly.is_squarefree() {
        return Err(KSearchError::NotSquarefree);
    }
    let inv = inventory(poly)?;
    if !inv.all_rational() {
        let cofactor = IntPoly::new(inv.irrational_part).map(|p| p.to_string()).unwrap_or_default();
        return Err(KSearchError::IrrationalRoots { cofactor });
    }
    let mut d = 1u64;
    let mut k = 1u64;
    let mut branch_log = Vec::new();
    for (root, _) in &inv.rational_roots {
        let rec = branch_for(&Rational::integer(root.clone()), d)?;
        k = lcm(k, rec.k_j);
        d = next_bound(d, rec.k_j)?;
        branch_log.push(rec);
    }
    let cert = KCertificate {
        schema: 1,
        poly: poly.clone(),
        k,
        combined_rule: CombinedRule::Lcm,
        branch_log,
        degree_bound: Some(d),
        witness_target: opts.witnesses,
        cap: opts.cap,
        witnesses: Vec::new(),
        partial: false,
        further_k: further_exponents(k, d, opts.more),
        probes: Vec::new(),
        generated_at: None,
    };
    attach_witnesses(cert, opts)
}

fn probe(poly: &IntPoly, k: u32, probe_hi: u64) -> ProbeStat {
    let recs = sieve(&SieveJob::new(poly.clone(), k, 2, probe_hi), Some(1));
    ProbeStat {
        k,
        primes_probed: recs.len() as u64,
        witnesses: recs.iter().filter(|r| r.is_witness()).count() as u64,
    }
}

/// Smallest `k` in `2..=kmax` whose probe over the first `probe_primes` primes
/// finds a witness, extended to a full certificate.
///
/// ```
/// use kwitness::ksearch::{find_k_heuristic, SearchOptions};
/// let opts = SearchOptions { witnesses: 1, ..Default::default() };
/// let cert = find_k_heuristic(&"T^2 - 2".parse().unwrap(), 60, &opts).unwrap();
/// assert_eq!((cert.k, cert.witnesses[0]), (2, 17));
/// ```
pub fn find_k_heuristic(
    poly: &IntPoly,
    kmax: u32,
    opts: &SearchOptions,
) -> Result<KCertificate, KSearchError> {
    admissible(poly)?;
    let probe_hi = prime_stream(2, u64::MAX >> 2)
        .nth(opts.probe_primes.max(1) - 1)
        .expect("enough primes")
        + 1;
    let batch = opts.workers.unwrap_or_else(default_workers).max(1);
    let ks: Vec<u32> = (2..=kmax).collect();
    let mut probes = Vec::new();
    let mut chosen = None;
    for group in ks.chunks(batch) {
        let stats: Vec<ProbeStat> = if batch == 1 {
            group.iter().map(|&k| probe(poly, k, probe_hi)).collect()
        } else {
            group.par_iter().map(|&k| probe(poly, k, probe_hi)).collect()
        };
        for s in stats {
            probes.push(s);
            if s.witnesses > 0 {
                chosen = Some(s.k);
                break;
            }
        }
        if chosen.is_some() {
            break;
        }
    }
    let Some(k) = chosen else {
        return Err(KSearchError::NoKFound { kmax, probes });
    };
    let cert = KCertificate {
        schema: 1,
        poly: poly.clone(),
        k: k as u64,
        combined_rule: CombinedRule::Heuristic,
        branch_log: Vec::new(),
        degree_bound: None,
        witness_target: opts.witnesses,
        cap: opts.cap,
        witnesses: Vec::new(),
        partial: false,
        further_k: (2..).map(|m| m * k as u64).take(opts.more).collect(),
        probes,
        generated_at: None,
    };
    attach_witnesses(cert, opts)
}

/// Result of [`validate`]: `valid` iff `diagnoses` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validation {
    pub valid: bool,
    pub diagnoses: Vec<String>,
}

/// Re-checks a certificate from scratch: every witness with a fresh
/// `gcd(T^p - T, Q)` root test, and, for certified ones, the whole
/// branch/bound bookkeeping.
pub fn validate(cert: &KCertificate) -> Validation {
    let mut diag = Vec::new();
    if cert.k < 2 {
        diag.push(format!("k = {} cannot have witnesses", cert.k));
    }
    if cert.witnesses.is_empty() {
        diag.push("no witnesses".into());
    }
    if !cert.partial && cert.witnesses.len() < cert.witness_target {
        diag.push(format!(
            "{} witnesses listed, {} promised",
            cert.witnesses.len(),
            cert.witness_target
        ));
    }
    if cert.witnesses.windows(2).any(|w| w[0] >= w[1]) {
        diag.push("witnesses are not strictly increasing".into());
    }
    match u32::try_from(cert.k) {
        Ok(k) if k >= 1 => {
            let composed = cert.poly.compose_power(k);
            for &p in &cert.witnesses {
                if !is_prime(p) {
                    diag.push(format!("{p} is not prime"));
                    continue;
                }
                if !has_root_mod_with(&cert.poly.reduce_mod(p), RootStrategy::Frobenius) {
                    diag.push(format!("{p} is not a prime divisor of P(T)"));
                }
                if has_root_mod_with(&composed.reduce_mod(p), RootStrategy::Frobenius) {
                    diag.push(format!("{p} is a prime divisor of P(T^{k})"));
                }
            }
        }
        _ => diag.push(format!("k = {} out of range", cert.k)),
    }
    if cert.further_k.iter().any(|&m| cert.k == 0 || m % cert.k != 0) {
        diag.push("further_k contains a non-multiple of k".into());
    }
    match cert.combined_rule {
        CombinedRule::Heuristic => {
            if !cert.branch_log.is_empty() {
                diag.push("heuristic certificate with a branch log".into());
            }
        }
        CombinedRule::Lcm => check_branches(cert, &mut diag),
    }
    Validation {
        valid: diag.is_empty(),
        diagnoses: diag,
    }
}

fn check_branches(cert: &KCertificate, diag: &mut Vec<String>) {
    if let Err(e) = admissible(&cert.poly) {
        diag.push(e.to_string());
        return;
    }
    let roots = match inventory(&cert.poly) {
        Ok(inv) if inv.all_rational() => inv.rational_roots,
        _ => {
            diag.push("certified rule needs a polynomial with rational roots".into());
            return;
        }
    };
    let logged: Vec<&Rational> = cert.branch_log.iter().map(|b| &b.root).collect();
    let expected: Vec<Rational> = roots
        .iter()
        .flat_map(|(r, m)| std::iter::repeat_n(Rational::integer(r.clone()), *m as usize))
        .collect();
    if logged.len() != expected.len() || logged.iter().zip(&expected).any(|(a, b)| *a != b) {
        diag.push("branch log roots differ from the roots of P in (|t|, t) order".into());
    }
    let mut d = 1u64;
    let mut k = 1u64;
    for b in &cert.branch_log {
        let at = &b.root;
        if b.degree_bound_before != d {
            diag.push(format!("root {at}: bound {} recorded, {d} expected", b.degree_bound_before));
        }
        if b.k_j <= d {
            diag.push(format!("root {at}: k_j = {} does not exceed D = {d}", b.k_j));
        }
        match b.branch {
            Branch::Unity => {
                if *at != Rational::from(-1) {
                    diag.push(format!("root {at} on the unity branch"));
                }
                if !b.k_j.is_power_of_two() || b.k_j < 2 {
                    diag.push(format!("root {at}: k_j = {} is not a power of two", b.k_j));
                }
            }
            Branch::NonUnity => match power_bound(at) {
                Err(e) => diag.push(format!("root {at}: {e}")),
                Ok(pb) => {
                    if b.power_bound != Some(pb) {
                        diag.push(format!("root {at}: power bound recorded wrongly"));
                    }
                    if !is_prime(b.k_j) || b.k_j <= pb {
                        diag.push(format!("root {at}: k_j = {} not a prime above {pb}", b.k_j));
                    }
                    let irr = u32::try_from(b.k_j).is_ok_and(|kj| capelli_irreducible(at, kj));
                    if !irr || b.capelli_irreducible != Some(true) {
                        diag.push(format!("root {at}: T^{} - t is not irreducible", b.k_j));
                    }
                }
            },
        }
        k = lcm(k, b.k_j);
        d = match next_bound(d, b.k_j) {
            Ok(v) => v,
            Err(e) => {
                diag.push(e.to_string());
                return;
            }
        };
    }
    if cert.k != k {
        diag.push(format!("k = {} but lcm of k_j is {k}", cert.k));
    }
    if cert.degree_bound != Some(d) {
        diag.push(format!("final degree bound should be {d}"));
    }
}
