//! The witness sieve.
//!
//! For a job `(P, k, [lo, hi))` every prime of the range outside a finite
//! excluded set gets a [`WitnessRecord`] telling whether it is a prime divisor
//! of `P(T)` and of `P(T^k)`. A *witness* divides the first but not the
//! second.
//!
//! The excluded set is the primes dividing `disc(P) * k * P(0)`; away from it a
//! root `x` of `P(T^k)` mod p gives the root `x^k` of `P(T)`, so a record with
//! `divides_pk && !divides_p` can only come from a bug.
//!
//! Work is split into disjoint sub-ranges handled by a rayon pool; the merge
//! keeps prime order, so output does not depend on the worker count.

mod cache;

pub use cache::{CacheError, SieveCache, CACHE_ENV};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{has_root_mod_with, prime_stream, IntPoly, RootStrategy};
use crate::chebmodel;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SieveError {
    #[error("found {} of the requested witnesses below {cap}", found.len())]
    CapExhausted { found: Vec<u64>, cap: u64 },
    #[error("no primes to scan in [{lo}, {hi})")]
    EmptyRange { lo: u64, hi: u64 },
}

/// Root-existence flags of one prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub p: u64,
    pub divides_p: bool,
    pub divides_pk: bool,
}

impl WitnessRecord {
    pub fn is_witness(&self) -> bool {
        self.divides_p && !self.divides_pk
    }
}

/// Primes dividing `disc(P) * k * P(0)`, kept as the three factors.
///
/// A zero factor is skipped: for non-squarefree P the discriminant of the
/// squarefree part is used, and `P(0) = 0` contributes nothing (then 0 is a
/// root mod every prime of both polynomials).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcludedPrimes {
    discriminant: BigInt,
    k: u64,
    constant: BigInt,
}

impl ExcludedPrimes {
    pub fn for_job(poly: &IntPoly, k: u32) -> Self {
        let discriminant = poly.squarefree_part().discriminant();
        ExcludedPrimes {
            discriminant,
            k: k as u64,
            constant: poly.constant_term().clone(),
        }
    }

    pub fn contains(&self, p: u64) -> bool {
        let divides = |n: &BigInt| !n.is_zero() && (n % p).is_zero();
        self.k.is_multiple_of(p) || divides(&self.discriminant) || divides(&self.constant)
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.discriminant
    }

    /// The excluded primes falling in `[lo, hi)`.
    pub fn list_in(&self, lo: u64, hi: u64) -> Vec<u64> {
        // a prime divisor of n is at most |n|
        let bound = [&self.discriminant, &self.constant]
            .into_iter()
            .filter(|n| !n.is_zero())
            .map(|n| n.magnitude().to_u64().unwrap_or(u64::MAX))
            .chain(std::iter::once(self.k))
            .max()
            .unwrap_or(0);
        prime_stream(lo, hi.min(bound.saturating_add(1)))
            .filter(|&p| self.contains(p))
            .collect()
    }
}

/// One sieve run: `P`, `k`, the prime range `[lo, hi)` and the excluded primes.
#[derive(Debug, Clone)]
pub struct SieveJob {
    pub poly: IntPoly,
    pub k: u32,
    pub lo: u64,
    pub hi: u64,
    composed: IntPoly,
    excluded: ExcludedPrimes,
    strategy: RootStrategy,
}

impl SieveJob {
    /// `lo` is raised to 2 if smaller.
    pub fn new(poly: IntPoly, k: u32, lo: u64, hi: u64) -> Self {
        assert!(k >= 1, "k must be positive");
        let composed = poly.compose_power(k);
        let excluded = ExcludedPrimes::for_job(&poly, k);
        SieveJob {
            poly,
            k,
            lo: lo.max(2),
            hi,
            composed,
            excluded,
            strategy: RootStrategy::default(),
        }
    }

    /// Same job over another range; reuses the discriminant.
    pub fn with_range(&self, lo: u64, hi: u64) -> Self {
        SieveJob {
            lo: lo.max(2),
            hi,
            ..self.clone()
        }
    }

    pub fn with_strategy(mut self, strategy: RootStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn composed(&self) -> &IntPoly {
        &self.composed
    }

    pub fn excluded(&self) -> &ExcludedPrimes {
        &self.excluded
    }

    pub fn record(&self, p: u64) -> WitnessRecord {
        WitnessRecord {
            p,
            divides_p: has_root_mod_with(&self.poly.reduce_mod(p), self.strategy),
            divides_pk: has_root_mod_with(&self.composed.reduce_mod(p), self.strategy),
        }
    }

    fn run_serial(&self, lo: u64, hi: u64) -> Vec<WitnessRecord> {
        prime_stream(lo, hi)
            .filter(|&p| !self.excluded.contains(p))
            .map(|p| self.record(p))
            .collect()
    }
}

const MIN_CHUNK: u64 = 1 << 14;

fn chunks(lo: u64, hi: u64, workers: usize) -> Vec<(u64, u64)> {
    if lo >= hi {
        return Vec::new();
    }
    let span = hi - lo;
    let size = (span / (workers as u64 * 8)).max(MIN_CHUNK);
    let mut out = Vec::new();
    let mut a = lo;
    while a < hi {
        let b = a.saturating_add(size).min(hi);
        out.push((a, b));
        a = b;
    }
    out
}

/// Number of workers used when the caller does not pin one.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn run_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers <= 1 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// One record per non-excluded prime of the job's range, in increasing order.
/// `workers = None` uses all available parallelism; `Some(1)` is a plain
/// serial loop.
pub fn sieve(job: &SieveJob, workers: Option<usize>) -> Vec<WitnessRecord> {
    let workers = workers.unwrap_or_else(default_workers).max(1);
    let parts = chunks(job.lo, job.hi, workers);
    if workers == 1 || parts.len() <= 1 {
        return job.run_serial(job.lo, job.hi);
    }
    run_pool(workers, || {
        parts
            .par_iter()
            .map(|&(a, b)| job.run_serial(a, b))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Exact fraction `num / den`, serialized as `"num/den"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let g = crate::arith::modular::gcd(num, den).max(1);
        Fraction {
            num: num / g,
            den: den / g,
        }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::fmt::Display for Fraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl From<Fraction> for String {
    fn from(f: Fraction) -> String {
        f.to_string()
    }
}

impl TryFrom<String> for Fraction {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        let (n, d) = s.split_once('/').ok_or_else(|| format!("not a fraction: {s}"))?;
        let n = n.trim().parse().map_err(|_| format!("bad numerator: {s}"))?;
        let d: u64 = d.trim().parse().map_err(|_| format!("bad denominator: {s}"))?;
        if d == 0 {
            return Err(format!("zero denominator: {s}"));
        }
        Ok(Fraction::new(n, d))
    }
}

/// Observed witness density of a job, with the model prediction when one is
/// available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub poly: IntPoly,
    pub k: u32,
    pub lo: u64,
    pub hi: u64,
    pub excluded: Vec<u64>,
    pub n_primes: u64,
    pub n_witnesses: u64,
    pub observed: Fraction,
    pub observed_value: f64,
    pub predicted: Option<Fraction>,
    pub stderr: f64,
}

impl DensityReport {
    pub fn from_records(job: &SieveJob, records: &[WitnessRecord]) -> Result<Self, SieveError> {
        let n_primes = records.len() as u64;
        if n_primes == 0 {
            return Err(SieveError::EmptyRange {
                lo: job.lo,
                hi: job.hi,
            });
        }
        let n_witnesses = records.iter().filter(|r| r.is_witness()).count() as u64;
        let observed = Fraction::new(n_witnesses, n_primes);
        let x = observed.value();
        Ok(DensityReport {
            poly: job.poly.clone(),
            k: job.k,
            lo: job.lo,
            hi: job.hi,
            excluded: job.excluded.list_in(job.lo, job.hi),
            n_primes,
            n_witnesses,
            observed,
            observed_value: x,
            predicted: chebmodel::predicted_density(&job.poly, job.k),
            stderr: (x * (1.0 - x) / n_primes as f64).sqrt(),
        })
    }

    /// `|observed - predicted| <= sigmas * stderr`, or `None` without a prediction.
    pub fn within(&self, sigmas: f64) -> Option<bool> {
        self.predicted
            .map(|p| (self.observed_value - p.value()).abs() <= sigmas * self.stderr)
    }
}

pub fn witness_count(job: &SieveJob, workers: Option<usize>) -> Result<DensityReport, SieveError> {
    DensityReport::from_records(job, &sieve(job, workers))
}

/// The `want` smallest witnesses below `cap`, scanning in growing blocks.
///
/// ```
/// use kwitness::primediv::{first_witnesses, SieveError};
/// let p = "T - 2".parse().unwrap();
/// assert_eq!(first_witnesses(&p, 3, 1, 100, None), Ok(vec![7]));
/// let p = "T - 8".parse().unwrap();
/// assert!(matches!(
///     first_witnesses(&p, 3, 1, 100_000, None),
///     Err(SieveError::CapExhausted { ref found, .. }) if found.is_empty()
/// ));
/// ```
pub fn first_witnesses(
    poly: &IntPoly,
    k: u32,
    want: usize,
    cap: u64,
    workers: Option<usize>,
) -> Result<Vec<u64>, SieveError> {
    assert!(want >= 1, "want at least one witness");
    let base = SieveJob::new(poly.clone(), k, 2, cap);
    let mut found = Vec::new();
    let mut lo = 2u64;
    let mut block = 1u64 << 12;
    while lo < cap && found.len() < want {
        let hi = lo.saturating_add(block).min(cap);
        let job = base.with_range(lo, hi);
        found.extend(
            sieve(&job, workers)
                .into_iter()
                .filter(WitnessRecord::is_witness)
                .map(|r| r.p)
                .take(want - found.len()),
        );
        lo = hi;
        block = (block * 2).min(1 << 20);
    }
    if found.len() < want {
        Err(SieveError::CapExhausted { found, cap })
    } else {
        Ok(found)
    }
}

/// Records with `divides_pk` but not `divides_p`. Always empty for records
/// produced by [`sieve`].
pub fn implication_violations(records: &[WitnessRecord]) -> Vec<u64> {
    records
        .iter()
        .filter(|r| r.divides_pk && !r.divides_p)
        .map(|r| r.p)
        .collect()
}

/// Pairs `(p, d)` where `p` divides `P(T^k)` but not `P(T^d)` for a divisor
/// `d` of `k`. A root `x` of `P(T^k)` gives the root `x^(k/d)` of `P(T^d)`,
/// so this is always empty.
pub fn divisor_chain_violations(job: &SieveJob, records: &[WitnessRecord]) -> Vec<(u64, u32)> {
    let divisors: Vec<u32> = (1..job.k).filter(|d| job.k.is_multiple_of(*d)).collect();
    let composed: Vec<(u32, IntPoly)> = divisors
        .iter()
        .map(|&d| (d, job.poly.compose_power(d)))
        .collect();
    let mut out = Vec::new();
    for r in records.iter().filter(|r| r.divides_pk) {
        for (d, q) in &composed {
            if !crate::arith::has_root_mod(&q.reduce_mod(r.p)) {
                out.push((r.p, *d));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::modular::pow_mod;

    fn poly(s: &str) -> IntPoly {
        s.parse().unwrap()
    }

    fn witnesses(records: &[WitnessRecord]) -> Vec<u64> {
        records.iter().filter(|r| r.is_witness()).map(|r| r.p).collect()
    }

    /// p = 1 mod 3 and 2^((p-1)/3) != 1 mod p: 2 is not a cube mod p.
    fn cube_oracle(lo: u64, hi: u64) -> Vec<u64> {
        prime_stream(lo, hi)
            .filter(|&p| p > 3 && p % 3 == 1 && pow_mod(2, (p - 1) / 3, p) != 1)
            .collect()
    }

    #[test]
    fn t_minus_2_cubed() {
        let job = SieveJob::new(poly("T - 2"), 3, 2, 40);
        let recs = sieve(&job, Some(1));
        assert_eq!(witnesses(&recs), [7, 13, 19, 37]);
        assert_eq!(cube_oracle(2, 40), [7, 13, 19, 37]);
        // 2 and 3 are excluded (P(0) = -2, k = 3).
        assert_eq!(recs.first().map(|r| r.p), Some(5));
        assert_eq!(job.excluded().list_in(2, 40), [2, 3]);
    }

    #[test]
    fn oracle_agreement_to_20000() {
        let job = SieveJob::new(poly("T - 2"), 3, 2, 20_000);
        assert_eq!(witnesses(&sieve(&job, None)), cube_oracle(2, 20_000));
    }

    #[test]
    fn remark_negative_control() {
        let job = SieveJob::new(poly("T - 8"), 3, 2, 100_000);
        let recs = sieve(&job, None);
        assert!(witnesses(&recs).is_empty());
        let rep = DensityReport::from_records(&job, &recs).unwrap();
        assert_eq!(rep.n_witnesses, 0);
        assert_eq!(rep.observed, Fraction::new(0, 1));
    }

    #[test]
    fn k_equal_one_has_no_witnesses() {
        for s in ["T - 2", "(T-2)*(T-3)", "T^2 - 2", "T^3 + T + 1"] {
            let job = SieveJob::new(poly(s), 1, 2, 5000);
            assert!(witnesses(&sieve(&job, None)).is_empty(), "{s}");
        }
        assert!(matches!(
            first_witnesses(&poly("(T-2)*(T-3)"), 1, 1, 10_000, None),
            Err(SieveError::CapExhausted { ref found, .. }) if found.is_empty()
        ));
    }

    #[test]
    fn parallel_equals_serial() {
        let job = SieveJob::new(poly("(T-2)*(T+3)"), 6, 2, 200_000);
        assert_eq!(sieve(&job, Some(1)), sieve(&job, Some(4)));
    }

    #[test]
    fn invariants_hold_on_output() {
        for (s, k) in [("T - 2", 6), ("T^2 - 2", 4), ("(T-2)*(T-3)", 6), ("T^3 - T - 1", 4)] {
            let job = SieveJob::new(poly(s), k, 2, 30_000);
            let recs = sieve(&job, None);
            assert!(implication_violations(&recs).is_empty(), "{s}");
            assert!(divisor_chain_violations(&job, &recs).is_empty(), "{s}");
        }
    }

    #[test]
    fn witness_prefix_is_monotone() {
        let p = poly("T - 2");
        let small = first_witnesses(&p, 5, 5, 1_000, None).unwrap();
        let large = first_witnesses(&p, 5, 20, 100_000, None).unwrap();
        assert_eq!(&large[..5], &small[..]);
        let job_a = SieveJob::new(p.clone(), 5, 2, 5_000);
        let job_b = SieveJob::new(p, 5, 2, 50_000);
        let a = witnesses(&sieve(&job_a, None));
        let b = witnesses(&sieve(&job_b, None));
        assert_eq!(&b[..a.len()], &a[..]);
    }

    #[test]
    fn first_witness_examples() {
        assert_eq!(first_witnesses(&poly("T - 2"), 3, 1, 100, None), Ok(vec![7]));
        assert_eq!(
            first_witnesses(&poly("T - 2"), 2, 4, 100, None),
            Ok(vec![3, 5, 11, 13])
        );
        let r = first_witnesses(&poly("T - 2"), 3, 100, 100, None);
        assert_eq!(
            r,
            Err(SieveError::CapExhausted {
                found: cube_oracle(2, 100),
                cap: 100
            })
        );
        // 31 = 2^2 + 27 and 43 = 4^2 + 27: there 2 is a cube.
        assert_eq!(cube_oracle(2, 100), [7, 13, 19, 37, 61, 67, 73, 79, 97]);
    }

    #[test]
    fn excluded_set_for_non_squarefree_input() {
        let p = poly("(T-2)^2*(T-5)");
        assert!(!p.is_squarefree());
        let ex = ExcludedPrimes::for_job(&p, 2);
        // squarefree part (T-2)(T-5) has discriminant 9; P(0) = -20
        assert_eq!(ex.list_in(2, 100), [2, 3, 5]);
        let zero = ExcludedPrimes::for_job(&poly("T*(T-3)"), 1);
        assert_eq!(zero.list_in(2, 100), [3]);
    }

    #[test]
    fn empty_range_is_an_error() {
        let job = SieveJob::new(poly("T - 2"), 3, 24, 29);
        assert_eq!(
            witness_count(&job, None),
            Err(SieveError::EmptyRange { lo: 24, hi: 29 })
        );
    }
}
