//! Exact permutation models for `Gal(T^k - t / Q)` acting on the roots of
//! `T^k - t`, and the comparison between the model's fixed-point-free
//! fraction and the witness density observed by the sieve.
//!
//! For `P = T - t` every prime (outside a finite set) divides `P`, so the
//! witnesses are exactly the primes where `T^k - t` has no root. By
//! Chebotarev their density is the proportion of Galois elements without a
//! fixed root.
//!
//! Supported cases:
//!
//! * `k = 2`, `t` not a square: the group `{id, swap}`;
//! * `k` an odd prime, `t` squarefree with `|t| >= 2`: the splitting field
//!   `Q(zeta_k, t^(1/k))` has degree `k(k-1)` and the group is every affine map
//!   `j -> b*j + a mod k` (`b` invertible) on the root indices
//!   `alpha * zeta^j`.
//!
//! Everything else is rejected with [`ChebError::UnsupportedCase`] and
//! callers fall back to sieve-only mode.

use serde::{Deserialize, Serialize};

use crate::arith::modular::{is_prime, totient};
use crate::arith::IntPoly;
use crate::powers::{capelli_irreducible, kth_power_test, Rational};
use crate::primediv::{witness_count, DensityReport, Fraction, SieveError, SieveJob};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChebError {
    #[error("unsupported case t = {t}, k = {k}: {reason}")]
    UnsupportedCase { t: i64, k: u32, reason: String },
    #[error(transparent)]
    Sieve(#[from] SieveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    MetacyclicFull,
    CyclicKummer,
}

/// Hypotheses verified before the model was built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityChecks {
    pub k_prime: bool,
    pub t_squarefree: bool,
    pub capelli_irreducible: bool,
    /// Degree of the splitting field, `k * phi(k)` for the metacyclic case.
    pub field_degree: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermGroupModel {
    pub t: i64,
    pub k: u32,
    pub elements: Vec<Vec<u32>>,
    pub provenance: Provenance,
    pub validity_checks: ValidityChecks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelPrediction {
    pub t: i64,
    pub k: u32,
    pub fpf_fraction: Fraction,
}

fn is_squarefree(n: u64) -> bool {
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d * d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn build_model(t: i64, k: u32) -> Result<PermGroupModel, ChebError> {
    let unsupported = |reason: &str| ChebError::UnsupportedCase {
        t,
        k,
        reason: reason.to_string(),
    };
    if t.unsigned_abs() <= 1 {
        return Err(unsupported("|t| <= 1"));
    }
    if !is_prime(k as u64) {
        return Err(unsupported("k is not prime"));
    }
    let rt = Rational::from(t);
    let t_squarefree = is_squarefree(t.unsigned_abs());
    let irreducible = capelli_irreducible(&rt, k);
    if k == 2 {
        if kth_power_test(&rt, 2).is_some() {
            return Err(unsupported("t is a square"));
        }
        return Ok(PermGroupModel {
            t,
            k,
            elements: vec![vec![0, 1], vec![1, 0]],
            provenance: Provenance::CyclicKummer,
            validity_checks: ValidityChecks {
                k_prime: true,
                t_squarefree,
                capelli_irreducible: irreducible,
                field_degree: 2,
            },
        });
    }
    if !t_squarefree {
        return Err(unsupported("t is not squarefree"));
    }
    debug_assert!(irreducible);
    let elements = (1..k)
        .flat_map(|b| (0..k).map(move |a| (0..k).map(|j| (b * j + a) % k).collect()))
        .collect();
    Ok(PermGroupModel {
        t,
        k,
        elements,
        provenance: Provenance::MetacyclicFull,
        validity_checks: ValidityChecks {
            k_prime: true,
            t_squarefree,
            capelli_irreducible: irreducible,
            field_degree: k as u64 * totient(k as u64),
        },
    })
}

impl PermGroupModel {
    /// Closure, identity and inverses, checked exhaustively.
    pub fn is_group(&self) -> bool {
        use std::collections::HashSet;
        let n = self.k as usize;
        let set: HashSet<&Vec<u32>> = self.elements.iter().collect();
        let identity: Vec<u32> = (0..self.k).collect();
        if set.len() != self.elements.len() || !set.contains(&identity) {
            return false;
        }
        let compose = |f: &[u32], g: &[u32]| -> Vec<u32> { (0..n).map(|j| f[g[j] as usize]).collect() };
        let closed = self
            .elements
            .iter()
            .all(|f| self.elements.iter().all(|g| set.contains(&compose(f, g))));
        let inverses = self.elements.iter().all(|f| {
            let mut inv = vec![0u32; n];
            for (j, &fj) in f.iter().enumerate() {
                inv[fj as usize] = j as u32;
            }
            set.contains(&inv)
        });
        closed && inverses
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

pub fn fpf_fraction(model: &PermGroupModel) -> ModelPrediction {
    let fpf = model
        .elements
        .iter()
        .filter(|g| g.iter().enumerate().all(|(j, &gj)| gj as usize != j))
        .count();
    ModelPrediction {
        t: model.t,
        k: model.k,
        fpf_fraction: Fraction::new(fpf as u64, model.order() as u64),
    }
}

/// Model density for `P = T - t` when `(t, k)` is supported.
pub fn predicted_density(poly: &IntPoly, k: u32) -> Option<Fraction> {
    if poly.degree() != 1 {
        return None;
    }
    let t = i64::try_from(-poly.constant_term()).ok()?;
    build_model(t, k).ok().map(|m| fpf_fraction(&m).fpf_fraction)
}

/// Outcome of comparing the model with the sieve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessReport {
    pub t: i64,
    pub k: u32,
    pub predicted: Fraction,
    pub observed: Fraction,
    pub observed_value: f64,
    pub n_primes: u64,
    pub n_witnesses: u64,
    pub stderr: f64,
    /// Model has a fixed-point-free element iff the sieve found a witness.
    pub existence_check: bool,
    /// `|observed - predicted| <= sigmas * stderr`.
    pub density_check: bool,
    pub sigmas: f64,
    pub verdict: String,
}

/// Tolerance of the density check, in standard errors.
pub const DEFAULT_SIGMAS: f64 = 4.0;

pub fn harness_lemma23(
    t: i64,
    k: u32,
    prime_cap: u64,
    workers: Option<usize>,
) -> Result<HarnessReport, ChebError> {
    let model = build_model(t, k)?;
    let prediction = fpf_fraction(&model);
    let poly = IntPoly::from_roots(&[t]).expect("linear");
    let report: DensityReport = witness_count(&SieveJob::new(poly, k, 2, prime_cap), workers)?;
    let predicted = prediction.fpf_fraction;
    let existence_check = (predicted.num > 0) == (report.n_witnesses > 0);
    let density_check =
        (report.observed_value - predicted.value()).abs() <= DEFAULT_SIGMAS * report.stderr;
    Ok(HarnessReport {
        t,
        k,
        predicted,
        observed: report.observed,
        observed_value: report.observed_value,
        n_primes: report.n_primes,
        n_witnesses: report.n_witnesses,
        stderr: report.stderr,
        existence_check,
        density_check,
        sigmas: DEFAULT_SIGMAS,
        verdict: if existence_check && density_check { "pass" } else { "fail" }.to_string(),
    })
}
