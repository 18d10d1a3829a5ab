//! Prime divisors of a monic integer polynomial `P(T)` compared with those of
//! `P(T^k)`.
//!
//! A prime `p` is a *prime divisor* of `P(T)` when `P` has a root modulo `p`.
//! A *witness* for `(P, k)` is a prime divisor of `P(T)` that is not a prime
//! divisor of `P(T^k)`. The crate provides:
//!
//! * [`arith`]: modular and integer polynomial kernels, prime streams, parsing;
//! * [`primediv`]: the witness sieve, density reports and the on-disk cache;
//! * [`powers`]: Weil heights of rationals, exact k-th powers, Capelli's test;
//! * [`ksearch`]: certified and heuristic searches for exponents `k` that have
//!   witnesses, with self-validating certificates;
//! * [`chebmodel`]: exact permutation models of `Gal(T^k - t)` and the
//!   density comparison harness;
//! * [`groups`]: Cayley-table groups, conjugacy classes and the (H2) search;
//! * [`corpus`]: batch regression cases with expected outcomes;
//! * [`cli`]: the `kwitness` command line front end.
//!
//! ```
//! use kwitness::arith::IntPoly;
//! use kwitness::primediv::{sieve, SieveJob};
//!
//! let p: IntPoly = "T - 2".parse().unwrap();
//! let job = SieveJob::new(p, 3, 2, 40);
//! let w: Vec<u64> = sieve(&job, None).iter().filter(|r| r.is_witness()).map(|r| r.p).collect();
//! assert_eq!(w, [7, 13, 19, 37]);
//! ```

pub mod arith;
pub mod chebmodel;
pub mod cli;
pub mod corpus;
pub mod groups;
pub mod ksearch;
pub mod powers;
pub mod primediv;
