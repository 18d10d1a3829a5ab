//! Oracles shared by the integration tests. Each one recomputes its answer
//! by a route that shares no code with the library function it checks.
#![allow(dead_code)]

use std::process::{Command, Output};

/// `b^e mod m` by plain repeated squaring in u128.
pub fn modpow(b: u64, mut e: u64, m: u64) -> u64 {
    let (mut acc, mut b) = (1u128, b as u128 % m as u128);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        e >>= 1;
    }
    acc as u64
}

/// Primes below `n` by trial division.
pub fn primes_below(n: u64) -> Vec<u64> {
    (2..n).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)).collect()
}

/// Primes below `hi` at which 2 is not a cube: `p = 1 mod 3` and
/// `2^((p-1)/3) != 1`.
pub fn two_not_a_cube(hi: u64) -> Vec<u64> {
    primes_below(hi)
        .into_iter()
        .filter(|&p| p % 3 == 1 && modpow(2, (p - 1) / 3, p) != 1)
        .collect()
}

/// Whether `T^k - t` factors over Q, decided numerically: the roots are
/// `r * w^j` with `w` a primitive k-th root of unity and `r` any fixed root;
/// the binomial is reducible iff some proper subset of roots has a product
/// polynomial with integer coefficients.
pub fn binomial_reducible_numeric(t: i64, k: u32) -> bool {
    let k = k as usize;
    if k == 1 {
        return false;
    }
    let mag = (t.unsigned_abs() as f64).powf(1.0 / k as f64);
    let base_angle = if t < 0 { std::f64::consts::PI / k as f64 } else { 0.0 };
    let roots: Vec<(f64, f64)> = (0..k)
        .map(|j| {
            let a = base_angle + 2.0 * std::f64::consts::PI * j as f64 / k as f64;
            (mag * a.cos(), mag * a.sin())
        })
        .collect();
    for mask in 1u32..(1 << k) - 1 {
        let d = mask.count_ones() as usize;
        if d > k / 2 {
            continue;
        }
        // coefficients of prod (T - root), complex, lowest degree first
        let mut c: Vec<(f64, f64)> = vec![(1.0, 0.0)];
        for (j, &(re, im)) in roots.iter().enumerate() {
            if mask >> j & 1 == 0 {
                continue;
            }
            let mut next = vec![(0.0, 0.0); c.len() + 1];
            for (i, &(a, b)) in c.iter().enumerate() {
                next[i + 1].0 += a;
                next[i + 1].1 += b;
                next[i].0 -= a * re - b * im;
                next[i].1 -= a * im + b * re;
            }
            c = next;
        }
        let integral = c
            .iter()
            .all(|&(a, b)| b.abs() < 1e-6 && (a - a.round()).abs() < 1e-6);
        if integral {
            return true;
        }
    }
    false
}

/// Fixed-point-free proportion of the affine maps `j -> b*j + a mod k`,
/// counted by solving `(b - 1) j = -a` case by case rather than by
/// evaluating permutations: for `b = 1` the map is free iff `a != 0`; for
/// `b != 1` the linear congruence always has the solution, so it never is.
pub fn affine_fpf_by_cases(k: u64) -> (u64, u64) {
    let free = k - 1; // b = 1, a != 0
    (free, k * (k - 1))
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_kwitness")
}

pub fn cli(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .env_remove("KWITNESS_CACHE")
        .output()
        .expect("spawn kwitness")
}

pub fn cli_json(args: &[&str]) -> (i32, serde_json::Value) {
    let out = cli(args);
    let code = out.status.code().unwrap_or(-1);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{args:?}: stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    });
    (code, v)
}
