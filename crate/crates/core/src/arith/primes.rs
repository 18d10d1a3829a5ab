//! Segmented sieve of Eratosthenes.
//!
//! [`prime_stream`] yields the primes of a half-open range lazily, one
//! segment at a time, so a caller scanning "until W witnesses are found" never
//! materializes the whole range. Base primes up to `sqrt(hi)` are produced by
//! the same sieve, recursively.

use super::modular::{isqrt, MAX_MODULUS};

const SEGMENT: u64 = 1 << 18;
const SMALL_LIMIT: u64 = 1 << 20;

/// Plain sieve for the base primes `<= limit`.
fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn base_primes(hi: u64) -> Vec<u64> {
    let limit = isqrt(hi.saturating_sub(1));
    if limit <= SMALL_LIMIT {
        small_primes(limit)
    } else {
        prime_stream(2, limit + 1).collect()
    }
}

/// Iterator over the primes in `[lo, hi)`, increasing.
#[derive(Debug, Clone)]
pub struct PrimeStream {
    hi: u64,
    next_lo: u64,
    base: Vec<u64>,
    buf: Vec<u64>,
    pos: usize,
}

/// All primes in `[lo, hi)` in increasing order.
///
/// Panics if `hi` exceeds 2^62.
///
/// ```
/// use kwitness::arith::prime_stream;
/// let ps: Vec<u64> = prime_stream(2, 12).collect();
/// assert_eq!(ps, [2, 3, 5, 7, 11]);
/// ```
pub fn prime_stream(lo: u64, hi: u64) -> PrimeStream {
    assert!(hi <= MAX_MODULUS, "prime range above 2^62");
    let lo = lo.max(2);
    PrimeStream {
        hi,
        next_lo: lo,
        base: if lo < hi { base_primes(hi) } else { Vec::new() },
        buf: Vec::new(),
        pos: 0,
    }
}

impl PrimeStream {
    fn fill(&mut self) -> bool {
        while self.next_lo < self.hi {
            let lo = self.next_lo;
            let hi = lo.saturating_add(SEGMENT).min(self.hi);
            self.next_lo = hi;
            let mut composite = vec![false; (hi - lo) as usize];
            for &q in &self.base {
                let sq = q * q;
                if sq >= hi {
                    break;
                }
                let mut m = if sq >= lo { sq } else { lo.div_ceil(q) * q };
                while m < hi {
                    composite[(m - lo) as usize] = true;
                    m += q;
                }
            }
            self.buf.clear();
            self.pos = 0;
            self.buf.extend(
                composite
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| !c)
                    .map(|(i, _)| lo + i as u64),
            );
            if !self.buf.is_empty() {
                return true;
            }
        }
        false
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.pos >= self.buf.len() && !self.fill() {
            return None;
        }
        let p = self.buf[self.pos];
        self.pos += 1;
        Some(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent oracle: trial division.
    fn trial(lo: u64, hi: u64) -> Vec<u64> {
        (lo.max(2)..hi)
            .filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect()
    }

    #[test]
    fn small_ranges() {
        assert_eq!(prime_stream(2, 12).collect::<Vec<_>>(), [2, 3, 5, 7, 11]);
        assert_eq!(prime_stream(90, 100).collect::<Vec<_>>(), [97]);
        assert_eq!(prime_stream(0, 2).count(), 0);
        assert_eq!(prime_stream(10, 10).count(), 0);
    }

    #[test]
    fn pi_of_a_million() {
        // Independent plain sieve, separate from the segmented one.
        let n = 1_000_000usize;
        let mut mark = vec![true; n];
        mark[0] = false;
        mark[1] = false;
        let mut i = 2;
        while i * i < n {
            if mark[i] {
                for j in (i * i..n).step_by(i) {
                    mark[j] = false;
                }
            }
            i += 1;
        }
        let oracle = mark.iter().filter(|&&b| b).count();
        assert_eq!(oracle, 78_498);
        assert_eq!(prime_stream(2, 1_000_000).count(), oracle);
    }

    #[test]
    fn segment_boundaries_near_large_values() {
        let lo = (1u64 << 40) - 1000;
        let hi = (1u64 << 40) + 1000;
        let got: Vec<u64> = prime_stream(lo, hi).collect();
        let expect: Vec<u64> = (lo..hi).filter(|&n| super::super::modular::is_prime(n)).collect();
        assert_eq!(got, expect);
    }

    proptest! {
        #[test]
        fn matches_trial_division(lo in 0u64..5000, len in 0u64..3000) {
            prop_assert_eq!(prime_stream(lo, lo + len).collect::<Vec<_>>(), trial(lo, lo + len));
        }

        #[test]
        fn adjacent_ranges_concatenate(a in 0u64..600_000, b in 0u64..600_000, c in 0u64..600_000) {
            let mut v = [a, b, c];
            v.sort_unstable();
            let whole: Vec<u64> = prime_stream(v[0], v[2]).collect();
            let mut split: Vec<u64> = prime_stream(v[0], v[1]).collect();
            split.extend(prime_stream(v[1], v[2]));
            prop_assert_eq!(whole, split);
        }
    }
}
