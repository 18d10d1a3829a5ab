//! Polynomials over the prime field with `p` elements.

use super::modular::{add_mod, inv_mod, mul_mod, sub_mod, MAX_MODULUS};

/// Below this prime, [`has_root_mod`] scans every residue; at or above it, the
/// `gcd(T^p - T, Q)` route is used.
pub const DEFAULT_EXHAUSTIVE_BELOW: u64 = 1 << 16;

/// Polynomial with residues in `[0, p)`, lowest degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModPoly {
    prime: u64,
    coeffs: Vec<u64>,
}

impl ModPoly {
    /// Reduces `coeffs` into `[0, p)` and trims. `p` is assumed prime.
    pub fn new(prime: u64, coeffs: impl IntoIterator<Item = u64>) -> Self {
        assert!((2..MAX_MODULUS).contains(&prime), "modulus out of range");
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % prime).collect();
        trim(&mut coeffs);
        ModPoly { prime, coeffs }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.prime;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| add_mod(mul_mod(acc, x, p), c, p))
    }

    pub fn monic(&self) -> ModPoly {
        match self.coeffs.last() {
            None | Some(1) => self.clone(),
            Some(&lc) => {
                let inv = inv_mod(lc, self.prime);
                ModPoly {
                    prime: self.prime,
                    coeffs: self
                        .coeffs
                        .iter()
                        .map(|&c| mul_mod(c, inv, self.prime))
                        .collect(),
                }
            }
        }
    }

    pub fn rem(&self, modulus: &ModPoly) -> ModPoly {
        let mut r = self.coeffs.clone();
        rem_in_place(&mut r, &modulus.coeffs, self.prime);
        ModPoly {
            prime: self.prime,
            coeffs: r,
        }
    }
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// `r <- r mod m` over the field, `m` nonzero.
fn rem_in_place(r: &mut Vec<u64>, m: &[u64], p: u64) {
    let dm = m.len().checked_sub(1).expect("division by zero polynomial");
    let inv = inv_mod(m[dm], p);
    trim(r);
    while r.len() > dm {
        let top = r.len() - 1;
        let f = mul_mod(r[top], inv, p);
        let shift = top - dm;
        for (i, &c) in m.iter().enumerate() {
            r[shift + i] = sub_mod(r[shift + i], mul_mod(f, c, p), p);
        }
        trim(r);
    }
}

fn mul_rem(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = add_mod(out[i + j], mul_mod(x, y, p), p);
        }
    }
    rem_in_place(&mut out, m, p);
    out
}

/// Monic gcd of `a` and `b`.
///
/// ```
/// use kwitness::arith::{poly_gcd_mod, ModPoly};
/// let a = ModPoly::new(5, [4, 0, 1]); // T^2 - 1
/// let b = ModPoly::new(5, [4, 1]); // T - 1
/// assert_eq!(poly_gcd_mod(&a, &b).coeffs(), &[4, 1]);
/// ```
pub fn poly_gcd_mod(a: &ModPoly, b: &ModPoly) -> ModPoly {
    assert_eq!(a.prime, b.prime, "gcd of polynomials over different fields");
    assert!(!(a.is_zero() && b.is_zero()), "gcd(0, 0) is undefined");
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let r = x.rem(&y);
        x = y;
        y = r;
    }
    x.monic()
}

/// How [`has_root_mod_with`] decides root existence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootStrategy {
    /// Evaluate at every residue.
    Exhaustive,
    /// `deg gcd(T^p - T, Q) >= 1`.
    Frobenius,
    /// Exhaustive below the given prime, Frobenius at or above it.
    Threshold(u64),
}

impl Default for RootStrategy {
    fn default() -> Self {
        RootStrategy::Threshold(DEFAULT_EXHAUSTIVE_BELOW)
    }
}

/// Whether `q` has a root in the prime field. The zero polynomial vanishes
/// everywhere and reports `true`.
///
/// ```
/// use kwitness::arith::{has_root_mod, ModPoly};
/// assert!(!has_root_mod(&ModPoly::new(7, [5, 0, 0, 1]))); // T^3 - 2 mod 7
/// assert!(has_root_mod(&ModPoly::new(5, [3, 0, 0, 1]))); // T^3 - 2 mod 5
/// ```
pub fn has_root_mod(q: &ModPoly) -> bool {
    has_root_mod_with(q, RootStrategy::default())
}

pub fn has_root_mod_with(q: &ModPoly, strategy: RootStrategy) -> bool {
    match q.degree() {
        None => return true,
        Some(0) => return false,
        Some(1) => return true,
        _ => {}
    }
    if q.coeffs[0] == 0 {
        return true;
    }
    match strategy {
        RootStrategy::Exhaustive => has_root_exhaustive(q),
        RootStrategy::Frobenius => has_root_frobenius(q),
        RootStrategy::Threshold(t) if q.prime < t => has_root_exhaustive(q),
        RootStrategy::Threshold(_) => has_root_frobenius(q),
    }
}

/// Evaluates `q` at every residue. Consecutive values come from a forward
/// difference table, so each step costs `deg q` modular additions.
fn has_root_exhaustive(q: &ModPoly) -> bool {
    let p = q.prime;
    let d = q.coeffs.len() - 1;
    if d as u64 + 1 >= p {
        return (0..p).any(|x| q.eval(x) == 0);
    }
    let mut diff: Vec<u64> = (0..=d as u64).map(|x| q.eval(x)).collect();
    for i in 1..=d {
        for j in (i..=d).rev() {
            diff[j] = sub_mod(diff[j], diff[j - 1], p);
        }
    }
    for _ in 0..p {
        if diff[0] == 0 {
            return true;
        }
        for j in 0..d {
            diff[j] = add_mod(diff[j], diff[j + 1], p);
        }
    }
    false
}

/// `T^p mod q` by left-to-right square-and-multiply; multiplying by `T` is a
/// shift followed by one reduction step.
fn frobenius_of_t(q: &ModPoly) -> Vec<u64> {
    let p = q.prime;
    let m = &q.coeffs;
    let mut acc = vec![1u64];
    rem_in_place(&mut acc, m, p);
    for bit in (0..64 - p.leading_zeros()).rev() {
        acc = mul_rem(&acc, &acc, m, p);
        if (p >> bit) & 1 == 1 {
            acc.insert(0, 0);
            rem_in_place(&mut acc, m, p);
        }
    }
    acc
}

fn has_root_frobenius(q: &ModPoly) -> bool {
    let p = q.prime;
    let q = q.monic();
    let mut h = frobenius_of_t(&q);
    // h - T
    if h.len() < 2 {
        h.resize(2, 0);
    }
    h[1] = sub_mod(h[1], 1, p);
    trim(&mut h);
    let h = ModPoly { prime: p, coeffs: h };
    if h.is_zero() {
        // q divides T^p - T: all of its roots are in the field.
        return true;
    }
    poly_gcd_mod(&q, &h).degree().is_some_and(|d| d >= 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::prime_stream;
    use proptest::prelude::*;

    #[test]
    fn cubes_mod_7_and_5() {
        let q7 = ModPoly::new(7, [5, 0, 0, 1]);
        let q5 = ModPoly::new(5, [3, 0, 0, 1]);
        for s in [RootStrategy::Exhaustive, RootStrategy::Frobenius] {
            assert!(!has_root_mod_with(&q7, s));
            assert!(has_root_mod_with(&q5, s));
        }
    }

    #[test]
    fn gcd_examples() {
        let a = ModPoly::new(7, [5, 0, 0, 1]);
        assert_eq!(poly_gcd_mod(&a, &a).coeffs(), &[5, 0, 0, 1]);
        // T^2 + 1 = (T + 1)^2 over F_2
        let a = ModPoly::new(2, [1, 0, 1]);
        let b = ModPoly::new(2, [0, 1, 1]);
        assert_eq!(poly_gcd_mod(&a, &b).coeffs(), &[1, 1]);
        let c = ModPoly::new(5, [3, 2]);
        assert_eq!(poly_gcd_mod(&c, &ModPoly::new(5, [])).coeffs(), &[4, 1]);
    }

    #[test]
    fn linear_always_has_root() {
        for p in prime_stream(2, 200) {
            assert!(has_root_mod(&ModPoly::new(p, [p - 2 % p, 1])));
        }
    }

    #[test]
    fn frobenius_path_on_large_prime() {
        let p = (1u64 << 61) - 1;
        // (T - 3)(T^2 + 1)... has the root 3 regardless.
        let q = ModPoly::new(p, [p - 3, 1, p - 3, 1]);
        assert!(has_root_mod(&q));
        // T^2 - r for a non-residue r: p = 2^61 - 1 is 7 mod 8 and 3 mod 4, so -1
        // is a non-residue.
        assert!(!has_root_mod(&ModPoly::new(p, [1, 0, 1])));
        assert!(has_root_mod(&ModPoly::new(p, [p - 4, 0, 1])));
    }

    #[test]
    fn degree_above_the_prime() {
        // T^7 - T - 1 over F_5 has degree > p; x^7 = x^3 for x in F_5.
        let q = ModPoly::new(5, [4, 4, 0, 0, 0, 0, 0, 1]);
        let direct = (0..5).any(|x| q.eval(x) == 0);
        assert_eq!(has_root_mod_with(&q, RootStrategy::Exhaustive), direct);
        assert_eq!(has_root_mod_with(&q, RootStrategy::Frobenius), direct);
    }

    proptest! {
        #[test]
        fn difference_table_matches_horner(pi in 0usize..100, coeffs in prop::collection::vec(1u64..1_000_000, 2..12)) {
            let p = prime_stream(2, 1000).nth(pi).unwrap();
            let q = ModPoly::new(p, coeffs);
            prop_assume!(q.degree().is_some_and(|d| d >= 2) && q.coeffs()[0] != 0);
            prop_assert_eq!(has_root_exhaustive(&q), (0..p).any(|x| q.eval(x) == 0));
        }

        #[test]
        fn strategies_agree(pi in 0usize..300, coeffs in prop::collection::vec(0u64..1_000_000, 1..8)) {
            let p = prime_stream(2, 2000).nth(pi).unwrap();
            let mut c = coeffs;
            c.push(1);
            let q = ModPoly::new(p, c);
            prop_assert_eq!(
                has_root_mod_with(&q, RootStrategy::Exhaustive),
                has_root_mod_with(&q, RootStrategy::Frobenius)
            );
        }
    }
}
