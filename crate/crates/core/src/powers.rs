//! Exact k-th powers, Weil heights and Capelli's irreducibility test for
//! binomials `T^k - t` over the rationals.
//!
//! Over Q the only roots of unity are `1` and `-1`, and every rational
//! `x` outside `{0, 1, -1}` has height at least `log 2`. Since
//! `h(x^k) = k * h(x)`, a rational `t` of height `h(t)` can only be a k-th
//! power for `k <= h(t) / log 2`. [`power_bound`] returns that bound computed
//! on the exact form `max(|num|, den)`, so no floating point is involved.
//!
//! ```
//! use kwitness::powers::{capelli_irreducible, power_bound, Rational};
//!
//! let t: Rational = "8".parse().unwrap();
//! assert_eq!(power_bound(&t).unwrap(), 3);
//! assert!(!capelli_irreducible(&"-4".parse().unwrap(), 4)); // T^4 + 4
//! assert!(capelli_irreducible(&"2".parse().unwrap(), 5));
//! ```

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::modular::{is_prime, next_prime_above, prime_factors};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PowerError {
    #[error("t = 0 has no power bound")]
    Zero,
    #[error("t = {0} is a root of unity")]
    RootOfUnity(Rational),
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

/// Rational number in lowest terms with a positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Rational(BigRational);

impl Rational {
    /// `None` when `den` is zero.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Option<Self> {
        let den = den.into();
        if den.is_zero() {
            return None;
        }
        Some(Rational(BigRational::new(num.into(), den)))
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn num(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn den(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// `1` or `-1`: the rational roots of unity.
    pub fn is_root_of_unity(&self) -> bool {
        self.0.is_integer() && self.num().abs().is_one()
    }

    pub fn pow(&self, k: u32) -> Rational {
        Rational(num_traits::pow(self.0.clone(), k as usize))
    }

    pub fn neg(&self) -> Rational {
        Rational(-self.0.clone())
    }

    pub fn mul(&self, other: &Rational) -> Rational {
        Rational(&self.0 * &other.0)
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.num().to_i64()
        } else {
            None
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.num())
        } else {
            write!(f, "{}/{}", self.num(), self.den())
        }
    }
}

impl FromStr for Rational {
    type Err = PowerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PowerError::Parse(s.to_string());
        let (n, d) = match s.trim().split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        Rational::new(n, d).ok_or_else(bad)
    }
}

impl From<Rational> for String {
    fn from(r: Rational) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for Rational {
    type Error = PowerError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Absolute logarithmic height of a rational: `log max(|num|, den)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightValue {
    /// Natural logarithm of `exact_form`; for display only.
    pub value: f64,
    #[serde(with = "bigint_string")]
    pub exact_form: BigInt,
}

pub(crate) mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        n.to_f64().expect("finite").ln()
    } else {
        let shift = bits - 64;
        let top: BigInt = n >> shift;
        top.to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
    }
}

pub fn weil_height(t: &Rational) -> HeightValue {
    let exact_form = t.num().abs().max(t.den().clone());
    // h(0) = 0 as well: max(0, 1) = 1.
    HeightValue {
        value: ln_bigint(&exact_form),
        exact_form,
    }
}

/// Exact non-negative integer k-th root, if `n` is a perfect k-th power.
fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    let r = n.nth_root(k);
    (num_traits::pow(r.clone(), k as usize) == *n).then_some(r)
}

/// A rational `x` with `x^k = t`, if one exists.
pub fn kth_power_test(t: &Rational, k: u32) -> Option<Rational> {
    assert!(k >= 1, "k must be positive");
    if k == 1 {
        return Some(t.clone());
    }
    let negative = t.num().is_negative();
    if negative && k.is_multiple_of(2) {
        return None;
    }
    let num = exact_root(&t.num().abs(), k)?;
    let den = exact_root(t.den(), k)?;
    let num = if negative { -num } else { num };
    Rational::new(num, den)
}

/// `floor(h(t) / log 2)`: no k above it makes `t` a k-th power in Q.
pub fn power_bound(t: &Rational) -> Result<u64, PowerError> {
    if t.is_zero() {
        return Err(PowerError::Zero);
    }
    if t.is_root_of_unity() {
        return Err(PowerError::RootOfUnity(t.clone()));
    }
    // largest B with 2^B <= exact_form
    Ok(weil_height(t).exact_form.bits() - 1)
}

/// Whether `T^k - t` is irreducible over Q.
///
/// Capelli: irreducible iff `t` is not a p-th power for any prime `p | k`,
/// and, when `4 | k`, `t` is not of the form `-4 c^4`.
pub fn capelli_irreducible(t: &Rational, k: u32) -> bool {
    assert!(k >= 1, "k must be positive");
    if k == 1 {
        return true;
    }
    if t.is_zero() {
        return false;
    }
    for p in prime_factors(k as u64) {
        if kth_power_test(t, p as u32).is_some() {
            return false;
        }
    }
    if k.is_multiple_of(4) {
        let quarter = t.neg().mul(&Rational::new(1, 4).unwrap());
        if kth_power_test(&quarter, 4).is_some() {
            return false;
        }
    }
    true
}

/// Smallest prime `k1 > max(power_bound(t), degree_bound)`; `T^k1 - t` is then
/// irreducible over Q.
pub fn minimal_irreducible_prime(t: &Rational, degree_bound: u64) -> Result<u64, PowerError> {
    let b = power_bound(t)?;
    let k1 = next_prime_above(b.max(degree_bound));
    debug_assert!(is_prime(k1));
    Ok(k1)
}

/// A monic integer factor of `T^k - t` of degree `1..=k/2`, found by bounded
/// search, or `None` when there is none (the binomial is irreducible over Q).
///
/// This is a cross-check for [`capelli_irreducible`] that uses no power tests.
/// Every root of `T^k - t` has absolute value `|t|^(1/k)`, so the coefficient
/// of `T^(d-i)` in a degree-`d` factor is bounded by `C(d, i) * |t|^(i/k)`.
/// By Gauss's lemma, reducibility over Q implies a monic integer factor of
/// degree at most `k/2`.
///
/// ```
/// use kwitness::powers::binomial_factor;
/// assert_eq!(binomial_factor(-4, 4), Some(vec![2, -2, 1])); // T^2 - 2T + 2
/// assert_eq!(binomial_factor(2, 3), None);
/// ```
pub fn binomial_factor(t: i64, k: u32) -> Option<Vec<i64>> {
    assert!((1..=12).contains(&k) && t != 0 && t.unsigned_abs() <= 1 << 20);
    let target = {
        let mut v = vec![0i128; k as usize + 1];
        v[0] = -(t as i128);
        v[k as usize] = 1;
        v
    };
    let r = (t.unsigned_abs() as f64).powf(1.0 / k as f64);
    for d in 1..=(k / 2) as usize {
        // bounds[j] limits the coefficient of T^j, j < d
        let bounds: Vec<i64> = (0..d)
            .map(|j| (binom(d, d - j) as f64 * r.powi((d - j) as i32) + 1e-9).floor() as i64)
            .collect();
        let mut f = vec![0i64; d + 1];
        f[d] = 1;
        if search(&mut f, 0, &bounds, &target) {
            return Some(f);
        }
    }
    None
}

fn binom(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

fn search(f: &mut Vec<i64>, j: usize, bounds: &[i64], target: &[i128]) -> bool {
    if j == bounds.len() {
        return f[0] != 0 && divides(f, target);
    }
    for c in -bounds[j]..=bounds[j] {
        f[j] = c;
        if search(f, j + 1, bounds, target) {
            return true;
        }
    }
    false
}

/// Exact division of `target` by the monic `f`, both lowest degree first.
fn divides(f: &[i64], target: &[i128]) -> bool {
    let d = f.len() - 1;
    let mut r = target.to_vec();
    for top in (d..r.len()).rev() {
        let q = r[top];
        if q == 0 {
            continue;
        }
        for (i, &c) in f.iter().enumerate() {
            r[top - d + i] -= q * c as i128;
        }
    }
    r.iter().all(|&x| x == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn heights() {
        let ln2 = std::f64::consts::LN_2;
        assert!((weil_height(&q("2")).value - ln2).abs() < 1e-15);
        assert_eq!(weil_height(&q("1")).value, 0.0);
        assert_eq!(weil_height(&q("-1")).exact_form, BigInt::from(1));
        let h8 = weil_height(&q("8"));
        assert_eq!(h8.exact_form, BigInt::from(8));
        assert!((h8.value - 3.0 * ln2).abs() < 1e-12);
        assert_eq!(weil_height(&q("-3/7")).exact_form, BigInt::from(7));
        let big = q("1").mul(&Rational::integer(BigInt::from(3).pow(2000)));
        let expect = 2000.0 * 3f64.ln();
        assert!((weil_height(&big).value - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn kth_powers() {
        assert_eq!(kth_power_test(&q("8"), 3), Some(q("2")));
        assert_eq!(kth_power_test(&q("2"), 2), None);
        assert_eq!(kth_power_test(&q("-8"), 3), Some(q("-2")));
        assert_eq!(kth_power_test(&q("-4"), 2), None);
        assert_eq!(kth_power_test(&q("16/81"), 4), Some(q("2/3")));
        assert_eq!(kth_power_test(&q("16/80"), 2), None);
    }

    #[test]
    fn bounds() {
        assert_eq!(power_bound(&q("8")), Ok(3));
        assert_eq!(power_bound(&q("2")), Ok(1));
        assert_eq!(power_bound(&q("3/2")), Ok(1));
        assert_eq!(power_bound(&q("0")), Err(PowerError::Zero));
        assert!(matches!(power_bound(&q("-1")), Err(PowerError::RootOfUnity(_))));
        assert!(matches!(power_bound(&q("1")), Err(PowerError::RootOfUnity(_))));
    }

    #[test]
    fn capelli_examples() {
        assert!(capelli_irreducible(&q("2"), 5));
        assert!(!capelli_irreducible(&q("-4"), 4));
        assert!(!capelli_irreducible(&q("64"), 6));
        assert!(capelli_irreducible(&q("-4"), 2)); // T^2 + 4
        assert!(!capelli_irreducible(&q("-1/4"), 4)); // -4 * (1/2)^4
        assert!(!capelli_irreducible(&q("-64"), 8)); // -4 * 2^4
    }

    #[test]
    fn factor_search_examples() {
        assert_eq!(binomial_factor(4, 2), Some(vec![-2, 1]));
        assert_eq!(binomial_factor(-8, 3), Some(vec![2, 1]));
        assert_eq!(binomial_factor(2, 4), None);
        assert!(binomial_factor(-64, 6).is_some()); // (T^2 + 4)(...)
        assert!(binomial_factor(9, 4).is_some()); // (T^2 - 3)(T^2 + 3)
        for t in [2i64, -3, 5, 10, -50] {
            for k in 1..=6 {
                assert_eq!(binomial_factor(t, k).is_none(), capelli_irreducible(&Rational::from(t), k), "t={t} k={k}");
            }
        }
    }

    #[test]
    fn minimal_primes() {
        assert_eq!(minimal_irreducible_prime(&q("2"), 1), Ok(2));
        assert_eq!(minimal_irreducible_prime(&q("8"), 3), Ok(5));
        assert_eq!(minimal_irreducible_prime(&q("3/2"), 10), Ok(11));
        assert_eq!(minimal_irreducible_prime(&q("0"), 10), Err(PowerError::Zero));
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-500i64..=500, 1i64..=500).prop_map(|(n, d)| Rational::new(n, d).unwrap())
    }

    proptest! {
        #[test]
        fn height_is_multiplicative_under_powers(x in arb_rational(), k in 1u32..8) {
            let hx = weil_height(&x).exact_form;
            prop_assert_eq!(weil_height(&x.pow(k)).exact_form, num_traits::pow(hx, k as usize));
        }

        #[test]
        fn kth_root_round_trips(x in arb_rational(), k in 1u32..7, perturb in 0i64..2) {
            let t = x.pow(k).mul(&Rational::integer(1 + perturb));
            if let Some(r) = kth_power_test(&t, k) {
                prop_assert_eq!(r.pow(k), t);
            }
            prop_assert!(kth_power_test(&x.pow(k), k).is_some());
        }

        #[test]
        fn power_bound_is_sound(x in arb_rational(), e in 1u32..5) {
            let t = x.pow(e);
            prop_assume!(!t.is_zero() && !t.is_root_of_unity());
            let b = power_bound(&t).unwrap();
            prop_assert!(b >= e as u64);
            for k in (b + 1)..=(b + 20) {
                prop_assert!(kth_power_test(&t, k as u32).is_none(), "t={} k={}", t, k);
            }
        }
    }
}
