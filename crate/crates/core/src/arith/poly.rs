use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::modpoly::ModPoly;
use super::zpoly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("polynomial must be monic (leading coefficient {0})")]
    NotMonic(BigInt),
    #[error("polynomial must have degree at least 1")]
    Constant,
    #[error("cannot parse polynomial at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Monic integer polynomial of degree at least one, lowest degree first.
///
/// Squarefreeness over the rationals is decided once, at construction.
///
/// ```
/// use kwitness::arith::IntPoly;
/// let p: IntPoly = "(T-2)*(T-3)".parse().unwrap();
/// assert_eq!(p.to_string(), "T^2 - 5*T + 6");
/// assert_eq!(p.compose_power(2).to_string(), "T^4 - 5*T^2 + 6");
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "PolyRepr", try_from = "PolyRepr")]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
    squarefree: bool,
}

impl IntPoly {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self, PolyError> {
        let coeffs = zpoly::trim(coeffs);
        match coeffs.len() {
            0 | 1 => return Err(PolyError::Constant),
            _ => {}
        }
        let lc = coeffs.last().unwrap();
        if !lc.is_one() {
            return Err(PolyError::NotMonic(lc.clone()));
        }
        let g = zpoly::gcd_over_q(&coeffs, &zpoly::derivative(&coeffs));
        let squarefree = zpoly::degree(&g) == Some(0);
        Ok(IntPoly { coeffs, squarefree })
    }

    pub fn from_coeffs(coeffs: &[i64]) -> Result<Self, PolyError> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `prod (T - r)` over `roots`.
    pub fn from_roots(roots: &[i64]) -> Result<Self, PolyError> {
        let mut acc = vec![BigInt::one()];
        for &r in roots {
            acc = zpoly::mul(&acc, &[BigInt::from(-r), BigInt::one()]);
        }
        Self::new(acc)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_squarefree(&self) -> bool {
        self.squarefree
    }

    pub fn constant_term(&self) -> &BigInt {
        &self.coeffs[0]
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        zpoly::eval(&self.coeffs, x)
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        self.eval(&BigInt::from(x))
    }

    /// `P(T^k)`. Its squarefree flag follows from P's: over the rationals
    /// `P(T^k)` is squarefree iff P is and either `k = 1` or `P(0) != 0`.
    pub fn compose_power(&self, k: u32) -> IntPoly {
        assert!(k >= 1, "exponent must be positive");
        if k == 1 {
            return self.clone();
        }
        let k = k as usize;
        let mut coeffs = vec![BigInt::zero(); self.degree() * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = c.clone();
        }
        IntPoly {
            coeffs,
            squarefree: self.squarefree && !self.constant_term().is_zero(),
        }
    }

    /// Coefficients reduced into `[0, p)`; the degree is kept since P is monic.
    pub fn reduce_mod(&self, p: u64) -> ModPoly {
        let m = BigInt::from(p);
        ModPoly::new(
            p,
            self.coeffs.iter().map(|c| {
                let r = ((c % &m) + &m) % &m;
                r.to_u64().expect("residue fits in u64")
            }),
        )
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        IntPoly::new(zpoly::mul(&self.coeffs, &other.coeffs)).expect("product of monic polynomials")
    }

    pub fn derivative(&self) -> Vec<BigInt> {
        zpoly::derivative(&self.coeffs)
    }

    /// Exact discriminant (subresultant PRS).
    pub fn discriminant(&self) -> BigInt {
        zpoly::discriminant_monic(&self.coeffs)
    }

    /// The squarefree part `P / gcd(P, P')`, monic.
    pub fn squarefree_part(&self) -> IntPoly {
        if self.squarefree {
            return self.clone();
        }
        let g = zpoly::gcd_over_q(&self.coeffs, &self.derivative());
        // g is primitive with positive leading coefficient and divides a monic
        // integer polynomial, so by Gauss's lemma it is monic.
        let (q, r) = zpoly::div_rem_monic(&self.coeffs, &g);
        debug_assert!(r.is_empty());
        IntPoly::new(q).expect("squarefree part is monic")
    }

    /// Hex SHA-256 of the coefficient list in decimal, comma separated.
    pub fn fingerprint(&self) -> String {
        let text = self
            .coeffs
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                (_, false) => write!(f, "{mag}*")?,
            }
            match i {
                0 => {}
                1 => f.write_str("T")?,
                _ => write!(f, "T^{i}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for IntPoly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IntPoly::new(super::parse::parse_poly(s)?)
    }
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    text: String,
    coeffs: Vec<Coeff>,
}

/// JSON coefficient: a number when it fits in `i64`, a decimal string otherwise.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Coeff {
    Small(i64),
    Big(String),
}

impl From<IntPoly> for PolyRepr {
    fn from(p: IntPoly) -> Self {
        PolyRepr {
            text: p.to_string(),
            coeffs: p
                .coeffs
                .iter()
                .map(|c| c.to_i64().map_or_else(|| Coeff::Big(c.to_string()), Coeff::Small))
                .collect(),
        }
    }
}

impl TryFrom<PolyRepr> for IntPoly {
    type Error = PolyError;

    fn try_from(r: PolyRepr) -> Result<Self, Self::Error> {
        let coeffs = r
            .coeffs
            .into_iter()
            .map(|c| match c {
                Coeff::Small(v) => Ok(BigInt::from(v)),
                Coeff::Big(s) => s.parse::<BigInt>().map_err(|e| PolyError::Parse {
                    pos: 0,
                    msg: e.to_string(),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        IntPoly::new(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> IntPoly {
        s.parse().unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(p("T^3 - 2").reduce_mod(7).coeffs(), &[5, 0, 0, 1]);
        assert_eq!(p("T - 2").reduce_mod(2).coeffs(), &[0, 1]);
        assert_eq!(p("T^2 + 10T + 25").reduce_mod(5).coeffs(), &[0, 0, 1]);
    }

    #[test]
    fn compose_examples() {
        assert_eq!(p("T - 2").compose_power(3), p("T^3 - 2"));
        assert_eq!(p("T^2 - T - 1").compose_power(1), p("T^2 - T - 1"));
        assert_eq!(p("T^2 - 5T + 6").compose_power(2), p("T^4 - 5T^2 + 6"));
        assert_eq!(p("T^2 - 5T + 6").compose_power(2).degree(), 4);
    }

    #[test]
    fn invariants_at_construction() {
        assert_eq!(IntPoly::from_coeffs(&[1, 2]), Err(PolyError::NotMonic(BigInt::from(2))));
        assert_eq!(IntPoly::from_coeffs(&[5]), Err(PolyError::Constant));
        assert_eq!(IntPoly::from_coeffs(&[5, 1, 0, 0]).unwrap().degree(), 1);
        assert!(p("T^2 - 2").is_squarefree());
        assert!(!p("(T-2)^2*(T+1)").is_squarefree());
        assert_eq!(p("(T-2)^2*(T+1)").squarefree_part(), p("(T-2)*(T+1)"));
        assert!(!p("T*(T-2)").compose_power(2).is_squarefree());
        assert!(p("(T-2)*(T-3)").compose_power(6).is_squarefree());
    }

    #[test]
    fn display_round_trip() {
        for s in ["T", "T^2 - 5*T + 6", "T^5 + 1", "T^3 - 100*T^2 - T", "-1 + T"] {
            let q = p(s);
            assert_eq!(p(&q.to_string()), q);
        }
        let q = p("T^2 - 5T + 6");
        let json = serde_json::to_string(&q).unwrap();
        assert_eq!(json, r#"{"text":"T^2 - 5*T + 6","coeffs":[6,-5,1]}"#);
        assert_eq!(serde_json::from_str::<IntPoly>(&json).unwrap(), q);
    }

    fn arb_poly() -> impl Strategy<Value = IntPoly> {
        prop::collection::vec(-20i64..=20, 1..5).prop_map(|mut v| {
            v.push(1);
            IntPoly::from_coeffs(&v).unwrap()
        })
    }

    proptest! {
        #[test]
        fn compose_is_multiplicative(q in arb_poly(), a in 1u32..5, b in 1u32..5) {
            prop_assert_eq!(q.compose_power(a).compose_power(b), q.compose_power(a * b));
        }

        #[test]
        fn reduction_commutes_with_composition(q in arb_poly(), k in 1u32..6, x in 0u64..97) {
            let p = 97u64;
            let composed = q.compose_power(k).reduce_mod(p);
            let xk = crate::arith::modular::pow_mod(x, k as u64, p);
            prop_assert_eq!(composed.eval(x), q.reduce_mod(p).eval(xk));
        }

        #[test]
        fn composed_flag_matches_direct_check(q in arb_poly(), k in 1u32..4) {
            let direct = IntPoly::new(q.compose_power(k).coeffs().to_vec()).unwrap();
            prop_assert_eq!(direct.is_squarefree(), q.compose_power(k).is_squarefree());
        }

        #[test]
        fn squarefree_iff_nonzero_discriminant(q in arb_poly()) {
            prop_assert_eq!(q.is_squarefree(), !q.discriminant().is_zero());
        }
    }
}
