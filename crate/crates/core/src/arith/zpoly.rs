//! Dense polynomials over the integers as coefficient slices, lowest degree
//! first. A normalized polynomial has no trailing zeros; the zero polynomial is
//! the empty vector.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type ZPoly = Vec<BigInt>;

pub fn trim(mut v: ZPoly) -> ZPoly {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

pub fn degree(v: &[BigInt]) -> Option<usize> {
    v.iter().rposition(|c| !c.is_zero())
}

fn lc(v: &[BigInt]) -> &BigInt {
    v.last().expect("leading coefficient of zero polynomial")
}

pub fn add(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let n = a.len().max(b.len());
    let zero = BigInt::zero();
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&zero) + b.get(i).unwrap_or(&zero))
            .collect(),
    )
}

pub fn neg(a: &[BigInt]) -> ZPoly {
    a.iter().map(|c| -c).collect()
}

pub fn sub(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    add(a, &neg(b))
}

pub fn mul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

pub fn scale(a: &[BigInt], s: &BigInt) -> ZPoly {
    trim(a.iter().map(|c| c * s).collect())
}

pub fn derivative(a: &[BigInt]) -> ZPoly {
    trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect(),
    )
}

pub fn eval(a: &[BigInt], x: &BigInt) -> BigInt {
    a.iter()
        .rev()
        .fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Nonnegative gcd of the coefficients.
pub fn content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// `a` divided by its content, normalized to a positive leading coefficient.
pub fn primitive_part(a: &[BigInt]) -> ZPoly {
    let a = trim(a.to_vec());
    if a.is_empty() {
        return a;
    }
    let mut c = content(&a);
    if lc(&a).is_negative() {
        c = -c;
    }
    a.iter().map(|x| x / &c).collect()
}

/// `lc(b)^(deg a - deg b + 1) * a mod b`.
pub fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let db = degree(b).expect("pseudo-division by zero");
    let mut r = trim(a.to_vec());
    let lb = lc(b).clone();
    let Some(da) = degree(&r) else {
        return r;
    };
    if da < db {
        return r;
    }
    let mut steps = da - db + 1;
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let lr = lc(&r).clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (i, c) in b.iter().enumerate() {
            r[i + shift] -= &lr * c;
        }
        r = trim(r);
        steps -= 1;
    }
    if steps > 0 {
        let f = num_traits::pow(lb, steps);
        r = scale(&r, &f);
    }
    r
}

/// Division by a monic polynomial, returning `(quotient, remainder)`.
pub fn div_rem_monic(a: &[BigInt], b: &[BigInt]) -> (ZPoly, ZPoly) {
    let db = degree(b).expect("division by zero polynomial");
    assert!(lc(b).is_one(), "divisor must be monic");
    let mut r = trim(a.to_vec());
    let Some(da) = degree(&r) else {
        return (Vec::new(), r);
    };
    if da < db {
        return (Vec::new(), r);
    }
    let mut q = vec![BigInt::zero(); da - db + 1];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let lr = lc(&r).clone();
        let shift = dr - db;
        for (i, c) in b.iter().enumerate() {
            r[i + shift] -= &lr * c;
        }
        q[shift] = lr;
        r = trim(r);
    }
    (trim(q), r)
}

/// Greatest common divisor over the rationals, returned as a primitive
/// integer polynomial with positive leading coefficient (primitive PRS).
pub fn gcd_over_q(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let mut x = primitive_part(a);
    let mut y = primitive_part(b);
    if degree(&x) < degree(&y) {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = primitive_part(&pseudo_rem(&x, &y));
        x = y;
        y = r;
    }
    x
}

/// Resultant via the subresultant PRS (exact integer arithmetic throughout).
pub fn resultant(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let (Some(mut da), Some(mut db)) = (degree(a), degree(b)) else {
        return BigInt::zero();
    };
    let ca = content(a);
    let cb = content(b);
    let mut a: ZPoly = trim(a.iter().map(|c| c / &ca).collect());
    let mut b: ZPoly = trim(b.iter().map(|c| c / &cb).collect());
    let t = num_traits::pow(ca, db) * num_traits::pow(cb, da);
    let mut s = BigInt::one();
    if da < db {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut da, &mut db);
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
    }
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    while db > 0 {
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let r = pseudo_rem(&a, &b);
        a = b;
        let divisor = &g * num_traits::pow(h.clone(), delta);
        b = trim(r.iter().map(|c| c / &divisor).collect());
        g = lc(&a).clone();
        if delta != 0 {
            h = num_traits::pow(g.clone(), delta) / num_traits::pow(h, delta - 1);
        }
        da = db;
        match degree(&b) {
            None => return BigInt::zero(),
            Some(d) => db = d,
        }
    }
    let lb = lc(&b).clone();
    let last = if da == 0 {
        h
    } else {
        num_traits::pow(lb, da) / num_traits::pow(h, da - 1)
    };
    s * t * last
}

/// Discriminant of a monic polynomial: `(-1)^(n(n-1)/2) * Res(P, P')`.
pub fn discriminant_monic(p: &[BigInt]) -> BigInt {
    let n = degree(p).expect("nonzero");
    debug_assert!(lc(p).is_one());
    if n == 1 {
        return BigInt::one();
    }
    let r = resultant(p, &derivative(p));
    if (n * (n - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(v: &[i64]) -> ZPoly {
        trim(v.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn quadratic_and_cubic_discriminants() {
        // b^2 - 4c for T^2 + bT + c
        for b in -6i64..=6 {
            for c in -6i64..=6 {
                assert_eq!(
                    discriminant_monic(&zp(&[c, b, 1])),
                    BigInt::from(b * b - 4 * c),
                    "b={b} c={c}"
                );
            }
        }
        // -4p^3 - 27q^2 for T^3 + pT + q
        for p in -5i64..=5 {
            for q in -5i64..=5 {
                assert_eq!(
                    discriminant_monic(&zp(&[q, p, 0, 1])),
                    BigInt::from(-4 * p * p * p - 27 * q * q),
                    "p={p} q={q}"
                );
            }
        }
    }

    #[test]
    fn discriminant_from_roots() {
        // prod_{i<j} (r_i - r_j)^2 for integer roots.
        let roots = [2i64, 3, 5, -1];
        let mut p = zp(&[1]);
        for r in roots {
            p = mul(&p, &zp(&[-r, 1]));
        }
        let mut expect = 1i64;
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                expect *= (roots[i] - roots[j]).pow(2);
            }
        }
        assert_eq!(discriminant_monic(&p), BigInt::from(expect));
        let sq = mul(&zp(&[-2, 1]), &zp(&[-2, 1]));
        assert!(discriminant_monic(&sq).is_zero());
    }

    #[test]
    fn resultant_of_linears() {
        // For monic f, Res(f, g) is the product of g over the roots of f.
        assert_eq!(resultant(&zp(&[-5, 1]), &zp(&[-2, 1])), BigInt::from(3));
        assert_eq!(resultant(&zp(&[-2, 0, 1]), &zp(&[0, 1])), BigInt::from(-2));
    }

    #[test]
    fn gcd_and_division() {
        let a = mul(&zp(&[-2, 1]), &zp(&[-3, 1]));
        let b = mul(&zp(&[-2, 1]), &zp(&[1, 0, 1]));
        assert_eq!(gcd_over_q(&a, &b), zp(&[-2, 1]));
        let (q, r) = div_rem_monic(&a, &zp(&[-3, 1]));
        assert_eq!(q, zp(&[-2, 1]));
        assert!(r.is_empty());
        assert_eq!(gcd_over_q(&zp(&[-2, 0, 1]), &zp(&[0, 2])), zp(&[1]));
    }
}
