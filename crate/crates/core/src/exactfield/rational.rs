use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::field::{Field, FieldError};
use super::poly::Poly;

/// The rational numbers with arbitrary-precision numerators and denominators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn inv(&self, a: &BigRational) -> Result<BigRational, FieldError> {
        if a.is_zero() {
            Err(FieldError::DivisionByZero)
        } else {
            Ok(a.recip())
        }
    }

    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn characteristic(&self) -> u64 {
        0
    }

    fn contains(&self, a: &BigRational) -> bool {
        a.denom().is_positive()
    }

    fn render(&self, a: &BigRational) -> String {
        a.to_string()
    }

    fn elem_to_json(&self, a: &BigRational) -> Value {
        if a.is_integer() {
            json!(a.numer().to_string())
        } else {
            json!(format!("{}/{}", a.numer(), a.denom()))
        }
    }

    fn elem_from_json(&self, v: &Value) -> Result<BigRational, FieldError> {
        let bad = || FieldError::BadEncoding(format!("not a rational: {v}"));
        if let Some(n) = v.as_i64() {
            return Ok(self.from_i64(n));
        }
        let s = v.as_str().ok_or_else(bad)?;
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(BigRational::new(n, d))
    }

    fn descriptor(&self) -> Value {
        json!({"char": 0, "ext_degree": 1, "modulus": []})
    }

    /// A modular coprimality test settles the common case; otherwise a
    /// primitive remainder sequence over `Z` avoids the coefficient swell of
    /// Euclid over `Q`.
    fn fast_poly_gcd(&self, a: &Poly<BigRational>, b: &Poly<BigRational>) -> Option<Poly<BigRational>> {
        let (mut x, mut y) = (primitive(a.coeffs()), primitive(b.coeffs()));
        if x.len() < y.len() {
            std::mem::swap(&mut x, &mut y);
        }
        if y.len() == 1 || coprime_mod_p(&x, &y) {
            return Some(Poly::one(self));
        }
        while !y.is_empty() {
            let r = primitive_of_ints(pseudo_rem(&x, &y));
            x = y;
            y = r;
        }
        let lead = BigRational::from_integer(x.last().expect("nonzero").clone());
        Some(Poly::new(self, x.into_iter().map(|c| BigRational::from_integer(c) / &lead).collect()))
    }
}

const CHECK_PRIMES: [u64; 2] = [2_147_483_647, 2_147_483_629];

/// Integer polynomial with content 1 and positive leading coefficient.
fn primitive(c: &[BigRational]) -> Vec<BigInt> {
    let lcm = c.iter().fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
    primitive_of_ints(c.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect())
}

fn primitive_of_ints(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    let Some(lead) = v.last() else {
        return v;
    };
    let sign = if lead.is_negative() { -BigInt::one() } else { BigInt::one() };
    let content = v.iter().fold(BigInt::zero(), |acc, x| num_integer::Integer::gcd(&acc, x));
    v.into_iter().map(|x| x / &content * &sign).collect()
}

/// `lc(b)^k a mod b` with content removed along the way.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let lr = r.last().expect("nonempty").clone();
        for x in r.iter_mut() {
            *x *= lb;
        }
        for (i, c) in b.iter().enumerate() {
            r[i + shift] -= &lr * c;
        }
        r.pop();
        r = primitive_of_ints(r);
    }
    r
}

fn reduce_mod(v: &[BigInt], p: u64) -> Vec<u64> {
    let m = BigInt::from(p);
    let mut out: Vec<u64> = v
        .iter()
        .map(|x| {
            let r = ((x % &m) + &m) % &m;
            r.to_u64_digits().1.first().copied().unwrap_or(0)
        })
        .collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// True when some check prime keeps both degrees and makes the images
/// coprime; then `a` and `b` are coprime over `Q`.
fn coprime_mod_p(a: &[BigInt], b: &[BigInt]) -> bool {
    CHECK_PRIMES.iter().any(|&p| {
        let (mut x, mut y) = (reduce_mod(a, p), reduce_mod(b, p));
        if x.len() != a.len() || y.len() != b.len() {
            return false;
        }
        while !y.is_empty() {
            let inv = pow_mod(*y.last().expect("nonzero"), p - 2, p);
            while x.len() >= y.len() {
                let shift = x.len() - y.len();
                let c = x.last().expect("nonzero") * inv % p;
                for (i, yc) in y.iter().enumerate() {
                    x[i + shift] = (x[i + shift] + p - c * yc % p) % p;
                }
                while x.last() == Some(&0) {
                    x.pop();
                }
            }
            std::mem::swap(&mut x, &mut y);
        }
        x.len() == 1
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_normal_form() {
        let q = Rationals;
        let x = q.elem_from_json(&json!("6/-4")).unwrap();
        assert_eq!(x, BigRational::new(BigInt::from(-3), BigInt::from(2)));
        assert_eq!(q.elem_to_json(&x), json!("-3/2"));
        assert_eq!(q.elem_from_json(&q.elem_to_json(&x)).unwrap(), x);
        assert_eq!(q.elem_from_json(&json!("1/0")), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn fast_gcd_matches_euclid() {
        let q = Rationals;
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        // (t - 1/2)(t + 3) and (t - 1/2)(2t^2 + 1/3)
        let a = Poly::new(&q, vec![r(-3, 2), r(5, 2), r(1, 1)]);
        let b = Poly::new(&q, vec![r(-1, 6), r(1, 3), r(-1, 1), r(2, 1)]);
        assert_eq!(q.fast_poly_gcd(&a, &b).unwrap(), Poly::new(&q, vec![r(-1, 2), r(1, 1)]));
        let c = Poly::new(&q, vec![r(1, 1), r(0, 1), r(1, 1)]);
        assert_eq!(q.fast_poly_gcd(&a, &c).unwrap(), Poly::one(&q));
        let cube = a.mul(&a, &q).mul(&a, &q);
        assert_eq!(q.fast_poly_gcd(&cube, &a.mul(&b, &q)).unwrap(), a.mul(&a, &q).monic(&q).div_exact(&Poly::new(&q, vec![r(3, 1), r(1, 1)]), &q).unwrap());
    }

    #[test]
    fn binomials_are_exact() {
        let q = Rationals;
        assert_eq!(q.binomial(24, 12), q.from_i64(2_704_156));
        assert_eq!(q.binomial(3, 5), q.zero());
    }
}
