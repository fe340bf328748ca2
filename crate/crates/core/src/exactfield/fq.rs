use serde_json::{json, Value};

use super::field::{Field, FieldError};
use super::lucas::{is_prime, mod_pow};
use super::poly::{poly_gcd, Poly};

/// The finite field `F_q`, `q = p^k`, realised as `F_p[x]/(modulus)`.
///
/// Elements are `u64` codes: the coefficients of the representative
/// polynomial read as base-`p` digits, lowest degree first. For `k = 1`
/// this is just the residue.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fq {
    p: u64,
    k: usize,
    q: u64,
    /// Monic, lowest degree first, length `k + 1`.
    modulus: Vec<u64>,
    /// `floor((2^64 - 1) / p)` for Barrett reduction.
    barrett: u64,
}

const MAX_ORDER: u64 = 1 << 31;

impl Fq {
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p >= MAX_ORDER {
            return Err(FieldError::BadModulus(format!("p = {p} too large")));
        }
        Ok(Fq { p, k: 1, q: p, modulus: vec![0, 1], barrett: u64::MAX / p })
    }

    /// `F_p[x]/(modulus)`; the modulus must be monic and irreducible.
    pub fn new(p: u64, modulus: Vec<u64>) -> Result<Self, FieldError> {
        let fp = Fq::prime(p)?;
        let m = Poly::new(&fp, modulus.iter().map(|&c| c % p).collect());
        let k = m
            .degree()
            .filter(|&d| d >= 1)
            .ok_or_else(|| FieldError::BadModulus("degree must be at least 1".into()))?;
        if !m.is_monic(&fp) {
            return Err(FieldError::BadModulus("modulus must be monic".into()));
        }
        if !is_irreducible(&m, &fp) {
            return Err(FieldError::BadModulus(format!("{:?} is reducible over F_{p}", m.coeffs())));
        }
        let q = (p as u128).pow(k as u32);
        if q >= MAX_ORDER as u128 {
            return Err(FieldError::BadModulus(format!("q = {p}^{k} too large")));
        }
        Ok(Fq { p, k, q: q as u64, modulus: m.coeffs().to_vec(), barrett: u64::MAX / p })
    }

    /// `F_{p^k}` with the first monic irreducible modulus in lexicographic order.
    pub fn with_degree(p: u64, k: usize) -> Result<Self, FieldError> {
        if k == 1 {
            return Fq::prime(p);
        }
        let fp = Fq::prime(p)?;
        let count = p.checked_pow(k as u32).ok_or_else(|| FieldError::BadModulus("too large".into()))?;
        for code in 0..count {
            let mut coeffs = fp.digits(code, k);
            coeffs.push(1);
            if is_irreducible(&Poly::new(&fp, coeffs.clone()), &fp) {
                return Fq::new(p, coeffs);
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    pub fn from_descriptor(v: &Value) -> Result<Self, FieldError> {
        let bad = |m: &str| FieldError::BadEncoding(m.to_string());
        let p = v.get("char").and_then(Value::as_u64).ok_or_else(|| bad("char"))?;
        let k = v.get("ext_degree").and_then(Value::as_u64).ok_or_else(|| bad("ext_degree"))?;
        let modulus: Vec<u64> = v
            .get("modulus")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("modulus"))?
            .iter()
            .map(|c| c.as_u64().ok_or_else(|| bad("modulus entry")))
            .collect::<Result<_, _>>()?;
        let f = if k == 1 && modulus == [0, 1] { Fq::prime(p)? } else { Fq::new(p, modulus)? };
        if f.k as u64 != k {
            return Err(bad("ext_degree does not match modulus"));
        }
        Ok(f)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ext_degree(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.q
    }

    /// Element from its base-`p` coefficient digits.
    pub fn from_digits(&self, digits: &[u64]) -> u64 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d % self.p)
    }

    #[inline]
    fn reduce(&self, x: u64) -> u64 {
        let q = ((x as u128 * self.barrett as u128) >> 64) as u64;
        let mut r = x - q * self.p;
        while r >= self.p {
            r -= self.p;
        }
        r
    }

    fn digits(&self, mut a: u64, len: usize) -> Vec<u64> {
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(a % self.p);
            a /= self.p;
        }
        out
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        let n = self.q - 1;
        let mut order = n;
        let mut m = n;
        let mut d = 2;
        while d * d <= m {
            if m % d == 0 {
                while m % d == 0 {
                    m /= d;
                }
                while order % d == 0 && self.pow(&a, order / d) == 1 {
                    order /= d;
                }
            }
            d += 1;
        }
        if m > 1 && self.pow(&a, order / m) == 1 {
            order /= m;
        }
        Some(order)
    }

    /// Smallest element (by code) of multiplicative order exactly `e`.
    pub fn primitive_root_of_unity(&self, e: u64) -> Option<u64> {
        if e == 0 || (self.q - 1) % e != 0 {
            return None;
        }
        (1..self.q).find(|&a| self.mult_order(a) == Some(e))
    }

    pub fn is_primitive_root(&self, zeta: u64, e: u64) -> bool {
        self.contains(&zeta) && self.mult_order(zeta) == Some(e)
    }
}

/// Ben-Or irreducibility test: `f` of degree `k` is irreducible iff
/// `gcd(x^{p^i} - x, f) = 1` for `1 <= i <= k/2`.
fn is_irreducible(f: &Poly<u64>, fp: &Fq) -> bool {
    let k = match f.degree() {
        Some(k) if k >= 1 => k,
        _ => return false,
    };
    let x = Poly::x(fp);
    let mut xp = x.clone();
    for _ in 0..k / 2 {
        xp = powmod(&xp, fp.p, f, fp);
        let g = poly_gcd(&xp.sub(&x, fp), f, fp).expect("f nonzero");
        if !g.is_constant() {
            return false;
        }
    }
    true
}

fn powmod(base: &Poly<u64>, mut e: u64, m: &Poly<u64>, fp: &Fq) -> Poly<u64> {
    let mut acc = Poly::one(fp);
    let mut b = base.div_rem(m, fp).unwrap().1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b, fp).div_rem(m, fp).unwrap().1;
        }
        b = b.mul(&b, fp).div_rem(m, fp).unwrap().1;
        e >>= 1;
    }
    acc
}

impl Field for Fq {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        if self.k == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        let (mut a, mut b) = (*a, *b);
        let (mut out, mut place) = (0, 1);
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    fn neg(&self, a: &u64) -> u64 {
        if self.k == 1 {
            return if *a == 0 { 0 } else { self.p - a };
        }
        let mut a = *a;
        let (mut out, mut place) = (0, 1);
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        if self.k == 1 {
            return self.reduce(a * b);
        }
        let (da, db) = (self.digits(*a, self.k), self.digits(*b, self.k));
        let mut prod = vec![0u64; 2 * self.k - 1];
        for (i, x) in da.iter().enumerate() {
            for (j, y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        // Reduce by the monic modulus from the top down.
        for top in (self.k..prod.len()).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            for j in 0..self.k {
                let shift = top - self.k + j;
                prod[shift] = (prod[shift] + (self.p - c) * self.modulus[j]) % self.p;
            }
            prod[top] = 0;
        }
        self.from_digits(&prod[..self.k])
    }

    fn inv(&self, a: &u64) -> Result<u64, FieldError> {
        if *a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        if self.k == 1 {
            return Ok(mod_pow(*a as u128, (self.p - 2) as u128, self.p as u128) as u64);
        }
        Ok(self.pow(a, self.q - 2))
    }

    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    fn characteristic(&self) -> u64 {
        self.p
    }

    fn pth_root(&self, a: &u64) -> Option<u64> {
        Some(self.pow(a, self.q / self.p))
    }

    fn contains(&self, a: &u64) -> bool {
        *a < self.q
    }

    fn render(&self, a: &u64) -> String {
        if self.k == 1 {
            return a.to_string();
        }
        let poly = Poly::new(&Fq::prime(self.p).unwrap(), self.digits(*a, self.k));
        poly.render(&Fq::prime(self.p).unwrap(), "a")
    }

    fn elem_to_json(&self, a: &u64) -> Value {
        if self.k == 1 {
            json!(a)
        } else {
            json!(self.digits(*a, self.k))
        }
    }

    fn elem_from_json(&self, v: &Value) -> Result<u64, FieldError> {
        let bad = || FieldError::BadEncoding(format!("not an element of F_{}: {v}", self.q));
        match v {
            Value::Number(_) => {
                let n = v.as_i64().ok_or_else(bad)?;
                if self.k == 1 {
                    Ok(self.from_i64(n))
                } else {
                    Err(bad())
                }
            }
            Value::Array(ds) if ds.len() == self.k => {
                let digits: Vec<u64> = ds
                    .iter()
                    .map(|d| d.as_i64().map(|x| self.from_i64(x)).ok_or_else(bad))
                    .collect::<Result<_, _>>()?;
                Ok(self.from_digits(&digits))
            }
            _ => Err(bad()),
        }
    }

    fn descriptor(&self) -> Value {
        json!({"char": self.p, "ext_degree": self.k, "modulus": self.modulus})
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::field::{field_op, FieldOpKind};

    #[test]
    fn prime_field_basics() {
        let f = Fq::prime(5).unwrap();
        assert_eq!(field_op(&f, FieldOpKind::Mul, &2, Some(&3)).unwrap(), 1);
        assert_eq!(f.inv(&2).unwrap(), 3);
        assert_eq!(f.inv(&0), Err(FieldError::DivisionByZero));
        assert_eq!(field_op(&f, FieldOpKind::Add, &7, Some(&1)).unwrap_err(), FieldError::FieldMismatch("7".into()));
        assert!(Fq::prime(6).is_err());
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 + 1 = (x + 2)(x + 3) over F_5
        assert!(matches!(Fq::new(5, vec![1, 0, 1]), Err(FieldError::BadModulus(_))));
        // x^2 + 2 is irreducible over F_5 (2 is a non-square)
        assert!(Fq::new(5, vec![2, 0, 1]).is_ok());
    }

    #[test]
    fn extension_field_axioms_exhaustive() {
        let f = Fq::with_degree(3, 2).unwrap();
        assert_eq!(f.order(), 9);
        for a in f.elements() {
            if a != 0 {
                assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), 1);
            }
            assert_eq!(f.add(&a, &f.neg(&a)), 0);
            for b in f.elements() {
                for c in f.elements() {
                    assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
                    assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
                }
            }
        }
        // F_9^* is cyclic of order 8
        assert!(f.primitive_root_of_unity(8).is_some());
    }

    #[test]
    fn pth_roots() {
        let f = Fq::with_degree(2, 3).unwrap();
        for a in f.elements() {
            let r = f.pth_root(&a).unwrap();
            assert_eq!(f.mul(&r, &r), a);
        }
    }

    #[test]
    fn roots_of_unity() {
        let f7 = Fq::prime(7).unwrap();
        assert!(f7.is_primitive_root(2, 3));
        let f5 = Fq::prime(5).unwrap();
        assert_eq!(f5.mult_order(2), Some(4));
        assert_eq!(f5.primitive_root_of_unity(2), Some(4));
        assert_eq!(f5.primitive_root_of_unity(3), None);
    }

    #[test]
    fn descriptor_round_trip() {
        let f = Fq::with_degree(2, 3).unwrap();
        assert_eq!(Fq::from_descriptor(&f.descriptor()).unwrap(), f);
        let g = Fq::prime(5).unwrap();
        assert_eq!(g.descriptor(), json!({"char": 5, "ext_degree": 1, "modulus": [0, 1]}));
        assert_eq!(Fq::from_descriptor(&g.descriptor()).unwrap(), g);
    }
}
