use serde_json::{json, Value};

use crate::exactfield::{squarefree_decomposition, Field, FieldError, Fq, Poly, RatFn, RatFnField, Rationals};

use super::DerivError;

/// An iterative derivation on `C(g)` stored as the images
/// `[g, δ^(1)(g), ..., δ^(N)(g)]` of the generator.
///
/// Evaluation goes through the Taylor map `f -> Σ δ^(n)(f) T^n`, the ring
/// homomorphism `C(g) -> C(g)[[T]]/(T^{N+1})` determined by the images:
/// polynomials are evaluated at the series of `g` and quotients become
/// power-series division, which unrolls to
/// `δ^(n)(f/h) = (δ^(n)(f) - Σ_{j=1..n} δ^(j)(h) δ^(n-j)(f/h)) / h`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivationTable<C: Field> {
    field: RatFnField<C>,
    images: Vec<RatFn<C::Elem>>,
}

pub type FqTable = DerivationTable<Fq>;
pub type QTable = DerivationTable<Rationals>;

impl<C: Field> DerivationTable<C> {
    /// Validates `images[0] = g` and that every image is a field element.
    pub fn new(field: RatFnField<C>, images: Vec<RatFn<C::Elem>>) -> Result<Self, DerivError> {
        if images.first() != Some(&field.gen()) {
            return Err(DerivError::BadTable("d_0 must be the generator".into()));
        }
        if let Some(i) = images.iter().position(|d| !field.contains(d)) {
            return Err(DerivError::BadTable(format!("image {i} is not in normal form")));
        }
        Ok(DerivationTable { field, images })
    }

    /// The Hasse derivative with respect to the generator:
    /// `δ^(n)(g^m) = C(m, n) g^{m-n}`.
    pub fn hasse(field: RatFnField<C>, trunc: usize) -> Self {
        let mut images = vec![field.gen(), field.one()];
        images.resize(trunc + 1, field.zero());
        images.truncate(trunc + 1);
        DerivationTable { field, images }
    }

    /// The trivial derivation: `δ^(n) = 0` for `n >= 1`.
    pub fn trivial(field: RatFnField<C>, trunc: usize) -> Self {
        let mut images = vec![field.gen()];
        images.resize(trunc + 1, field.zero());
        DerivationTable { field, images }
    }

    pub fn field(&self) -> &RatFnField<C> {
        &self.field
    }

    pub fn trunc(&self) -> usize {
        self.images.len() - 1
    }

    pub fn images(&self) -> &[RatFn<C::Elem>] {
        &self.images
    }

    /// The same derivation truncated at a lower order.
    pub fn truncated(&self, trunc: usize) -> Result<Self, DerivError> {
        self.check_order(trunc)?;
        Ok(DerivationTable { field: self.field.clone(), images: self.images[..=trunc].to_vec() })
    }

    fn check_order(&self, n: usize) -> Result<(), DerivError> {
        if n > self.trunc() {
            Err(DerivError::OrderExceedsTruncation { order: n, trunc: self.trunc() })
        } else {
            Ok(())
        }
    }

    /// `δ^(n)(f)`.
    pub fn derive(&self, f: &RatFn<C::Elem>, n: usize) -> Result<RatFn<C::Elem>, DerivError> {
        Ok(self.taylor(f, n)?.pop().unwrap())
    }

    /// `[δ^(0)(f), ..., δ^(n)(f)]`.
    pub fn taylor(&self, f: &RatFn<C::Elem>, n: usize) -> Result<Vec<RatFn<C::Elem>>, DerivError> {
        self.check_order(n)?;
        if !self.field.contains(f) {
            return Err(FieldError::FieldMismatch(self.field.render(f)).into());
        }
        if f.is_poly() {
            return Ok(self.eval_poly(f.num(), &self.images[..=n]));
        }
        self.quotient_series(f.num(), f.den(), n + 1)
    }

    /// First `len` Taylor coefficients of `num / den`.
    ///
    /// In characteristic `p` the denominator is split as `c * s^p` and the
    /// series of `1/s^p` is the Frobenius image of that of `1/s`, needed only
    /// to order `(len - 1) / p`. This keeps the degrees of the intermediate
    /// polynomials proportional to `c` rather than to `den`.
    fn quotient_series(&self, num: &Poly<C::Elem>, den: &Poly<C::Elem>, len: usize) -> Result<Vec<RatFn<C::Elem>>, DerivError> {
        let k = &self.field;
        let b = k.base();
        let p = b.characteristic() as usize;
        if p > 0 && len > p {
            let (c, s) = split_pth_power(den, b);
            if !s.is_constant() {
                let left = self.quotient_series(num, &c, len)?;
                let right = self.quotient_series(&Poly::one(b), &s, (len - 1) / p + 1)?;
                let mut out = vec![k.zero(); len];
                for (j, r) in right.iter().enumerate() {
                    if r.is_zero() {
                        continue;
                    }
                    let r = k.frobenius(r);
                    for i in 0..len - j * p {
                        if !left[i].is_zero() {
                            out[i + j * p] = k.add(&out[i + j * p], &k.mul(&left[i], &r));
                        }
                    }
                }
                return Ok(out);
            }
        }
        let gen_series = &self.images[..len];
        let num = self.eval_poly(num, gen_series);
        let den = self.eval_poly(den, gen_series);
        self.series_div(&num, &den)
    }

    /// Horner evaluation of `p` at the generator series.
    fn eval_poly(&self, p: &Poly<C::Elem>, gen_series: &[RatFn<C::Elem>]) -> Vec<RatFn<C::Elem>> {
        let k = &self.field;
        let len = gen_series.len();
        let mut acc = vec![k.zero(); len];
        for c in p.coeffs().iter().rev() {
            acc = series_mul(k, &acc, gen_series);
            acc[0] = k.add(&acc[0], &k.constant(c.clone()));
        }
        acc
    }

    fn series_div(&self, num: &[RatFn<C::Elem>], den: &[RatFn<C::Elem>]) -> Result<Vec<RatFn<C::Elem>>, DerivError> {
        let k = &self.field;
        let b = k.base();
        let n = num.len();
        if self.images[..n].iter().chain(num).chain(den).all(RatFn::is_poly) {
            // With c = u Π g^m and R = Π g, the coefficient c_i lives over c R^i.
            // Its numerator satisfies A_i = P_i R^i - Σ_j W_j A_{i-j} with
            // W_j = δ^(j)(c) R^j / c, a polynomial by the Leibniz rule.
            let c = den[0].num();
            let unit_inv = b.inv(c.lead().ok_or(FieldError::DivisionByZero)?)?;
            let factors = squarefree_decomposition(c, b);
            let rad = factors.iter().fold(Poly::one(b), |r, (g, _)| r.mul(g, b));
            let mut rpow = vec![Poly::one(b)];
            for i in 1..n {
                rpow.push(rpow[i - 1].mul(&rad, b));
            }
            let w: Vec<Poly<C::Elem>> = (0..n)
                .map(|j| if j == 0 || den[j].is_zero() { Ok(Poly::zero()) } else { den[j].num().mul(&rpow[j], b).div_exact(c, b) })
                .collect::<Result<_, _>>()?;
            let mut acc: Vec<Poly<C::Elem>> = Vec::with_capacity(n);
            let mut out = Vec::with_capacity(n);
            for i in 0..n {
                let mut a = num[i].num().mul(&rpow[i], b);
                for j in 1..=i {
                    if !w[j].is_zero() && !acc[i - j].is_zero() {
                        a = a.sub(&w[j].mul(&acc[i - j], b), b);
                    }
                }
                let over: Vec<_> = factors.iter().map(|(g, m)| (g.clone(), m + i)).collect();
                out.push(k.frac_factored(a.scale(&unit_inv, b), &over)?);
                acc.push(a);
            }
            return Ok(out);
        }
        let inv0 = k.inv(&den[0])?;
        let mut out: Vec<RatFn<C::Elem>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut a = num[i].clone();
            for j in 1..=i {
                if !den[j].is_zero() && !out[i - j].is_zero() {
                    a = k.sub(&a, &k.mul(&den[j], &out[i - j]));
                }
            }
            out.push(k.mul(&a, &inv0));
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "field": self.field.descriptor(),
            "generator": self.field.var().to_string(),
            "trunc": self.trunc(),
            "images": self.images.iter().map(|d| self.field.elem_to_json(d)).collect::<Vec<_>>(),
        })
    }

    /// Decodes a table whose coefficient field is already known.
    pub fn from_json_in(base: C, v: &Value) -> Result<Self, DerivError> {
        let bad = |m: &str| DerivError::BadTable(m.to_string());
        let var = match v.get("generator").and_then(Value::as_str) {
            Some("t") => 't',
            Some("s") => 's',
            _ => return Err(bad("generator must be \"t\" or \"s\"")),
        };
        if v.get("field") != Some(&base.descriptor()) {
            return Err(FieldError::FieldMismatch("table field descriptor".into()).into());
        }
        let field = RatFnField::new(base, var);
        let trunc = v.get("trunc").and_then(Value::as_u64).ok_or_else(|| bad("trunc"))? as usize;
        let images = v
            .get("images")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("images"))?
            .iter()
            .map(|d| field.elem_from_json(d))
            .collect::<Result<Vec<_>, _>>()?;
        if images.len() != trunc + 1 {
            return Err(bad("images length must be trunc + 1"));
        }
        DerivationTable::new(field, images)
    }
}

impl DerivationTable<Fq> {
    pub fn from_json(v: &Value) -> Result<Self, DerivError> {
        let base = Fq::from_descriptor(v.get("field").unwrap_or(&Value::Null))?;
        DerivationTable::from_json_in(base, v)
    }
}

/// Splits a monic polynomial as `c * s^p` with `c` free of `p`-th power factors.
fn split_pth_power<C: Field>(den: &Poly<C::Elem>, b: &C) -> (Poly<C::Elem>, Poly<C::Elem>) {
    let p = b.characteristic();
    if b.pth_root(&b.one()).is_none() {
        return (den.clone(), Poly::one(b));
    }
    let mut c = Poly::one(b);
    let mut s = Poly::one(b);
    for (g, m) in squarefree_decomposition(den, b) {
        let m = m as u64;
        c = c.mul(&g.pow(m % p, b), b);
        s = s.mul(&g.pow(m / p, b), b);
    }
    (c, s)
}

pub(crate) fn series_mul<C: Field>(k: &RatFnField<C>, a: &[RatFn<C::Elem>], b: &[RatFn<C::Elem>]) -> Vec<RatFn<C::Elem>> {
    let len = a.len().min(b.len());
    let mut out = vec![k.zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if y.is_zero() {
                continue;
            }
            out[i + j] = k.add(&out[i + j], &k.mul(x, y));
        }
    }
    out
}

/// `δ^(n) = D^n / n!` on `Q(t)` for the derivation `D` with `D(t) = d1`.
pub fn char0_divided_powers(
    field: RatFnField<Rationals>,
    d1: RatFn<<Rationals as Field>::Elem>,
    trunc: usize,
) -> Result<QTable, DerivError> {
    divided_powers(field, d1, trunc)
}

/// Generic form of [`char0_divided_powers`]; refuses positive characteristic.
pub fn divided_powers<C: Field>(field: RatFnField<C>, d1: RatFn<C::Elem>, trunc: usize) -> Result<DerivationTable<C>, DerivError> {
    if field.characteristic() != 0 {
        return Err(DerivError::CharPUnsupported);
    }
    if !field.contains(&d1) {
        return Err(FieldError::FieldMismatch(field.render(&d1)).into());
    }
    // D(f) = f' * D(t)
    let apply = |f: &RatFn<C::Elem>| field.mul(&field.formal_derivative(f), &d1);
    let mut images = vec![field.gen()];
    let mut iterate = field.gen();
    let mut factorial = field.one();
    for n in 1..=trunc {
        iterate = apply(&iterate);
        factorial = field.mul(&factorial, &field.from_i64(n as i64));
        images.push(field.div(&iterate, &factorial)?);
    }
    DerivationTable::new(field, images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{lucas_binomial, FqT, QT};

    fn hasse5(n: usize) -> FqTable {
        DerivationTable::hasse(FqT::new(Fq::prime(5).unwrap(), 't'), n)
    }

    #[test]
    fn hasse_examples() {
        let d = hasse5(12);
        let k = d.field().clone();
        assert_eq!(d.derive(&k.monomial(1, 7), 2).unwrap(), k.monomial(1, 5));
        let f = k.frac(Poly::new(k.base(), vec![1, 2, 3]), Poly::new(k.base(), vec![4, 0, 1])).unwrap();
        assert_eq!(d.derive(&f, 0).unwrap(), f);
        assert!(d.derive(&k.constant(3), 1).unwrap().is_zero());
        assert_eq!(d.derive(&k.monomial(1, -1), 1).unwrap(), k.monomial(4, -2));
        for j in 1..=4 {
            assert!(d.derive(&k.monomial(1, 5), j).unwrap().is_zero());
        }
        assert_eq!(d.derive(&k.monomial(1, 5), 5).unwrap(), k.one());
        for n in 1..=12 {
            assert!(d.derive(&k.one(), n).unwrap().is_zero());
        }
        assert!(matches!(d.derive(&f, 13), Err(DerivError::OrderExceedsTruncation { order: 13, trunc: 12 })));
    }

    #[test]
    fn quotient_rule_cross_check() {
        // δ^(1)(t * (1/t)) = 0 via Leibniz
        let d = hasse5(3);
        let k = d.field().clone();
        let t = k.gen();
        let it = k.inv(&t).unwrap();
        let lhs = k.add(&k.mul(&d.derive(&t, 1).unwrap(), &it), &k.mul(&t, &d.derive(&it, 1).unwrap()));
        assert!(lhs.is_zero());
    }

    #[test]
    fn hasse_closed_form_small_primes() {
        for p in [2u64, 3, 5] {
            let k = FqT::new(Fq::prime(p).unwrap(), 't');
            let d = DerivationTable::hasse(k.clone(), 30);
            for m in 0..=30i64 {
                let tay = d.taylor(&k.monomial(1, m), 30).unwrap();
                for n in 0..=m as usize {
                    let want = k.monomial(lucas_binomial(m as u64, n as u64, p), m - n as i64);
                    assert_eq!(tay[n], want, "p={p} m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn divided_powers_examples() {
        let q = QT::new(Rationals, 't');
        let d = char0_divided_powers(q.clone(), q.one(), 6).unwrap();
        assert_eq!(d.derive(&q.monomial(q.base().one(), 2), 2).unwrap(), q.one());
        assert_eq!(d.derive(&q.monomial(q.base().one(), 3), 3).unwrap(), q.one());
        for n in 2..=6 {
            assert!(d.images()[n].is_zero());
        }
        let f5 = FqT::new(Fq::prime(5).unwrap(), 't');
        assert_eq!(divided_powers(f5.clone(), f5.one(), 3).unwrap_err(), DerivError::CharPUnsupported);
    }

    #[test]
    fn json_round_trip() {
        let d = hasse5(6);
        let back = DerivationTable::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        let mut v = d.to_json();
        v["images"][0] = json!({"num": [1], "den": [1]});
        assert!(matches!(DerivationTable::from_json(&v), Err(DerivError::BadTable(_))));
    }
}
