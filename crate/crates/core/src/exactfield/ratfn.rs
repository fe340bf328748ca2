use rand::Rng;
use serde_json::{json, Value};

use super::field::{Field, FieldError};
use super::matrix::{self, Matrix, RowEchelon};
use super::poly::{poly_gcd, Poly};
use super::RandomElem;

/// An element `num/den` of `C(var)`, always in normal form: `den` monic and
/// coprime to `num`; zero is `0/1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFn<E> {
    num: Poly<E>,
    den: Poly<E>,
}

impl<E: Clone + PartialEq> RatFn<E> {
    pub fn num(&self) -> &Poly<E> {
        &self.num
    }

    pub fn den(&self) -> &Poly<E> {
        &self.den
    }

    pub fn is_poly(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

/// The rational function field `C(var)` over an exact coefficient field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFnField<C> {
    base: C,
    var: char,
}

impl<C: Field> RatFnField<C> {
    pub fn new(base: C, var: char) -> Self {
        RatFnField { base, var }
    }

    pub fn base(&self) -> &C {
        &self.base
    }

    pub fn var(&self) -> char {
        self.var
    }

    /// Same coefficient field, different variable name.
    pub fn renamed(&self, var: char) -> Self {
        RatFnField { base: self.base.clone(), var }
    }

    /// Normalizes `num/den`; errors if `den` is zero.
    pub fn frac(&self, num: Poly<C::Elem>, den: Poly<C::Elem>) -> Result<RatFn<C::Elem>, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(self.zero());
        }
        let g = poly_gcd(&num, &den, &self.base)?;
        let (mut num, mut den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g, &self.base)?, den.div_exact(&g, &self.base)?)
        };
        let lead = den.lead().unwrap().clone();
        if !self.base.is_one(&lead) {
            let inv = self.base.inv(&lead)?;
            num = num.scale(&inv, &self.base);
            den = den.scale(&inv, &self.base);
        }
        Ok(RatFn { num, den })
    }

    /// Normalizes `num / Π f^m` for pairwise coprime squarefree monic `f`.
    /// Cancellation only divides by gcds with the factors, never with the
    /// expanded denominator.
    pub fn frac_factored(
        &self,
        mut num: Poly<C::Elem>,
        factors: &[(Poly<C::Elem>, usize)],
    ) -> Result<RatFn<C::Elem>, FieldError> {
        let b = &self.base;
        if num.is_zero() {
            return Ok(self.zero());
        }
        let mut work: Vec<(Poly<C::Elem>, usize)> = factors.iter().filter(|(f, m)| *m > 0 && !f.is_constant()).cloned().collect();
        let mut done: Vec<(Poly<C::Elem>, usize)> = Vec::new();
        while let Some((f, m)) = work.pop() {
            let g = poly_gcd(&num, &f, b)?;
            if g.is_constant() {
                done.push((f, m));
                continue;
            }
            let rest = f.div_exact(&g, b)?;
            if !rest.is_constant() {
                work.push((rest, m));
            }
            let mut v = 0;
            while v < m {
                let (q, r) = num.div_rem(&g, b)?;
                if !r.is_zero() {
                    break;
                }
                num = q;
                v += 1;
            }
            if v < m {
                work.push((g, m - v));
            }
        }
        let den = done.iter().fold(Poly::one(b), |acc, (f, m)| acc.mul(&f.pow(*m as u64, b), b));
        let inv = b.inv(den.lead().unwrap())?;
        Ok(RatFn { num: num.scale(&inv, b), den: den.scale(&inv, b) })
    }

    pub fn poly(&self, p: Poly<C::Elem>) -> RatFn<C::Elem> {
        RatFn { num: p, den: Poly::one(&self.base) }
    }

    pub fn constant(&self, c: C::Elem) -> RatFn<C::Elem> {
        self.poly(Poly::constant(&self.base, c))
    }

    /// The generator `var`.
    pub fn gen(&self) -> RatFn<C::Elem> {
        self.poly(Poly::x(&self.base))
    }

    /// `c * var^k` for any integer `k`.
    pub fn monomial(&self, c: C::Elem, k: i64) -> RatFn<C::Elem> {
        let b = &self.base;
        if k >= 0 {
            self.poly(Poly::monomial(b, c, k as usize))
        } else {
            self.frac(Poly::constant(b, c), Poly::monomial(b, b.one(), (-k) as usize))
                .expect("nonzero denominator")
        }
    }

    /// Integer power, negative exponents allowed for nonzero `a`.
    pub fn ipow(&self, a: &RatFn<C::Elem>, e: i64) -> Result<RatFn<C::Elem>, FieldError> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(&self.inv(a)?, (-e) as u64))
        }
    }

    /// Substitutes `var -> var^k` (e.g. the embedding `t -> s^e`).
    pub fn inflate(&self, a: &RatFn<C::Elem>, k: usize) -> RatFn<C::Elem> {
        // coprimality and monicity survive x -> x^k
        RatFn { num: a.num.inflate(k, &self.base), den: a.den.inflate(k, &self.base) }
    }

    /// The Frobenius `f -> f^p` in characteristic `p`.
    pub fn frobenius(&self, a: &RatFn<C::Elem>) -> RatFn<C::Elem> {
        let p = self.base.characteristic();
        assert!(p > 0, "Frobenius needs positive characteristic");
        let lift = |q: &Poly<C::Elem>| q.map(&self.base, |c| self.base.pow(c, p)).inflate(p as usize, &self.base);
        // injective ring map: normal form is preserved
        RatFn { num: lift(&a.num), den: lift(&a.den) }
    }

    /// Substitutes `var -> c * var` for a coefficient `c`.
    pub fn rescale_var(&self, a: &RatFn<C::Elem>, c: &C::Elem) -> RatFn<C::Elem> {
        self.frac(a.num.rescale_var(c, &self.base), a.den.rescale_var(c, &self.base))
            .expect("nonzero denominator")
    }

    /// Formal derivative `d/d var`.
    pub fn formal_derivative(&self, a: &RatFn<C::Elem>) -> RatFn<C::Elem> {
        let b = &self.base;
        let num = a.num.derivative(b).mul(&a.den, b).sub(&a.num.mul(&a.den.derivative(b), b), b);
        self.frac(num, a.den.mul(&a.den, b)).expect("nonzero denominator")
    }

    /// True iff `a` is a constant of the coefficient field.
    pub fn as_constant(&self, a: &RatFn<C::Elem>) -> Option<C::Elem> {
        if a.num.is_constant() && a.den.is_constant() {
            Some(a.num.coeff(&self.base, 0))
        } else {
            None
        }
    }

    pub fn random_bounded(&self, rng: &mut impl Rng, max_deg: usize) -> RatFn<C::Elem>
    where
        C: RandomElem,
    {
        let b = &self.base;
        let dn = rng.gen_range(0..=max_deg);
        let dd = rng.gen_range(0..=max_deg);
        let num = Poly::new(b, (0..=dn).map(|_| b.random(rng)).collect());
        loop {
            let mut dc: Vec<C::Elem> = (0..dd).map(|_| b.random(rng)).collect();
            dc.push(b.one());
            if let Ok(r) = self.frac(num.clone(), Poly::new(b, dc)) {
                return r;
            }
        }
    }
}

impl<C: Field> Field for RatFnField<C> {
    type Elem = RatFn<C::Elem>;

    fn zero(&self) -> Self::Elem {
        RatFn { num: Poly::zero(), den: Poly::one(&self.base) }
    }

    fn one(&self) -> Self::Elem {
        self.constant(self.base.one())
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.num.is_zero()
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let f = &self.base;
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        if a.den == b.den {
            if a.is_poly() {
                return self.poly(a.num.add(&b.num, f));
            }
            return self.frac(a.num.add(&b.num, f), a.den.clone()).unwrap();
        }
        let g = poly_gcd(&a.den, &b.den, f).unwrap();
        let ad = a.den.div_exact(&g, f).unwrap();
        let bd = b.den.div_exact(&g, f).unwrap();
        let mut num = a.num.mul(&bd, f).add(&b.num.mul(&ad, f), f);
        if num.is_zero() {
            return self.zero();
        }
        // ad and bd are coprime, so any cancellation happens inside g
        let mut den = a.den.mul(&bd, f);
        let mut shared = g;
        while !shared.is_constant() {
            let h = poly_gcd(&num, &shared, f).unwrap();
            if h.is_constant() {
                break;
            }
            num = num.div_exact(&h, f).unwrap();
            den = den.div_exact(&h, f).unwrap();
            shared = poly_gcd(&shared, &den, f).unwrap();
        }
        RatFn { num, den }
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        RatFn { num: a.num.neg(&self.base), den: a.den.clone() }
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let f = &self.base;
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        if a.is_poly() && b.is_poly() {
            return self.poly(a.num.mul(&b.num, f));
        }
        // cross-cancel: a.num/b.den and b.num/a.den
        let g1 = poly_gcd(&a.num, &b.den, f).unwrap();
        let g2 = poly_gcd(&b.num, &a.den, f).unwrap();
        let an = a.num.div_exact(&g1, f).unwrap();
        let bd = b.den.div_exact(&g1, f).unwrap();
        let bn = b.num.div_exact(&g2, f).unwrap();
        let ad = a.den.div_exact(&g2, f).unwrap();
        let den = ad.mul(&bd, f);
        let num = an.mul(&bn, f);
        let lead = den.lead().unwrap().clone();
        if f.is_one(&lead) {
            RatFn { num, den }
        } else {
            let inv = f.inv(&lead).unwrap();
            RatFn { num: num.scale(&inv, f), den: den.scale(&inv, f) }
        }
    }

    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let f = &self.base;
        let lead = f.inv(a.num.lead().unwrap())?;
        Ok(RatFn { num: a.den.scale(&lead, f), den: a.num.scale(&lead, f) })
    }

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.constant(self.base.from_i64(n))
    }

    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }

    fn contains(&self, a: &Self::Elem) -> bool {
        let f = &self.base;
        a.num.coeffs().iter().chain(a.den.coeffs()).all(|c| f.contains(c))
            && a.den.is_monic(f)
            && a.num.coeffs().last().is_none_or(|c| !f.is_zero(c))
            && (a.num.is_zero() && a.den.degree() == Some(0)
                || poly_gcd(&a.num, &a.den, f).is_ok_and(|g| g.is_constant()))
    }

    fn render(&self, a: &Self::Elem) -> String {
        let v = self.var.to_string();
        let n = a.num.render(&self.base, &v);
        if a.is_poly() {
            return n;
        }
        let d = a.den.render(&self.base, &v);
        let wrap = |s: String| if s.contains(' ') { format!("({s})") } else { s };
        format!("{}/{}", wrap(n), wrap(d))
    }

    fn elem_to_json(&self, a: &Self::Elem) -> Value {
        let enc = |p: &Poly<C::Elem>| -> Vec<Value> { p.coeffs().iter().map(|c| self.base.elem_to_json(c)).collect() };
        json!({"num": enc(&a.num), "den": enc(&a.den)})
    }

    fn elem_from_json(&self, v: &Value) -> Result<Self::Elem, FieldError> {
        let dec = |key: &str| -> Result<Poly<C::Elem>, FieldError> {
            let arr = v
                .get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| FieldError::BadEncoding(format!("missing {key}")))?;
            let cs = arr.iter().map(|c| self.base.elem_from_json(c)).collect::<Result<Vec<_>, _>>()?;
            Ok(Poly::new(&self.base, cs))
        };
        if let Some(obj) = v.as_object() {
            if let Some(k) = obj.keys().find(|k| *k != "num" && *k != "den") {
                return Err(FieldError::BadEncoding(format!("unknown key {k}")));
            }
        }
        let den = if v.get("den").is_some() { dec("den")? } else { Poly::one(&self.base) };
        self.frac(dec("num")?, den)
    }

    fn descriptor(&self) -> Value {
        self.base.descriptor()
    }

    fn row_reduce(&self, m: &Matrix<Self::Elem>) -> RowEchelon<Self::Elem> {
        matrix::bareiss_row_reduce(self, m)
    }
}

impl<C: RandomElem> RandomElem for RatFnField<C> {
    fn random(&self, rng: &mut impl Rng) -> Self::Elem {
        self.random_bounded(rng, 6)
    }
}
