use super::field::{Field, FieldError};

/// Dense univariate polynomial, lowest degree first. The zero polynomial has
/// an empty coefficient list and degree `None`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly<E> {
    coeffs: Vec<E>,
}

impl<E: Clone + PartialEq> Poly<E> {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    /// Builds a polynomial, trimming high zero coefficients.
    pub fn new<F: Field<Elem = E>>(field: &F, mut coeffs: Vec<E>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant<F: Field<Elem = E>>(field: &F, c: E) -> Self {
        Poly::new(field, vec![c])
    }

    pub fn one<F: Field<Elem = E>>(field: &F) -> Self {
        Poly::constant(field, field.one())
    }

    /// `c * x^k`.
    pub fn monomial<F: Field<Elem = E>>(field: &F, c: E, k: usize) -> Self {
        if field.is_zero(&c) {
            return Poly::zero();
        }
        let mut coeffs = vec![field.zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    pub fn x<F: Field<Elem = E>>(field: &F) -> Self {
        Poly::monomial(field, field.one(), 1)
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&E> {
        self.coeffs.last()
    }

    pub fn coeff<F: Field<Elem = E>>(&self, field: &F, k: usize) -> E {
        self.coeffs.get(k).cloned().unwrap_or_else(|| field.zero())
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_monic<F: Field<Elem = E>>(&self, field: &F) -> bool {
        self.lead().is_some_and(|c| field.is_one(c))
    }

    pub fn add<F: Field<Elem = E>>(&self, other: &Self, field: &F) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => field.add(a, b),
                (Some(a), None) | (None, Some(a)) => a.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Poly::new(field, coeffs)
    }

    pub fn neg<F: Field<Elem = E>>(&self, field: &F) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|c| field.neg(c)).collect(),
        }
    }

    pub fn sub<F: Field<Elem = E>>(&self, other: &Self, field: &F) -> Self {
        self.add(&other.neg(field), field)
    }

    pub fn scale<F: Field<Elem = E>>(&self, c: &E, field: &F) -> Self {
        if field.is_zero(c) {
            return Poly::zero();
        }
        Poly::new(field, self.coeffs.iter().map(|a| field.mul(a, c)).collect())
    }

    pub fn mul<F: Field<Elem = E>>(&self, other: &Self, field: &F) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if field.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if field.is_zero(b) {
                    continue;
                }
                out[i + j] = field.add(&out[i + j], &field.mul(a, b));
            }
        }
        Poly::new(field, out)
    }

    pub fn pow<F: Field<Elem = E>>(&self, mut e: u64, field: &F) -> Self {
        let mut base = self.clone();
        let mut acc = Poly::one(field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, field);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, field);
            }
        }
        acc
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize, zero: E) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![zero; k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Euclidean division: `(quotient, remainder)`.
    pub fn div_rem<F: Field<Elem = E>>(
        &self,
        divisor: &Self,
        field: &F,
    ) -> Result<(Self, Self), FieldError> {
        let dd = divisor.degree().ok_or(FieldError::DivisionByZero)?;
        let lead_inv = field.inv(divisor.lead().unwrap())?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![field.zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = field.mul(&rem[k + dd], &lead_inv);
            if field.is_zero(&c) {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = field.sub(&rem[k + j], &field.mul(&c, d));
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Poly::new(field, quot), Poly::new(field, rem)))
    }

    /// Exact division; errors if the remainder is nonzero.
    pub fn div_exact<F: Field<Elem = E>>(&self, divisor: &Self, field: &F) -> Result<Self, FieldError> {
        let (q, r) = self.div_rem(divisor, field)?;
        if !r.is_zero() {
            return Err(FieldError::BadEncoding("inexact polynomial division".into()));
        }
        Ok(q)
    }

    pub fn monic<F: Field<Elem = E>>(&self, field: &F) -> Self {
        match self.lead() {
            None => Poly::zero(),
            Some(l) => {
                let inv = field.inv(l).expect("nonzero leading coefficient");
                self.scale(&inv, field)
            }
        }
    }

    pub fn eval<F: Field<Elem = E>>(&self, x: &E, field: &F) -> E {
        self.coeffs
            .iter()
            .rev()
            .fold(field.zero(), |acc, c| field.add(&field.mul(&acc, x), c))
    }

    /// Formal derivative.
    pub fn derivative<F: Field<Elem = E>>(&self, field: &F) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| field.mul(c, &field.from_i64(i as i64)))
            .collect();
        Poly::new(field, coeffs)
    }

    /// `p(x) -> p(x^k)`.
    pub fn inflate<F: Field<Elem = E>>(&self, k: usize, field: &F) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![field.zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = c.clone();
        }
        Poly { coeffs }
    }

    /// `p(c x)`.
    pub fn rescale_var<F: Field<Elem = E>>(&self, c: &E, field: &F) -> Self {
        let mut pw = field.one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            coeffs.push(field.mul(a, &pw));
            pw = field.mul(&pw, c);
        }
        Poly::new(field, coeffs)
    }

    /// True iff every nonzero coefficient sits at an exponent divisible by `k`.
    pub fn support_divisible_by<F: Field<Elem = E>>(&self, k: usize, field: &F) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| i % k == 0 || field.is_zero(c))
    }

    pub fn map<G: Field>(&self, target: &G, f: impl Fn(&E) -> G::Elem) -> Poly<G::Elem> {
        Poly::new(target, self.coeffs.iter().map(f).collect())
    }

    pub fn render<F: Field<Elem = E>>(&self, field: &F, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if field.is_zero(c) {
                continue;
            }
            let cs = field.render(c);
            let cs = if cs.contains(['+', '-', '/']) && i > 0 {
                format!("({cs})")
            } else {
                cs
            };
            terms.push(match i {
                0 => cs,
                _ => {
                    let mono = if i == 1 { var.to_string() } else { format!("{var}^{i}") };
                    if field.is_one(c) {
                        mono
                    } else {
                        format!("{cs}*{mono}")
                    }
                }
            });
        }
        terms.join(" + ")
    }
}

/// Monic gcd of two polynomials, not both zero.
pub fn poly_gcd<F: Field>(a: &Poly<F::Elem>, b: &Poly<F::Elem>, field: &F) -> Result<Poly<F::Elem>, FieldError> {
    if a.is_zero() && b.is_zero() {
        return Err(FieldError::BothZero);
    }
    if !a.is_zero() && !b.is_zero() {
        if let Some(g) = field.fast_poly_gcd(a, b) {
            return Ok(g);
        }
    }
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_zero() {
        let (_, r) = x.div_rem(&y, field)?;
        x = y;
        y = r;
    }
    Ok(x.monic(field))
}

/// Squarefree decomposition of a nonzero polynomial: pairwise coprime monic
/// squarefree factors with multiplicities, whose product is `f` up to a unit.
/// Positive characteristic needs [`Field::pth_root`] on the coefficients.
pub fn squarefree_decomposition<F: Field>(f: &Poly<F::Elem>, field: &F) -> Vec<(Poly<F::Elem>, usize)> {
    let mut out = Vec::new();
    let f = f.monic(field);
    if f.is_constant() {
        return out;
    }
    let p = field.characteristic() as usize;
    let mut c = poly_gcd(&f, &f.derivative(field), field).unwrap();
    let mut w = f.div_exact(&c, field).unwrap();
    let mut i = 1;
    while !w.is_constant() {
        let y = poly_gcd(&w, &c, field).unwrap();
        let z = w.div_exact(&y, field).unwrap();
        if !z.is_constant() {
            out.push((z, i));
        }
        i += 1;
        c = c.div_exact(&y, field).unwrap();
        w = y;
    }
    if !c.is_constant() {
        // c is a p-th power
        let root = Poly::new(
            field,
            c.coeffs()
                .iter()
                .step_by(p)
                .map(|a| field.pth_root(a).expect("perfect coefficient field"))
                .collect(),
        );
        for (g, m) in squarefree_decomposition(&root, field) {
            out.push((g, m * p));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::fq::Fq;

    fn p(f: &Fq, c: &[i64]) -> Poly<u64> {
        Poly::new(f, c.iter().map(|&x| f.from_i64(x)).collect())
    }

    #[test]
    fn gcd_examples() {
        let f = Fq::prime(5).unwrap();
        let a = p(&f, &[-1, 0, 1]);
        let b = p(&f, &[-1, 1]);
        assert_eq!(poly_gcd(&a, &b, &f).unwrap(), p(&f, &[4, 1]));
        let g = p(&f, &[3, 0, 2, 4]);
        assert_eq!(poly_gcd(&g, &Poly::zero(), &f).unwrap(), g.monic(&f));
        assert_eq!(poly_gcd(&g, &g, &f).unwrap(), g.monic(&f));
        assert_eq!(
            poly_gcd::<Fq>(&Poly::zero(), &Poly::zero(), &f),
            Err(FieldError::BothZero)
        );
    }

    #[test]
    fn zero_has_no_degree() {
        let f = Fq::prime(3).unwrap();
        assert_eq!(p(&f, &[0, 0, 3]).degree(), None);
        assert_eq!(p(&f, &[1]).degree(), Some(0));
    }

    #[test]
    fn squarefree_in_char_p() {
        let f = Fq::prime(3).unwrap();
        let a = p(&f, &[1, 1]);
        let b = p(&f, &[2, 0, 1, 1]);
        // a^7 * b^3: multiplicity 3 is a pure p-th power
        let g = a.pow(7, &f).mul(&b.pow(3, &f), &f);
        let mut dec = squarefree_decomposition(&g, &f);
        dec.sort_by_key(|(_, m)| *m);
        let back = dec.iter().fold(Poly::one(&f), |acc, (h, m)| acc.mul(&h.pow(*m as u64, &f), &f));
        assert_eq!(back, g.monic(&f));
        assert!(dec.iter().all(|(_, m)| *m == 3 || *m == 7));
    }

    #[test]
    fn div_rem_reconstructs() {
        let f = Fq::prime(7).unwrap();
        let a = p(&f, &[1, 2, 3, 4, 5, 6]);
        let b = p(&f, &[3, 0, 2]);
        let (q, r) = a.div_rem(&b, &f).unwrap();
        assert!(r.degree() < b.degree());
        assert_eq!(q.mul(&b, &f).add(&r, &f), a);
    }
}
