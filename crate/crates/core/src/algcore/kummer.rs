use serde_json::{json, Value};

use crate::exactfield::{Field, Fq, FqT, Poly, RatFn};

use super::AlgError;

/// `K = F_q(s)` over `F = F_q(t)` with `s^e = t`, cyclic of order `e` with
/// generator `σ: s -> ζ s`.
#[derive(Debug, Clone, PartialEq)]
pub struct KummerExtension {
    fq: Fq,
    e: usize,
    zeta: u64,
    f: FqT,
    k: FqT,
}

impl KummerExtension {
    /// Uses the smallest primitive `e`-th root of unity when `zeta` is `None`.
    pub fn new(fq: Fq, e: usize, zeta: Option<u64>) -> Result<Self, AlgError> {
        let p = fq.p();
        if e == 0 || e as u64 % p == 0 || (fq.order() - 1) % e as u64 != 0 {
            return Err(AlgError::BadDegree(format!("e = {e} needs gcd(e, {p}) = 1 and e | {}", fq.order() - 1)));
        }
        let zeta = match zeta {
            Some(z) => z,
            None => fq.primitive_root_of_unity(e as u64).expect("e divides q - 1"),
        };
        if !fq.is_primitive_root(zeta, e as u64) {
            return Err(AlgError::BadRoot(format!("{} is not a primitive {e}-th root of unity", fq.render(&zeta))));
        }
        let f = FqT::new(fq.clone(), 't');
        let k = FqT::new(fq.clone(), 's');
        Ok(KummerExtension { fq, e, zeta, f, k })
    }

    pub fn fq(&self) -> &Fq {
        &self.fq
    }

    pub fn degree(&self) -> usize {
        self.e
    }

    pub fn zeta(&self) -> u64 {
        self.zeta
    }

    /// `F = F_q(t)`.
    pub fn base_field(&self) -> &FqT {
        &self.f
    }

    /// `K = F_q(s)`.
    pub fn ext_field(&self) -> &FqT {
        &self.k
    }

    /// `F -> K`, `t -> s^e`.
    pub fn embed(&self, f: &RatFn<u64>) -> RatFn<u64> {
        self.k.inflate(f, self.e)
    }

    /// `σ^j(g)`, i.e. `g(ζ^j s)`.
    pub fn sigma(&self, j: usize, g: &RatFn<u64>) -> RatFn<u64> {
        let c = self.fq.pow(&self.zeta, (j % self.e) as u64);
        self.k.rescale_var(g, &c)
    }

    /// Coordinates `[f_0, ..., f_{e-1}]` in `F` with `g = Σ f_c s^c`.
    ///
    /// The denominator is replaced by its norm `Π_j D(ζ^j s)`, a polynomial
    /// in `s^e`; the numerator is then split by exponent residues mod `e`.
    pub fn decompose(&self, g: &RatFn<u64>) -> Vec<RatFn<u64>> {
        let b = &self.fq;
        let e = self.e;
        let den = g.den();
        let mut cofactor = Poly::one(b);
        for j in 1..e {
            let c = b.pow(&self.zeta, j as u64);
            cofactor = cofactor.mul(&den.rescale_var(&c, b), b);
        }
        let norm = den.mul(&cofactor, b);
        let num = g.num().mul(&cofactor, b);
        let deflate = |p: &Poly<u64>, r: usize| -> Poly<u64> {
            Poly::new(b, p.coeffs().iter().skip(r).step_by(e).cloned().collect())
        };
        debug_assert!(norm.support_divisible_by(e, b));
        let norm_t = deflate(&norm, 0);
        (0..e)
            .map(|r| self.f.frac(deflate(&num, r), norm_t.clone()).expect("nonzero norm"))
            .collect()
    }

    /// `Σ f_c s^c` from `F`-coordinates.
    pub fn compose(&self, coords: &[RatFn<u64>]) -> RatFn<u64> {
        coords.iter().enumerate().fold(self.k.zero(), |acc, (c, f)| {
            self.k.add(&acc, &self.k.mul(&self.embed(f), &self.k.monomial(1, c as i64)))
        })
    }

    /// Whether `g ∈ K` lies in the image of `F`.
    pub fn in_base(&self, g: &RatFn<u64>) -> Option<RatFn<u64>> {
        let c = self.decompose(g);
        if c[1..].iter().all(RatFn::is_zero) {
            Some(c[0].clone())
        } else {
            None
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "field": self.fq.descriptor(),
            "degree": self.e,
            "zeta": self.fq.elem_to_json(&self.zeta),
            "relation": format!("s^{} = t", self.e),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompose_round_trip() {
        let kx = KummerExtension::new(Fq::prime(5).unwrap(), 2, None).unwrap();
        assert_eq!(kx.zeta(), 4);
        let k = kx.ext_field().clone();
        let s = k.gen();
        let one = k.one();
        let g = k.div(&k.add(&s, &one), &k.add(&k.mul(&s, &s), &k.mul(&s, &k.from_i64(3)))).unwrap();
        let c = kx.decompose(&g);
        assert_eq!(kx.compose(&c), g);
        let inv_s = kx.decompose(&k.inv(&s).unwrap());
        // 1/s = s / t
        assert!(inv_s[0].is_zero());
        assert_eq!(inv_s[1], kx.base_field().monomial(1, -1));
    }

    #[test]
    fn sigma_has_order_e() {
        let kx = KummerExtension::new(Fq::prime(5).unwrap(), 4, Some(2)).unwrap();
        let s = kx.ext_field().gen();
        assert_eq!(kx.sigma(1, &s), kx.ext_field().monomial(2, 1));
        assert_eq!(kx.sigma(4, &s), s);
        assert_eq!(kx.in_base(&kx.ext_field().monomial(1, 4)), Some(kx.base_field().gen()));
    }

    #[test]
    fn rejects_bad_data() {
        let f5 = Fq::prime(5).unwrap();
        assert!(matches!(KummerExtension::new(f5.clone(), 3, None), Err(AlgError::BadDegree(_))));
        assert!(matches!(KummerExtension::new(f5, 4, Some(4)), Err(AlgError::BadRoot(_))));
    }
}
