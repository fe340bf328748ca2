//! Exact arithmetic: finite fields, the rationals, univariate polynomials,
//! rational function fields and exact linear algebra over all of them.

mod field;
mod fq;
mod lucas;
pub mod matrix;
mod poly;
mod ratfn;
mod rational;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

pub use field::{ensure_same, field_op, Field, FieldError, FieldOpKind};
pub use fq::Fq;
pub use lucas::{is_prime, lucas_binomial};
pub use matrix::{exact_rank, kernel, Matrix, RowEchelon};
pub use poly::{poly_gcd, squarefree_decomposition, Poly};
pub use ratfn::{RatFn, RatFnField};
pub use rational::Rationals;

/// `F_q(t)`.
pub type FqT = RatFnField<Fq>;
/// `Q(t)`.
pub type QT = RatFnField<Rationals>;

/// Fields we can sample from.
pub trait RandomElem: Field {
    fn random(&self, rng: &mut impl Rng) -> Self::Elem;
}

impl RandomElem for Fq {
    fn random(&self, rng: &mut impl Rng) -> u64 {
        rng.gen_range(0..self.order())
    }
}

impl RandomElem for Rationals {
    /// Small numerators and denominators; enough to exercise exactness.
    fn random(&self, rng: &mut impl Rng) -> BigRational {
        let n: i64 = rng.gen_range(-9..=9);
        let d: i64 = rng.gen_range(1..=4);
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }
}

/// Whether `f` lies in the subfield `C(t^{p^m})`, i.e. `f = g(t^{p^m})`.
///
/// In normal form both numerator and denominator then have support in
/// exponents divisible by `p^m`. As a second route the denominator is
/// cleared with `f = num * den^{p^m - 1} / den^{p^m}`, whose denominator
/// always has that shape.
pub fn subfield_membership<C: Field>(field: &RatFnField<C>, f: &RatFn<C::Elem>, m: u32) -> Result<bool, FieldError> {
    let p = field.characteristic();
    if p == 0 {
        return Err(FieldError::CharZeroUnsupported);
    }
    let step = p
        .checked_pow(m)
        .and_then(|s| usize::try_from(s).ok())
        .ok_or_else(|| FieldError::BadEncoding("p^m overflows".into()))?;
    let base = field.base();
    if f.num().support_divisible_by(step, base) && f.den().support_divisible_by(step, base) {
        return Ok(true);
    }
    if f.den().degree().unwrap_or(0) * step > 4096 {
        return Ok(false);
    }
    let cleared = f.num().mul(&f.den().pow(step as u64 - 1, base), base);
    Ok(cleared.support_divisible_by(step, base))
}
