//! The field abstraction shared by every module.
//!
//! Fields are context objects: an element carries no reference to the field
//! it lives in, so every operation goes through a `&F` handle. This keeps
//! elements small (`u64` for finite fields) and lets the same code run over
//! `F_q`, `Q`, `F_q(t)` and `Q(t)`.

use std::fmt::Debug;
use std::hash::Hash;

use serde_json::Value;
use thiserror::Error;

use super::matrix::{self, Matrix, RowEchelon};
use super::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands do not lie in the same field: {0}")]
    FieldMismatch(String),
    #[error("gcd of two zero polynomials is undefined")]
    BothZero,
    #[error("operation requires positive characteristic")]
    CharZeroUnsupported,
    #[error("operation requires characteristic zero")]
    CharPUnsupported,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is not irreducible of the stated degree: {0}")]
    BadModulus(String),
    #[error("malformed serialized value: {0}")]
    BadEncoding(String),
}

/// A field given by a context object.
pub trait Field: Clone + Debug + PartialEq {
    type Elem: Clone + Debug + PartialEq + Eq + Hash;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, FieldError>;
    fn from_i64(&self, n: i64) -> Self::Elem;
    /// 0 for characteristic zero.
    fn characteristic(&self) -> u64;
    /// Whether `a` is a well-formed element of this field (range, normal form).
    fn contains(&self, a: &Self::Elem) -> bool;
    fn render(&self, a: &Self::Elem) -> String;
    fn elem_to_json(&self, a: &Self::Elem) -> Value;
    fn elem_from_json(&self, v: &Value) -> Result<Self::Elem, FieldError>;
    /// JSON field descriptor.
    fn descriptor(&self) -> Value;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Binomial coefficient `C(m, n)` as a field element. Positive
    /// characteristic goes through Lucas' theorem.
    fn binomial(&self, m: u64, n: u64) -> Self::Elem {
        let p = self.characteristic();
        if p > 0 {
            return self.from_i64(super::lucas::lucas_binomial(m, n, p) as i64);
        }
        if n > m {
            return self.zero();
        }
        let n = n.min(m - n);
        let mut acc = self.one();
        for i in 0..n {
            acc = self.mul(&acc, &self.from_i64((m - i) as i64));
            acc = self
                .div(&acc, &self.from_i64((i + 1) as i64))
                .expect("nonzero in characteristic zero");
        }
        acc
    }

    /// The `p`-th root in a perfect field of characteristic `p`, if available.
    fn pth_root(&self, _a: &Self::Elem) -> Option<Self::Elem> {
        None
    }

    /// Monic gcd of two nonzero polynomials by a route cheaper than Euclid
    /// over the field itself, when the field has one.
    fn fast_poly_gcd(&self, _a: &Poly<Self::Elem>, _b: &Poly<Self::Elem>) -> Option<Poly<Self::Elem>> {
        None
    }

    /// Reduced row echelon form. Fields with a cheaper exact strategy
    /// (fraction-free elimination over function fields) override this.
    fn row_reduce(&self, m: &Matrix<Self::Elem>) -> RowEchelon<Self::Elem> {
        matrix::gauss_jordan(self, m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOpKind {
    Add,
    Mul,
    Inv,
    Neg,
}

/// Checked single field operation; operands are validated against `field`.
pub fn field_op<F: Field>(
    field: &F,
    kind: FieldOpKind,
    a: &F::Elem,
    b: Option<&F::Elem>,
) -> Result<F::Elem, FieldError> {
    if !field.contains(a) {
        return Err(FieldError::FieldMismatch(format!("{a:?}")));
    }
    let second = |b: Option<&F::Elem>| -> Result<F::Elem, FieldError> {
        let b = b.ok_or_else(|| FieldError::BadEncoding("missing second operand".into()))?;
        if !field.contains(b) {
            return Err(FieldError::FieldMismatch(format!("{b:?}")));
        }
        Ok(b.clone())
    };
    match kind {
        FieldOpKind::Add => Ok(field.add(a, &second(b)?)),
        FieldOpKind::Mul => Ok(field.mul(a, &second(b)?)),
        FieldOpKind::Inv => field.inv(a),
        FieldOpKind::Neg => Ok(field.neg(a)),
    }
}

/// Checks that two field handles describe the same field.
pub fn ensure_same<F: Field>(a: &F, b: &F) -> Result<(), FieldError> {
    if a == b {
        Ok(())
    } else {
        Err(FieldError::FieldMismatch(format!(
            "{} vs {}",
            a.descriptor(),
            b.descriptor()
        )))
    }
}
