//! Iterative derivations on algebras: the validated [`DeltaAlgebra`] type,
//! constructors (entrywise, crossed product, filtration extension, tensor),
//! δ-constants by a bounded ansatz, the splitting check and the nilpotent
//! witness for purely inseparable relations.

mod constants;
mod constructions;
mod nilpotent;

use serde_json::{json, Value};
use thiserror::Error;

use crate::algcore::{AlgError, StructureAlgebra};
use crate::exactfield::{Field, FieldError, RatFn, RatFnField};
use crate::itderiv::{DerivError, DerivationTable};

pub use constants::{
    check_split, constants_subalgebra, transport, Ansatz, ConstantsBasis, SplitOutcome, SplitReport, TruncationNote,
    CONSTANT_FIELD_BANNER,
};
pub use constructions::{
    crossed_product_derivation, filtration_extension, matrix_entrywise_derivation, remark_product_identities,
    symbol_filtration_spec, tensor_delta, FiltrationSpec,
};
pub use nilpotent::{nilpotent_witness, NilpotentWitness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeltaError {
    #[error("Leibniz rule fails for basis pair ({i}, {j}) at order {n}")]
    LeibnizInconsistent { i: usize, j: usize, n: usize },
    #[error("iterativity fails on basis element {i} at orders ({m}, {n})")]
    NotIterative { i: usize, m: usize, n: usize },
    #[error("malformed basis images: {0}")]
    BadImages(String),
    #[error("algebras carry different scalar derivations")]
    ScalarMismatch,
    #[error("cocycle values are not constants of the derivation")]
    CocycleNotConstant,
    #[error("Galois automorphism does not commute with the derivation: {0}")]
    GaloisDerivationMismatch(String),
    #[error("extension derivation does not restrict to the base one: {0}")]
    RestrictionMismatch(String),
    #[error("product identity fails for basis pair ({i}, {j}) at orders {orders:?}")]
    ProductIdentityFails { i: usize, j: usize, orders: (usize, usize) },
    #[error("level {0} basis does not span the algebra")]
    SpanFailure(usize),
    #[error("level {level} is not a form over its constant field: {detail}")]
    WellDefinednessFailure { level: usize, detail: String },
    #[error("filtration depth {depth} does not cover order {order}")]
    FiltrationTooShallow { depth: usize, order: usize },
    #[error("constants dimension not stabilized: {dim} grew to {grown}")]
    NotStabilized { dim: usize, grown: usize },
    #[error("constants span is not closed under multiplication: {0}")]
    NotClosed(String),
    #[error("relation fails: {0}")]
    RelationFails(String),
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error(transparent)]
    Deriv(#[from] DerivError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

type Coords<E> = Vec<RatFn<E>>;

/// An algebra over `C(g)` with an iterative derivation extending a scalar
/// derivation table, given by `δ^(n)(e_i)` for `n ≤ N` in coordinates.
///
/// On a general element the derivation is forced by the module Leibniz rule,
/// `δ^(n)(Σ x_i e_i) = Σ_i Σ_{a+b=n} δ^(a)(x_i) δ^(b)(e_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaAlgebra<C: Field> {
    alg: StructureAlgebra<RatFnField<C>>,
    scalar: DerivationTable<C>,
    images: Vec<Vec<Coords<C::Elem>>>,
}

impl<C: Field> DeltaAlgebra<C> {
    /// Validates `δ^(0) = id`, Leibniz on every basis pair and order, and
    /// iterativity on every basis image.
    pub fn new(
        alg: StructureAlgebra<RatFnField<C>>,
        scalar: DerivationTable<C>,
        images: Vec<Vec<Coords<C::Elem>>>,
    ) -> Result<Self, DeltaError> {
        let da = DeltaAlgebra::unchecked(alg, scalar, images)?;
        da.check_leibniz()?;
        da.check_iterative()?;
        Ok(da)
    }

    /// Shape checks only.
    pub(crate) fn unchecked(
        alg: StructureAlgebra<RatFnField<C>>,
        scalar: DerivationTable<C>,
        images: Vec<Vec<Coords<C::Elem>>>,
    ) -> Result<Self, DeltaError> {
        if alg.field() != scalar.field() {
            return Err(DeltaError::ScalarMismatch);
        }
        let d = alg.dim();
        if images.len() != d || images.is_empty() {
            return Err(DeltaError::BadImages(format!("expected images for {d} basis elements")));
        }
        let n = images[0].len();
        if n == 0 || images.iter().any(|im| im.len() != n || im.iter().any(|v| v.len() != d)) {
            return Err(DeltaError::BadImages("ragged image table".into()));
        }
        if n - 1 > scalar.trunc() {
            return Err(DerivError::OrderExceedsTruncation { order: n - 1, trunc: scalar.trunc() }.into());
        }
        for (i, im) in images.iter().enumerate() {
            if im[0] != alg.basis(i) {
                return Err(DeltaError::BadImages(format!("δ^(0)(e_{i}) must be e_{i}")));
            }
            if im.iter().flatten().any(|c| !alg.field().contains(c)) {
                return Err(DeltaError::BadImages(format!("image of e_{i} not in normal form")));
            }
        }
        Ok(DeltaAlgebra { alg, scalar, images })
    }

    /// Zero images in positive order: valid when the structure constants are constants.
    pub fn with_constant_basis(alg: StructureAlgebra<RatFnField<C>>, scalar: DerivationTable<C>, trunc: usize) -> Result<Self, DeltaError> {
        let images = (0..alg.dim())
            .map(|i| (0..=trunc).map(|n| if n == 0 { alg.basis(i) } else { alg.zero() }).collect())
            .collect();
        DeltaAlgebra::new(alg, scalar, images)
    }

    pub fn alg(&self) -> &StructureAlgebra<RatFnField<C>> {
        &self.alg
    }

    pub fn scalar(&self) -> &DerivationTable<C> {
        &self.scalar
    }

    pub fn field(&self) -> &RatFnField<C> {
        self.alg.field()
    }

    pub fn trunc(&self) -> usize {
        self.images[0].len() - 1
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    /// `δ^(n)(e_i)` for `n ≤ N`.
    pub fn basis_images(&self, i: usize) -> &[Coords<C::Elem>] {
        &self.images[i]
    }

    /// `[δ^(0)(x), ..., δ^(n)(x)]`.
    pub fn taylor_elem(&self, x: &[RatFn<C::Elem>], n: usize) -> Result<Vec<Coords<C::Elem>>, DeltaError> {
        if n > self.trunc() {
            return Err(DerivError::OrderExceedsTruncation { order: n, trunc: self.trunc() }.into());
        }
        let k = self.field();
        let mut out = vec![self.alg.zero(); n + 1];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let tx = self.scalar.taylor(xi, n)?;
            for (a, da) in tx.iter().enumerate() {
                if da.is_zero() {
                    continue;
                }
                for b in 0..=n - a {
                    for (c, v) in self.images[i][b].iter().enumerate() {
                        if !v.is_zero() {
                            out[a + b][c] = k.add(&out[a + b][c], &k.mul(da, v));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn derive(&self, x: &[RatFn<C::Elem>], n: usize) -> Result<Coords<C::Elem>, DeltaError> {
        Ok(self.taylor_elem(x, n)?.pop().unwrap())
    }

    fn check_leibniz(&self) -> Result<(), DeltaError> {
        let d = self.dim();
        let n_max = self.trunc();
        let mut lhs = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                lhs.push(self.taylor_elem(self.alg.product_of_basis(i, j), n_max)?);
            }
        }
        for n in 1..=n_max {
            for i in 0..d {
                for j in 0..d {
                    let mut rhs = self.alg.zero();
                    for a in 0..=n {
                        let (x, y) = (&self.images[i][a], &self.images[j][n - a]);
                        if !self.alg.is_zero(x) && !self.alg.is_zero(y) {
                            rhs = self.alg.add(&rhs, &self.alg.mul(x, y));
                        }
                    }
                    if lhs[i * d + j][n] != rhs {
                        return Err(DeltaError::LeibnizInconsistent { i, j, n });
                    }
                }
            }
        }
        Ok(())
    }

    fn check_iterative(&self) -> Result<(), DeltaError> {
        let n_max = self.trunc();
        let base = self.field().base();
        for i in 0..self.dim() {
            for m in 1..n_max {
                let outer = self.taylor_elem(&self.images[i][m], n_max - m)?;
                for n in 1..=n_max - m {
                    let c = self.field().constant(base.binomial((m + n) as u64, n as u64));
                    let rhs = self.alg.scale(&c, &self.images[i][m + n]);
                    if outer[n] != rhs {
                        return Err(DeltaError::NotIterative { i, m, n });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let k = self.field();
        let mut v = self.alg.to_json();
        let obj = v.as_object_mut().expect("object");
        obj.insert("scalar_derivation".into(), self.scalar.to_json());
        obj.insert("trunc".into(), json!(self.trunc()));
        obj.insert(
            "basis_images".into(),
            Value::Array(
                self.images
                    .iter()
                    .map(|im| json!(im.iter().map(|c| c.iter().map(|x| k.elem_to_json(x)).collect::<Vec<_>>()).collect::<Vec<_>>()))
                    .collect(),
            ),
        );
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algcore::matrix_units;
    use crate::exactfield::{Fq, FqT};

    fn f5t() -> FqT {
        FqT::new(Fq::prime(5).unwrap(), 't')
    }

    #[test]
    fn entrywise_is_valid() {
        let k = f5t();
        let d = DerivationTable::hasse(k.clone(), 6);
        let da = DeltaAlgebra::with_constant_basis(matrix_units(k.clone(), 2), d, 6).unwrap();
        let x = da.alg().scale(&k.gen(), &da.alg().basis(0));
        assert_eq!(da.derive(&x, 1).unwrap(), da.alg().basis(0));
    }

    #[test]
    fn corrupted_image_is_rejected() {
        let k = f5t();
        let d = DerivationTable::hasse(k.clone(), 3);
        let m = matrix_units(k.clone(), 2);
        let mut images: Vec<Vec<Vec<_>>> =
            (0..4).map(|i| (0..=3).map(|n| if n == 0 { m.basis(i) } else { m.zero() }).collect()).collect();
        images[0][1] = m.basis(1);
        let err = DeltaAlgebra::new(m, d, images).unwrap_err();
        // δ(E11 E21) = 0 but δ(E11) E21 + E11 δ(E21) = E12 E21 = E11
        assert_eq!(err, DeltaError::LeibnizInconsistent { i: 0, j: 2, n: 1 });
    }

    #[test]
    fn trivial_derivation_on_trivial_algebra() {
        let k = f5t();
        let d = DerivationTable::trivial(k.clone(), 4);
        assert!(DeltaAlgebra::with_constant_basis(matrix_units(k, 1), d, 4).is_ok());
    }
}
