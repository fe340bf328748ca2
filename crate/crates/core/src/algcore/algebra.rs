use serde_json::{json, Value};

use crate::exactfield::matrix::{exact_rank, kernel};
use crate::exactfield::{ensure_same, Field, Matrix};

use super::AlgError;

/// A finite-dimensional associative unital algebra over `F`, given by
/// structure constants `e_i e_j = Σ_k c[i][j][k] e_k`.
///
/// Elements are coordinate vectors of length `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureAlgebra<F: Field> {
    field: F,
    labels: Vec<String>,
    constants: Vec<Vec<Vec<F::Elem>>>,
    unit: Vec<F::Elem>,
}

impl<F: Field> StructureAlgebra<F> {
    /// Validates shape, the unit laws and associativity on all basis triples.
    pub fn new(
        field: F,
        labels: Vec<String>,
        constants: Vec<Vec<Vec<F::Elem>>>,
        unit: Vec<F::Elem>,
    ) -> Result<Self, AlgError> {
        let d = labels.len();
        if d == 0 {
            return Err(AlgError::BadShape("dimension must be positive".into()));
        }
        let shape_ok = constants.len() == d
            && constants.iter().all(|row| row.len() == d && row.iter().all(|c| c.len() == d))
            && unit.len() == d;
        if !shape_ok {
            return Err(AlgError::BadShape(format!("expected a {d}x{d}x{d} table and a unit of length {d}")));
        }
        for v in constants.iter().flatten().flatten().chain(&unit) {
            if !field.contains(v) {
                return Err(AlgError::Field(crate::exactfield::FieldError::FieldMismatch(field.render(v))));
            }
        }
        let alg = StructureAlgebra { field, labels, constants, unit };
        alg.check_unit()?;
        alg.check_associative()?;
        Ok(alg)
    }

    fn check_unit(&self) -> Result<(), AlgError> {
        for i in 0..self.dim() {
            let ei = self.basis(i);
            if self.mul(&self.unit, &ei) != ei || self.mul(&ei, &self.unit) != ei {
                return Err(AlgError::BadUnit(i));
            }
        }
        Ok(())
    }

    fn check_associative(&self) -> Result<(), AlgError> {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                let ij = &self.constants[i][j];
                for k in 0..d {
                    let lhs = self.mul(ij, &self.basis(k));
                    let jk = &self.constants[j][k];
                    let rhs = self.mul(&self.basis(i), jk);
                    if lhs != rhs {
                        return Err(AlgError::NotAssociative(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Coordinates of `e_i e_j`.
    pub fn product_of_basis(&self, i: usize, j: usize) -> &[F::Elem] {
        &self.constants[i][j]
    }

    pub fn constants(&self) -> &[Vec<Vec<F::Elem>>] {
        &self.constants
    }

    pub fn unit(&self) -> &[F::Elem] {
        &self.unit
    }

    pub fn zero(&self) -> Vec<F::Elem> {
        vec![self.field.zero(); self.dim()]
    }

    pub fn basis(&self, i: usize) -> Vec<F::Elem> {
        let mut v = self.zero();
        v[i] = self.field.one();
        v
    }

    pub fn is_zero(&self, x: &[F::Elem]) -> bool {
        x.iter().all(|c| self.field.is_zero(c))
    }

    pub fn add(&self, x: &[F::Elem], y: &[F::Elem]) -> Vec<F::Elem> {
        x.iter().zip(y).map(|(a, b)| self.field.add(a, b)).collect()
    }

    pub fn sub(&self, x: &[F::Elem], y: &[F::Elem]) -> Vec<F::Elem> {
        x.iter().zip(y).map(|(a, b)| self.field.sub(a, b)).collect()
    }

    pub fn scale(&self, c: &F::Elem, x: &[F::Elem]) -> Vec<F::Elem> {
        x.iter().map(|a| self.field.mul(c, a)).collect()
    }

    /// The scalar `c` as the element `c · 1`.
    pub fn scalar(&self, c: &F::Elem) -> Vec<F::Elem> {
        self.scale(c, &self.unit)
    }

    pub fn mul(&self, x: &[F::Elem], y: &[F::Elem]) -> Vec<F::Elem> {
        let f = &self.field;
        let mut out = self.zero();
        for (i, a) in x.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if f.is_zero(b) {
                    continue;
                }
                let ab = f.mul(a, b);
                for (k, c) in self.constants[i][j].iter().enumerate() {
                    if !f.is_zero(c) {
                        out[k] = f.add(&out[k], &f.mul(&ab, c));
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, x: &[F::Elem], e: usize) -> Vec<F::Elem> {
        (0..e).fold(self.unit.clone(), |acc, _| self.mul(&acc, x))
    }

    /// Matrix of `y -> x y` (columns are images of basis vectors).
    pub fn left_mul_matrix(&self, x: &[F::Elem]) -> Matrix<F::Elem> {
        let cols: Vec<Vec<F::Elem>> = (0..self.dim()).map(|j| self.mul(x, &self.basis(j))).collect();
        Matrix::from_fn(self.dim(), self.dim(), |i, j| cols[j][i].clone())
    }

    /// Matrix of `y -> y x`.
    pub fn right_mul_matrix(&self, x: &[F::Elem]) -> Matrix<F::Elem> {
        let cols: Vec<Vec<F::Elem>> = (0..self.dim()).map(|j| self.mul(&self.basis(j), x)).collect();
        Matrix::from_fn(self.dim(), self.dim(), |i, j| cols[j][i].clone())
    }

    /// Basis of the center, as the common kernel of `z -> z e_i - e_i z`.
    pub fn center(&self) -> Vec<Vec<F::Elem>> {
        let d = self.dim();
        let f = &self.field;
        let mut rows = Vec::with_capacity(d * d);
        for i in 0..d {
            let comm = self.right_mul_matrix(&self.basis(i));
            let lm = self.left_mul_matrix(&self.basis(i));
            for r in 0..d {
                rows.push((0..d).map(|c| f.sub(comm.get(r, c), lm.get(r, c))).collect());
            }
        }
        kernel(f, &Matrix::from_rows(rows, d))
    }

    /// Rank of `L_x`.
    pub fn left_rank(&self, x: &[F::Elem]) -> usize {
        exact_rank(&self.field, &self.left_mul_matrix(x))
    }

    /// Same structure constants pushed through a ring map into another field.
    pub fn map_field<G: Field>(&self, target: G, f: impl Fn(&F::Elem) -> G::Elem) -> Result<StructureAlgebra<G>, AlgError> {
        let constants = self
            .constants
            .iter()
            .map(|row| row.iter().map(|c| c.iter().map(&f).collect()).collect())
            .collect();
        let unit = self.unit.iter().map(&f).collect();
        StructureAlgebra::new(target, self.labels.clone(), constants, unit)
    }

    pub fn render_elem(&self, x: &[F::Elem]) -> String {
        let terms: Vec<String> = x
            .iter()
            .zip(&self.labels)
            .filter(|(c, _)| !self.field.is_zero(c))
            .map(|(c, l)| {
                let c = self.field.render(c);
                if l == "1" {
                    format!("({c})")
                } else {
                    format!("({c})*{l}")
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    pub fn to_json(&self) -> Value {
        let f = &self.field;
        json!({
            "field": f.descriptor(),
            "dim": self.dim(),
            "labels": self.labels,
            "constants": self.constants.iter().map(|row| row.iter().map(|c| c.iter().map(|x| f.elem_to_json(x)).collect::<Vec<_>>()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "unit": self.unit.iter().map(|x| f.elem_to_json(x)).collect::<Vec<_>>(),
        })
    }

    /// Decodes an algebra over a known field; the descriptor must match.
    pub fn from_json_in(field: F, v: &Value) -> Result<Self, AlgError> {
        let bad = |m: &str| AlgError::BadShape(m.to_string());
        if v.get("field") != Some(&field.descriptor()) {
            return Err(AlgError::FieldMismatch("algebra field descriptor".into()));
        }
        let elems = |v: &Value| -> Result<Vec<F::Elem>, AlgError> {
            v.as_array()
                .ok_or_else(|| bad("expected an array"))?
                .iter()
                .map(|x| field.elem_from_json(x).map_err(AlgError::from))
                .collect()
        };
        let labels: Vec<String> = v
            .get("labels")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("labels"))?
            .iter()
            .map(|l| l.as_str().map(str::to_string).ok_or_else(|| bad("label")))
            .collect::<Result<_, _>>()?;
        if v.get("dim").and_then(Value::as_u64) != Some(labels.len() as u64) {
            return Err(bad("dim does not match labels"));
        }
        let constants = v
            .get("constants")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("constants"))?
            .iter()
            .map(|row| row.as_array().ok_or_else(|| bad("constants row"))?.iter().map(&elems).collect())
            .collect::<Result<_, _>>()?;
        let unit = elems(v.get("unit").ok_or_else(|| bad("unit"))?)?;
        StructureAlgebra::new(field.clone(), labels, constants, unit)
    }
}

/// Generic constructor with full validation.
pub fn alg_from_structure_constants<F: Field>(
    field: F,
    labels: Vec<String>,
    constants: Vec<Vec<Vec<F::Elem>>>,
    unit: Vec<F::Elem>,
) -> Result<StructureAlgebra<F>, AlgError> {
    StructureAlgebra::new(field, labels, constants, unit)
}

/// The field itself as a one-dimensional algebra.
pub fn base_field_algebra<F: Field>(field: F) -> StructureAlgebra<F> {
    let one = field.one();
    StructureAlgebra::new(field, vec!["1".into()], vec![vec![vec![one.clone()]]], vec![one]).expect("valid")
}

/// `M_n(F)` on the matrix units `E_ij` (index `i * n + j`).
pub fn matrix_units<F: Field>(field: F, n: usize) -> StructureAlgebra<F> {
    let d = n * n;
    let idx = |i: usize, j: usize| i * n + j;
    let mut constants = vec![vec![vec![field.zero(); d]; d]; d];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                constants[idx(i, j)][idx(j, l)][idx(i, l)] = field.one();
            }
        }
    }
    let mut unit = vec![field.zero(); d];
    for i in 0..n {
        unit[idx(i, i)] = field.one();
    }
    let labels = (0..d).map(|k| format!("E{}{}", k / n + 1, k % n + 1)).collect();
    StructureAlgebra::new(field, labels, constants, unit).expect("matrix units are associative")
}

/// `A ⊗ B` with basis `a_i ⊗ b_j` at index `i * dim B + j`.
pub fn tensor_algebras<F: Field>(a: &StructureAlgebra<F>, b: &StructureAlgebra<F>) -> Result<StructureAlgebra<F>, AlgError> {
    ensure_same(a.field(), b.field()).map_err(|e| AlgError::FieldMismatch(e.to_string()))?;
    let f = a.field();
    let (da, db) = (a.dim(), b.dim());
    let d = da * db;
    let mut constants = vec![vec![vec![f.zero(); d]; d]; d];
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    let out = &mut constants[i * db + j][k * db + l];
                    for (m, x) in a.product_of_basis(i, k).iter().enumerate() {
                        if f.is_zero(x) {
                            continue;
                        }
                        for (n, y) in b.product_of_basis(j, l).iter().enumerate() {
                            if !f.is_zero(y) {
                                out[m * db + n] = f.mul(x, y);
                            }
                        }
                    }
                }
            }
        }
    }
    let mut unit = vec![f.zero(); d];
    for (m, x) in a.unit().iter().enumerate() {
        for (n, y) in b.unit().iter().enumerate() {
            unit[m * db + n] = f.mul(x, y);
        }
    }
    let labels = a
        .labels()
        .iter()
        .flat_map(|x| b.labels().iter().map(move |y| format!("{x}⊗{y}")))
        .collect();
    StructureAlgebra::new(f.clone(), labels, constants, unit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::Fq;

    fn f5() -> Fq {
        Fq::prime(5).unwrap()
    }

    #[test]
    fn matrix_unit_relations() {
        let m = matrix_units(f5(), 2);
        let e12 = m.basis(1);
        let e21 = m.basis(2);
        assert_eq!(m.mul(&e12, &e21), m.basis(0));
        assert!(m.is_zero(&m.mul(&e12, &e12)));
        assert_eq!(m.center().len(), 1);
    }

    #[test]
    fn perturbed_table_is_rejected() {
        let m = matrix_units(f5(), 2);
        let mut c = m.constants().to_vec();
        // E12 E21 = E11 changed to 2 E11
        c[1][2][0] = 2;
        let err = StructureAlgebra::new(f5(), m.labels().to_vec(), c, m.unit().to_vec()).unwrap_err();
        assert!(matches!(err, AlgError::NotAssociative(..)), "{err:?}");
    }

    #[test]
    fn bad_unit() {
        let m = matrix_units(f5(), 2);
        let err = StructureAlgebra::new(f5(), m.labels().to_vec(), m.constants().to_vec(), m.basis(0)).unwrap_err();
        assert!(matches!(err, AlgError::BadUnit(_)));
    }

    #[test]
    fn one_dimensional() {
        let a = base_field_algebra(f5());
        assert_eq!(a.dim(), 1);
        assert_eq!(a.mul(&[2], &[3]), vec![1]);
    }

    #[test]
    fn tensor_dims() {
        let m = matrix_units(f5(), 2);
        let t = tensor_algebras(&m, &m).unwrap();
        assert_eq!(t.dim(), 16);
        assert_eq!(t.center().len(), 1);
        let a = tensor_algebras(&m, &base_field_algebra(f5())).unwrap();
        assert_eq!(a.constants(), m.constants());
    }

    #[test]
    fn tensor_field_mismatch() {
        let a = matrix_units(f5(), 1);
        let b = matrix_units(Fq::prime(7).unwrap(), 1);
        assert!(matches!(tensor_algebras(&a, &b), Err(AlgError::FieldMismatch(_))));
    }

    #[test]
    fn json_round_trip() {
        let m = matrix_units(f5(), 2);
        let back = StructureAlgebra::from_json_in(f5(), &m.to_json()).unwrap();
        assert_eq!(back, m);
    }
}
