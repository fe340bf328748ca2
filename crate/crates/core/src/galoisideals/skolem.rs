use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algcore::StructureAlgebra;
use crate::exactfield::matrix::{exact_rank, kernel, rank_of_vectors, row_space_basis, solve_in_span};
use crate::exactfield::{Field, Fq, Matrix, RandomElem};

use super::GaloisError;

const EXHAUSTIVE_LIMIT: u64 = 1 << 12;
const RANDOM_TRIES: usize = 256;

/// An explicit isomorphism `ρ: C -> M_n(F_q)`, by left multiplication on a
/// minimal left ideal `C z`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRecognition {
    pub n: usize,
    pub generator: Vec<u64>,
    /// `ρ(c_i)` for each basis element.
    pub rho: Vec<Matrix<u64>>,
}

impl MatrixRecognition {
    pub fn image(&self, fq: &Fq, x: &[u64]) -> Matrix<u64> {
        let n = self.n;
        x.iter().zip(&self.rho).fold(Matrix::zeros(fq, n, n), |acc, (c, r)| acc.add(&r.scale(c, fq), fq))
    }

    /// `ρ^{-1}(m)` in the coordinates of `C`.
    pub fn preimage(&self, fq: &Fq, m: &Matrix<u64>) -> Vec<u64> {
        let flat: Vec<Vec<u64>> = self.rho.iter().map(flatten).collect();
        solve_in_span(fq, &flat, &flatten(m)).expect("ρ is onto")
    }
}

fn flatten(m: &Matrix<u64>) -> Vec<u64> {
    m.to_rows().concat()
}

fn try_generator(c: &StructureAlgebra<Fq>, z: &[u64], n: usize) -> Option<MatrixRecognition> {
    let fq = c.field();
    let d = c.dim();
    let left: Vec<Vec<u64>> = (0..d).map(|i| c.mul(&c.basis(i), z)).collect();
    if rank_of_vectors(fq, &left, d) != n {
        return None;
    }
    let w = row_space_basis(fq, &left, d);
    let mut rho = Vec::with_capacity(d);
    for i in 0..d {
        let ci = c.basis(i);
        let cols: Vec<Vec<u64>> = w.iter().map(|wk| solve_in_span(fq, &w, &c.mul(&ci, wk)).expect("left ideal")).collect();
        rho.push(Matrix::from_rows(cols, n).transpose());
    }
    let flat: Vec<Vec<u64>> = rho.iter().map(flatten).collect();
    (rank_of_vectors(fq, &flat, n * n) == d).then(|| MatrixRecognition { n, generator: z.to_vec(), rho })
}

/// Finds `z` with `dim C z = n` for `dim C = n^2`: basis elements first, then
/// every nonzero vector when `q^d` is small, then seeded random elements.
pub fn recognize_matrix_algebra(c: &StructureAlgebra<Fq>, seed: u64) -> Result<MatrixRecognition, GaloisError> {
    let d = c.dim();
    let n = (1..=d).find(|n| n * n >= d).unwrap_or(1);
    if n * n != d {
        return Err(GaloisError::NotMatrixAlgebra(format!("dimension {d} is not a square")));
    }
    let fq = c.field();
    for i in 0..d {
        if let Some(r) = try_generator(c, &c.basis(i), n) {
            return Ok(r);
        }
    }
    let q = fq.order();
    if q.checked_pow(d as u32).is_some_and(|total| total <= EXHAUSTIVE_LIMIT) {
        let total = q.pow(d as u32);
        for code in 1..total {
            let z: Vec<u64> = (0..d).map(|i| (code / q.pow(i as u32)) % q).collect();
            if let Some(r) = try_generator(c, &z, n) {
                return Ok(r);
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..RANDOM_TRIES {
            let z: Vec<u64> = (0..d).map(|_| fq.random(&mut rng)).collect();
            if let Some(r) = try_generator(c, &z, n) {
                return Ok(r);
            }
        }
    }
    Err(GaloisError::NotMatrixAlgebra("no element generates a minimal left ideal of dimension n".into()))
}

fn check_automorphism(c: &StructureAlgebra<Fq>, alpha: &Matrix<u64>) -> Result<(), GaloisError> {
    let d = c.dim();
    let fq = c.field();
    if alpha.rows() != d || alpha.cols() != d {
        return Err(GaloisError::NotInner(format!("expected a {d}x{d} matrix")));
    }
    if exact_rank(fq, alpha) != d {
        return Err(GaloisError::NotInner("map is not bijective".into()));
    }
    if alpha.mul_vec(c.unit(), fq) != c.unit() {
        return Err(GaloisError::NotInner("map does not fix the unit".into()));
    }
    for i in 0..d {
        for j in 0..d {
            if c.mul(&alpha.col(i), &alpha.col(j)) != alpha.mul_vec(c.product_of_basis(i, j), fq) {
                return Err(GaloisError::NotInner(format!("map is not multiplicative on ({i}, {j})")));
            }
        }
    }
    Ok(())
}

/// Solves `P ρ(c_i) = ρ(α(c_i)) P` and returns an invertible solution with
/// first nonzero entry 1.
pub fn lift_automorphism(
    c: &StructureAlgebra<Fq>,
    recog: &MatrixRecognition,
    alpha: &Matrix<u64>,
    seed: u64,
) -> Result<Matrix<u64>, GaloisError> {
    check_automorphism(c, alpha)?;
    let fq = c.field();
    let n = recog.n;
    let mut rows = Vec::new();
    for i in 0..c.dim() {
        let ri = &recog.rho[i];
        let ai = recog.image(fq, &alpha.col(i));
        for r in 0..n {
            for col in 0..n {
                let mut row = vec![0u64; n * n];
                for k in 0..n {
                    row[r * n + k] = fq.add(&row[r * n + k], ri.get(k, col));
                    row[k * n + col] = fq.sub(&row[k * n + col], ai.get(r, k));
                }
                rows.push(row);
            }
        }
    }
    let ker = kernel(fq, &Matrix::from_rows(rows, n * n));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<Vec<u64>> = ker.clone();
    if ker.len() > 1 {
        for _ in 0..RANDOM_TRIES {
            let v = ker.iter().fold(vec![0u64; n * n], |acc, b| {
                let c = fq.random(&mut rng);
                acc.iter().zip(b).map(|(x, y)| fq.add(x, &fq.mul(&c, y))).collect()
            });
            candidates.push(v);
        }
    }
    for v in candidates {
        let p = Matrix::from_rows(v.chunks(n).map(<[u64]>::to_vec).collect(), n);
        if exact_rank(fq, &p) == n {
            let lead = *v.iter().find(|x| **x != 0).expect("invertible");
            return Ok(p.scale(&fq.inv(&lead).expect("nonzero"), fq));
        }
    }
    Err(GaloisError::NotInner("no invertible intertwiner".into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkolemNoetherLift {
    pub p: Matrix<u64>,
    pub recognition: MatrixRecognition,
}

/// The inner-automorphism witness for an automorphism `α` of `C ≅ M_n(F_q)`,
/// given as the matrix whose column `i` holds `α(c_i)`.
pub fn skolem_noether_lift(c: &StructureAlgebra<Fq>, alpha: &Matrix<u64>, seed: u64) -> Result<SkolemNoetherLift, GaloisError> {
    check_automorphism(c, alpha)?;
    let recognition = recognize_matrix_algebra(c, seed)?;
    let p = lift_automorphism(c, &recognition, alpha, seed)?;
    Ok(SkolemNoetherLift { p, recognition })
}

/// The automorphism `X -> P X P^{-1}` of `M_n(F_q)` on matrix-unit coordinates.
pub fn conjugation_matrix(fq: &Fq, p: &Matrix<u64>) -> Result<Matrix<u64>, GaloisError> {
    let n = p.rows();
    let pinv = p.inverse(fq).map_err(|_| GaloisError::NotInner("P is singular".into()))?;
    let cols: Vec<Vec<u64>> = (0..n * n)
        .map(|idx| {
            let e = Matrix::from_fn(n, n, |r, c| u64::from(r * n + c == idx));
            flatten(&p.mul(&e, fq).mul(&pinv, fq))
        })
        .collect();
    Ok(Matrix::from_rows(cols, n * n).transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algcore::{make_symbol_algebra, matrix_units};

    fn f5() -> Fq {
        Fq::prime(5).unwrap()
    }

    #[test]
    fn identity_lifts_to_identity() {
        let m = matrix_units(f5(), 2);
        let id = Matrix::identity(&f5(), 4);
        let lift = skolem_noether_lift(&m, &id, 0).unwrap();
        assert_eq!(lift.p, Matrix::identity(&f5(), 2));
    }

    #[test]
    fn swap_round_trip() {
        let fq = f5();
        let m = matrix_units(fq.clone(), 2);
        let p = Matrix::from_rows(vec![vec![0, 1], vec![1, 0]], 2);
        let alpha = conjugation_matrix(&fq, &p).unwrap();
        assert_eq!(skolem_noether_lift(&m, &alpha, 0).unwrap().p, p);
    }

    #[test]
    fn transpose_rejected() {
        let m = matrix_units(f5(), 2);
        let t = Matrix::from_fn(4, 4, |r, c| u64::from((r % 2) * 2 + r / 2 == c));
        assert!(matches!(skolem_noether_lift(&m, &t, 0), Err(GaloisError::NotInner(_))));
    }

    #[test]
    fn split_quaternion_recognized() {
        let q = make_symbol_algebra(f5(), &1, &2, 2, &4).unwrap();
        let r = recognize_matrix_algebra(&q, 0).unwrap();
        assert_eq!(r.n, 2);
        let x = q.basis(1);
        let y = q.basis(2);
        let fq = f5();
        assert_eq!(r.image(&fq, &q.mul(&x, &y)), r.image(&fq, &x).mul(&r.image(&fq, &y), &fq));
        // conjugation by y is inner: x -> -x, y -> y
        let alpha = Matrix::from_fn(4, 4, |i, j| if i != j { 0 } else if i % 2 == 1 { 4 } else { 1 });
        let lift = lift_automorphism(&q, &r, &alpha, 0).unwrap();
        let pinv = lift.inverse(&fq).unwrap();
        for i in 0..4 {
            let lhs = lift.mul(&r.rho[i], &fq).mul(&pinv, &fq);
            assert_eq!(lhs, r.image(&fq, &alpha.col(i)));
        }
    }

    #[test]
    fn non_square_dimension() {
        let f = f5();
        let mut c = vec![vec![vec![0u64; 2]; 2]; 2];
        c[0][0][0] = 1;
        c[0][1][1] = 1;
        c[1][0][1] = 1;
        let dual = StructureAlgebra::new(f, vec!["1".into(), "e".into()], c, vec![1, 0]).unwrap();
        assert!(matches!(recognize_matrix_algebra(&dual, 0), Err(GaloisError::NotMatrixAlgebra(_))));
    }
}
