use super::field::{Field, FieldError};
use super::poly::{poly_gcd, Poly};
use super::ratfn::RatFnField;

/// Dense row-major matrix over a field given by context.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone, PartialEq)]
pub struct RowEchelon<E> {
    pub rref: Matrix<E>,
    pub pivots: Vec<usize>,
}

impl<E> RowEchelon<E> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl<E: Clone> Matrix<E> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, e: E) -> Self {
        Matrix { rows, cols, data: vec![e; rows * cols] }
    }

    /// Builds a matrix from rows; all rows must share a length.
    pub fn from_rows(rows: Vec<Vec<E>>, cols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        let n = rows.len();
        Matrix { rows: n, cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: E) {
        self.data[i * self.cols + j] = e;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<T: Clone>(&self, f: impl Fn(&E) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

impl<E: Clone + PartialEq> Matrix<E> {
    pub fn zeros<F: Field<Elem = E>>(field: &F, rows: usize, cols: usize) -> Self {
        Matrix::filled(rows, cols, field.zero())
    }

    pub fn identity<F: Field<Elem = E>>(field: &F, n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { field.one() } else { field.zero() })
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, field: &F) -> bool {
        self.data.iter().all(|e| field.is_zero(e))
    }

    pub fn mul<F: Field<Elem = E>>(&self, other: &Self, field: &F) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(field.zero(), |acc, k| {
                let a = self.get(i, k);
                if field.is_zero(a) {
                    acc
                } else {
                    field.add(&acc, &field.mul(a, other.get(k, j)))
                }
            })
        })
    }

    pub fn add<F: Field<Elem = E>>(&self, other: &Self, field: &F) -> Self {
        Matrix::from_fn(self.rows, self.cols, |i, j| field.add(self.get(i, j), other.get(i, j)))
    }

    pub fn scale<F: Field<Elem = E>>(&self, c: &E, field: &F) -> Self {
        self.map(|e| field.mul(e, c))
    }

    pub fn mul_vec<F: Field<Elem = E>>(&self, v: &[E], field: &F) -> Vec<E> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(field.zero(), |acc, (a, b)| field.add(&acc, &field.mul(a, b)))
            })
            .collect()
    }

    pub fn inverse<F: Field<Elem = E>>(&self, field: &F) -> Result<Self, FieldError> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                field.one()
            } else {
                field.zero()
            }
        });
        let ech = field.row_reduce(&aug);
        if ech.pivots.len() < n || ech.pivots[n - 1] >= n {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Matrix::from_fn(n, n, |i, j| ech.rref.get(i, n + j).clone()))
    }

    pub fn render<F: Field<Elem = E>>(&self, field: &F) -> String {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let r: Vec<String> = self.row(i).iter().map(|e| field.render(e)).collect();
                format!("[{}]", r.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

/// Rank over the entry field.
pub fn exact_rank<F: Field>(field: &F, m: &Matrix<F::Elem>) -> usize {
    field.row_reduce(m).rank()
}

/// Basis of the right kernel `{v : M v = 0}`, one vector per free column,
/// read off the reduced echelon form.
pub fn kernel<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Vec<Vec<F::Elem>> {
    let ech = field.row_reduce(m);
    kernel_from_rref(field, &ech, m.cols())
}

pub fn kernel_from_rref<F: Field>(field: &F, ech: &RowEchelon<F::Elem>, cols: usize) -> Vec<Vec<F::Elem>> {
    let mut is_pivot = vec![false; cols];
    for &p in &ech.pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&j| !is_pivot[j])
        .map(|free| {
            let mut v = vec![field.zero(); cols];
            v[free] = field.one();
            for (r, &p) in ech.pivots.iter().enumerate() {
                v[p] = field.neg(ech.rref.get(r, free));
            }
            v
        })
        .collect()
}

/// Rank of a list of vectors.
pub fn rank_of_vectors<F: Field>(field: &F, vs: &[Vec<F::Elem>], dim: usize) -> usize {
    if vs.is_empty() {
        return 0;
    }
    exact_rank(field, &Matrix::from_rows(vs.to_vec(), dim))
}

/// Coordinates of `v` in the span of `basis` (rows), if it lies there.
pub fn solve_in_span<F: Field>(field: &F, basis: &[Vec<F::Elem>], v: &[F::Elem]) -> Option<Vec<F::Elem>> {
    let dim = v.len();
    let k = basis.len();
    // columns: basis vectors, then v; solve sum x_i b_i = v
    let aug = Matrix::from_fn(dim, k + 1, |i, j| if j < k { basis[j][i].clone() } else { v[i].clone() });
    let ech = field.row_reduce(&aug);
    if ech.pivots.last() == Some(&k) {
        return None;
    }
    let mut x = vec![field.zero(); k];
    for (r, &p) in ech.pivots.iter().enumerate() {
        x[p] = ech.rref.get(r, k).clone();
    }
    Some(x)
}

/// Extracts a maximal linearly independent subset (in order) as an echelon basis.
pub fn row_space_basis<F: Field>(field: &F, vs: &[Vec<F::Elem>], dim: usize) -> Vec<Vec<F::Elem>> {
    if vs.is_empty() {
        return Vec::new();
    }
    let ech = field.row_reduce(&Matrix::from_rows(vs.to_vec(), dim));
    (0..ech.rank()).map(|i| ech.rref.row(i).to_vec()).collect()
}

/// Gauss-Jordan elimination with deterministic pivoting: for each column in
/// order, the first row at or below the current one with a nonzero entry.
pub fn gauss_jordan<F: Field + ?Sized>(field: &F, m: &Matrix<F::Elem>) -> RowEchelon<F::Elem> {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !field.is_zero(a.get(i, c))) else {
            continue;
        };
        a.swap_rows(r, p);
        let inv = field.inv(a.get(r, c)).expect("pivot is nonzero");
        for j in c..a.cols {
            let v = field.mul(a.get(r, j), &inv);
            a.set(r, j, v);
        }
        for i in 0..a.rows {
            if i == r || field.is_zero(a.get(i, c)) {
                continue;
            }
            let factor = a.get(i, c).clone();
            for j in c..a.cols {
                let v = field.sub(a.get(i, j), &field.mul(&factor, a.get(r, j)));
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    RowEchelon { rref: a, pivots }
}

/// Fraction-free (Bareiss) forward elimination over the polynomial ring,
/// followed by back substitution to the reduced form over the function field.
///
/// Rows are first cleared of denominators; during the forward pass every
/// entry stays a polynomial minor of the input, so degrees grow linearly.
pub fn bareiss_row_reduce<C: Field>(
    field: &RatFnField<C>,
    m: &Matrix<<RatFnField<C> as Field>::Elem>,
) -> RowEchelon<<RatFnField<C> as Field>::Elem> {
    let base = field.base();
    let mut a: Matrix<Poly<C::Elem>> = Matrix::from_rows(
        (0..m.rows())
            .map(|i| {
                let row = m.row(i);
                let mut lcm = Poly::one(base);
                for e in row {
                    if !e.den().is_constant() {
                        let g = poly_gcd(&lcm, e.den(), base).unwrap();
                        lcm = lcm.mul(&e.den().div_exact(&g, base).unwrap(), base);
                    }
                }
                row.iter()
                    .map(|e| e.num().mul(&lcm.div_exact(e.den(), base).unwrap(), base))
                    .collect()
            })
            .collect(),
        m.cols(),
    );
    let mut pivots = Vec::new();
    let mut prev = Poly::one(base);
    let mut r = 0;
    for c in 0..a.cols() {
        if r == a.rows() {
            break;
        }
        let Some(p) = (r..a.rows()).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        a.swap_rows(r, p);
        let piv = a.get(r, c).clone();
        for i in r + 1..a.rows() {
            let lead = a.get(i, c).clone();
            for j in c + 1..a.cols() {
                let v = piv
                    .mul(a.get(i, j), base)
                    .sub(&lead.mul(a.get(r, j), base), base)
                    .div_exact(&prev, base)
                    .expect("Bareiss division is exact");
                a.set(i, j, v);
            }
            a.set(i, c, Poly::zero());
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    // Back substitution over the field.
    let mut out: Matrix<<RatFnField<C> as Field>::Elem> = Matrix::from_fn(m.rows(), m.cols(), |i, j| {
        if i < r {
            field.poly(a.get(i, j).clone())
        } else {
            field.zero()
        }
    });
    for (row, &c) in pivots.iter().enumerate().rev() {
        let inv = field.inv(out.get(row, c)).unwrap();
        for j in c..out.cols() {
            let v = field.mul(out.get(row, j), &inv);
            out.set(row, j, v);
        }
        for i in 0..row {
            if field.is_zero(out.get(i, c)) {
                continue;
            }
            let factor = out.get(i, c).clone();
            for j in c..out.cols() {
                let v = field.sub(out.get(i, j), &field.mul(&factor, out.get(row, j)));
                out.set(i, j, v);
            }
        }
    }
    RowEchelon { rref: out, pivots }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::fq::Fq;
    use crate::exactfield::ratfn::RatFn;
    use crate::exactfield::RandomElem;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type F5t = RatFnField<Fq>;

    fn f5t() -> F5t {
        RatFnField::new(Fq::prime(5).unwrap(), 't')
    }

    /// Oracle: plain fraction-based elimination without reduction or
    /// back-substitution, counting pivots.
    fn naive_rank<F: Field>(field: &F, m: &Matrix<F::Elem>) -> usize {
        let mut rows = m.to_rows();
        let mut rank = 0;
        for c in 0..m.cols() {
            let Some(p) = (rank..rows.len()).find(|&i| !field.is_zero(&rows[i][c])) else {
                continue;
            };
            rows.swap(rank, p);
            for i in rank + 1..rows.len() {
                let f = field.div(&rows[i][c], &rows[rank][c]).unwrap();
                for j in 0..m.cols() {
                    let v = field.sub(&rows[i][j], &field.mul(&f, &rows[rank][j]));
                    rows[i][j] = v;
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn spec_examples() {
        let f = Fq::prime(5).unwrap();
        assert_eq!(exact_rank(&f, &Matrix::identity(&f, 3)), 3);
        let z = Matrix::zeros(&f, 3, 4);
        assert_eq!(exact_rank(&f, &z), 0);
        assert_eq!(kernel(&f, &z).len(), 4);

        let k = f5t();
        let t = k.gen();
        let m = Matrix::from_rows(vec![vec![t.clone(), k.mul(&t, &t)], vec![k.one(), t.clone()]], 2);
        assert_eq!(exact_rank(&k, &m), 1);
        let ker = kernel(&k, &m);
        assert_eq!(ker.len(), 1);
        assert!(m.mul_vec(&ker[0], &k).iter().all(|e| k.is_zero(e)));
    }

    fn random_sparse_matrix(k: &F5t, rng: &mut ChaCha8Rng) -> Matrix<RatFn<u64>> {
        let rows = rng.gen_range(1..=6);
        let cols = rng.gen_range(1..=6);
        let mut m = Matrix::from_fn(rows, cols, |_, _| {
            if rng.gen_bool(0.3) {
                k.zero()
            } else {
                k.random_bounded(rng, 2)
            }
        });
        // make some rows dependent so the rank is interesting
        if rows > 2 && rng.gen_bool(0.5) {
            let c = k.random_bounded(rng, 1);
            for j in 0..cols {
                let v = k.add(m.get(0, j), &k.mul(&c, m.get(1, j)));
                m.set(rows - 1, j, v);
            }
        }
        m
    }

    #[test]
    fn bareiss_agrees_with_naive_elimination() {
        let k = f5t();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let m = random_sparse_matrix(&k, &mut rng);
            let ech = k.row_reduce(&m);
            assert_eq!(ech.rank(), naive_rank(&k, &m));
            assert_eq!(ech, gauss_jordan(&k, &m), "reduced forms are unique");
            for v in kernel_from_rref(&k, &ech, m.cols()) {
                assert!(m.mul_vec(&v, &k).iter().all(|e| k.is_zero(e)));
            }
        }
    }

    #[test]
    fn finite_field_rank_agrees_with_naive() {
        let f = Fq::prime(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
            let m = Matrix::from_fn(r, c, |_, _| f.random(&mut rng));
            assert_eq!(exact_rank(&f, &m), naive_rank(&f, &m));
            let ker = kernel(&f, &m);
            assert_eq!(ker.len() + exact_rank(&f, &m), c);
        }
    }

    #[test]
    fn inverse_and_span() {
        let f = Fq::prime(7).unwrap();
        let m = Matrix::from_rows(vec![vec![1, 2], vec![3, 4]], 2);
        let inv = m.inverse(&f).unwrap();
        assert_eq!(m.mul(&inv, &f), Matrix::identity(&f, 2));
        let sing = Matrix::from_rows(vec![vec![1, 2], vec![2, 4]], 2);
        assert!(sing.inverse(&f).is_err());
        let basis = vec![vec![1, 0, 1], vec![0, 1, 1]];
        assert_eq!(solve_in_span(&f, &basis, &[2, 3, 5]), Some(vec![2, 3]));
        assert_eq!(solve_in_span(&f, &basis, &[1, 1, 1]), None);
    }
}
