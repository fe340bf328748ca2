use crate::algcore::{make_crossed_product, matrix_units, tensor_algebras, Cocycle, KummerExtension, StructureAlgebra};
use crate::exactfield::{Field, FqT, Matrix, RatFn, RatFnField};
use crate::itderiv::{restriction_mismatch, DerivError, DerivationTable, FqTable};

use super::{Coords, DeltaAlgebra, DeltaError};

const RESTRICTION_SAMPLES: usize = 8;

/// `M_n(K)` with `Δ^(l)((a_ij)) = (δ^(l)(a_ij))`, i.e. `Δ^(l)(E_ij) = 0` for `l ≥ 1`.
pub fn matrix_entrywise_derivation<C: Field>(n: usize, scalar: &DerivationTable<C>) -> Result<DeltaAlgebra<C>, DeltaError> {
    DeltaAlgebra::with_constant_basis(matrix_units(scalar.field().clone(), n), scalar.clone(), scalar.trunc())
}

/// The derivation `δ^(j)(Σ k_b u^b) = Σ δ_K^(j)(k_b) u^b` on the crossed
/// product `(K|F, Z/e, f)`, read as an `F`-algebra on `s^a u^b`.
pub fn crossed_product_derivation(
    kx: &KummerExtension,
    cocycle: &Cocycle,
    delta_f: &FqTable,
    delta_k: &FqTable,
    n: usize,
) -> Result<DeltaAlgebra<crate::exactfield::Fq>, DeltaError> {
    let (k, f) = (kx.ext_field(), kx.base_field());
    if delta_k.field() != k || delta_f.field() != f {
        return Err(DeltaError::ScalarMismatch);
    }
    for t in [delta_f.trunc(), delta_k.trunc()] {
        if n > t {
            return Err(DerivError::OrderExceedsTruncation { order: n, trunc: t }.into());
        }
    }
    let e = kx.degree();
    for a in 0..e {
        for b in 0..e {
            if delta_k.taylor(cocycle.value(a, b), n)?[1..].iter().any(|v| !v.is_zero()) {
                return Err(DeltaError::CocycleNotConstant);
            }
        }
    }
    if let Some((g, j)) = restriction_mismatch(delta_f, delta_k, e, n, RESTRICTION_SAMPLES, 0)? {
        return Err(DeltaError::RestrictionMismatch(format!("δ^({j}) differs on {g}")));
    }
    let s = k.gen();
    let ts = delta_k.taylor(&s, n)?;
    let tss = delta_k.taylor(&kx.sigma(1, &s), n)?;
    if let Some(j) = (0..=n).find(|&j| kx.sigma(1, &ts[j]) != tss[j]) {
        return Err(DeltaError::GaloisDerivationMismatch(format!("σ δ^({j})(s) ≠ δ^({j})(σ s)")));
    }
    let b = make_crossed_product(kx, cocycle)?;
    let d = e * e;
    let mut images = vec![Vec::new(); d];
    for a in 0..e {
        let ta = delta_k.taylor(&k.monomial(1, a as i64), n)?;
        for (j, v) in ta.iter().enumerate() {
            let coords = kx.decompose(v);
            for col in 0..e {
                let mut img = vec![f.zero(); d];
                for (r, x) in coords.iter().enumerate() {
                    img[r + e * col] = x.clone();
                }
                images[a + e * col].push(img);
                debug_assert_eq!(images[a + e * col].len(), j + 1);
            }
        }
    }
    DeltaAlgebra::new(b, delta_f.clone(), images)
}

/// Checks the two product identities on basis pairs `s^a u^b`, `s^c u^d`:
///
/// `δ^(n)(s^a u^b · s^c u^d) = δ_K^(n)(s^a σ^b(s^c)) f(b,d) u^{b+d}` and
/// `δ^(i)(s^a u^b) δ^(j)(s^c u^d) = δ_K^(i)(s^a) δ_K^(j)(σ^b(s^c)) f(b,d) u^{b+d}`
///
/// for all orders with `n, i + j ≤ N`. Returns the number of identities checked.
pub fn remark_product_identities(
    da: &DeltaAlgebra<crate::exactfield::Fq>,
    kx: &KummerExtension,
    cocycle: &Cocycle,
    delta_k: &FqTable,
) -> Result<usize, DeltaError> {
    let k = kx.ext_field();
    let fq = kx.fq();
    let e = kx.degree();
    let n = da.trunc();
    let alg = da.alg();
    let place = |g: &RatFn<u64>, col: usize| -> Coords<u64> {
        let mut v = alg.zero();
        for (r, x) in kx.decompose(g).into_iter().enumerate() {
            v[r + e * col] = x;
        }
        v
    };
    let powers: Vec<Vec<RatFn<u64>>> =
        (0..2 * e - 1).map(|m| delta_k.taylor(&k.monomial(1, m as i64), n)).collect::<Result<_, _>>()?;
    let mut checked = 0;
    for (i, j) in (0..e * e).flat_map(|i| (0..e * e).map(move |j| (i, j))) {
        let (a, b, c, d) = (i % e, i / e, j % e, j / e);
        let zeta_bc = k.constant(fq.pow(&kx.zeta(), (b * c) as u64));
        let fv = cocycle.value(b, d);
        let col = (b + d) % e;
        let lhs = da.taylor_elem(alg.product_of_basis(i, j), n)?;
        for (m, l) in lhs.iter().enumerate() {
            let rhs = place(&k.mul(&k.mul(&powers[a + c][m], &zeta_bc), fv), col);
            if *l != rhs {
                return Err(DeltaError::ProductIdentityFails { i, j, orders: (m, 0) });
            }
            checked += 1;
        }
        for oi in 0..=n {
            for oj in 0..=n - oi {
                let l = alg.mul(&da.basis_images(i)[oi], &da.basis_images(j)[oj]);
                let g = k.mul(&k.mul(&powers[a][oi], &k.mul(&powers[c][oj], &zeta_bc)), fv);
                if l != place(&g, col) {
                    return Err(DeltaError::ProductIdentityFails { i, j, orders: (oi, oj) });
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

/// Levels `B_i` of a descending chain of forms, each given by basis rows in
/// the coordinates of `B`; `B_i` is meant as an `F_i`-form with `F_i` the
/// constants of `δ^(j)`, `1 ≤ j < p^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationSpec<E> {
    levels: Vec<Vec<Coords<E>>>,
}

impl<E: Clone> FiltrationSpec<E> {
    pub fn new(levels: Vec<Vec<Coords<E>>>) -> Self {
        FiltrationSpec { levels }
    }

    /// Every level equal to the standard basis: `B_i = B_0 ⊗ F_i` for an algebra
    /// with constant structure constants.
    pub fn constant<C: Field<Elem = E>>(field: &RatFnField<C>, dim: usize, depth: usize) -> Self
    where
        E: PartialEq + std::fmt::Debug + Eq + std::hash::Hash,
    {
        let id: Vec<Coords<E>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { field.one() } else { field.zero() }).collect())
            .collect();
        FiltrationSpec { levels: vec![id; depth] }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Basis rows of level `i ≥ 1`.
    pub fn level(&self, i: usize) -> &[Coords<E>] {
        &self.levels[i - 1]
    }
}

/// Levels for the symbol algebra `x^e = t`, `y^e = b` over `F_q(t)`: level `i`
/// is spanned by `x^{p^i a} y^c`, rewritten as `t^{⌊p^i a / e⌋} x^{p^i a mod e} y^c`.
pub fn symbol_filtration_spec(field: &FqT, e: usize, depth: usize) -> FiltrationSpec<u64> {
    let p = field.characteristic() as usize;
    let d = e * e;
    let levels = (1..=depth as u32)
        .map(|i| {
            let q = p.pow(i);
            (0..d)
                .map(|m| {
                    let (a, c) = (m % e, m / e);
                    let mut row = vec![field.zero(); d];
                    row[(q * a) % e + e * c] = field.monomial(1, ((q * a) / e) as i64);
                    row
                })
                .collect()
        })
        .collect();
    FiltrationSpec { levels }
}

// δ^(j) c = 0 for 1 ≤ j ≤ min(p^i - 1, n): membership in F_i as far as orders ≤ n see it.
fn in_level<C: Field>(scalar: &DerivationTable<C>, c: &RatFn<C::Elem>, p: usize, i: usize, n: usize) -> Result<bool, DeltaError> {
    let bound = p.checked_pow(i as u32).map_or(n, |q| (q - 1).min(n));
    if bound == 0 || c.is_zero() {
        return Ok(true);
    }
    Ok(scalar.taylor(c, bound)?[1..].iter().all(RatFn::is_zero))
}

fn row_times<C: Field>(k: &RatFnField<C>, v: &[RatFn<C::Elem>], m: &Matrix<RatFn<C::Elem>>) -> Coords<C::Elem> {
    (0..m.cols())
        .map(|c| v.iter().enumerate().fold(k.zero(), |acc, (r, x)| if x.is_zero() { acc } else { k.add(&acc, &k.mul(x, m.get(r, c))) }))
        .collect()
}

/// Extends `δ_F` to `B` through a chain of forms: for `p^{i-1} ≤ j < p^i`,
/// write `e_l = Σ_k α_{lk} b_k` in the level-`i` basis and set
/// `δ^(j)(e_l) = Σ_k δ_F^(j)(α_{lk}) b_k`.
pub fn filtration_extension<C: Field>(
    alg: StructureAlgebra<RatFnField<C>>,
    spec: &FiltrationSpec<C::Elem>,
    scalar: &DerivationTable<C>,
    n: usize,
) -> Result<DeltaAlgebra<C>, DeltaError> {
    let k = alg.field().clone();
    let p = k.characteristic() as usize;
    if p == 0 {
        return Err(DerivError::CharZeroUnsupported.into());
    }
    if n > scalar.trunc() {
        return Err(DerivError::OrderExceedsTruncation { order: n, trunc: scalar.trunc() }.into());
    }
    let d = alg.dim();
    let needed = (1..).find(|&i| p.checked_pow(i as u32).map_or(true, |q| q > n)).unwrap();
    if spec.depth() < needed {
        return Err(DeltaError::FiltrationTooShallow { depth: spec.depth(), order: n });
    }
    let mut images: Vec<Vec<Coords<C::Elem>>> = (0..d).map(|l| vec![alg.basis(l)]).collect();
    let mut prev_inv: Option<Matrix<RatFn<C::Elem>>> = None;
    for i in 1..=needed {
        let rows = spec.level(i);
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(DeltaError::SpanFailure(i));
        }
        let m = Matrix::from_rows(rows.to_vec(), d);
        let minv = m.inverse(&k).map_err(|_| DeltaError::SpanFailure(i))?;
        for (a, ba) in rows.iter().enumerate() {
            for (b, bb) in rows.iter().enumerate() {
                let coords = row_times(&k, &alg.mul(ba, bb), &minv);
                for x in &coords {
                    if !in_level(scalar, x, p, i, n)? {
                        return Err(DeltaError::WellDefinednessFailure {
                            level: i,
                            detail: format!("b_{a} b_{b} has coordinate {} outside F_{i}", k.render(x)),
                        });
                    }
                }
            }
        }
        if let Some(pinv) = &prev_inv {
            for (a, ba) in rows.iter().enumerate() {
                for x in row_times(&k, ba, pinv) {
                    if !in_level(scalar, &x, p, i - 1, n)? {
                        return Err(DeltaError::WellDefinednessFailure {
                            level: i,
                            detail: format!("b_{a} is not in the span of level {} over F_{}", i - 1, i - 1),
                        });
                    }
                }
            }
        }
        let lo = p.pow(i as u32 - 1);
        let hi = (p.pow(i as u32) - 1).min(n);
        for (l, img) in images.iter_mut().enumerate() {
            let mut acc = vec![alg.zero(); hi + 1];
            for (kk, row) in rows.iter().enumerate() {
                let alpha = minv.get(l, kk);
                if alpha.is_zero() {
                    continue;
                }
                let ta = scalar.taylor(alpha, hi)?;
                for j in lo..=hi {
                    if !ta[j].is_zero() {
                        acc[j] = alg.add(&acc[j], &alg.scale(&ta[j], row));
                    }
                }
            }
            img.extend(acc.drain(lo..=hi));
        }
        prev_inv = Some(minv);
    }
    DeltaAlgebra::new(alg, scalar.clone(), images)
}

/// `(A ⊗ B, δ_A ⊗ δ_B)` with `δ^(n)(a ⊗ b) = Σ_{i+j=n} δ_A^(i)(a) ⊗ δ_B^(j)(b)`.
pub fn tensor_delta<C: Field>(a: &DeltaAlgebra<C>, b: &DeltaAlgebra<C>) -> Result<DeltaAlgebra<C>, DeltaError> {
    if a.scalar() != b.scalar() {
        return Err(DeltaError::ScalarMismatch);
    }
    let k = a.field();
    let alg = tensor_algebras(a.alg(), b.alg())?;
    let n = a.trunc().min(b.trunc());
    let (da, db) = (a.dim(), b.dim());
    let kron = |x: &[RatFn<C::Elem>], y: &[RatFn<C::Elem>]| -> Coords<C::Elem> {
        x.iter().flat_map(|xi| y.iter().map(move |yj| k.mul(xi, yj))).collect()
    };
    let mut images = Vec::with_capacity(da * db);
    for i in 0..da {
        for j in 0..db {
            let im: Vec<_> = (0..=n)
                .map(|m| {
                    (0..=m).fold(alg.zero(), |acc, x| {
                        let (u, v) = (&a.basis_images(i)[x], &b.basis_images(j)[m - x]);
                        if a.alg().is_zero(u) || b.alg().is_zero(v) {
                            acc
                        } else {
                            alg.add(&acc, &kron(u, v))
                        }
                    })
                })
                .collect();
            images.push(im);
        }
    }
    DeltaAlgebra::new(alg, a.scalar().clone(), images)
}
