use serde::Serialize;
use serde_json::{json, Value};

use crate::algcore::{base_change, csa_check, CsaReport, KummerExtension, StructureAlgebra};
use crate::exactfield::matrix::{kernel, rank_of_vectors, solve_in_span};
use crate::exactfield::{Field, Fq, FqT, Matrix, Poly, RatFn};
use crate::itderiv::{restriction_mismatch, DerivError, FqTable};

use super::{Coords, DeltaAlgebra, DeltaError};

/// Search space `{Σ e_i f_i : f_i = P_i / g^k, deg P_i ≤ D}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ansatz {
    pub num_degree: usize,
    pub denominator: Poly<u64>,
    pub power: usize,
}

impl Ansatz {
    /// `D = 2e`, `g = s`, `k = e`.
    pub fn default_for(kx: &KummerExtension) -> Self {
        let e = kx.degree();
        Ansatz { num_degree: 2 * e, denominator: Poly::x(kx.fq()), power: e }
    }

    /// The enlarged ansatz of the stabilization check: `D + deg(g^k)`.
    pub fn grown(&self) -> Self {
        let step = (self.denominator.degree().unwrap_or(0) * self.power).max(1);
        Ansatz { num_degree: self.num_degree + step, ..self.clone() }
    }

    pub fn to_json(&self, k: &FqT) -> Value {
        json!({
            "num_degree": self.num_degree,
            "denominator": self.denominator.render(k.base(), &k.var().to_string()),
            "power": self.power,
        })
    }
}

/// An `F_q`-basis of the δ-constants found inside the ansatz, with the
/// structure constants of their span.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsBasis {
    pub ambient: DeltaAlgebra<Fq>,
    pub vectors: Vec<Coords<u64>>,
    pub algebra: StructureAlgebra<Fq>,
    pub orders: usize,
    pub ansatz: Ansatz,
}

impl ConstantsBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn to_json(&self) -> Value {
        let k = self.ambient.field();
        json!({
            "constant_field": k.base().descriptor(),
            "vectors": self.vectors.iter().map(|v| self.ambient.alg().render_elem(v)).collect::<Vec<_>>(),
            "algebra": self.algebra.to_json(),
            "orders": self.orders,
            "ansatz": self.ansatz.to_json(k),
        })
    }
}

fn ansatz_kernel(da: &DeltaAlgebra<Fq>, ansatz: &Ansatz, n: usize) -> Result<Vec<Coords<u64>>, DeltaError> {
    let k = da.field();
    let fq = k.base();
    let d = da.dim();
    let gk = ansatz.denominator.pow(ansatz.power as u64, fq);
    if gk.is_zero() {
        return Err(DeltaError::BadImages("ansatz denominator is zero".into()));
    }
    let monos: Vec<RatFn<u64>> = (0..=ansatz.num_degree)
        .map(|m| k.frac(Poly::monomial(fq, 1, m), gk.clone()))
        .collect::<Result<_, _>>()?;
    let unknowns: Vec<(usize, usize)> = (0..d).flat_map(|i| (0..monos.len()).map(move |m| (i, m))).collect();
    // derivs[u][order][coord]
    let mut derivs = Vec::with_capacity(unknowns.len());
    for &(i, m) in &unknowns {
        let mut v = da.alg().zero();
        v[i] = monos[m].clone();
        derivs.push(da.taylor_elem(&v, n)?);
    }
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for ord in 1..=n {
        for c in 0..d {
            let vals: Vec<&RatFn<u64>> = derivs.iter().map(|t| &t[ord][c]).collect();
            if vals.iter().all(|v| v.is_zero()) {
                continue;
            }
            let lcm = vals.iter().filter(|v| !v.is_zero()).try_fold(Poly::one(fq), |l, v| -> Result<_, DeltaError> {
                let g = crate::exactfield::poly_gcd(&l, v.den(), fq)?;
                Ok(l.mul(&v.den().div_exact(&g, fq)?, fq))
            })?;
            let cleared: Vec<Poly<u64>> = vals
                .iter()
                .map(|v| if v.is_zero() { Ok(Poly::zero()) } else { Ok(v.num().mul(&lcm.div_exact(v.den(), fq)?, fq)) })
                .collect::<Result<_, DeltaError>>()?;
            let deg = cleared.iter().filter_map(Poly::degree).max().unwrap_or(0);
            for j in 0..=deg {
                let row: Vec<u64> = cleared.iter().map(|p| p.coeff(fq, j)).collect();
                if row.iter().any(|x| *x != 0) {
                    rows.push(row);
                }
            }
        }
    }
    let ker = if rows.is_empty() {
        (0..unknowns.len()).map(|u| (0..unknowns.len()).map(|w| u64::from(u == w)).collect()).collect()
    } else {
        kernel(fq, &Matrix::from_rows(rows, unknowns.len()))
    };
    let mut out = Vec::with_capacity(ker.len());
    for lam in ker {
        let mut x = da.alg().zero();
        for (u, &(i, m)) in unknowns.iter().enumerate() {
            if lam[u] != 0 {
                x[i] = k.add(&x[i], &k.mul(&k.constant(lam[u]), &monos[m]));
            }
        }
        if da.taylor_elem(&x, n)?[1..].iter().any(|v| !da.alg().is_zero(v)) {
            return Err(DeltaError::BadImages("kernel vector is not annihilated".into()));
        }
        out.push(x);
    }
    Ok(out)
}

/// Solves `δ^(n)(x) = 0` for `1 ≤ n ≤ N` over the ansatz, as an `F_q`-linear
/// system on numerator coefficients, and reads off the multiplication on the
/// kernel. The dimension must not change under `D -> D + deg(g^k)`,
/// `N -> N + p`.
pub fn constants_subalgebra(da: &DeltaAlgebra<Fq>, ansatz: &Ansatz, n: usize) -> Result<ConstantsBasis, DeltaError> {
    let k = da.field();
    let fq = k.base();
    let p = fq.p() as usize;
    let vectors = ansatz_kernel(da, ansatz, n)?;
    let grown = ansatz_kernel(da, &ansatz.grown(), n + p)?;
    if grown.len() != vectors.len() {
        return Err(DeltaError::NotStabilized { dim: vectors.len(), grown: grown.len() });
    }
    let algebra = span_algebra(da, &vectors)?;
    Ok(ConstantsBasis { ambient: da.clone(), vectors, algebra, orders: n, ansatz: ansatz.clone() })
}

fn constant_coords(da: &DeltaAlgebra<Fq>, vectors: &[Coords<u64>], x: &[RatFn<u64>], what: &str) -> Result<Vec<u64>, DeltaError> {
    let k = da.field();
    let coeffs = solve_in_span(k, vectors, x).ok_or_else(|| DeltaError::NotClosed(format!("{what} leaves the span")))?;
    coeffs
        .iter()
        .map(|c| k.as_constant(c).ok_or_else(|| DeltaError::NotClosed(format!("{what} has a non-constant coordinate"))))
        .collect()
}

fn span_algebra(da: &DeltaAlgebra<Fq>, vectors: &[Coords<u64>]) -> Result<StructureAlgebra<Fq>, DeltaError> {
    let fq = da.field().base().clone();
    if vectors.is_empty() {
        return Err(DeltaError::NotClosed("no constants found".into()));
    }
    let mut constants = Vec::with_capacity(vectors.len());
    for (i, vi) in vectors.iter().enumerate() {
        let mut row = Vec::with_capacity(vectors.len());
        for (j, vj) in vectors.iter().enumerate() {
            row.push(constant_coords(da, vectors, &da.alg().mul(vi, vj), &format!("c{i} c{j}"))?);
        }
        constants.push(row);
    }
    let unit = constant_coords(da, vectors, da.alg().unit(), "the unit")?;
    let labels = (0..vectors.len()).map(|i| format!("c{i}")).collect();
    Ok(StructureAlgebra::new(fq, labels, constants, unit)?)
}

/// `(A ⊗_F K, δ_A ⊗ δ_K)` for a δ-algebra over `F = F_q(t)`.
pub fn transport(a: &DeltaAlgebra<Fq>, kx: &KummerExtension, delta_k: &FqTable, n: usize) -> Result<DeltaAlgebra<Fq>, DeltaError> {
    if a.scalar().field() != kx.base_field() || delta_k.field() != kx.ext_field() {
        return Err(DeltaError::ScalarMismatch);
    }
    for t in [a.trunc(), delta_k.trunc()] {
        if n > t {
            return Err(DerivError::OrderExceedsTruncation { order: n, trunc: t }.into());
        }
    }
    if let Some((g, j)) = restriction_mismatch(a.scalar(), delta_k, kx.degree(), n, 8, 0)? {
        return Err(DeltaError::RestrictionMismatch(format!("δ^({j}) differs on {g}")));
    }
    let alg = base_change(a.alg(), kx)?;
    let images = (0..a.dim())
        .map(|i| a.basis_images(i)[..=n].iter().map(|v| v.iter().map(|c| kx.embed(c)).collect()).collect())
        .collect();
    DeltaAlgebra::new(alg, delta_k.clone(), images)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruncationNote {
    pub order: usize,
    pub caveat: String,
}

/// Exactly the fields `constants_dim`, `ambient_dim`, `mu_rank`, `split`,
/// `truncation`, `ansatz`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitReport {
    pub constants_dim: usize,
    pub ambient_dim: usize,
    pub mu_rank: usize,
    pub split: bool,
    pub truncation: TruncationNote,
    pub ansatz: Value,
}

impl SplitReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitOutcome {
    pub report: SplitReport,
    pub constants: ConstantsBasis,
    /// `μ(c_i) μ(c_j) = μ(c_i c_j)` on the found basis.
    pub multiplicative: bool,
    /// Central simple check of the constants algebra, run when split.
    pub csa: Option<CsaReport>,
}

pub const CONSTANT_FIELD_BANNER: &str = "constant-field: F_q (not algebraically closed)";

/// Transports `A` to `A ⊗ K`, computes the constants and the rank of
/// `μ_K: C ⊗ K -> A ⊗ K`. Split iff `dim C = dim A = rank μ_K`.
pub fn check_split(
    a: &DeltaAlgebra<Fq>,
    kx: &KummerExtension,
    delta_k: &FqTable,
    ansatz: &Ansatz,
    n: usize,
) -> Result<SplitOutcome, DeltaError> {
    let p = kx.fq().p() as usize;
    let ambient = transport(a, kx, delta_k, n + p)?;
    let constants = constants_subalgebra(&ambient, ansatz, n)?;
    let k = ambient.field();
    let mu_rank = rank_of_vectors(k, &constants.vectors, ambient.dim());
    let alg = ambient.alg();
    let c = &constants.algebra;
    let mut multiplicative = true;
    for (i, vi) in constants.vectors.iter().enumerate() {
        for (j, vj) in constants.vectors.iter().enumerate() {
            let image = c.product_of_basis(i, j).iter().zip(&constants.vectors).fold(alg.zero(), |acc, (g, v)| {
                alg.add(&acc, &alg.scale(&k.constant(*g), v))
            });
            multiplicative &= image == alg.mul(vi, vj);
        }
    }
    let constants_dim = constants.dim();
    let ambient_dim = a.dim();
    let split = constants_dim == ambient_dim && mu_rank == ambient_dim;
    let caveat = if split {
        format!("verified up to order {n}: exact identities on the found basis")
    } else {
        format!("bounded search: no further constants in the ansatz annihilated up to order {n}")
    };
    let csa = split.then(|| csa_check(&constants.algebra, 0));
    let report = SplitReport {
        constants_dim,
        ambient_dim,
        mu_rank,
        split,
        truncation: TruncationNote { order: n, caveat },
        ansatz: ansatz.to_json(k),
    };
    Ok(SplitOutcome { report, constants, multiplicative, csa })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algcore::Cocycle;
    use crate::deltaalg::{crossed_product_derivation, matrix_entrywise_derivation};
    use crate::itderiv::extend_to_kummer;

    fn quaternion(n: usize) -> (KummerExtension, DeltaAlgebra<Fq>, FqTable) {
        let kx = KummerExtension::new(Fq::prime(5).unwrap(), 2, None).unwrap();
        let df = FqTable::hasse(kx.base_field().clone(), n);
        let dk = extend_to_kummer(&df, 2, n).unwrap();
        let f = Cocycle::symbol(&kx, &kx.ext_field().from_i64(2)).unwrap();
        let da = crossed_product_derivation(&kx, &f, &df, &dk, n).unwrap();
        (kx, da, dk)
    }

    #[test]
    fn quaternion_splits_over_k() {
        let (kx, da, dk) = quaternion(15);
        let out = check_split(&da, &kx, &dk, &Ansatz::default_for(&kx), 10).unwrap();
        assert!(out.report.split, "{:?}", out.report);
        assert_eq!((out.report.constants_dim, out.report.mu_rank), (4, 4));
        assert!(out.multiplicative);
        let csa = out.csa.unwrap();
        assert!(csa.central && csa.simple);
    }

    #[test]
    fn quaternion_over_base_is_not_split() {
        let (_, da, _) = quaternion(15);
        let k1 = KummerExtension::new(Fq::prime(5).unwrap(), 1, None).unwrap();
        let d1 = extend_to_kummer(da.scalar(), 1, 15).unwrap();
        let out = check_split(&da, &k1, &d1, &Ansatz::default_for(&k1), 10).unwrap();
        assert!(!out.report.split);
        assert_eq!(out.report.constants_dim, 2);
    }

    #[test]
    fn matrix_constants() {
        let k = FqT::new(Fq::prime(5).unwrap(), 's');
        let dk = FqTable::hasse(k, 15);
        let m2 = matrix_entrywise_derivation(2, &dk).unwrap();
        let kx = KummerExtension::new(Fq::prime(5).unwrap(), 2, None).unwrap();
        let c = constants_subalgebra(&m2, &Ansatz::default_for(&kx), 10).unwrap();
        assert_eq!(c.dim(), 4);
        let one = matrix_entrywise_derivation(1, &dk).unwrap();
        assert_eq!(constants_subalgebra(&one, &Ansatz::default_for(&kx), 10).unwrap().dim(), 1);
    }

    #[test]
    fn report_fields() {
        let (kx, da, dk) = quaternion(15);
        let out = check_split(&da, &kx, &dk, &Ansatz::default_for(&kx), 10).unwrap();
        let v = out.report.to_json();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["ambient_dim", "ansatz", "constants_dim", "mu_rank", "split", "truncation"]);
    }
}
