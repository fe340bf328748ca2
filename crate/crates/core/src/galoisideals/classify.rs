use serde_json::{json, Value};

use crate::algcore::KummerExtension;
use crate::deltaalg::{DeltaAlgebra, SplitOutcome};
use crate::exactfield::matrix::{rank_of_vectors, row_space_basis};
use crate::exactfield::{Field, Fq, Matrix, RatFn};

use super::lattice::{intersect, right_ideal_of, submodule_lattice, Subspace, SubmoduleLattice};
use super::skolem::{lift_automorphism, recognize_matrix_algebra, MatrixRecognition};
use super::{AutomorphismRep, GaloisError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct DeltaFlags {
    pub delta_completely_reducible: bool,
    pub delta_irreducible: bool,
    pub delta_indecomposable: bool,
}

/// A δ-right ideal `J ⊆ A` pulled back from an `H`-stable right ideal `I_U`.
#[derive(Debug, Clone, PartialEq)]
pub struct PulledBackIdeal {
    pub subspace: Subspace,
    /// `F`-basis of `J` in the coordinates of `A`.
    pub basis: Vec<Vec<RatFn<u64>>>,
    pub right_stable: bool,
    pub delta_stable: bool,
}

impl PulledBackIdeal {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdealClassification {
    pub flags: DeltaFlags,
    pub lattice: SubmoduleLattice,
    pub ideals: Vec<PulledBackIdeal>,
    pub lifts: Vec<Matrix<u64>>,
    /// Set when completely reducible: pulled-back minimal ideals sum directly to `A`.
    pub decomposition_verified: Option<bool>,
    pub certificates: Vec<String>,
    render: Vec<Vec<String>>,
}

impl IdealClassification {
    /// Every pulled-back ideal is right- and δ-stable, and a claimed
    /// decomposition checks out.
    pub fn verified(&self) -> bool {
        self.ideals.iter().all(|j| j.right_stable && j.delta_stable) && self.decomposition_verified != Some(false)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "flags": self.flags,
            "ideals": self.ideals.iter().zip(&self.render).map(|(j, r)| json!({
                "dim": j.dim(),
                "subspace_dim": j.subspace.len(),
                "basis": r,
                "right_stable": j.right_stable,
                "delta_stable": j.delta_stable,
            })).collect::<Vec<_>>(),
            "lattice": self.lattice.submodules,
            "certificates": self.certificates,
        })
    }
}

fn span_has(field: &crate::exactfield::FqT, basis: &[Vec<RatFn<u64>>], x: &[RatFn<u64>], d: usize) -> bool {
    let mut all = basis.to_vec();
    all.push(x.to_vec());
    rank_of_vectors(field, &all, d) == basis.len()
}

/// Classifies the δ-right ideals of a split δ-algebra through the invariant
/// subspaces of the lifted Galois action: each `H`-stable `I_U ⊆ C ≅ M_n(F_q)`
/// is pulled back to `J = (I_U ⊗ K)^G`, computed as the `F`-span of the
/// Reynolds averages of `w s^c`, and checked directly inside `A`.
pub fn classify_delta_structure(
    a: &DeltaAlgebra<Fq>,
    kx: &KummerExtension,
    split: &SplitOutcome,
    rep: &AutomorphismRep,
    seed: u64,
) -> Result<IdealClassification, GaloisError> {
    let fq = kx.fq();
    let order = rep.powers.len();
    if order as u64 % fq.p() == 0 {
        return Err(GaloisError::ReynoldsDenominator { order, p: fq.p() });
    }
    if !split.report.split {
        return Err(GaloisError::NotSplit);
    }
    let consts = &split.constants;
    let c = &consts.algebra;
    let recog: MatrixRecognition = recognize_matrix_algebra(c, seed)?;
    let lifts: Vec<Matrix<u64>> =
        rep.action_matrices.iter().map(|m| lift_automorphism(c, &recog, m, seed)).collect::<Result<_, _>>()?;
    let n = recog.n;
    let lattice = submodule_lattice(fq, n, &lifts, seed);

    let f = kx.base_field();
    let k = kx.ext_field();
    let d = a.dim();
    let inv_order = f.base().inv(&(order as u64 % fq.p())).map_err(|_| GaloisError::ReynoldsDenominator { order, p: fq.p() })?;
    let reynolds = |x: &[RatFn<u64>]| -> Result<Vec<RatFn<u64>>, GaloisError> {
        (0..d)
            .map(|i| {
                let avg = rep.powers.iter().fold(k.zero(), |acc, &j| k.add(&acc, &kx.sigma(j, &x[i])));
                let avg = k.mul(&avg, &k.constant(inv_order));
                kx.in_base(&avg).ok_or_else(|| GaloisError::NotStable("Reynolds average is not fixed".into()))
            })
            .collect()
    };

    let mut ideals = Vec::with_capacity(lattice.submodules.len());
    let mut certificates = Vec::new();
    for u in &lattice.submodules {
        let i_u = right_ideal_of(n, u);
        let mut gens = Vec::new();
        for m in &i_u.basis {
            let mat = Matrix::from_rows(m.chunks(n).map(<[u64]>::to_vec).collect(), n);
            let y = recog.preimage(fq, &mat);
            let w = y.iter().zip(&consts.vectors).fold(vec![k.zero(); d], |acc, (yk, v)| {
                acc.iter().zip(v).map(|(s, x)| k.add(s, &k.mul(&k.constant(*yk), x))).collect()
            });
            for cpow in 0..kx.degree() {
                let sc = k.monomial(1, cpow as i64);
                let x: Vec<RatFn<u64>> = w.iter().map(|z| k.mul(z, &sc)).collect();
                gens.push(reynolds(&x)?);
            }
        }
        let basis = row_space_basis(f, &gens, d);
        if basis.len() != i_u.dim() {
            return Err(GaloisError::PullbackRankMismatch { expected: i_u.dim(), got: basis.len() });
        }
        let alg = a.alg();
        let right_stable = basis.iter().all(|x| (0..d).all(|e| span_has(f, &basis, &alg.mul(x, &alg.basis(e)), d)));
        let mut delta_stable = true;
        'outer: for x in &basis {
            let tay = a.taylor_elem(x, a.trunc())?;
            for y in &tay[1..] {
                if !span_has(f, &basis, y, d) {
                    delta_stable = false;
                    break 'outer;
                }
            }
        }
        ideals.push(PulledBackIdeal { subspace: u.clone(), basis, right_stable, delta_stable });
    }

    let decomposition_verified = lattice.completely_reducible.then(|| {
        let mut chosen: Vec<usize> = Vec::new();
        let mut acc: Subspace = Vec::new();
        for m in lattice.minimal() {
            if acc.len() == n {
                break;
            }
            if intersect(fq, n, &acc, m).is_empty() {
                let mut all = acc.clone();
                all.extend(m.iter().cloned());
                acc = row_space_basis(fq, &all, n);
                chosen.push(lattice.submodules.iter().position(|s| s == m).expect("listed"));
            }
        }
        let pieces: Vec<Vec<RatFn<u64>>> = chosen.iter().flat_map(|&i| ideals[i].basis.iter().cloned()).collect();
        acc.len() == n && pieces.len() == d && rank_of_vectors(f, &pieces, d) == d
    });

    let flags = DeltaFlags {
        delta_completely_reducible: lattice.completely_reducible,
        delta_irreducible: lattice.irreducible,
        delta_indecomposable: lattice.indecomposable,
    };
    certificates.push(format!(
        "Reynolds operator over |G| = {order}, invertible mod {}; each ideal pulled back as (I ⊗ K)^G",
        fq.p()
    ));
    for (idx, j) in ideals.iter().enumerate() {
        certificates.push(format!(
            "J{idx}: dim_F {} = n * dim U = {} * {}; right-stable {}; δ^(m)-stable for m ≤ {}: {}",
            j.dim(),
            n,
            j.subspace.len(),
            j.right_stable,
            a.trunc(),
            j.delta_stable
        ));
    }
    if let Some(ok) = decomposition_verified {
        certificates.push(format!("minimal pulled-back ideals sum directly to A: {ok}"));
    }
    let render = ideals.iter().map(|j| j.basis.iter().map(|x| a.alg().render_elem(x)).collect()).collect();
    Ok(IdealClassification {
        flags,
        lattice,
        ideals,
        lifts,
        decomposition_verified,
        certificates,
        render,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductivityNote {
    pub certificate: Option<String>,
}

/// For a δ-irreducible classification: the image of the Galois group in
/// `PGL_n(F_q)` fixes no proper subspace, so it lies in no proper parabolic
/// subgroup.
pub fn reductivity_note(cl: &IdealClassification) -> ReductivityNote {
    let certificate = cl.flags.delta_irreducible.then(|| {
        format!(
            "image in PGL_{}(F_q) is irreducible: the invariant-subspace lattice is {{0, F_q^{}}}, hence contained in no proper parabolic subgroup (reductive)",
            cl.lattice.n, cl.lattice.n
        )
    });
    ReductivityNote { certificate }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algcore::Cocycle;
    use crate::deltaalg::{check_split, crossed_product_derivation, matrix_entrywise_derivation, Ansatz};
    use crate::galoisideals::{action_on_constants, kummer_galois_group};
    use crate::itderiv::{extend_to_kummer, FqTable};

    fn classify(a: &DeltaAlgebra<Fq>, kx: &KummerExtension, n: usize) -> IdealClassification {
        let dk = extend_to_kummer(a.scalar(), kx.degree(), n + 5).unwrap();
        let split = check_split(a, kx, &dk, &Ansatz::default_for(kx), n).unwrap();
        let g = kummer_galois_group(kx, &dk, n, 0).unwrap();
        let rep = action_on_constants(&split.constants, kx, &g).unwrap();
        classify_delta_structure(a, kx, &split, &rep, 0).unwrap()
    }

    #[test]
    fn matrix_algebra_trivial_group() {
        let fq = Fq::prime(5).unwrap();
        let kx = KummerExtension::new(fq, 1, None).unwrap();
        let df = FqTable::hasse(kx.base_field().clone(), 15);
        let a = matrix_entrywise_derivation(2, &df).unwrap();
        let cl = classify(&a, &kx, 10);
        assert!(cl.flags.delta_completely_reducible && !cl.flags.delta_irreducible && !cl.flags.delta_indecomposable);
        assert_eq!(cl.ideals.len(), 8);
        assert_eq!(cl.decomposition_verified, Some(true));
        assert!(cl.verified());
        assert!(reductivity_note(&cl).certificate.is_none());
    }

    #[test]
    fn quaternion_is_irreducible() {
        let fq = Fq::prime(5).unwrap();
        let kx = KummerExtension::new(fq, 2, None).unwrap();
        let df = FqTable::hasse(kx.base_field().clone(), 15);
        let dk = extend_to_kummer(&df, 2, 15).unwrap();
        let f = Cocycle::symbol(&kx, &kx.ext_field().from_i64(2)).unwrap();
        let a = crossed_product_derivation(&kx, &f, &df, &dk, 15).unwrap();
        let cl = classify(&a, &kx, 10);
        assert!(cl.flags.delta_irreducible && cl.flags.delta_completely_reducible && cl.flags.delta_indecomposable);
        assert_eq!(cl.ideals.iter().map(PulledBackIdeal::dim).collect::<Vec<_>>(), [0, 4]);
        assert!(cl.verified());
        assert!(reductivity_note(&cl).certificate.is_some());
    }
}
