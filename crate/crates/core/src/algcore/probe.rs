use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::exactfield::matrix::{exact_rank, kernel, row_space_basis};
use crate::exactfield::{Field, Matrix, RandomElem};

use super::StructureAlgebra;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeClass {
    Invertible,
    ZeroDivisor,
    Nilpotent,
}

/// Classification of an element with a witness that checks by multiplication:
/// the inverse, a nonzero `w` with `z w = 0`, or `z^{k-1}` for a nilpotent
/// of index `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementProbe<E> {
    pub classification: ProbeClass,
    pub witness: Vec<E>,
    pub nilpotency_index: Option<usize>,
}

impl<E: Clone + PartialEq> ElementProbe<E> {
    pub fn verify<F: Field<Elem = E>>(&self, alg: &StructureAlgebra<F>, z: &[E]) -> bool {
        let zw = alg.mul(z, &self.witness);
        match self.classification {
            ProbeClass::Invertible => zw == alg.unit() && alg.mul(&self.witness, z) == alg.unit(),
            ProbeClass::ZeroDivisor => !alg.is_zero(&self.witness) && alg.is_zero(&zw),
            ProbeClass::Nilpotent => match self.nilpotency_index {
                Some(k) => {
                    !alg.is_zero(&self.witness)
                        && alg.is_zero(&zw)
                        && alg.is_zero(&alg.pow(z, k))
                        && (k == 1 || !alg.is_zero(&alg.pow(z, k - 1)))
                }
                None => false,
            },
        }
    }

    pub fn to_json<F: Field<Elem = E>>(&self, alg: &StructureAlgebra<F>) -> Value {
        json!({
            "classification": self.classification,
            "witness": alg.render_elem(&self.witness),
            "nilpotency_index": self.nilpotency_index,
        })
    }
}

/// Classifies `z` through `L_z` and its powers up to `max_power`.
pub fn element_probe<F: Field>(alg: &StructureAlgebra<F>, z: &[F::Elem], max_power: usize) -> ElementProbe<F::Elem> {
    let mut prev = alg.unit().to_vec();
    for k in 1..=max_power.max(1) {
        let next = alg.mul(&prev, z);
        if alg.is_zero(&next) {
            return ElementProbe { classification: ProbeClass::Nilpotent, witness: prev, nilpotency_index: Some(k) };
        }
        prev = next;
    }
    let lz = alg.left_mul_matrix(z);
    let ker = kernel(alg.field(), &lz);
    if let Some(w) = ker.into_iter().next() {
        return ElementProbe { classification: ProbeClass::ZeroDivisor, witness: w, nilpotency_index: None };
    }
    let inv = lz.inverse(alg.field()).expect("full rank");
    ElementProbe {
        classification: ProbeClass::Invertible,
        witness: inv.mul_vec(alg.unit(), alg.field()),
        nilpotency_index: None,
    }
}

/// Two-sided ideal generated by `seed`, as an echelon basis.
pub fn ideal_closure<F: Field>(alg: &StructureAlgebra<F>, seed: &[F::Elem]) -> Vec<Vec<F::Elem>> {
    let d = alg.dim();
    let mut basis = row_space_basis(alg.field(), &[seed.to_vec()], d);
    loop {
        let mut gens = basis.clone();
        for v in &basis {
            for i in 0..d {
                let e = alg.basis(i);
                gens.push(alg.mul(&e, v));
                gens.push(alg.mul(v, &e));
            }
        }
        let next = row_space_basis(alg.field(), &gens, d);
        if next.len() == basis.len() {
            return basis;
        }
        basis = next;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CsaReport {
    pub center_dim: usize,
    pub central: bool,
    pub simple: bool,
    /// Rank test of `A ⊗ A^op -> End(A)`; run for central algebras of dim ≤ 16.
    pub azumaya_certificate: Option<bool>,
    pub seeds_checked: usize,
}

const RANDOM_SEEDS: usize = 4;
const AZUMAYA_MAX_DIM: usize = 16;

/// Center by a kernel computation; simplicity by two-sided ideal closure of
/// every basis element and a few seeded random elements, backed for central
/// algebras by the `A ⊗ A^op ≅ End(A)` rank certificate.
pub fn csa_check<F: RandomElem>(alg: &StructureAlgebra<F>, seed: u64) -> CsaReport {
    let d = alg.dim();
    let f = alg.field();
    let center_dim = alg.center().len();
    let central = center_dim == 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seeds: Vec<Vec<F::Elem>> = (0..d).map(|i| alg.basis(i)).collect();
    for _ in 0..RANDOM_SEEDS {
        let v: Vec<F::Elem> = (0..d).map(|_| f.random(&mut rng)).collect();
        if !alg.is_zero(&v) {
            seeds.push(v);
        }
    }
    let mut simple = seeds.iter().all(|s| ideal_closure(alg, s).len() == d);
    let azumaya_certificate = (central && d <= AZUMAYA_MAX_DIM).then(|| {
        let ops: Vec<Vec<F::Elem>> = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| {
                let (ei, ej) = (alg.basis(i), alg.basis(j));
                (0..d).flat_map(|k| alg.mul(&alg.mul(&ei, &alg.basis(k)), &ej)).collect()
            })
            .collect();
        exact_rank(f, &Matrix::from_rows(ops, d * d)) == d * d
    });
    if azumaya_certificate == Some(false) {
        simple = false;
    }
    CsaReport { center_dim, central, simple, azumaya_certificate, seeds_checked: seeds.len() }
}
