use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::algcore::KummerExtension;
use crate::deltaalg::ConstantsBasis;
use crate::exactfield::matrix::solve_in_span;
use crate::exactfield::{Field, Matrix, RatFn};
use crate::itderiv::FqTable;

use super::GaloisError;

const COMMUTATION_SAMPLES: usize = 6;
const SAMPLE_DEGREE: usize = 4;

/// `σ_j: s -> ζ^j s`, certified to commute with `δ_K` up to a truncation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisAutomorphism {
    pub power: usize,
    pub root: u64,
    pub certified_orders: usize,
    pub samples: usize,
}

impl GaloisAutomorphism {
    pub fn to_json(&self, kx: &KummerExtension) -> Value {
        json!({
            "power": self.power,
            "map": format!("s -> {}*s", kx.fq().render(&self.root)),
            "certified_orders": self.certified_orders,
            "samples": self.samples,
        })
    }
}

/// The `e` automorphisms of `K = F_q(s)` over `F_q(t)`, each checked against
/// `σ δ^(n) = δ^(n) σ` on `s` and a few seeded random elements for `n ≤ N`.
pub fn kummer_galois_group(kx: &KummerExtension, delta_k: &FqTable, n: usize, seed: u64) -> Result<Vec<GaloisAutomorphism>, GaloisError> {
    let k = kx.ext_field();
    if delta_k.field() != k {
        return Err(GaloisError::CommutationFailure { power: 0, order: 0, element: "derivation lives on another field".into() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples: Vec<RatFn<u64>> = vec![k.gen()];
    samples.extend((0..COMMUTATION_SAMPLES).map(|_| k.random_bounded(&mut rng, SAMPLE_DEGREE)));
    let tays: Vec<Vec<RatFn<u64>>> = samples.iter().map(|g| delta_k.taylor(g, n)).collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(kx.degree());
    for j in 0..kx.degree() {
        for (g, tg) in samples.iter().zip(&tays) {
            let ts = delta_k.taylor(&kx.sigma(j, g), n)?;
            if let Some(m) = (0..=n).find(|&m| kx.sigma(j, &tg[m]) != ts[m]) {
                return Err(GaloisError::CommutationFailure { power: j, order: m, element: k.render(g) });
            }
        }
        out.push(GaloisAutomorphism {
            power: j,
            root: kx.fq().pow(&kx.zeta(), j as u64),
            certified_orders: n,
            samples: samples.len(),
        });
    }
    Ok(out)
}

/// The matrices of the Galois action `σ(Σ e_i ⊗ x_i) = Σ e_i ⊗ σ(x_i)` on
/// the coordinates of a constants basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AutomorphismRep {
    pub powers: Vec<usize>,
    /// Column `k` holds the coordinates of `σ(c_k)`.
    pub action_matrices: Vec<Matrix<u64>>,
    /// `P_σ` with `ρ(σ(c)) = P_σ ρ(c) P_σ^{-1}`, filled by the classification.
    pub projective_lifts: Vec<Matrix<u64>>,
}

impl AutomorphismRep {
    pub fn to_json(&self) -> Value {
        let m = |x: &Matrix<u64>| json!(x.to_rows());
        json!({
            "powers": self.powers,
            "action_matrices": self.action_matrices.iter().map(m).collect::<Vec<_>>(),
            "projective_lifts": self.projective_lifts.iter().map(m).collect::<Vec<_>>(),
        })
    }
}

pub fn action_on_constants(
    c: &ConstantsBasis,
    kx: &KummerExtension,
    group: &[GaloisAutomorphism],
) -> Result<AutomorphismRep, GaloisError> {
    let k = c.ambient.field();
    if k != kx.ext_field() {
        return Err(GaloisError::NotStable("constants do not live over the Kummer field".into()));
    }
    let d = c.dim();
    let fq = k.base();
    let cal = &c.algebra;
    let mut mats = Vec::with_capacity(group.len());
    for g in group {
        let mut cols = Vec::with_capacity(d);
        for (idx, v) in c.vectors.iter().enumerate() {
            let image: Vec<RatFn<u64>> = v.iter().map(|x| kx.sigma(g.power, x)).collect();
            let coords = solve_in_span(k, &c.vectors, &image)
                .ok_or_else(|| GaloisError::NotStable(format!("σ^{} moves c{idx} out of the constants", g.power)))?;
            let coords: Vec<u64> = coords
                .iter()
                .map(|x| k.as_constant(x))
                .collect::<Option<_>>()
                .ok_or_else(|| GaloisError::NotStable(format!("σ^{}(c{idx}) has non-constant coordinates", g.power)))?;
            cols.push(coords);
        }
        let m = Matrix::from_rows(cols, d).transpose();
        for i in 0..d {
            for j in 0..d {
                let lhs = cal.mul(&m.col(i), &m.col(j));
                let rhs = m.mul_vec(cal.product_of_basis(i, j), fq);
                if lhs != rhs {
                    return Err(GaloisError::NotStable(format!("σ^{} is not multiplicative on (c{i}, c{j})", g.power)));
                }
            }
        }
        mats.push(m);
    }
    Ok(AutomorphismRep { powers: group.iter().map(|g| g.power).collect(), action_matrices: mats, projective_lifts: Vec::new() })
}
