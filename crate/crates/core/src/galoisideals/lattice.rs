use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::algcore::matrix_units;
use crate::exactfield::matrix::{kernel, rank_of_vectors, row_space_basis};
use crate::exactfield::{Field, Fq, Matrix, RandomElem};

use super::skolem::{lift_automorphism, recognize_matrix_algebra, MatrixRecognition};
use super::GaloisError;

/// Subspaces are stored by their reduced echelon basis, which is canonical.
pub type Subspace = Vec<Vec<u64>>;

const EXHAUSTIVE_LIMIT: u64 = 20_000;
const MEATAXE_ROUNDS: usize = 64;

/// All subspaces of `F_q^n` invariant under a matrix group, with the three
/// module-theoretic flags.
#[derive(Debug, Clone, PartialEq)]
pub struct SubmoduleLattice {
    pub fq: Fq,
    pub n: usize,
    pub generators: Vec<Matrix<u64>>,
    pub submodules: Vec<Subspace>,
    /// `false` when the randomized closure was used instead of enumeration.
    pub exhaustive: bool,
    pub completely_reducible: bool,
    pub irreducible: bool,
    pub indecomposable: bool,
}

impl SubmoduleLattice {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "exhaustive": self.exhaustive,
            "completely_reducible": self.completely_reducible,
            "irreducible": self.irreducible,
            "indecomposable": self.indecomposable,
            "submodules": self.submodules,
        })
    }

    /// Nonzero submodules containing no smaller nonzero submodule.
    pub fn minimal(&self) -> Vec<&Subspace> {
        self.submodules
            .iter()
            .filter(|u| {
                !u.is_empty()
                    && !self.submodules.iter().any(|w| !w.is_empty() && w.len() < u.len() && contains(&self.fq, self.n, u, w))
            })
            .collect()
    }
}

fn canon(fq: &Fq, vs: &[Vec<u64>], n: usize) -> Subspace {
    row_space_basis(fq, vs, n)
}

/// Whether `w ⊆ u`.
pub fn contains(fq: &Fq, n: usize, u: &Subspace, w: &Subspace) -> bool {
    let mut all = u.clone();
    all.extend(w.iter().cloned());
    rank_of_vectors(fq, &all, n) == u.len()
}

fn sum(fq: &Fq, n: usize, u: &Subspace, w: &Subspace) -> Subspace {
    let mut all = u.clone();
    all.extend(w.iter().cloned());
    canon(fq, &all, n)
}

pub fn intersect(fq: &Fq, n: usize, u: &Subspace, w: &Subspace) -> Subspace {
    if u.is_empty() || w.is_empty() {
        return Vec::new();
    }
    // Σ a_i u_i - Σ b_j w_j = 0
    let k = u.len() + w.len();
    let m = Matrix::from_fn(n, k, |r, c| if c < u.len() { u[c][r] } else { fq.neg(&w[c - u.len()][r]) });
    let vs: Vec<Vec<u64>> = kernel(fq, &m)
        .into_iter()
        .map(|a| (0..n).map(|r| (0..u.len()).fold(0, |acc, i| fq.add(&acc, &fq.mul(&a[i], &u[i][r])))).collect())
        .collect();
    canon(fq, &vs, n)
}

fn is_invariant(fq: &Fq, n: usize, u: &Subspace, gens: &[Matrix<u64>]) -> bool {
    u.iter().all(|v| {
        gens.iter().all(|g| {
            let gv = g.mul_vec(v, fq);
            let mut all = u.clone();
            all.push(gv);
            rank_of_vectors(fq, &all, n) == u.len()
        })
    })
}

fn spin(fq: &Fq, n: usize, v: &[u64], gens: &[Matrix<u64>]) -> Subspace {
    let mut basis = canon(fq, &[v.to_vec()], n);
    loop {
        let mut all = basis.clone();
        for b in &basis {
            for g in gens {
                all.push(g.mul_vec(b, fq));
            }
        }
        let next = canon(fq, &all, n);
        if next.len() == basis.len() {
            return basis;
        }
        basis = next;
    }
}

fn gaussian_binomial_total(q: u64, n: usize) -> Option<u64> {
    let mut total = 0u64;
    for k in 0..=n {
        let mut num = 1u128;
        let mut den = 1u128;
        for i in 0..k {
            num = num.checked_mul(q.checked_pow((n - i) as u32)? as u128 - 1)?;
            den = den.checked_mul(q.checked_pow((i + 1) as u32)? as u128 - 1)?;
        }
        total = total.checked_add(u64::try_from(num / den).ok()?)?;
    }
    Some(total)
}

/// Every subspace of `F_q^n`, by reduced echelon shape: pivot columns, then
/// all values of the free entries right of each pivot.
pub fn all_subspaces(fq: &Fq, n: usize) -> Vec<Subspace> {
    let q = fq.order();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let pivots: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| ((p + 1)..n).filter(|c| !pivots.contains(c)).map(move |c| (r, c)))
            .collect();
        let count = q.pow(free.len() as u32);
        for code in 0..count {
            let mut rows: Vec<Vec<u64>> = pivots
                .iter()
                .map(|&p| {
                    let mut r = vec![0u64; n];
                    r[p] = 1;
                    r
                })
                .collect();
            let mut c = code;
            for &(r, col) in &free {
                rows[r][col] = c % q;
                c /= q;
            }
            out.push(rows);
        }
    }
    out
}

fn sort_subspaces(v: &mut Vec<Subspace>) {
    v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    v.dedup();
}

/// Invariant subspaces of the group generated by `generators` and the scalar
/// matrices. Exhaustive when the number of subspaces of `F_q^n` is at most
/// 20000; otherwise kernels of random group-algebra elements are spun up and
/// closed under sums and intersections.
pub fn submodule_lattice(fq: &Fq, n: usize, generators: &[Matrix<u64>], seed: u64) -> SubmoduleLattice {
    let fq = fq.clone();
    let mut gens: Vec<Matrix<u64>> = generators.to_vec();
    let scalar = fq.primitive_root_of_unity(fq.order() - 1).unwrap_or(1);
    gens.push(Matrix::identity(&fq, n).scale(&scalar, &fq));
    let exhaustive = gaussian_binomial_total(fq.order(), n).is_some_and(|t| t <= EXHAUSTIVE_LIMIT);
    let mut submodules: Vec<Subspace> = if exhaustive {
        all_subspaces(&fq, n).into_iter().filter(|u| is_invariant(&fq, n, u, &gens)).collect()
    } else {
        meataxe_closure(&fq, n, &gens, seed)
    };
    sort_subspaces(&mut submodules);
    let proper: Vec<&Subspace> = submodules.iter().filter(|u| !u.is_empty() && u.len() < n).collect();
    let complement = |u: &Subspace| {
        submodules.iter().any(|w| w.len() + u.len() == n && intersect(&fq, n, u, w).is_empty())
    };
    let irreducible = n > 0 && proper.is_empty();
    let completely_reducible = submodules.iter().all(|u| complement(u));
    let indecomposable = n > 0 && !proper.iter().any(|u| complement(u));
    SubmoduleLattice { fq, n, generators: generators.to_vec(), submodules, exhaustive, completely_reducible, irreducible, indecomposable }
}

fn meataxe_closure(fq: &Fq, n: usize, gens: &[Matrix<u64>], seed: u64) -> Vec<Subspace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut words: Vec<Matrix<u64>> = vec![Matrix::identity(fq, n)];
    words.extend(gens.iter().cloned());
    for a in gens {
        for b in gens {
            words.push(a.mul(b, fq));
        }
    }
    let mut found: BTreeSet<Subspace> = BTreeSet::new();
    found.insert(Vec::new());
    found.insert(canon(fq, &(0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect::<Vec<_>>(), n));
    for i in 0..n {
        let e: Vec<u64> = (0..n).map(|j| u64::from(i == j)).collect();
        found.insert(spin(fq, n, &e, gens));
    }
    for _ in 0..MEATAXE_ROUNDS {
        let a = words.iter().fold(Matrix::zeros(fq, n, n), |acc, w| acc.add(&w.scale(&fq.random(&mut rng), fq), fq));
        for v in kernel(fq, &a) {
            found.insert(spin(fq, n, &v, gens));
        }
    }
    loop {
        let list: Vec<Subspace> = found.iter().cloned().collect();
        let before = found.len();
        for u in &list {
            for w in &list {
                found.insert(sum(fq, n, u, w));
                found.insert(intersect(fq, n, u, w));
            }
        }
        if found.len() == before {
            return list;
        }
    }
}

/// A right ideal `I_U = {X : column space of X ⊆ U}` of `M_n(F_q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RightIdeal {
    pub subspace: Subspace,
    /// Matrix-unit coordinates, index `i n + j` for `E_ij`.
    pub basis: Vec<Vec<u64>>,
}

impl RightIdeal {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// `I_U` spanned by `u e_j^T` for `u` in a basis of `U`.
pub fn right_ideal_of(n: usize, u: &Subspace) -> RightIdeal {
    let basis = u
        .iter()
        .flat_map(|v| {
            (0..n).map(move |j| {
                let mut x = vec![0u64; n * n];
                for i in 0..n {
                    x[i * n + j] = v[i];
                }
                x
            })
        })
        .collect();
    RightIdeal { subspace: u.clone(), basis }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StableIdeals {
    pub lattice: SubmoduleLattice,
    pub ideals: Vec<RightIdeal>,
}

/// `H`-stable right ideals of `M_n(F_q)` for `H` given by algebra automorphisms
/// (on matrix-unit coordinates). Each automorphism is lifted to `P_h`; the
/// invariant subspaces `U` of the `P_h` give the ideals `I_U`, each checked
/// directly for right-stability and `H`-stability.
pub fn stable_right_ideals(fq: &Fq, n: usize, actions: &[Matrix<u64>], seed: u64) -> Result<StableIdeals, GaloisError> {
    let m = matrix_units(fq.clone(), n);
    let recog = recognize_matrix_algebra(&m, seed)?;
    let lifts: Vec<Matrix<u64>> = actions.iter().map(|a| lift_automorphism(&m, &recog, a, seed)).collect::<Result<_, _>>()?;
    let lattice = submodule_lattice(fq, n, &lifts_in_standard(fq, &recog, &lifts), seed);
    let d = n * n;
    let mut ideals = Vec::with_capacity(lattice.submodules.len());
    for u in &lattice.submodules {
        let ideal = right_ideal_of(n, u);
        let dim_ok = ideal.dim() == n * u.len() && rank_of_vectors(fq, &ideal.basis, d) == ideal.dim();
        let inside = |x: &[u64]| {
            let mut all = ideal.basis.clone();
            all.push(x.to_vec());
            rank_of_vectors(fq, &all, d) == ideal.dim()
        };
        let right = ideal.basis.iter().all(|x| (0..d).all(|k| inside(&m.mul(x, &m.basis(k)))));
        let stable = ideal.basis.iter().all(|x| actions.iter().all(|a| inside(&a.mul_vec(x, fq))));
        if !(dim_ok && right && stable) {
            return Err(GaloisError::NotStable(format!("ideal of U = {u:?} fails its closure check")));
        }
        ideals.push(ideal);
    }
    Ok(StableIdeals { lattice, ideals })
}

// The recognized ρ is conjugate to the identity representation, ρ(X) = Q X Q^{-1};
// a lift P for ρ is Q^{-1} P Q in standard coordinates.
fn lifts_in_standard(fq: &Fq, recog: &MatrixRecognition, lifts: &[Matrix<u64>]) -> Vec<Matrix<u64>> {
    let n = recog.n;
    let standard: Vec<Matrix<u64>> = (0..n * n).map(|k| Matrix::from_fn(n, n, |r, c| u64::from(r * n + c == k))).collect();
    if standard == recog.rho {
        return lifts.to_vec();
    }
    let q = intertwiner(fq, &standard, &recog.rho);
    let qinv = q.inverse(fq).expect("intertwiner of irreducible representations");
    lifts.iter().map(|p| qinv.mul(p, fq).mul(&q, fq)).collect()
}

/// `Q` with `b_i = Q a_i Q^{-1}` for two faithful representations of `M_n`.
fn intertwiner(fq: &Fq, a: &[Matrix<u64>], b: &[Matrix<u64>]) -> Matrix<u64> {
    let n = a[0].rows();
    let mut rows = Vec::new();
    for (ai, bi) in a.iter().zip(b) {
        for r in 0..n {
            for col in 0..n {
                let mut row = vec![0u64; n * n];
                for k in 0..n {
                    row[r * n + k] = fq.add(&row[r * n + k], ai.get(k, col));
                    row[k * n + col] = fq.sub(&row[k * n + col], bi.get(r, k));
                }
                rows.push(row);
            }
        }
    }
    let v = kernel(fq, &Matrix::from_rows(rows, n * n)).into_iter().next().expect("isomorphic representations");
    Matrix::from_rows(v.chunks(n).map(<[u64]>::to_vec).collect(), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galoisideals::conjugation_matrix;

    fn f5() -> Fq {
        Fq::prime(5).unwrap()
    }

    #[test]
    fn identity_group_on_plane() {
        let l = submodule_lattice(&f5(), 2, &[Matrix::identity(&f5(), 2)], 0);
        assert_eq!(l.submodules.len(), 8);
        assert!(l.completely_reducible && !l.irreducible && !l.indecomposable);
        assert!(l.exhaustive);
    }

    #[test]
    fn jordan_block() {
        let j = Matrix::from_rows(vec![vec![1, 1], vec![0, 1]], 2);
        let l = submodule_lattice(&f5(), 2, &[j], 0);
        assert_eq!(l.submodules.len(), 3);
        assert_eq!(l.submodules[1], vec![vec![1, 0]]);
        assert!(!l.completely_reducible && !l.irreducible && l.indecomposable);
    }

    #[test]
    fn full_group_is_irreducible() {
        let a = Matrix::from_rows(vec![vec![1, 1], vec![0, 1]], 2);
        let b = Matrix::from_rows(vec![vec![1, 0], vec![1, 1]], 2);
        let l = submodule_lattice(&f5(), 2, &[a, b], 0);
        assert!(l.irreducible && l.completely_reducible && l.indecomposable);
    }

    #[test]
    fn subspace_counts() {
        assert_eq!(all_subspaces(&f5(), 2).len(), 8);
        assert_eq!(all_subspaces(&Fq::prime(2).unwrap(), 3).len(), 16);
        assert_eq!(gaussian_binomial_total(5, 3), Some(1 + 31 + 31 + 1));
    }

    #[test]
    fn meataxe_matches_enumeration() {
        let fq = Fq::prime(3).unwrap();
        let n = 3;
        let g = Matrix::from_rows(vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 2]], 3);
        let gens = vec![g.clone(), Matrix::identity(&fq, n).scale(&2, &fq)];
        let mut exact: Vec<Subspace> = all_subspaces(&fq, n).into_iter().filter(|u| is_invariant(&fq, n, u, &gens)).collect();
        sort_subspaces(&mut exact);
        let mut random = meataxe_closure(&fq, n, &gens, 7);
        sort_subspaces(&mut random);
        assert_eq!(exact, random);
    }

    #[test]
    fn right_ideals_trivial_group() {
        let st = stable_right_ideals(&f5(), 2, &[Matrix::identity(&f5(), 4)], 0).unwrap();
        assert_eq!(st.ideals.len(), 8);
        assert!(st.ideals.iter().all(|i| i.dim() == 2 * i.subspace.len()));
        let p = Matrix::from_rows(vec![vec![0, 2], vec![1, 0]], 2);
        let st = stable_right_ideals(&f5(), 2, &[conjugation_matrix(&f5(), &p).unwrap()], 0).unwrap();
        // P^2 = 2, a non-square: no invariant line
        assert_eq!(st.ideals.len(), 2);
    }
}
