use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exactfield::{Field, Fq, FqT, RatFn};

use super::{DerivError, FqTable};

/// Extends an iterative derivation on `F = F_q(t)` to `K = F_q(s)`, `s^e = t`.
///
/// Writing `φ(s) = s + Σ a_n T^n` for the unknown Taylor series of `s`, the
/// coefficient of `T^n` in `φ(s)^e` is `e s^{e-1} a_n` plus terms in
/// `a_1..a_{n-1}`; equating with `δ_F^(n)(t)` (read in `K`) solves for
/// `a_n` since `e` is a unit mod `p`.
pub fn extend_to_kummer(base: &FqTable, e: usize, trunc: usize) -> Result<FqTable, DerivError> {
    let fq = base.field().base();
    let p = fq.p();
    if e == 0 || e as u64 % p == 0 || (fq.order() - 1) % e as u64 != 0 {
        return Err(DerivError::BadDegree(format!("e = {e} needs gcd(e, {p}) = 1 and e | {}", fq.order() - 1)));
    }
    if trunc > base.trunc() {
        return Err(DerivError::OrderExceedsTruncation { order: trunc, trunc: base.trunc() });
    }
    let k = base.field().renamed('s');
    let s = k.gen();
    let target: Vec<RatFn<u64>> = base.images()[..=trunc].iter().map(|d| k.inflate(d, e)).collect();
    // powers[j] = series of φ(s)^{j+1}, valid through the current order
    let mut a = vec![s.clone()];
    let mut powers: Vec<Vec<RatFn<u64>>> = (1..=e).map(|j| vec![k.pow(&s, j as u64)]).collect();
    let lead_inv = k.inv(&k.mul(&k.from_i64(e as i64), &k.pow(&s, e as u64 - 1)))?;
    for n in 1..=trunc {
        a.push(k.zero());
        extend_powers(&k, &a, &mut powers, n);
        let rest = &powers[e - 1][n];
        a[n] = k.mul(&k.sub(&target[n], rest), &lead_inv);
        for pw in powers.iter_mut() {
            pw.pop();
        }
        extend_powers(&k, &a, &mut powers, n);
    }
    FqTable::new(k, a)
}

// Appends coefficient n of each power series φ^{j+1} from the lower ones.
fn extend_powers(k: &FqT, a: &[RatFn<u64>], powers: &mut [Vec<RatFn<u64>>], n: usize) {
    let first = a[n].clone();
    powers[0].push(first);
    for j in 1..powers.len() {
        let (lo, hi) = powers.split_at_mut(j);
        let prev = &lo[j - 1];
        let c = (0..=n).fold(k.zero(), |acc, i| {
            if prev[i].is_zero() || a[n - i].is_zero() {
                acc
            } else {
                k.add(&acc, &k.mul(&prev[i], &a[n - i]))
            }
        });
        hi[0].push(c);
    }
}

/// Compares `δ_K` with `δ_F` on `samples` random elements of `F` embedded in
/// `K` by `t -> s^e`, for all orders up to `trunc`. Returns the first
/// mismatch as `(rendered f, n)`.
pub fn restriction_mismatch(
    base: &FqTable,
    ext: &FqTable,
    e: usize,
    trunc: usize,
    samples: usize,
    seed: u64,
) -> Result<Option<(String, usize)>, DerivError> {
    let f_field = base.field();
    let k = ext.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = vec![f_field.gen()];
    inputs.extend((1..samples).map(|_| f_field.random_bounded(&mut rng, super::SAMPLE_DEGREE)));
    for f in &inputs {
        let lhs = ext.taylor(&k.inflate(f, e), trunc)?;
        let rhs = base.taylor(f, trunc)?;
        for n in 0..=trunc {
            if lhs[n] != k.inflate(&rhs[n], e) {
                return Ok(Some((f_field.render(f), n)));
            }
        }
    }
    Ok(None)
}

/// Kummer data check used by callers that only have `F_q`.
pub fn kummer_degree_ok(fq: &Fq, e: usize) -> bool {
    e > 0 && e as u64 % fq.p() != 0 && (fq.order() - 1) % e as u64 == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::itderiv::check_iterative_axioms;

    fn hasse5(n: usize) -> FqTable {
        FqTable::hasse(FqT::new(Fq::prime(5).unwrap(), 't'), n)
    }

    #[test]
    fn first_images() {
        let k2 = extend_to_kummer(&hasse5(10), 2, 10).unwrap();
        let k = k2.field().clone();
        assert_eq!(k2.images()[1], k.monomial(3, -1));
        let k4 = extend_to_kummer(&hasse5(10), 4, 10).unwrap();
        assert_eq!(k4.images()[1], k.monomial(4, -3));
    }

    #[test]
    fn defining_equation_holds() {
        let base = hasse5(12);
        let ext = extend_to_kummer(&base, 2, 12).unwrap();
        let k = ext.field().clone();
        let s2 = k.monomial(1, 2);
        let tay = ext.taylor(&s2, 12).unwrap();
        for n in 0..=12 {
            assert_eq!(tay[n], k.inflate(&base.images()[n], 2));
        }
        assert_eq!(restriction_mismatch(&base, &ext, 2, 12, 30, 4).unwrap(), None);
        assert!(check_iterative_axioms(&ext, 6, 20, 9).unwrap().all_ok());
    }

    #[test]
    fn bad_degrees() {
        let base = hasse5(4);
        assert!(matches!(extend_to_kummer(&base, 5, 4), Err(DerivError::BadDegree(_))));
        assert!(matches!(extend_to_kummer(&base, 3, 4), Err(DerivError::BadDegree(_))));
    }
}
