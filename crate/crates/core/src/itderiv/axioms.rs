use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exactfield::{Field, RandomElem, RatFn};

use super::{DerivError, DerivationTable};

/// Degree bound for sampled numerators and denominators.
pub const SAMPLE_DEGREE: usize = 6;
const MAX_COUNTEREXAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axiom {
    /// `δ^(0) = id` and additivity.
    R1,
    /// Leibniz rule `δ^(n)(ab) = Σ_{i+j=n} δ^(i)(a) δ^(j)(b)`.
    R2,
    /// Iterativity `δ^(n) ∘ δ^(m) = C(m+n, n) δ^(m+n)`.
    R3,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub axiom: Axiom,
    pub inputs: Vec<String>,
    /// `(n)` for R1/R2, `(m, n)` for R3.
    pub orders: Vec<usize>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub r1_ok: bool,
    pub r2_ok: bool,
    pub r3_ok: bool,
    pub counterexamples: Vec<Counterexample>,
    pub orders_checked: usize,
    pub samples: usize,
    pub seed: u64,
}

impl AxiomReport {
    pub fn all_ok(&self) -> bool {
        self.r1_ok && self.r2_ok && self.r3_ok
    }
}

/// Checks (R1)–(R3) up to order `n_max` on `samples` seeded random
/// rational functions (and as many random pairs for R1/R2).
///
/// Requires `2 * n_max <= table.trunc()`.
pub fn check_iterative_axioms<C: RandomElem>(
    table: &DerivationTable<C>,
    n_max: usize,
    samples: usize,
    seed: u64,
) -> Result<AxiomReport, DerivError> {
    if 2 * n_max > table.trunc() {
        return Err(DerivError::OrderExceedsTruncation { order: 2 * n_max, trunc: table.trunc() });
    }
    let k = table.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AxiomReport {
        r1_ok: true,
        r2_ok: true,
        r3_ok: true,
        counterexamples: Vec::new(),
        orders_checked: n_max,
        samples,
        seed,
    };
    // the generator itself exposes corrupted images immediately
    let mut inputs: Vec<RatFn<C::Elem>> = vec![k.gen()];
    inputs.extend((1..samples).map(|_| k.random_bounded(&mut rng, SAMPLE_DEGREE)));

    let fail = |report: &mut AxiomReport, cx: Counterexample| {
        match cx.axiom {
            Axiom::R1 => report.r1_ok = false,
            Axiom::R2 => report.r2_ok = false,
            Axiom::R3 => report.r3_ok = false,
        }
        if report.counterexamples.len() < MAX_COUNTEREXAMPLES {
            report.counterexamples.push(cx);
        }
    };

    for (idx, a) in inputs.iter().enumerate() {
        let b = &inputs[(idx * 7 + 1) % inputs.len()];
        let ta = table.taylor(a, n_max)?;
        let tb = table.taylor(b, n_max)?;

        // R1
        if ta[0] != *a {
            fail(&mut report, Counterexample {
                axiom: Axiom::R1,
                inputs: vec![k.render(a)],
                orders: vec![0],
                lhs: k.render(&ta[0]),
                rhs: k.render(a),
            });
        }
        let tsum = table.taylor(&k.add(a, b), n_max)?;
        for n in 0..=n_max {
            let rhs = k.add(&ta[n], &tb[n]);
            if tsum[n] != rhs {
                fail(&mut report, Counterexample {
                    axiom: Axiom::R1,
                    inputs: vec![k.render(a), k.render(b)],
                    orders: vec![n],
                    lhs: k.render(&tsum[n]),
                    rhs: k.render(&rhs),
                });
            }
        }

        // R2
        let tprod = table.taylor(&k.mul(a, b), n_max)?;
        for n in 0..=n_max {
            let rhs = (0..=n).fold(k.zero(), |acc, i| k.add(&acc, &k.mul(&ta[i], &tb[n - i])));
            if tprod[n] != rhs {
                fail(&mut report, Counterexample {
                    axiom: Axiom::R2,
                    inputs: vec![k.render(a), k.render(b)],
                    orders: vec![n],
                    lhs: k.render(&tprod[n]),
                    rhs: k.render(&rhs),
                });
            }
        }

        // R3: δ^(n)(δ^(m)(a)) = C(m+n, n) δ^(m+n)(a)
        for m in 1..=n_max {
            let inner = &ta[m];
            let outer = table.taylor(inner, n_max - m)?;
            for n in 1..=n_max - m {
                let rhs = k.mul(&k.constant(k.base().binomial((m + n) as u64, n as u64)), &ta[m + n]);
                if outer[n] != rhs {
                    fail(&mut report, Counterexample {
                        axiom: Axiom::R3,
                        inputs: vec![k.render(a)],
                        orders: vec![m, n],
                        lhs: k.render(&outer[n]),
                        rhs: k.render(&rhs),
                    });
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{Fq, FqT};

    fn f5t() -> FqT {
        FqT::new(Fq::prime(5).unwrap(), 't')
    }

    #[test]
    fn hasse_passes() {
        let d = DerivationTable::hasse(f5t(), 24);
        let r = check_iterative_axioms(&d, 12, 40, 7).unwrap();
        assert!(r.all_ok(), "{:?}", r.counterexamples);
        assert!(r.counterexamples.is_empty());
    }

    #[test]
    fn zero_table_passes() {
        let d = DerivationTable::trivial(f5t(), 8);
        assert!(check_iterative_axioms(&d, 4, 20, 1).unwrap().all_ok());
    }

    #[test]
    fn corrupted_second_image_breaks_iterativity() {
        let k = f5t();
        let mut images = DerivationTable::hasse(k.clone(), 8).images().to_vec();
        images[2] = k.one();
        let d = DerivationTable::new(k.clone(), images).unwrap();
        let r = check_iterative_axioms(&d, 4, 10, 3).unwrap();
        assert!(r.r1_ok && r.r2_ok);
        assert!(!r.r3_ok);
        let first = &r.counterexamples[0];
        assert_eq!(first.axiom, Axiom::R3);
        assert_eq!(first.inputs, vec!["t".to_string()]);
        assert_eq!(first.orders, vec![1, 1]);
        assert_eq!(first.lhs, "0");
        assert_eq!(first.rhs, "2");
    }

    #[test]
    fn truncation_guard() {
        let d = DerivationTable::hasse(f5t(), 8);
        assert!(matches!(check_iterative_axioms(&d, 5, 1, 0), Err(DerivError::OrderExceedsTruncation { .. })));
    }
}
