use hasseforge::exactfield::{lucas_binomial, poly_gcd, Field, Fq, FqT, Matrix, Poly, Rationals};
use hasseforge::galoisideals::{conjugation_matrix, stable_right_ideals, submodule_lattice};
use hasseforge::itderiv::{check_iterative_axioms, DerivationTable};
use hasseforge::scenario::{builtins, Scenario};
use proptest::prelude::*;

fn euclid<F: Field>(a: &Poly<F::Elem>, b: &Poly<F::Elem>, field: &F) -> Poly<F::Elem> {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = a.div_rem(&b, field).unwrap().1;
        a = b;
        b = r;
    }
    a.monic(field)
}

fn qpoly(coeffs: &[i64]) -> Poly<<Rationals as Field>::Elem> {
    let q = Rationals;
    Poly::new(&q, coeffs.iter().map(|c| q.from_i64(*c)).collect())
}

fn matrix2(e: &[u64]) -> Matrix<u64> {
    Matrix::from_rows(vec![vec![e[0], e[1]], vec![e[2], e[3]]], 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lucas_matches_pascal(m in 0u64..200, n in 0u64..200, pi in 0usize..4) {
        let p = [2u64, 3, 5, 7][pi];
        let mut row = vec![0u64; 201];
        row[0] = 1;
        for _ in 0..m {
            for k in (1..=200).rev() {
                row[k] = (row[k] + row[k - 1]) % p;
            }
        }
        let direct = row[n as usize];
        prop_assert_eq!(lucas_binomial(m, n, p), direct);
    }

    #[test]
    fn hasse_derivation_satisfies_axioms(seed in any::<u64>(), pi in 0usize..3) {
        let p = [2u64, 3, 5][pi];
        let k = FqT::new(Fq::prime(p).unwrap(), 't');
        let table = DerivationTable::hasse(k, 16);
        let r = check_iterative_axioms(&table, 8, 4, seed).unwrap();
        prop_assert!(r.all_ok());
    }

    #[test]
    fn corrupting_an_image_breaks_an_axiom(order in 2usize..6, c in 1u64..5, seed in any::<u64>()) {
        let k = FqT::new(Fq::prime(5).unwrap(), 't');
        let table = DerivationTable::hasse(k.clone(), 16);
        let mut images = table.images().to_vec();
        images[order] = k.add(&images[order], &k.monomial(c, 1));
        let bad = DerivationTable::new(k, images).unwrap();
        let r = check_iterative_axioms(&bad, 8, 4, seed).unwrap();
        prop_assert!(!r.all_ok());
    }

    #[test]
    fn fast_rational_gcd_agrees_with_euclid(
        a in prop::collection::vec(-9i64..10, 1..6),
        b in prop::collection::vec(-9i64..10, 1..6),
        c in prop::collection::vec(-9i64..10, 1..4),
    ) {
        let q = Rationals;
        let (a, b, c) = (qpoly(&a), qpoly(&b), qpoly(&c));
        prop_assume!(!a.is_zero() && !b.is_zero() && !c.is_zero());
        let (ac, bc) = (a.mul(&c, &q), b.mul(&c, &q));
        let g = poly_gcd(&ac, &bc, &q).unwrap();
        prop_assert_eq!(&g, &euclid(&ac, &bc, &q));
        prop_assert!(g.div_rem(&c, &q).unwrap().1.is_zero());
        prop_assert!(ac.div_rem(&g, &q).unwrap().1.is_zero());
    }

    #[test]
    fn lattice_flags_are_consistent(e in prop::collection::vec(0u64..3, 8)) {
        let fq = Fq::prime(3).unwrap();
        let gens: Vec<Matrix<u64>> = e
            .chunks(4)
            .filter(|m| (m[0] * m[3] + 9 - m[1] * m[2]) % 3 != 0)
            .map(matrix2)
            .collect();
        let lat = submodule_lattice(&fq, 2, &gens, 0);
        prop_assert!(lat.exhaustive);
        prop_assert_eq!(lat.irreducible, lat.completely_reducible && lat.indecomposable);
        prop_assert_eq!(lat.irreducible, lat.submodules.len() == 2);
    }

    #[test]
    fn stable_ideals_have_dimension_n_times_dim_u(e in prop::collection::vec(0u64..5, 4)) {
        let fq = Fq::prime(5).unwrap();
        prop_assume!((e[0] * e[3] + 25 - e[1] * e[2]) % 5 != 0);
        let action = conjugation_matrix(&fq, &matrix2(&e)).unwrap();
        let st = stable_right_ideals(&fq, 2, &[action], 1).unwrap();
        for ideal in &st.ideals {
            prop_assert_eq!(ideal.dim(), 2 * ideal.subspace.len());
        }
    }

    #[test]
    fn scenarios_round_trip_through_json(idx in 0usize..9, seed in any::<u64>(), trunc in 2usize..40) {
        let mut s = builtins()[idx].scenario();
        s.seed = seed;
        s.trunc = trunc;
        let back = Scenario::from_json_str(&s.to_json().to_string()).unwrap();
        prop_assert_eq!(back, s);
    }
}
