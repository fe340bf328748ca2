//! Iterative derivations on rational function fields.

mod axioms;
mod kummer;
mod table;

use thiserror::Error;

use crate::exactfield::{Field, FieldError, RatFn};

pub use axioms::{check_iterative_axioms, Axiom, AxiomReport, Counterexample, SAMPLE_DEGREE};
pub use kummer::{extend_to_kummer, kummer_degree_ok, restriction_mismatch};
pub use table::{char0_divided_powers, divided_powers, DerivationTable, FqTable, QTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivError {
    #[error("order {order} exceeds truncation {trunc}")]
    OrderExceedsTruncation { order: usize, trunc: usize },
    #[error("malformed derivation table: {0}")]
    BadTable(String),
    #[error("bad Kummer degree: {0}")]
    BadDegree(String),
    #[error("divided powers need characteristic zero")]
    CharPUnsupported,
    #[error("operation needs positive characteristic")]
    CharZeroUnsupported,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Membership in the `m`-th constant field of the filtration:
/// `f ∈ F_m` iff `δ^(j)(f) = 0` for `1 <= j < p^m`.
pub fn filtration_membership<C: Field>(table: &DerivationTable<C>, f: &RatFn<C::Elem>, m: u32) -> Result<bool, DerivError> {
    let p = table.field().characteristic();
    if p == 0 {
        return Err(DerivError::CharZeroUnsupported);
    }
    let bound = p.checked_pow(m).map(|x| x as usize - 1).unwrap_or(usize::MAX);
    if bound == 0 {
        return Ok(true);
    }
    let tay = table.taylor(f, bound)?;
    Ok(tay[1..].iter().all(RatFn::is_zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{subfield_membership, Fq, FqT, Rationals, QT};

    #[test]
    fn filtration_examples() {
        let k = FqT::new(Fq::prime(5).unwrap(), 't');
        let d = DerivationTable::hasse(k.clone(), 50);
        let t5 = k.monomial(1, 5);
        assert!(filtration_membership(&d, &t5, 1).unwrap());
        assert!(!filtration_membership(&d, &k.gen(), 1).unwrap());
        assert!(!filtration_membership(&d, &t5, 2).unwrap());
        assert!(filtration_membership(&d, &k.monomial(2, 25), 2).unwrap());
        // 1/(t^5 + 1) via the derivation kernel
        let g = k.inv(&k.add(&t5, &k.one())).unwrap();
        assert!(filtration_membership(&d, &g, 1).unwrap());
        assert_eq!(filtration_membership(&d, &g, 1).unwrap(), subfield_membership(&k, &g, 1).unwrap());
        assert!(matches!(filtration_membership(&d, &k.gen(), 3), Err(DerivError::OrderExceedsTruncation { .. })));
        let q = QT::new(Rationals, 't');
        let dq = DerivationTable::hasse(q.clone(), 4);
        assert_eq!(filtration_membership(&dq, &q.gen(), 1), Err(DerivError::CharZeroUnsupported));
    }
}
