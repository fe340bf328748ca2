//! Associative algebras by structure constants and the constructions built
//! on them: matrix algebras, symbol algebras, cyclic crossed products over
//! Kummer extensions, base change, tensor products, element probes and the
//! central-simple check.

mod algebra;
mod crossed;
mod kummer;
mod probe;

use thiserror::Error;

use crate::exactfield::FieldError;

pub use algebra::{alg_from_structure_constants, base_field_algebra, matrix_units, tensor_algebras, StructureAlgebra};
pub use crossed::{base_change, make_crossed_product, make_symbol_algebra, Cocycle};
pub use kummer::KummerExtension;
pub use probe::{csa_check, element_probe, ideal_closure, CsaReport, ElementProbe, ProbeClass};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgError {
    #[error("associativity fails on basis triple ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("unit law fails on basis element {0}")]
    BadUnit(usize),
    #[error("malformed structure constants: {0}")]
    BadShape(String),
    #[error("{0}")]
    BadRoot(String),
    #[error("{0}")]
    BadDegree(String),
    #[error("invalid cocycle: {0}")]
    CocycleInvalid(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("algebras over different fields: {0}")]
    FieldMismatch(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}
