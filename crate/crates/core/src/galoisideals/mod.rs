//! The Galois side of a split δ-algebra: Kummer automorphisms certified to
//! commute with the derivation, their action on the constants algebra, inner
//! lifts through Skolem–Noether, invariant-subspace lattices and the
//! correspondence between stable right ideals and δ-right ideals.

mod classify;
mod group;
mod lattice;
mod skolem;

use thiserror::Error;

use crate::deltaalg::DeltaError;
use crate::exactfield::FieldError;
use crate::itderiv::DerivError;

pub use classify::{classify_delta_structure, reductivity_note, DeltaFlags, IdealClassification, PulledBackIdeal, ReductivityNote};
pub use group::{action_on_constants, kummer_galois_group, AutomorphismRep, GaloisAutomorphism};
pub use lattice::{
    all_subspaces, contains, intersect, right_ideal_of, stable_right_ideals, submodule_lattice, RightIdeal, StableIdeals,
    SubmoduleLattice, Subspace,
};
pub use skolem::{conjugation_matrix, lift_automorphism, recognize_matrix_algebra, skolem_noether_lift, MatrixRecognition, SkolemNoetherLift};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaloisError {
    #[error("σ^{power} does not commute with δ^({order}) on {element}")]
    CommutationFailure { power: usize, order: usize, element: String },
    #[error("Galois action leaves the constants: {0}")]
    NotStable(String),
    #[error("not an inner automorphism: {0}")]
    NotInner(String),
    #[error("not recognized as a full matrix algebra: {0}")]
    NotMatrixAlgebra(String),
    #[error("group order {order} is divisible by the characteristic {p}")]
    ReynoldsDenominator { order: usize, p: u64 },
    #[error("pulled-back ideal has dimension {got}, expected {expected}")]
    PullbackRankMismatch { expected: usize, got: usize },
    #[error("the algebra is not split by the given extension")]
    NotSplit,
    #[error(transparent)]
    Delta(#[from] DeltaError),
    #[error(transparent)]
    Deriv(#[from] DerivError),
    #[error(transparent)]
    Field(#[from] FieldError),
}
