//! Exact computation with iterative (Hasse–Schmidt) derivations on rational
//! function fields and their extensions to central simple algebras.
//!
//! The crate is organised bottom-up:
//!
//! * [`exactfield`]: finite fields, `Q`, polynomials, rational functions and
//!   exact linear algebra.
//! * [`itderiv`]: iterative derivations on `F_q(t)` / `Q(t)` and their Kummer
//!   extensions, axiom checks, the constant-field filtration.
//! * [`algcore`]: associative algebras by structure constants, symbol and
//!   crossed-product constructions, element probes, central-simple checks.
//! * [`deltaalg`]: iterative derivations on algebras, δ-constants and the
//!   splitting check.
//! * [`galoisideals`]: Galois action on constants, Skolem–Noether lifts,
//!   invariant-subspace lattices and δ-right-ideal classification.
//! * [`scenario`]: the built-in demos and the report format used by the CLI.

pub mod exactfield;
pub mod itderiv;
pub mod algcore;
pub mod deltaalg;
pub mod galoisideals;
pub mod scenario;
