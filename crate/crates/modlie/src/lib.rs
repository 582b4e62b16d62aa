//! Exact computational algebra for modular Lie theory.
//!
//! Everything here works over a prime field `F_p` with exact arithmetic; there
//! are no floats and no tolerances. The crate builds the standard families of
//! simple restricted Lie algebras in small characteristic, checks their
//! defining axioms, computes ordinary and restricted cohomology in degrees one
//! and two, and realizes the associated finite group schemes as Hopf algebras.
//!
//! Module map:
//!
//! * [`field`], [`linalg`] - prime fields, sparse/dense elimination, canonical
//!   reduced row echelon subspaces.
//! * [`lie`] - structure-constant Lie algebras: axiom verification, ideals,
//!   derived series, simplicity, Killing forms, torus gradings.
//! * [`restricted`] - p-maps: the Jacobson sum, verification of the restricted
//!   axioms, p-closures, derivation algebras, minimal p-envelopes.
//! * [`cartan`] - divided power algebras, special derivations, differential
//!   forms, and the graded families W, S, H, K plus the characteristic-5
//!   Melikian algebras.
//! * [`classical`] - matrix families sl, psl, so, sp with the p-th matrix
//!   power as p-map.
//! * [`cohomology`] - Chevalley-Eilenberg differentials, weight-blocked
//!   cohomology dimensions, and the restricted two-cocycle solver built on
//!   first-order deformations over k[t]/(t^2).
//! * [`groupscheme`] - finite-dimensional Hopf algebras as explicit tensors:
//!   constant group schemes, restricted enveloping algebras, duals,
//!   primitives, Frobenius kernels, heights, connected-etale splitting.
//! * [`format`] - canonical JSON serialization shared with the CLI.
//! * [`catalog`] - the expected-value table for the standard families and a
//!   runner that recomputes and compares every entry.

pub mod cartan;
pub mod classical;
pub mod cohomology;
pub mod error;
pub mod field;
pub mod lie;
pub mod linalg;
pub mod restricted;

pub use error::Error;
pub use field::PrimeField;
pub use lie::{Grading, LieAlgebra};
pub use linalg::{SparseMatrix, SubspaceBasis};
pub use restricted::{PMap, RestrictedLieAlgebra};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
