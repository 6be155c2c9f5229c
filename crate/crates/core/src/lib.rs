//! Exact finite-support machinery for operator series built from weighted
//! backward shifts on sequence spaces.
//!
//! * [`space`]: sparse vectors over the canonical biorthogonal system of ℓ₁
//!   and admissible weight sequences.
//! * [`shift`]: the weighted backward shift, operator series
//!   `T_λ = Σ λ_k B_wᵏ`, norm brackets and two non-supercyclic operators
//!   whose sum is the backward shift.
//! * [`rightinv`]: right inverses of `T_λ` by triangular back-substitution,
//!   a cofactor oracle, and the factorial bound functions in log domain.
//! * [`limits`]: limit detection for families `(λᵐ)`, tail operators and
//!   the schedule `m_k`.
//! * [`criterion`]: the Supercyclicity Criterion harness.
//! * [`orbit`]: projective distance, witness vectors, orbit traces.
//!
//! All algorithms are generic over [`Scalar`]; pick [`Rational`] for exact
//! runs and `f64` (or `Complex64`) for floating-point runs.
#![no_std]

extern crate alloc;

pub mod criterion;
mod error;
pub mod limits;
pub mod orbit;
pub mod rightinv;
pub mod scalar;
pub mod shift;
pub mod space;

pub use error::Error;
pub use num_complex::Complex64;
pub use scalar::{LogMagnitude, Rational, RealScalar, Scalar};
pub use shift::{LinearMap, OperatorSeries};
pub use space::{BiorthSystem, SparseVec, WeightKind, WeightSeq};
