//! Quantum-to-classical randomness extractors at desk scale.
//!
//! The crate builds extractor families (complete MUB sets, bitwise qudit
//! MUBs, the single-qubit Clifford group, Haar samples), evaluates their
//! exact decoupling distance against closed-form bounds, computes conditional
//! entropies, and evaluates weak-string-erasure security parameters.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod designs;
pub mod entropy;
pub mod error;
pub mod extractor_lab;
pub mod fields;
pub mod io;
pub mod linalg;
pub mod mubs;
pub mod noisy_storage;
pub mod perms;
pub mod states;
pub mod uncertainty;

pub use entropy::EntropyReport;
pub use error::{QcextError, Result};
pub use extractor_lab::ExtractorEvalReport;
pub use fields::{FieldElement, FieldSpec};
pub use linalg::{ComplexMatrix, DensityOperator, SubsystemShape};
pub use mubs::{FamilyKind, UnitaryFamily};
pub use noisy_storage::{Channel, WseParams, WseTranscript};
pub use perms::AffinePermutation;
