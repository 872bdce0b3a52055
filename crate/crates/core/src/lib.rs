//! Multi-rail photonic states: generation from single-mode sources,
//! Heisenberg-Weyl symmetric GME verifiers and photon-loss modelling.

pub mod error;
pub mod figures;
pub mod fock;
pub mod hw;
pub mod lon;
pub mod loss;
pub mod par;
pub mod source;
pub mod table;
pub mod verifier;

pub use error::{Error, Result};
pub use fock::{BasisState, FockVector, SparseState, SystemShape};
pub use hw::{HwIndices, SymmetryLabel, XClass};
pub use lon::{MeasurementSetting, ModeUnitary};
pub use loss::{LossChannel, LossComponent, LossyMixture};
pub use par::Exec;
pub use source::{GenerationResult, SourceSpec, SqueezedParams};
pub use verifier::{BoundReport, Verdict, VerifierSpec};
