//! Hypergraph states: construction, geometric entanglement, LOCC reduction
//! to single-edge states, entanglement witnesses and their local
//! measurement settings.

pub mod entanglement;
pub mod error;
pub mod hypergraph;
pub mod locc;
pub mod measurement;
pub mod random;
pub mod report;
pub mod scalar;
pub mod states;
pub mod witness;

pub use entanglement::{alpha_multipartite, closed_form_alpha, closed_form_e, procedure_alpha, schmidt, EntanglementReport};
pub use error::{Error, Result};
pub use hypergraph::{Bipartition, Family, Hypergraph};
pub use locc::{reduce, ReductionCertificate};
pub use measurement::{MeasurementSetting, PauliString, SettingMode};
pub use scalar::{Rational, Scalar};
pub use states::{build_state, extract_hypergraph, SignState};
pub use witness::{NoisyState, WitnessKind, WitnessSpec};
