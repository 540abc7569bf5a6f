//! Density-operator quantum circuit simulation, quantum computational logic,
//! and Born-rule intensity valuations over projectors.
//!
//! Modules, bottom-up:
//!
//! * [`linalg`] dense complex matrices and structural predicates
//! * [`state`] quregisters, density operators, projectors, Born rule
//! * [`channels`] gates, Kraus operations, measurement and noise
//! * [`qcl`] truth projectors and the probabilistic connectives
//! * [`psa`] intensive valuations, contexts, reconstruction, CHSH
//! * [`circuit`] the circuit language, simulator and shot sampler
//! * [`formula`] the formula language with its atom bindings

pub mod channels;
pub mod circuit;
pub mod error;
pub mod formula;
pub mod linalg;
pub mod psa;
pub mod qcl;
pub mod random;
pub mod state;

pub use channels::{
    apply, builtin_gate, compose, lift_unitary, measurement_channel, noise_channel, Gate, GateKind,
    NoiseKind, QuantumOperation,
};
pub use circuit::{parse_circuit, CircuitIr, Histogram, Measure, Step};
pub use error::{Error, ParseErrorKind, Result};
pub use formula::{parse_formula, FormulaAst};
pub use linalg::{ComplexMatrix, C64};
pub use psa::{Context, Observable, Psa};
pub use qcl::{eval_formula, qcl_and, qcl_not, qcl_or, truth_probability, TruthProjectors};
pub use state::{born_expectation, born_probability, mix, pure_to_density, DensityOperator, MaximalTest, Projector, QuRegister};
