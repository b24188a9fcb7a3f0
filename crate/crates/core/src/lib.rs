//! Quantum Rabi model in the dispersive regime and a sudden-qubit-flip
//! protocol for squeezing the cavity field.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64` (or `f32` with the `32` suffix).
//!
//! Joint states use the field (x) qubit ordering: index `2n + q` with
//! `q = 0` for up and `q = 1` for down, `sigma_z = diag(1, -1)`.

pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod model;
pub mod openquantum;
pub mod protocol;
pub mod scalar;
pub mod squeezing;

pub use error::{Error, Result};
pub use hilbert::{FockSpace, Qubit};
pub use model::Branch;
pub use protocol::Variant;
pub use scalar::{Real, C};

pub type Matrix = linalg::ComplexMatrix<f64>;
pub type Matrix32 = linalg::ComplexMatrix<f32>;
pub type State = hilbert::QuantumState<f64>;
pub type State32 = hilbert::QuantumState<f32>;
pub type Params = model::ModelParams<f64>;
pub type Params32 = model::ModelParams<f32>;
pub type Config = protocol::ProtocolConfig<f64>;
pub type Trace = protocol::ProtocolTrace<f64>;
pub type Noise = openquantum::NoiseConfig<f64>;
pub type Ensemble = openquantum::EnsembleReport<f64>;
