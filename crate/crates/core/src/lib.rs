//! Flying-cat parity checks: coherent-state probes that pick up a
//! qubit-parity-dependent phase, their loss and readout errors, and the
//! multi-node states they prepare.
//!
//! Everything numeric is generic over [`scalar::Real`]; the `*64` aliases
//! below fix the scalar to `f64`.

pub mod error;
pub mod feasibility;
pub mod field;
pub mod montecarlo;
pub mod netstates;
pub mod paritycheck;
pub mod qcore;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod teleport;

pub use error::{Error, Result};

pub type PureState64 = qcore::PureState<f64>;
pub type DensityMatrix64 = qcore::DensityMatrix<f64>;
pub type CMatrix64 = qcore::CMatrix<f64>;
pub type LossProfile64 = field::LossProfile<f64>;
pub type ParityCheckConfig64 = paritycheck::ParityCheckConfig<f64>;
pub type ErrorBudget64 = paritycheck::ErrorBudget<f64>;
pub type TetraConfig64 = netstates::TetraConfig<f64>;
