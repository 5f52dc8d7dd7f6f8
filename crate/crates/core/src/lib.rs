//! Quantum discord, classical correlations and teleportation fidelity for
//! Bell-diagonal two-qubit states, together with decoherence trajectories and
//! the classical/quantum decoherence-regime transition they cross.

pub mod channels;
pub mod correlations;
pub mod error;
pub mod export;
pub mod numeric;
pub mod phase_diagram;
pub mod states;
pub mod teleportation;
pub mod verify;

pub use correlations::{ChiMode, CorrelationTriple, RegimeLabel};
pub use error::{Error, Result};
pub use states::{BellDiagonalState, PureQubitState, SingleQubitDensityMatrix, TwoQubitDensityMatrix};
