//! Simulation of cavity-mediated spin-photon stabilizer measurements for
//! photonic surface codes, and of heralded entanglement between quantum-dot
//! spins with dissimilar transition energies.
//!
//! * [`cavity`]: reflection coefficients and the conditional-phase detuning solver.
//! * [`quantum`]: dense state-vector / density-matrix engine.
//! * [`surface_code`]: planar and toric lattices, quiescent state.
//! * [`syndrome`]: spin-ancilla and photon-probe stabilizer protocols, readout confidence, sampling.
//! * [`entanglement`]: two- and four-spin heralded entanglement, efficiency and fidelity sweeps.

pub mod cavity;
pub mod entanglement;
mod error;
pub mod quantum;
pub mod roots;
pub mod surface_code;
pub mod syndrome;

pub use error::{Error, Result};
