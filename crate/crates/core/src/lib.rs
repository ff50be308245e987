//! Selective routing of coherent-state qubits through an N+2
//! coupled-cavity network.
//!
//! A sender and N receiver cavities hop-couple to a central channel
//! cavity; N ternary sets of quantum dots (one per receiver) select which
//! receiver the sender's excitonic qubit ends up on. The crate builds the
//! single-excitation coupling matrix, propagates it exactly through a
//! symmetric eigendecomposition, scores transfer quality (peak time,
//! crosstalk, confinement, field population) and carries the
//! coherent-state qubit algebra on top of the linear dynamics. A
//! truncated-Fock-space oracle cross-checks everything by brute force.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the CLI
//! live in the companion `cavnet-cli` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cscq;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod network;
pub mod routing;

pub use cscq::{Cscq, PhaseConvention};
pub use error::{Error, Result};
pub use network::{CouplingMatrix, ModeIndex, NetworkConfig, TernarySetParams};
pub use routing::{SweepAxis, SweepGrid, SweepParam, TransferReport};
