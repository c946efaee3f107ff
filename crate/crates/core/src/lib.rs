//! Photonic wave packets exchanged between inertial observers, the qubit
//! Pauli channel they induce, and that channel's capacity bounds.
//!
//! The pipeline runs bottom-up:
//!
//! * [`special`]: error functions, complete elliptic integrals (parameter
//!   convention), a fixed-parameter ₂F₂ and Shannon entropy.
//! * [`quadrature`]: adaptive vector-valued Gauss–Kronrod integration.
//! * [`lorentz`]: four-vectors, boosts, rotations and the massless little group.
//! * [`wavepacket`]: the boosted envelope, its kernel and normalization.
//! * [`channel`]: channel eigenvalues by quadrature and by closed forms,
//!   output density matrices, Pauli-channel algebra.
//! * [`capacity`]: classical capacity, hashing bound, Cerf's no-cloning
//!   indicator, entanglement breaking, and the threshold solvers.
//! * [`sweep`], [`verify`], [`config`]: the machinery behind the `boostcap` CLI.
//!
//! Natural units throughout (c = 1). Boosts are parametrised by rapidity ζ;
//! negative ζ means the observers approach each other. The constant
//! prefactor k_p/(2π)³ of the momentum measure is dropped everywhere since
//! every channel quantity is a ratio of integrals.

// Reference constants are quoted to full published precision, and `!(x > 0.0)`
// is the NaN-rejecting form used for input checks.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod channel;
pub mod config;
mod error;
pub mod lorentz;
pub mod quadrature;
pub mod special;
pub mod sweep;
pub mod verify;
pub mod wavepacket;

pub use error::{Error, Result};
