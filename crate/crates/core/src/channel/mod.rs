//! The qubit Pauli channel induced by the boosted packet.
//!
//! [`lambda_numeric`] integrates the channel eigenvalues for any frame;
//! [`rho_direct`] integrates the output density matrix entry by entry, and
//! agreement between the two is what identifies the map as a Pauli channel.
//! The closed forms at `ζ = 0` live in [`closed`].

pub mod closed;
mod integrals;
mod pauli;

pub use closed::{lambda12_series, lambda3_closed, series_coeffs, series_cutoff, SeriesKind};
pub use integrals::{
    g_funcs, identity_residuals, lambda_numeric, lambda_numeric_with, phi_integrals,
    phi_integrals_elliptic, rho_direct, GFunctions, LambdaEstimate, PhiMethod,
};
pub use pauli::{
    apply_kraus, apply_pauli, compose, lambda_probs, probs_lambda, DensityMatrix2, PauliLambda,
    PauliProbs, QubitState, CHANNEL_TOLERANCE,
};
