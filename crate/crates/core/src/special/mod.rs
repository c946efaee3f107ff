//! Special functions used by the channel integrals.

mod elliptic;
mod entropy;
mod erf;
mod hypergeometric;

pub use elliptic::{ellip_e, ellip_k, elliptic, EllipticPair};
pub use entropy::{binary_entropy, entropy, PROBABILITY_TOLERANCE};
pub use erf::{erf, erf_family, erfc, erfcx, erfi, ErfTriple};
pub use hypergeometric::{hyp2f2_11_52_3, HYP2F2_MAX_ABS_ARG};
