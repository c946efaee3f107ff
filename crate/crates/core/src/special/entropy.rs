//! Shannon entropy in bits.

use crate::error::{Error, Result};

/// Tolerance on negative components and on the total probability.
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;

/// Shannon entropy `−Σ pᵢ log₂ pᵢ` with `0·log 0 = 0`.
///
/// Components slightly below zero and totals slightly off one (within
/// [`PROBABILITY_TOLERANCE`]) are clamped and renormalized.
pub fn entropy(p: &[f64]) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::domain("probability vector is empty"));
    }
    let mut total = 0.0;
    for (i, &x) in p.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::domain(format!("probability component {i} is not finite")));
        }
        if x < -PROBABILITY_TOLERANCE {
            return Err(Error::domain(format!("probability component {i} is negative: {x}")));
        }
        total += x.max(0.0);
    }
    if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(Error::domain(format!("probabilities sum to {total}, not 1")));
    }
    let h = p
        .iter()
        .map(|&x| x.max(0.0) / total)
        .filter(|&x| x > 0.0)
        .map(|x| -x * x.log2())
        .sum::<f64>();
    Ok(h.max(0.0))
}

/// Binary entropy `H({x, 1−x})`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    entropy(&[x, 1.0 - x])
}
