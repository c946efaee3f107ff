//! Error function family on the real line.
//!
//! Small arguments use the positive-term series
//! `exp(x²)·erf(x) = 2/√π · Σ 2ⁿ x^{2n+1} / (2n+1)!!`, which has no
//! cancellation. Large arguments evaluate the scaled complement
//! `erfcx(x) = exp(x²)·erfc(x)` by its continued fraction, so `erfc` keeps
//! full relative precision deep into the tail and `erfcx` never overflows
//! for positive arguments.

use std::f64::consts::PI;

use crate::error::{ensure_finite, Result};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Below this the series branch is used, above it the continued fraction.
pub(crate) const SERIES_CF_SWITCH: f64 = 1.5;

/// `erf`, `erfc` and `erfcx` evaluated consistently at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErfTriple {
    pub erf: f64,
    pub erfc: f64,
    /// `exp(x²)·erfc(x)`.
    pub erfcx: f64,
}

/// Evaluates the error function family at `x`.
pub fn erf_family(x: f64) -> Result<ErfTriple> {
    ensure_finite("erf argument", x)?;
    Ok(family_unchecked(x))
}

pub fn erf(x: f64) -> f64 {
    family_unchecked(x).erf
}

pub fn erfc(x: f64) -> f64 {
    family_unchecked(x).erfc
}

/// Scaled complementary error function `exp(x²)·erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    family_unchecked(x).erfcx
}

/// Imaginary error function `erfi(x) = -i·erf(ix)`.
///
/// Summed from the positive-term series `2/√π Σ x^{2n+1}/(n!(2n+1))`.
/// Overflows to infinity for `|x| > 26.6`.
pub fn erfi(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return -erfi(-x);
    }
    if x > 26.7 {
        return f64::INFINITY;
    }
    let x2 = x * x;
    // power = x^{2n+1}/n!
    let mut power = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        power *= x2 / n;
        let term = power / (2.0 * n + 1.0);
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
    }
    FRAC_2_SQRT_PI * sum
}

fn family_unchecked(x: f64) -> ErfTriple {
    if x.is_nan() {
        return ErfTriple {
            erf: f64::NAN,
            erfc: f64::NAN,
            erfcx: f64::NAN,
        };
    }
    if x < 0.0 {
        let pos = family_unchecked(-x);
        let x2 = x * x;
        return ErfTriple {
            erf: -pos.erf,
            erfc: 2.0 - pos.erfc,
            erfcx: 2.0 * x2.exp() - pos.erfcx,
        };
    }
    if x < SERIES_CF_SWITCH {
        series_branch(x)
    } else {
        let erfcx = erfcx_continued_fraction(x);
        let erfc = erfcx * (-x * x).exp();
        ErfTriple {
            erf: 1.0 - erfc,
            erfc,
            erfcx,
        }
    }
}

/// `Σ 2ⁿ x^{2n+1} / (2n+1)!!`, equal to `(√π/2)·exp(x²)·erf(x)`.
fn scaled_erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0.0;
    while term > 1e-17 * sum {
        k += 1.0;
        term *= 2.0 * x2 / (2.0 * k + 1.0);
        sum += term;
    }
    sum
}

pub(crate) fn series_branch(x: f64) -> ErfTriple {
    if x == 0.0 {
        return ErfTriple {
            erf: 0.0,
            erfc: 1.0,
            erfcx: 1.0,
        };
    }
    let s = FRAC_2_SQRT_PI * scaled_erf_series(x);
    let ex2 = (x * x).exp();
    let erf = s / ex2;
    ErfTriple {
        erf,
        erfc: 1.0 - erf,
        erfcx: ex2 - s,
    }
}

/// `erfcx(x)` for `x > 0` from
/// `erfc(x) = exp(-x²)/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …))))`,
/// evaluated with the modified Lentz algorithm.
pub(crate) fn erfcx_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..100_000 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / (PI.sqrt() * f)
}
