//! Rest-frame (`ζ = 0`) closed forms and the spread expansion.
//!
//! After `s = tan²θ` every eigenvalue at `ζ = 0` becomes a Laplace
//! transform, `λᵢ = (2/N) ∫₀^∞ e^{−s/Γ²} Qᵢ(s) ds`, with
//!
//! ```text
//! Q₁ = q₁E[m₁] + q₂K[m₁] + q₃E[m₂] + q₄K[m₂]
//! Q₂ = 2 (K[m₁]/√(1+s) − K[m₂]/(2+s))
//! Q₃ = 2π / (1 + √(1+s))²
//! m₁ = −s²/(4(1+s)),  m₂ = s²/(2+s)²
//! ```
//!
//! in the parameter convention of [`crate::special::elliptic`].

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::special::{elliptic, erfi, hyp2f2_11_52_3};
use crate::wavepacket::normalization_closed_form;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Validated range of `p = 1/Γ²` for [`lambda3_closed`]. Above it the
/// `e^p`-sized terms of the bracket cancel to fewer than nine digits.
pub const LAMBDA3_P_RANGE: (f64, f64) = (1e-6, 16.0);

/// `γ + 1 + ln 4`, the large-`p` limit of the bracket divided by three.
pub fn lambda3_bracket_limit() -> f64 {
    EULER_GAMMA + 1.0 + 4f64.ln()
}

/// The bracket `2p² ₂F₂(1,1;5/2,3;p) + 3(−π(2p−1) erfi(√p) + 2√(πp) eᵖ
/// − ln p + 2p(γ − 3 + ln 4p))`, in which `πi(2p−1)erf(i√p)` has been
/// rewritten with the imaginary error function.
pub fn lambda3_bracket(p: f64) -> Result<f64> {
    ensure_finite("p", p)?;
    if p <= 0.0 {
        return Err(Error::domain(format!("p must be positive, got {p}")));
    }
    let f = hyp2f2_11_52_3(p)?;
    let rp = p.sqrt();
    let inner = -std::f64::consts::PI * (2.0 * p - 1.0) * erfi(rp)
        + 2.0 * (std::f64::consts::PI * p).sqrt() * p.exp()
        - p.ln()
        + 2.0 * p * (EULER_GAMMA - 3.0 + (4.0 * p).ln());
    Ok(2.0 * p * p * f + 3.0 * inner)
}

/// `λ₃` at `ζ = 0` in closed form:
/// `λ₃ = (4π/(3N)) (bracket − 3(γ + 1 + ln 4))`.
pub fn lambda3_closed(gamma: f64) -> Result<f64> {
    ensure_finite("gamma", gamma)?;
    if gamma <= 0.0 {
        return Err(Error::domain(format!("gamma must be positive, got {gamma}")));
    }
    let p = 1.0 / (gamma * gamma);
    let (lo, hi) = LAMBDA3_P_RANGE;
    if !(lo..=hi).contains(&p) {
        return Err(Error::Range(format!(
            "closed-form λ₃ is validated for 1/Γ² in [{lo}, {hi}], got {p}"
        )));
    }
    let j = lambda3_bracket(p)? / 3.0 - lambda3_bracket_limit();
    Ok(4.0 * std::f64::consts::PI * j / normalization_closed_form(gamma))
}

/// Below this `s` the combination `Q₁` is summed from its Taylor series;
/// the elliptic form cancels `1/s²` poles there.
pub const Q1_SERIES_SWITCH: f64 = 0.05;

/// Taylor coefficients of `Q₁(s)/π`.
const Q1_SERIES: [f64; 13] = [
    1.0 / 2.0,
    -1.0 / 4.0,
    3.0 / 16.0,
    -5.0 / 32.0,
    279.0 / 2048.0,
    -499.0 / 4096.0,
    1815.0 / 16384.0,
    -3341.0 / 32768.0,
    794_557.0 / 8_388_608.0,
    -1_487_269.0 / 16_777_216.0,
    5_601_827.0 / 67_108_864.0,
    -10_603_581.0 / 134_217_728.0,
    645_066_275.0 / 8_589_934_592.0,
];

fn q1_series(s: f64) -> f64 {
    std::f64::consts::PI * Q1_SERIES.iter().rev().fold(0.0, |acc, c| acc * s + c)
}

/// `Q₁` from the elliptic form, valid for `s > 0`.
pub fn q1_elliptic(s: f64) -> Result<f64> {
    let r = (1.0 + s).sqrt();
    let s2 = s * s;
    let q1 = -2.0 * r / s2 + 2.0 / (s2 * (s + 1.0)) + 3.0 / (s * (s + 1.0)) + 1.0 / (s + 1.0);
    let q2 = 2.0 / (s2 * r) - 2.0 / (s2 * (s + 1.0)) + 2.0 / (s * r) + 1.0 / (2.0 * r)
        - 3.0 / (s * (s + 1.0))
        - 1.0 / (s + 1.0);
    let q3 = -2.0 / s2 + 2.0 / (s2 * r) - 1.0 / s + 2.0 / (s * r) + 1.0 / (2.0 * r);
    let q4 = 2.0 / s2 - 2.0 / (s2 * r) + 1.0 / s - 2.0 / (s * r);
    let e1 = elliptic(-s2 / (4.0 * (1.0 + s)))?;
    let e2 = elliptic(s2 / ((2.0 + s) * (2.0 + s)))?;
    Ok(q1 * e1.e + q2 * e1.k + q3 * e2.e + q4 * e2.k)
}

pub fn q1_combination(s: f64) -> Result<f64> {
    ensure_finite("s", s)?;
    if s < 0.0 {
        return Err(Error::domain(format!("s must be non-negative, got {s}")));
    }
    if s < Q1_SERIES_SWITCH {
        Ok(q1_series(s))
    } else {
        q1_elliptic(s)
    }
}

pub fn q2_combination(s: f64) -> Result<f64> {
    ensure_finite("s", s)?;
    if s < 0.0 {
        return Err(Error::domain(format!("s must be non-negative, got {s}")));
    }
    let k1 = elliptic(-s * s / (4.0 * (1.0 + s)))?.k;
    let k2 = elliptic(s * s / ((2.0 + s) * (2.0 + s)))?.k;
    Ok(2.0 * (k1 / (1.0 + s).sqrt() - k2 / (2.0 + s)))
}

pub fn q3_combination(s: f64) -> f64 {
    let d = 1.0 + (1.0 + s).sqrt();
    2.0 * std::f64::consts::PI / (d * d)
}

/// Confirms that the `1/s²` poles of the elliptic form of `Q₁` cancel:
/// the elliptic form must agree with the series at the switch point.
/// Returns the relative mismatch.
pub fn check_pole_cancellation() -> Result<f64> {
    let mut worst = 0.0_f64;
    for s in [Q1_SERIES_SWITCH, 0.8 * Q1_SERIES_SWITCH, 1.2 * Q1_SERIES_SWITCH] {
        let a = q1_series(s);
        let b = q1_elliptic(s)?;
        worst = worst.max(((a - b) / a).abs());
    }
    if worst > 1e-10 {
        return Err(Error::Integrity(format!(
            "elliptic form of Q₁ fails to cancel its poles (mismatch {worst:e})"
        )));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// Moments of `Q₁`, feeding `λ₁`.
    Kappa,
    /// Moments of `Q₂`, feeding `λ₂`.
    Iota,
}

/// `((−1)ⁿ/n!) ∫₀^L sⁿ Qᵢ(s) ds`.
pub fn series_coeffs(kind: SeriesKind, n: u32, cutoff: f64, cfg: &QuadratureConfig) -> Result<f64> {
    ensure_finite("cutoff", cutoff)?;
    if cutoff <= 0.0 {
        return Err(Error::domain(format!("cutoff must be positive, got {cutoff}")));
    }
    check_pole_cancellation()?;
    let mut breaks = vec![0.0];
    let mut b = Q1_SERIES_SWITCH;
    while b < cutoff {
        breaks.push(b);
        b *= 4.0;
    }
    breaks.push(cutoff);
    let mut failure = None;
    let r = integrate(
        |s| {
            let q = match kind {
                SeriesKind::Kappa => q1_combination(s),
                SeriesKind::Iota => q2_combination(s),
            };
            match q {
                Ok(q) => [s.powi(n as i32) * q],
                Err(e) => {
                    failure.get_or_insert(e);
                    [f64::NAN]
                }
            }
        },
        &breaks,
        cfg,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let factorial: f64 = (1..=n).map(f64::from).product();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * r?.value[0] / factorial)
}

/// Smallest spread for which [`lambda12_series`] is accepted.
pub const SERIES_MIN_GAMMA: f64 = 3.0;

/// Truncated spread expansion
/// `λ₁ ≈ (2/N) Σₙ Γ^{−2n} κₙ(L)`, `λ₂ ≈ (2/N) Σₙ Γ^{−2n} ιₙ(L)`.
pub fn lambda12_series(
    gamma: f64,
    n_max: u32,
    cutoff: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    ensure_finite("gamma", gamma)?;
    if gamma < SERIES_MIN_GAMMA {
        return Err(Error::Range(format!(
            "the spread expansion is only used for Γ ≥ {SERIES_MIN_GAMMA}, got {gamma}"
        )));
    }
    let p = 1.0 / (gamma * gamma);
    let (mut l1, mut l2) = (0.0, 0.0);
    for n in 0..=n_max {
        let w = p.powi(n as i32);
        l1 += w * series_coeffs(SeriesKind::Kappa, n, cutoff, cfg)?;
        l2 += w * series_coeffs(SeriesKind::Iota, n, cutoff, cfg)?;
    }
    let scale = 2.0 / normalization_closed_form(gamma);
    Ok((scale * l1, scale * l2))
}

/// Cutoff `L = xΓ²` balancing the Taylor remainder of `e^{−s/Γ²}` on
/// `[0, L]`, `x^{n+1}/(n+1)!`, against the discarded tail weight `e^{−x}`.
pub fn series_cutoff(gamma: f64, n_max: u32) -> f64 {
    let m = n_max as f64 + 1.0;
    let ln_fact: f64 = (1..=n_max + 1).map(|k| (k as f64).ln()).sum();
    // g(x) = m ln x − ln m! + x is increasing; find its root by bisection.
    let g = |x: f64| m * x.ln() - ln_fact + x;
    let (mut lo, mut hi) = (1e-6, 1e3);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi) * gamma * gamma
}
