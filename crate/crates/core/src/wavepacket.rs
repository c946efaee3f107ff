//! The boosted packet envelope and its integration kernel.
//!
//! With `D(θ) = sinh ζ + cosh ζ cos θ` the envelope seen by the receiver is
//! `exp(−sin²θ / (Γ² D²))` on the forward cone `θ < θ_c = arccos(−tanh ζ)`
//! and the kernel that multiplies every channel integrand is
//!
//! ```text
//! K(θ) = exp(−sin²θ / (Γ² D²)) · sin θ / D²
//! ```
//!
//! The normalization `N = ∫₀^{2π} ∫₀^{θ_c} K dθ dφ` is the same for every
//! rapidity and equals `Γ π^{3/2} erfcx(1/Γ)`. The constant prefactor of the
//! momentum measure is dropped.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::lorentz::{aberration_denominator, unaberrated_angle};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::special::erfcx;

/// Packet spread `Γ = σ/k_p` and receiver rapidity `ζ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketFrame {
    pub gamma: f64,
    pub zeta: f64,
}

impl PacketFrame {
    pub fn new(gamma: f64, zeta: f64) -> Result<Self> {
        ensure_finite("gamma", gamma)?;
        ensure_finite("rapidity", zeta)?;
        if gamma <= 0.0 {
            return Err(Error::domain(format!("gamma must be positive, got {gamma}")));
        }
        if zeta.abs() > 700.0 {
            return Err(Error::domain(format!("rapidity {zeta} overflows")));
        }
        Ok(PacketFrame { gamma, zeta })
    }

    /// Frame for a relative velocity `v` (units of c), `ζ = atanh v`.
    pub fn from_velocity(gamma: f64, velocity: f64) -> Result<Self> {
        if !(velocity.abs() < 1.0) {
            return Err(Error::domain(format!("velocity must lie in (−1, 1), got {velocity}")));
        }
        PacketFrame::new(gamma, velocity.atanh())
    }

    pub fn theta_c(&self) -> f64 {
        theta_c(self.zeta)
    }

    /// Breakpoints for θ-integrals over `[0, θ_c]`: the images of
    /// `θ̃ = arctan(Γ 2ʲ)` for `|j| ≤ 8`, where the Gaussian factor changes
    /// scale, plus `π/2` when it lies inside the cone.
    pub fn theta_breakpoints(&self) -> Vec<f64> {
        let tc = self.theta_c();
        let mut b = vec![0.0, tc];
        for j in -8..=8 {
            let tt = (self.gamma * 2f64.powi(j)).atan();
            if let Ok(t) = unaberrated_angle(tt, self.zeta) {
                if t > 0.0 && t < tc {
                    b.push(t);
                }
            }
        }
        if tc > FRAC_PI_2 {
            b.push(FRAC_PI_2);
        }
        b.sort_by(f64::total_cmp);
        b.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs().max(1e-300));
        b
    }
}

/// Aberration cutoff `θ_c = arccos(−tanh ζ)`, computed as `2 arctan(e^ζ)`.
pub fn theta_c(zeta: f64) -> f64 {
    2.0 * zeta.exp().atan()
}

fn check_angle(theta: f64, frame: &PacketFrame) -> Result<()> {
    let tc = frame.theta_c();
    if !(0.0..=tc).contains(&theta) {
        return Err(Error::domain(format!(
            "polar angle {theta} outside the forward cone [0, {tc}]"
        )));
    }
    Ok(())
}

/// `ln K(θ)`; `−∞` where the kernel vanishes.
pub(crate) fn log_kernel_unchecked(theta: f64, gamma: f64, zeta: f64) -> f64 {
    let d = aberration_denominator(theta, zeta);
    let s = theta.sin();
    if d <= 0.0 || s <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let r = s / (gamma * d);
    -r * r + s.ln() - 2.0 * d.ln()
}

pub(crate) fn kernel_unchecked(theta: f64, gamma: f64, zeta: f64) -> f64 {
    let l = log_kernel_unchecked(theta, gamma, zeta);
    if l == f64::NEG_INFINITY {
        0.0
    } else {
        l.exp()
    }
}

/// `K(θ)` for `θ ∈ [0, θ_c]`, zero at both ends.
pub fn kernel(theta: f64, frame: &PacketFrame) -> Result<f64> {
    check_angle(theta, frame)?;
    Ok(kernel_unchecked(theta, frame.gamma, frame.zeta))
}

/// `ln K(θ)`.
pub fn log_kernel(theta: f64, frame: &PacketFrame) -> Result<f64> {
    check_angle(theta, frame)?;
    Ok(log_kernel_unchecked(theta, frame.gamma, frame.zeta))
}

/// `ln(exp(−sin²θ/(Γ²D²)) / N)` with the closed-form `N`.
pub fn log_envelope_sq(theta: f64, frame: &PacketFrame) -> Result<f64> {
    check_angle(theta, frame)?;
    let d = aberration_denominator(theta, frame.zeta);
    let log_n = normalization_closed_form(frame.gamma).ln();
    if d <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let r = theta.sin() / (frame.gamma * d);
    Ok(-r * r - log_n)
}

/// Normalized squared envelope `exp(−sin²θ/(Γ²D²)) / N`.
pub fn envelope_sq(theta: f64, frame: &PacketFrame) -> Result<f64> {
    let l = log_envelope_sq(theta, frame)?;
    Ok(if l == f64::NEG_INFINITY { 0.0 } else { l.exp() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationMethod {
    Quadrature,
    ClosedForm,
}

/// `Γ π^{3/2} erfcx(1/Γ)`.
pub fn normalization_closed_form(gamma: f64) -> f64 {
    gamma * PI.powf(1.5) * erfcx(1.0 / gamma)
}

/// `2π ∫₀^{θ_c} K dθ` by adaptive quadrature.
pub fn normalization_quadrature(frame: &PacketFrame, cfg: &QuadratureConfig) -> Result<f64> {
    let (g, z) = (frame.gamma, frame.zeta);
    let r = integrate(|t| [kernel_unchecked(t, g, z)], &frame.theta_breakpoints(), cfg)?;
    Ok(2.0 * PI * r.value[0])
}

/// `N = ∫₀^{2π} ∫₀^{θ_c} K dθ dφ`.
pub fn normalization(
    frame: &PacketFrame,
    method: NormalizationMethod,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    match method {
        NormalizationMethod::ClosedForm => Ok(normalization_closed_form(frame.gamma)),
        NormalizationMethod::Quadrature => normalization_quadrature(frame, cfg),
    }
}

/// `∫₀^∞ e^{−s/Γ²} / (2√(1+s)) ds`, integrated over `u ∈ [0, π/2)` after
/// `s = tan²u`, where it becomes `∫ e^{−tan²u/Γ²} sin u / cos²u du`.
///
/// Equals `N/(2π)`.
pub fn rest_frame_trace(gamma: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let frame = PacketFrame::new(gamma, 0.0)?;
    let integrand = |u: f64| {
        let (s, c) = u.sin_cos();
        if c <= 0.0 || s <= 0.0 {
            return [0.0];
        }
        let t = s / (c * gamma);
        let l = -t * t + s.ln() - 2.0 * c.ln();
        [l.exp()]
    };
    let r = integrate(integrand, &frame.theta_breakpoints(), cfg)?;
    Ok(r.value[0])
}
