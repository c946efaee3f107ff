use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::closed::{q1_combination, q2_combination, q3_combination};
use super::pauli::{lambda_probs, DensityMatrix2, PauliLambda, QubitState, CHANNEL_TOLERANCE};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::wavepacket::{kernel_unchecked, PacketFrame};

/// The six angular weights of the output density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GFunctions {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
    pub g5: f64,
    pub g6: f64,
}

pub fn g_funcs(theta: f64, phi: f64) -> GFunctions {
    let c = theta.cos();
    let c2t = c * c;
    let (sp, cp) = phi.sin_cos();
    let (s2, c2) = (2.0 * phi).sin_cos();
    let (sp2, cp2, s22) = (sp * sp, cp * cp, s2 * s2);
    GFunctions {
        g1: 0.5 * (cp2 * c2t + sp2),
        g2: 0.5 * (cp2 * c2 * c2t - c2 * sp2 + c * s22),
        g3: 0.5 * (sp2 * c2t + cp2),
        g4: 0.5 * (sp2 * c2 * c2t - c2 * cp2 - c * s22),
        g5: 0.25 * (2.0 * c2 * c2 * c + s22 + c2t * s22),
        g6: -0.5 * c,
    }
}

/// `(1 − cos²φ sin²θ, 1 − sin²φ sin²θ)`, evaluated without cancellation.
fn denominators(theta: f64, phi: f64) -> (f64, f64) {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let (st2, ct2) = (st * st, ct * ct);
    (ct2 + st2 * sp * sp, ct2 + st2 * cp * cp)
}

/// How the φ-integrals `Fᵢ(θ)` are evaluated inside the θ-integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiMethod {
    /// Adaptive quadrature over φ at every θ node.
    #[default]
    Adaptive,
    /// Complete elliptic integral forms for `θ < π/2`, adaptive beyond.
    Elliptic,
}

/// `[F₁, F₂, F₃](θ)`: the φ-integrals over `[0, 2π]` of
/// `g₅/√(ab)`, `g₆/√(ab)` and `g₂/a`. The integrands are even and
/// π-periodic in φ, so four times the integral over `[0, π/2]` is used.
pub fn phi_integrals(theta: f64, cfg: &QuadratureConfig) -> Result<[f64; 3]> {
    let r = integrate(
        |phi| {
            let g = g_funcs(theta, phi);
            let (a, b) = denominators(theta, phi);
            let root = (a * b).sqrt();
            [g.g5 / root, g.g6 / root, g.g2 / a]
        },
        &[0.0, FRAC_PI_2],
        cfg,
    )?;
    Ok(r.value.map(|v| 4.0 * v))
}

/// Closed forms of [`phi_integrals`] for `0 ≤ θ < π/2`:
/// `Fᵢ = ±2 Qᵢ(tan²θ)/cos θ`.
pub fn phi_integrals_elliptic(theta: f64) -> Result<[f64; 3]> {
    if !(0.0..FRAC_PI_2).contains(&theta) {
        return Err(Error::domain(format!(
            "elliptic φ-integrals need θ in [0, π/2), got {theta}"
        )));
    }
    let c = theta.cos();
    let s = theta.tan().powi(2);
    Ok([
        2.0 * q1_combination(s)? / c,
        -2.0 * q2_combination(s)? / c,
        2.0 * q3_combination(s) / c,
    ])
}

/// Quadrature estimates behind a [`PauliLambda`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaEstimate {
    pub lambda: PauliLambda,
    /// `∫∫K`, the normalization computed in the same pass.
    pub normalization: f64,
    pub error_bound: f64,
    pub subdivisions: usize,
}

/// Channel eigenvalues by nested adaptive quadrature:
///
/// ```text
/// λ₁ =  (2/N) ∫ K F₁ dθ,   λ₂ = −(2/N) ∫ K F₂ dθ,   λ₃ = (2/N) ∫ K F₃ dθ
/// ```
///
/// with `N = 2π ∫ K dθ`. The sign of `λ₂` makes the sharp-packet limit the
/// identity channel and matches the off-diagonal `+i g₆` of the output
/// density matrix against `−iλ₂` of the Pauli form.
pub fn lambda_numeric(frame: &PacketFrame, cfg: &QuadratureConfig) -> Result<PauliLambda> {
    Ok(lambda_numeric_with(frame, cfg, PhiMethod::Adaptive)?.lambda)
}

pub fn lambda_numeric_with(
    frame: &PacketFrame,
    cfg: &QuadratureConfig,
    method: PhiMethod,
) -> Result<LambdaEstimate> {
    let (g, z) = (frame.gamma, frame.zeta);
    let inner = cfg.nested();
    let mut failure = None;
    let outer = integrate(
        |theta| {
            let k = kernel_unchecked(theta, g, z);
            if k == 0.0 {
                return [0.0; 4];
            }
            let f = match method {
                PhiMethod::Elliptic if theta < FRAC_PI_2 => phi_integrals_elliptic(theta),
                _ => phi_integrals(theta, &inner),
            };
            match f {
                Ok([f1, f2, f3]) => [k, k * f1, k * f2, k * f3],
                Err(e) => {
                    failure.get_or_insert(e);
                    [f64::NAN; 4]
                }
            }
        },
        &frame.theta_breakpoints(),
        cfg,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let r = outer?;
    let [k0, k1, k2, k3] = r.value;
    let n = 2.0 * PI * k0;
    if !(n > 0.0) {
        return Err(Error::Integrity(format!("normalization integral is {n}")));
    }
    let lambda = PauliLambda {
        l1: 2.0 * k1 / n,
        l2: -2.0 * k2 / n,
        l3: 2.0 * k3 / n,
    };
    check_channel(&lambda)?;
    Ok(LambdaEstimate {
        lambda,
        normalization: n,
        error_bound: r.error,
        subdivisions: r.subdivisions,
    })
}

fn check_channel(lambda: &PauliLambda) -> Result<()> {
    for l in lambda.as_array() {
        if l.abs() > 1.0 + CHANNEL_TOLERANCE {
            return Err(Error::Integrity(format!("eigenvalue {l} outside [−1, 1]")));
        }
    }
    lambda_probs(lambda)
        .map(|_| ())
        .map_err(|e| Error::Integrity(e.to_string()))
}

/// Breakpoints `0, π/2, π, 3π/2, 2π` for full-period φ-integrals.
fn full_period() -> [f64; 5] {
    [0.0, FRAC_PI_2, PI, 1.5 * PI, 2.0 * PI]
}

/// `∫₀^{θ_c} K(θ) ∫₀^{2π} f(θ, φ) dφ dθ` for a vector of integrands, and
/// `∫₀^{θ_c} K dθ` as the last component.
fn double_integral<const N: usize, const M: usize, F>(
    frame: &PacketFrame,
    cfg: &QuadratureConfig,
    f: F,
) -> Result<[f64; M]>
where
    F: Fn(f64, f64) -> [f64; N],
{
    assert_eq!(M, N + 1);
    let (g, z) = (frame.gamma, frame.zeta);
    let inner = cfg.nested();
    let mut failure = None;
    let outer = integrate(
        |theta| {
            let k = kernel_unchecked(theta, g, z);
            let mut out = [0.0; M];
            if k == 0.0 {
                return out;
            }
            match integrate(|phi| f(theta, phi), &full_period(), &inner) {
                Ok(r) => {
                    for (o, v) in out.iter_mut().zip(r.value) {
                        *o = k * v;
                    }
                    out[N] = k;
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    out = [f64::NAN; M];
                }
            }
            out
        },
        &frame.theta_breakpoints(),
        cfg,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(outer?.value)
}

/// Residuals of the two integral identities that make the output a Pauli
/// channel, each side integrated separately and the difference divided by
/// `N`:
///
/// ```text
/// r₁ = |∫∫K g₁/a − ∫∫K g₃/b| / N,   r₂ = |∫∫K g₂/a + ∫∫K g₄/b| / N
/// ```
pub fn identity_residuals(frame: &PacketFrame, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let side = |f: fn(f64, f64) -> f64| -> Result<(f64, f64)> {
        let [v, k] = double_integral::<1, 2, _>(frame, cfg, |t, p| [f(t, p)])?;
        Ok((v, 2.0 * PI * k))
    };
    let (l1, n) = side(|t, p| g_funcs(t, p).g1 / denominators(t, p).0)?;
    let (r1, _) = side(|t, p| g_funcs(t, p).g3 / denominators(t, p).1)?;
    let (l2, _) = side(|t, p| g_funcs(t, p).g2 / denominators(t, p).0)?;
    let (r2, _) = side(|t, p| -g_funcs(t, p).g4 / denominators(t, p).1)?;
    Ok(((l1 - r1).abs() / n, (l2 - r2).abs() / n))
}

/// Output density matrix for `state`, integrating the three independent
/// entries directly:
///
/// ```text
/// ρ₀₀ = (1/N) ∫∫ K (g₁ + g₂ cos χ sin ξ)/a
/// ρ₁₁ = (1/N) ∫∫ K (g₃ + g₄ cos χ sin ξ)/b
/// ρ₀₁ = (1/N) ∫∫ K (g₅ sin χ sin ξ + i g₆ cos ξ)/√(ab)
/// ```
pub fn rho_direct(
    state: &QubitState,
    frame: &PacketFrame,
    cfg: &QuadratureConfig,
) -> Result<DensityMatrix2> {
    let [x, y, z] = state.bloch();
    let [d0, d1, re, im, k] = double_integral::<4, 5, _>(frame, cfg, |t, p| {
        let g = g_funcs(t, p);
        let (a, b) = denominators(t, p);
        let root = (a * b).sqrt();
        [
            (g.g1 + g.g2 * z) / a,
            (g.g3 + g.g4 * z) / b,
            g.g5 * x / root,
            g.g6 * y / root,
        ]
    })?;
    let n = 2.0 * PI * k;
    let off = Complex64::new(re / n, im / n);
    let rho = DensityMatrix2(Matrix2::new(
        Complex64::new(d0 / n, 0.0),
        off,
        off.conj(),
        Complex64::new(d1 / n, 0.0),
    ));
    rho.validate()?;
    Ok(rho)
}
