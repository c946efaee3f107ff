//! Four-vectors, Lorentz matrices and the little group of the photon
//! standard momentum `k_std = (1, 0, 0, 1)`.
//!
//! Index order is `(t, x, y, z)` with metric `η = diag(1, −1, −1, −1)`.
//! `boost_z(ζ)` maps the rest frame of one observer to another moving along
//! `+z` with rapidity `ζ`; its inverse therefore multiplies photon energies by
//! `cosh ζ + sinh ζ cos θ`.

use std::fmt;
use std::ops::Mul;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Relative tolerance for the null condition of photon momenta.
pub const NULL_TOLERANCE: f64 = 1e-12;

/// Elementwise tolerance for accepting a caller-supplied Lorentz matrix.
pub const METRIC_TOLERANCE: f64 = 1e-10;

/// Photon energies below this fraction of `ω·max|Λᵢⱼ|` are treated as the
/// singular backward direction; the scale is the rounding floor of `(Λp)⁰`.
pub const SINGULAR_ENERGY: f64 = 1e-13;

fn metric() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0))
}

/// A contravariant four-vector `(k⁰, k¹, k², k³)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourVector(pub Vector4<f64>);

impl FourVector {
    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        FourVector(Vector4::new(t, x, y, z))
    }

    /// The photon momentum `ω(1, sinθ cosφ, sinθ sinφ, cosθ)`.
    pub fn photon(omega: f64, theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        FourVector::new(omega, omega * st * cp, omega * st * sp, omega * ct)
    }

    /// The standard momentum `(1, 0, 0, 1)`.
    pub fn standard() -> Self {
        FourVector::new(1.0, 0.0, 0.0, 1.0)
    }

    pub fn t(&self) -> f64 {
        self.0[0]
    }

    pub fn spatial_norm(&self) -> f64 {
        self.0.fixed_rows::<3>(1).norm()
    }

    /// `η(k, k) = (k⁰)² − |𝐤|²`.
    pub fn minkowski_square(&self) -> f64 {
        let v = &self.0;
        v[0] * v[0] - v[1] * v[1] - v[2] * v[2] - v[3] * v[3]
    }

    pub fn is_null(&self) -> bool {
        let scale = self.0[0] * self.0[0];
        self.minkowski_square().abs() <= NULL_TOLERANCE * scale.max(f64::MIN_POSITIVE)
    }

    pub fn max_abs_diff(&self, other: &FourVector) -> f64 {
        (self.0 - other.0).amax()
    }
}

/// Axis of a spatial rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    Y,
    Z,
}

/// A 4×4 real matrix acting on four-vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzMatrix(pub Matrix4<f64>);

impl LorentzMatrix {
    pub fn identity() -> Self {
        LorentzMatrix(Matrix4::identity())
    }

    pub fn apply(&self, k: &FourVector) -> FourVector {
        FourVector(self.0 * k.0)
    }

    /// `Λ⁻¹ = η Λᵀ η`, exact for metric-preserving matrices.
    pub fn inverse(&self) -> Self {
        let eta = metric();
        LorentzMatrix(eta * self.0.transpose() * eta)
    }

    /// Largest elementwise deviation of `ΛᵀηΛ` from `η`.
    pub fn metric_defect(&self) -> f64 {
        let eta = metric();
        (self.0.transpose() * eta * self.0 - eta).amax()
    }

    pub fn max_abs_diff(&self, other: &LorentzMatrix) -> f64 {
        (self.0 - other.0).amax()
    }

    /// Checks that the matrix is a proper orthochronous Lorentz transformation.
    pub fn validate(&self) -> Result<()> {
        if self.0.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("Lorentz matrix has non-finite entries"));
        }
        let scale = self.0.amax().max(1.0);
        if self.metric_defect() > METRIC_TOLERANCE * scale * scale {
            return Err(Error::domain(format!(
                "matrix does not preserve the Minkowski metric (defect {:e})",
                self.metric_defect()
            )));
        }
        if self.0[(0, 0)] < 1.0 - METRIC_TOLERANCE * scale {
            return Err(Error::domain("Lorentz matrix is not orthochronous"));
        }
        Ok(())
    }
}

impl Mul for LorentzMatrix {
    type Output = LorentzMatrix;

    fn mul(self, rhs: LorentzMatrix) -> LorentzMatrix {
        LorentzMatrix(self.0 * rhs.0)
    }
}

impl fmt::Display for LorentzMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Boost along `z` with rapidity `ζ`; the `(t, z)` block is
/// `[[cosh ζ, −sinh ζ], [−sinh ζ, cosh ζ]]`.
pub fn boost_z(zeta: f64) -> Result<LorentzMatrix> {
    ensure_finite("rapidity", zeta)?;
    let (c, s) = (zeta.cosh(), zeta.sinh());
    if !c.is_finite() {
        return Err(Error::domain(format!("rapidity {zeta} overflows")));
    }
    Ok(LorentzMatrix(Matrix4::new(
        c, 0.0, 0.0, -s, //
        0.0, 1.0, 0.0, 0.0, //
        0.0, 0.0, 1.0, 0.0, //
        -s, 0.0, 0.0, c,
    )))
}

/// Spatial rotation by `angle` about `axis` (right-handed).
pub fn rotation(axis: Axis, angle: f64) -> Result<LorentzMatrix> {
    ensure_finite("rotation angle", angle)?;
    let (s, c) = angle.sin_cos();
    let m = match axis {
        Axis::Y => Matrix4::new(
            1.0, 0.0, 0.0, 0.0, //
            0.0, c, 0.0, s, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, -s, 0.0, c,
        ),
        Axis::Z => Matrix4::new(
            1.0, 0.0, 0.0, 0.0, //
            0.0, c, -s, 0.0, //
            0.0, s, c, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ),
    };
    Ok(LorentzMatrix(m))
}

fn check_photon(p: &FourVector) -> Result<()> {
    if p.0.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("momentum has non-finite components"));
    }
    if p.t() <= 0.0 {
        return Err(Error::domain(format!("photon energy must be positive, got {}", p.t())));
    }
    if !p.is_null() {
        return Err(Error::domain(format!(
            "momentum is not null: k·k = {:e}",
            p.minkowski_square()
        )));
    }
    Ok(())
}

/// `L_p = R_z(φ) R_y(θ) B_z(ξ)` with `ξ = −ln ω`, so that `L_p k_std = p`.
pub fn standard_boost(p: &FourVector) -> Result<LorentzMatrix> {
    check_photon(p)?;
    let v = &p.0;
    let theta = v[1].hypot(v[2]).atan2(v[3]);
    let phi = v[2].atan2(v[1]);
    let xi = -v[0].ln();
    Ok(rotation(Axis::Z, phi)? * rotation(Axis::Y, theta)? * boost_z(xi)?)
}

/// `W(Λ, p) = L_{Λp}⁻¹ Λ L_p`.
pub fn little_group_element(lambda: &LorentzMatrix, p: &FourVector) -> Result<LorentzMatrix> {
    lambda.validate()?;
    check_photon(p)?;
    let q = lambda.apply(p);
    if q.t() <= SINGULAR_ENERGY * p.t() * lambda.0.amax() {
        return Err(Error::Singular(format!(
            "transformed photon energy {:e} vanishes (backward direction)",
            q.t()
        )));
    }
    // Restore the null condition lost to rounding before building L_{Λp}.
    let q = FourVector::new(q.spatial_norm(), q.0[1], q.0[2], q.0[3]);
    Ok(standard_boost(&q)?.inverse() * *lambda * standard_boost(p)?)
}

/// The null-rotation ("translation") element of the little group.
pub fn translation(a1: f64, a2: f64) -> LorentzMatrix {
    let h = 0.5 * (a1 * a1 + a2 * a2);
    LorentzMatrix(Matrix4::new(
        1.0 + h, a1, a2, -h, //
        a1, 1.0, 0.0, -a1, //
        a2, 0.0, 1.0, -a2, //
        h, a1, a2, 1.0 - h,
    ))
}

/// `W = T(a₁, a₂) R_z(ϑ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LittleGroupDecomposition {
    pub wigner_angle: f64,
    pub a1: f64,
    pub a2: f64,
    /// Largest elementwise distance between the input and `T·R`.
    pub residual: f64,
}

impl LittleGroupDecomposition {
    pub fn reconstruct(&self) -> LorentzMatrix {
        translation(self.a1, self.a2)
            * rotation(Axis::Z, self.wigner_angle).unwrap_or_else(|_| LorentzMatrix::identity())
    }
}

/// Splits a little-group element into translation and rotation.
///
/// The translation is read from the first column (`W e₀ = T e₀`, since the
/// rotation fixes `e₀`), removed, and the angle read from the remaining
/// `SO(2)` block.
pub fn decompose(w: &LorentzMatrix) -> LittleGroupDecomposition {
    let a1 = w.0[(1, 0)];
    let a2 = w.0[(2, 0)];
    let r = translation(-a1, -a2) * *w;
    let wigner_angle = r.0[(2, 1)].atan2(r.0[(1, 1)]);
    let mut d = LittleGroupDecomposition {
        wigner_angle,
        a1,
        a2,
        residual: 0.0,
    };
    d.residual = d.reconstruct().max_abs_diff(w);
    d
}

/// Little-group element of `Λ` at `p`, decomposed.
pub fn little_group(lambda: &LorentzMatrix, p: &FourVector) -> Result<LittleGroupDecomposition> {
    Ok(decompose(&little_group_element(lambda, p)?))
}

/// Expected translation `a₁ = e^ξ sin θ / (coth ζ − cos θ)` for
/// `Λ = boost_z(ζ)` at `p = ω(1, sinθ cosφ, sinθ sinφ, cosθ)` with `φ = 0`,
/// written without `coth` so that `ζ = 0` is regular.
pub fn z_boost_translation(zeta: f64, omega: f64, theta: f64) -> f64 {
    let (sh, ch) = (zeta.sinh(), zeta.cosh());
    theta.sin() * sh / (omega * (ch - sh * theta.cos()))
}

/// `sinh ζ + cosh ζ cos θ`, evaluated as
/// `e^ζ cos²(θ/2) − e^{−ζ} sin²(θ/2)` to avoid cancellation near `θ_c`.
pub fn aberration_denominator(theta: f64, zeta: f64) -> f64 {
    let (s, c) = (0.5 * theta).sin_cos();
    zeta.exp() * c * c - (-zeta).exp() * s * s
}

/// Polar angle seen by the boosted observer,
/// `θ̃ = arctan(sin θ / (sinh ζ + cosh ζ cos θ))` on the branch in `[0, π]`.
pub fn aberrated_angle(theta: f64, zeta: f64) -> Result<f64> {
    ensure_finite("rapidity", zeta)?;
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::domain(format!("polar angle must lie in [0, π], got {theta}")));
    }
    Ok(theta.sin().atan2(aberration_denominator(theta, zeta)))
}

/// Inverse of [`aberrated_angle`]: `θ = 2 arctan(e^ζ tan(θ̃/2))`.
pub fn unaberrated_angle(theta_tilde: f64, zeta: f64) -> Result<f64> {
    ensure_finite("rapidity", zeta)?;
    if !(0.0..=std::f64::consts::PI).contains(&theta_tilde) {
        return Err(Error::domain(format!(
            "polar angle must lie in [0, π], got {theta_tilde}"
        )));
    }
    let (s, c) = (0.5 * theta_tilde).sin_cos();
    Ok(2.0 * (zeta.exp() * s).atan2(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn boost_examples() {
        assert_eq!(boost_z(0.0).unwrap(), LorentzMatrix::identity());
        let ab = boost_z(0.7).unwrap() * boost_z(-1.9).unwrap();
        assert!(ab.max_abs_diff(&boost_z(-1.2).unwrap()) < 1e-12);
        let (theta, phi, zeta, omega) = (1.1, 0.4, -0.8, 2.5);
        let k = FourVector::photon(omega, theta, phi);
        let kt = boost_z(zeta).unwrap().inverse().apply(&k);
        let expected = omega * (zeta.cosh() + zeta.sinh() * theta.cos());
        assert!((kt.t() - expected).abs() < 1e-12);
        assert!(boost_z(f64::NAN).is_err());
        assert!(boost_z(1e4).is_err());
    }

    #[test]
    fn rotation_examples() {
        assert_eq!(rotation(Axis::Z, 0.0).unwrap(), LorentzMatrix::identity());
        let v = rotation(Axis::Y, FRAC_PI_2).unwrap().apply(&FourVector::standard());
        assert!(v.max_abs_diff(&FourVector::new(1.0, 1.0, 0.0, 0.0)) < 1e-15);
        let rr = rotation(Axis::Z, 0.3).unwrap() * rotation(Axis::Z, 1.4).unwrap();
        assert!(rr.max_abs_diff(&rotation(Axis::Z, 1.7).unwrap()) < 1e-15);
    }

    #[test]
    fn standard_boost_examples() {
        let l = standard_boost(&FourVector::standard()).unwrap();
        assert!(l.max_abs_diff(&LorentzMatrix::identity()) < 1e-15);

        let p = FourVector::new(2.0, 0.0, 0.0, 2.0);
        let l = standard_boost(&p).unwrap();
        assert!(l.max_abs_diff(&boost_z(-(2f64).ln()).unwrap()) < 1e-15);
        assert!(l.apply(&FourVector::standard()).max_abs_diff(&p) < 1e-12);

        let p = FourVector::new(1.0, (PI / 3.0).sin(), 0.0, (PI / 3.0).cos());
        let l = standard_boost(&p).unwrap();
        assert!(l.apply(&FourVector::standard()).max_abs_diff(&p) < 1e-12);
    }

    #[test]
    fn standard_boost_rejects_bad_momenta() {
        assert!(standard_boost(&FourVector::new(1.0, 0.0, 0.0, 0.9)).is_err());
        assert!(standard_boost(&FourVector::new(-1.0, 0.0, 0.0, -1.0)).is_err());
        assert!(standard_boost(&FourVector::new(0.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn identity_has_trivial_little_group() {
        let p = FourVector::photon(1.3, 0.8, 2.0);
        let d = little_group(&LorentzMatrix::identity(), &p).unwrap();
        assert!(d.wigner_angle.abs() < 1e-14 && d.a1.abs() < 1e-14 && d.a2.abs() < 1e-14);
    }

    #[test]
    fn z_boost_translation_only() {
        let theta = FRAC_PI_4;
        let p = FourVector::photon(1.0, theta, 0.0);
        let d = little_group(&boost_z(1.0).unwrap(), &p).unwrap();
        let expected = (1f64.tanh().recip() - theta.cos()).recip() * theta.sin();
        assert!(d.wigner_angle.abs() < 1e-10);
        assert!(d.a2.abs() < 1e-10);
        assert!((d.a1 - expected).abs() < 1e-10);
        assert!((z_boost_translation(1.0, 1.0, theta) - expected).abs() < 1e-14);
    }

    #[test]
    fn general_lorentz_reconstructs() {
        let lambda = rotation(Axis::Y, 0.3).unwrap() * boost_z(0.5).unwrap();
        for &(theta, phi, omega) in &[(0.4, 1.0, 0.7), (2.0, -2.5, 3.0), (1.2, 0.1, 1.0)] {
            let p = FourVector::photon(omega, theta, phi);
            let w = little_group_element(&lambda, &p).unwrap();
            let d = decompose(&w);
            assert!(d.residual < 1e-10);
            let fixed = w.apply(&FourVector::standard());
            assert!(fixed.max_abs_diff(&FourVector::standard()) < 1e-10);
        }
    }

    #[test]
    fn backward_direction_is_singular() {
        // boost_z(ζ) with ζ > 0 sends energy ω(cosh ζ − sinh ζ) → 0 as ζ grows.
        let p = FourVector::photon(1.0, 0.0, 0.0);
        let r = little_group(&boost_z(33.0).unwrap(), &p);
        assert!(matches!(r, Err(Error::Singular(_))));
    }

    #[test]
    fn rejects_non_lorentz_matrix() {
        let mut m = LorentzMatrix::identity();
        m.0[(1, 1)] = 2.0;
        assert!(little_group(&m, &FourVector::standard()).is_err());
        let flip = LorentzMatrix(-Matrix4::identity());
        assert!(little_group(&flip, &FourVector::standard()).is_err());
    }

    #[test]
    fn aberration_examples() {
        assert!((aberrated_angle(1.234, 0.0).unwrap() - 1.234).abs() < 1e-15);
        for &zeta in &[-3.0, -0.5, 0.0, 0.2, 2.0] {
            let theta_c = (-f64::tanh(zeta)).acos();
            assert!((unaberrated_angle(FRAC_PI_2, zeta).unwrap() - theta_c).abs() < 1e-12);
            assert!((aberrated_angle(theta_c, zeta).unwrap() - FRAC_PI_2).abs() < 1e-12);
        }
        let (theta, zeta) = (0.3_f64, -1.0_f64);
        let direct = (theta.sin() / (zeta.sinh() + zeta.cosh() * theta.cos())).atan();
        assert!((aberrated_angle(theta, zeta).unwrap() - direct).abs() < 1e-14);
        // Beyond θ_c the principal arctan is negative and needs the +π branch.
        let theta = 1.0_f64;
        let direct = (theta.sin() / (zeta.sinh() + zeta.cosh() * theta.cos())).atan();
        assert!(direct < 0.0);
        assert!((aberrated_angle(theta, zeta).unwrap() - (direct + PI)).abs() < 1e-14);
        assert_eq!(aberrated_angle(0.0, -4.0).unwrap(), 0.0);
        assert!((aberrated_angle(PI, 4.0).unwrap() - PI).abs() < 1e-14);
        assert!(aberrated_angle(-0.1, 0.0).is_err());
    }

    #[test]
    fn denominator_matches_definition() {
        for i in 0..50 {
            let theta = PI * i as f64 / 49.0;
            for &zeta in &[-2.0_f64, 0.0, 1.5] {
                let direct = zeta.sinh() + zeta.cosh() * theta.cos();
                assert!((aberration_denominator(theta, zeta) - direct).abs() < 1e-13);
            }
        }
    }

    proptest! {
        #[test]
        fn constructed_matrices_preserve_metric(zeta in -3.0f64..3.0, a in -7.0f64..7.0, b in -7.0f64..7.0) {
            let m = rotation(Axis::Z, a).unwrap() * boost_z(zeta).unwrap() * rotation(Axis::Y, b).unwrap();
            prop_assert!(m.metric_defect() < 1e-12 * m.0.amax().powi(2).max(1.0));
            prop_assert!(translation(a, b).metric_defect() < 1e-12 * (1.0 + a * a + b * b).powi(2));
        }

        #[test]
        fn z_boosts_have_no_wigner_phase(
            zeta in -3.0f64..3.0,
            theta in 0.01f64..3.13,
            phi in 0.0f64..(2.0 * PI),
            omega in 0.2f64..5.0,
        ) {
            let p = FourVector::photon(omega, theta, phi);
            let d = little_group(&boost_z(zeta).unwrap(), &p).unwrap();
            prop_assert!(d.wigner_angle.abs() < 1e-10);
            prop_assert!(d.residual < 1e-10);
        }

        #[test]
        fn aberration_round_trip(theta in 0.0f64..PI, zeta in -4.0f64..4.0) {
            let t = aberrated_angle(theta, zeta).unwrap();
            prop_assert!((0.0..=PI).contains(&t));
            prop_assert!((unaberrated_angle(t, zeta).unwrap() - theta).abs() < 1e-11);
        }
    }
}
