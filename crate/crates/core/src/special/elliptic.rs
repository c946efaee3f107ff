//! Complete elliptic integrals of the first and second kind.
//!
//! **Parameter convention.** Every function here takes the *parameter*
//! `m = k²`, not the modulus `k`:
//!
//! ```text
//! K(m) = ∫₀^{π/2} dφ / √(1 − m sin²φ)
//! E(m) = ∫₀^{π/2} √(1 − m sin²φ) dφ
//! ```
//!
//! Passing a modulus where a parameter is expected silently produces wrong
//! channel eigenvalues, so callers squaring a modulus must do so explicitly.
//!
//! `0 ≤ m < 1` is handled by the arithmetic–geometric mean. Negative
//! parameters are mapped to `[0, 1)` with the imaginary-modulus
//! transformation `K(m) = K(m/(m−1))/√(1−m)`, `E(m) = √(1−m)·E(m/(m−1))`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// `K(m)` and `E(m)` at the same parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticPair {
    pub k: f64,
    pub e: f64,
}

/// Complete elliptic integrals at parameter `m ≤ 1`.
///
/// At `m = 1` the first-kind integral diverges and is reported as `+∞`
/// with `E(1) = 1`.
pub fn elliptic(m: f64) -> Result<EllipticPair> {
    if m.is_nan() || m == f64::NEG_INFINITY {
        return Err(Error::domain(format!("elliptic parameter must be finite, got {m}")));
    }
    if m > 1.0 {
        return Err(Error::domain(format!("elliptic parameter must be ≤ 1, got {m}")));
    }
    Ok(elliptic_unchecked(m))
}

/// `K(m)`; NaN outside `m ≤ 1`.
pub fn ellip_k(m: f64) -> f64 {
    elliptic(m).map(|p| p.k).unwrap_or(f64::NAN)
}

/// `E(m)`; NaN outside `m ≤ 1`.
pub fn ellip_e(m: f64) -> f64 {
    elliptic(m).map(|p| p.e).unwrap_or(f64::NAN)
}

fn elliptic_unchecked(m: f64) -> EllipticPair {
    if m == 1.0 {
        return EllipticPair {
            k: f64::INFINITY,
            e: 1.0,
        };
    }
    if m < 0.0 {
        let scale = (1.0 - m).sqrt();
        let inner = agm_pair(-m / (1.0 - m));
        return EllipticPair {
            k: inner.k / scale,
            e: inner.e * scale,
        };
    }
    agm_pair(m)
}

/// AGM evaluation for `0 ≤ m < 1`:
/// `K = π/(2 a_∞)`, `E = K·(1 − Σ 2^{n−1} c_n²)` with `c₀² = m`.
fn agm_pair(m: f64) -> EllipticPair {
    let mut a = 1.0_f64;
    let mut b = (1.0 - m).sqrt();
    let mut weight = 0.5;
    let mut sum = weight * m;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        let next_a = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next_a;
        weight *= 2.0;
        sum += weight * c * c;
        // Quadratic convergence: the next c is about c²/(4a), below rounding.
        if c.abs() <= 1e-9 * a {
            break;
        }
    }
    let k = FRAC_PI_2 / a;
    EllipticPair {
        k,
        e: k * (1.0 - sum),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn degenerate_parameter() {
        let p = elliptic(0.0).unwrap();
        assert!((p.k - FRAC_PI_2).abs() < 1e-15);
        assert!((p.e - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn unit_parameter_diverges() {
        let p = elliptic(1.0).unwrap();
        assert_eq!(p.k, f64::INFINITY);
        assert_eq!(p.e, 1.0);
    }

    #[test]
    fn rejects_parameter_above_one() {
        assert!(matches!(elliptic(1.0 + 1e-12), Err(Error::Domain(_))));
        assert!(elliptic(f64::NAN).is_err());
    }

    #[test]
    fn reference_values() {
        // (m, K, E) to 20 digits (mpmath)
        let cases = [
            (-1.0, 1.311_028_777_146_059_9, 1.910_098_894_513_856),
            (0.5, 1.854_074_677_301_372, 1.350_643_881_047_675_5),
            (0.9, 2.578_092_113_348_173, 1.104_774_732_704_073_3),
            (-10.0, 0.790_871_890_238_738_5, 3.639_138_038_417_768),
            (-0.3, 1.469_491_722_092_121_3, 1.682_693_035_488_896),
            (0.999_999, 8.294_051_463_601_062, 1.000_003_897_026_172),
        ];
        for (m, k, e) in cases {
            let p = elliptic(m).unwrap();
            assert!(rel(p.k, k) < 1e-14, "K({m}) = {} vs {k}", p.k);
            assert!(rel(p.e, e) < 1e-14, "E({m}) = {} vs {e}", p.e);
        }
    }

    /// Direct Gauss–Legendre quadrature of the defining integrals on 64
    /// panels of 8 nodes each, an oracle independent of the AGM.
    fn defining_integrals(m: f64) -> (f64, f64) {
        let nodes = [
            (0.183_434_642_495_649_8, 0.362_683_783_378_362),
            (0.525_532_409_916_329, 0.313_706_645_877_887_3),
            (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
            (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
        ];
        let panels = 64;
        let h = FRAC_PI_2 / panels as f64;
        let (mut k, mut e) = (0.0, 0.0);
        for i in 0..panels {
            let mid = (i as f64 + 0.5) * h;
            for &(x, w) in &nodes {
                for s in [-1.0, 1.0] {
                    let phi = mid + s * x * h / 2.0;
                    let d = (1.0 - m * phi.sin().powi(2)).sqrt();
                    k += w * h / 2.0 / d;
                    e += w * h / 2.0 * d;
                }
            }
        }
        (k, e)
    }

    #[test]
    fn agrees_with_defining_integrals() {
        for &m in &[-20.0, -3.0, -1.0, -0.25, 0.0, 0.3, 0.7, 0.95] {
            let p = elliptic(m).unwrap();
            let (k, e) = defining_integrals(m);
            assert!(rel(p.k, k) < 1e-12, "K({m})");
            assert!(rel(p.e, e) < 1e-12, "E({m})");
        }
    }

    #[test]
    fn legendre_relation() {
        for i in 1..100 {
            let m = i as f64 / 100.0;
            let a = elliptic(m).unwrap();
            let b = elliptic(1.0 - m).unwrap();
            let lhs = a.e * b.k + b.e * a.k - a.k * b.k;
            assert!((lhs - FRAC_PI_2).abs() < 1e-10, "m = {m}: {lhs}");
        }
    }

    #[test]
    fn near_unit_parameter_is_finite() {
        let m = 1.0 - 1e-10;
        let p = elliptic(m).unwrap();
        // K ~ ln(4/√(1-m)) for m → 1
        let asymptotic = (4.0 / (1.0 - m).sqrt()).ln();
        assert!(p.k.is_finite() && (p.k - asymptotic).abs() < 1e-8);
        assert!((p.e - 1.0).abs() < 1e-8);
        assert!(p.k > 0.0 && p.e > 0.0);
    }

    #[test]
    fn negative_parameter_is_positive() {
        for i in 1..50 {
            let p = elliptic(-(i as f64)).unwrap();
            assert!(p.k > 0.0 && p.e > 0.0);
            assert!(p.k < FRAC_PI_2 && p.e > FRAC_PI_2);
        }
    }
}
