//! The generalized hypergeometric function ₂F₂(1, 1; 5/2, 3; p).
//!
//! For `p ≥ −10` the ascending series is summed directly with Neumaier
//! compensation. Further down the alternating series loses too many digits,
//! so the Euler integral
//! `₂F₂(1,1;5/2,3;p) = 2 ∫₀¹ (1−t) ₁F₁(1;5/2;pt) dt`
//! is used instead, with the Kummer form
//! `₁F₁(1;5/2;x) = eˣ ₁F₁(3/2;5/2;−x)` whose series is positive for `x < 0`.

use crate::error::{ensure_finite, Error, Result};
use crate::quadrature::{integrate_scalar, QuadratureConfig};

/// Largest `|p|` accepted by [`hyp2f2_11_52_3`].
pub const HYP2F2_MAX_ABS_ARG: f64 = 50.0;

const SERIES_LOWER_LIMIT: f64 = -10.0;

/// ₂F₂(1, 1; 5/2, 3; p) for `|p| ≤ 50`.
pub fn hyp2f2_11_52_3(p: f64) -> Result<f64> {
    ensure_finite("hypergeometric argument", p)?;
    if p.abs() > HYP2F2_MAX_ABS_ARG {
        return Err(Error::Range(format!(
            "2F2(1,1;5/2,3;p) is only validated for |p| <= {HYP2F2_MAX_ABS_ARG}, got {p}"
        )));
    }
    if p >= SERIES_LOWER_LIMIT {
        Ok(ascending_series(p))
    } else {
        euler_integral(p)
    }
}

/// Neumaier-compensated sum of `Σ k!/((5/2)_k (3)_k) pᵏ`.
pub(crate) fn ascending_series(p: f64) -> f64 {
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut comp = 0.0_f64;
    let mut k = 0.0_f64;
    loop {
        term *= (k + 1.0) * p / ((k + 2.5) * (k + 3.0));
        k += 1.0;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if term.abs() <= 1e-18 * (sum + comp).abs() || k > 10_000.0 {
            break;
        }
    }
    sum + comp
}

/// ₁F₁(1; 5/2; x) for `x ≤ 0` from the Kummer-transformed positive series.
fn kummer_1f1(x: f64) -> f64 {
    let y = -x;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut k = 0.0_f64;
    loop {
        term *= (k + 1.5) * y / ((k + 2.5) * (k + 1.0));
        k += 1.0;
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
    }
    x.exp() * sum
}

fn euler_integral(p: f64) -> Result<f64> {
    let cfg = QuadratureConfig::new(1e-16, 1e-13, 500)?;
    let (v, _) = integrate_scalar(|t| (1.0 - t) * kummer_1f1(p * t), 0.0, 1.0, &cfg)?;
    Ok(2.0 * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive, Zero};

    /// Exact rational partial sum of the first `terms` series terms at a
    /// rational argument `num/den`.
    fn exact_series(num: i64, den: i64, terms: usize) -> f64 {
        let p = BigRational::new(BigInt::from(num), BigInt::from(den));
        let mut term = BigRational::one();
        let mut sum = BigRational::zero();
        for k in 0..terms {
            sum += &term;
            let k = k as i64;
            // (k+1)/((k+5/2)(k+3)) = 2(k+1)/((2k+5)(k+3))
            let ratio = BigRational::new(
                BigInt::from(2 * (k + 1)),
                BigInt::from((2 * k + 5) * (k + 3)),
            );
            term = term * ratio * &p;
        }
        sum.to_f64().unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn origin() {
        assert_eq!(hyp2f2_11_52_3(0.0).unwrap(), 1.0);
    }

    #[test]
    fn matches_exact_rational_series() {
        for &(num, den) in &[(1, 1), (-5, 1), (1, 3), (7, 2), (-19, 2), (20, 1), (-20, 1), (45, 1)] {
            let exact = exact_series(num, den, 200);
            let v = hyp2f2_11_52_3(num as f64 / den as f64).unwrap();
            assert!(rel(v, exact) < 1e-10, "p = {num}/{den}: {v} vs {exact}");
        }
    }

    #[test]
    fn integral_branch_matches_series_where_both_apply() {
        for &p in &[-3.0, -8.0, -10.0, -12.0] {
            let a = ascending_series(p);
            let b = euler_integral(p).unwrap();
            assert!(rel(a, b) < 1e-10, "p = {p}: {a} vs {b}");
        }
    }

    #[test]
    fn deep_negative_arguments() {
        let mut prev = hyp2f2_11_52_3(-10.0).unwrap();
        for i in 11..=50 {
            let v = hyp2f2_11_52_3(-(i as f64)).unwrap();
            assert!(v > 0.0 && v < prev, "p = -{i}");
            prev = v;
        }
        let exact = exact_series(-50, 1, 400);
        assert!(rel(hyp2f2_11_52_3(-50.0).unwrap(), exact) < 1e-10);
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(hyp2f2_11_52_3(50.5), Err(Error::Range(_))));
        assert!(matches!(hyp2f2_11_52_3(-80.0), Err(Error::Range(_))));
        assert!(hyp2f2_11_52_3(f64::NAN).is_err());
    }
}
