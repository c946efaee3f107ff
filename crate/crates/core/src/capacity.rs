//! Capacity functionals of Pauli channels and the threshold solvers.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{
    apply_kraus, compose, lambda_numeric, lambda_probs, PauliLambda, PauliProbs,
};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::special::{binary_entropy, entropy};
use crate::wavepacket::PacketFrame;

/// Cerf indicator value at and above which the quantum capacity vanishes.
pub const CERF_ZERO_CAPACITY: f64 = 0.5;

/// Tolerance on the smallest eigenvalue of the partially transposed Choi matrix.
pub const PPT_TOLERANCE: f64 = 1e-10;

/// `C = 1 − H(x)` with `x = (1 + maxᵢ|λᵢ|)/2`.
pub fn classical_capacity(lam: &PauliLambda) -> f64 {
    let x = (0.5 * (1.0 + lam.max_abs())).min(1.0);
    1.0 - binary_entropy(x).unwrap_or(0.0)
}

/// Hashing bound `1 − H(p)` as `(raw, max(0, raw))`.
pub fn hashing_bound(p: &PauliProbs) -> Result<(f64, f64)> {
    let raw = 1.0 - entropy(&p.as_array())?;
    Ok((raw, raw.max(0.0)))
}

/// `c⁰↓ = p₁ + p₂ + p₃ + √(p₁p₂) + √(p₂p₃) + √(p₁p₃)`.
pub fn cerf_indicator(p: &PauliProbs) -> f64 {
    let [_, a, b, c] = p.as_array().map(|x| x.max(0.0));
    a + b + c + (a * b).sqrt() + (b * c).sqrt() + (a * c).sqrt()
}

/// `(I ⊗ Φ)(|Ω⟩⟨Ω|)` for the maximally entangled `|Ω⟩ = (|00⟩ + |11⟩)/√2`.
pub fn choi_matrix(p: &PauliProbs) -> Matrix4<Complex64> {
    let mut choi = Matrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let mut e = Matrix2::zeros();
            e[(i, j)] = Complex64::new(1.0, 0.0);
            let block = apply_kraus(p, &e) * Complex64::new(0.5, 0.0);
            choi.fixed_view_mut::<2, 2>(2 * i, 2 * j).copy_from(&block);
        }
    }
    choi
}

/// Transpose of the first tensor factor.
pub fn partial_transpose(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let mut out = Matrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let block = m.fixed_view::<2, 2>(2 * i, 2 * j).into_owned();
            out.fixed_view_mut::<2, 2>(2 * j, 2 * i).copy_from(&block);
        }
    }
    out
}

/// Smallest eigenvalue of the partially transposed Choi matrix.
pub fn choi_pt_min_eigenvalue(lam: &PauliLambda) -> Result<f64> {
    let p = lambda_probs(lam)?;
    let pt = partial_transpose(&choi_matrix(&p));
    let eig = pt.symmetric_eigenvalues();
    Ok(eig.iter().cloned().fold(f64::INFINITY, f64::min))
}

/// True when the channel breaks entanglement, i.e. its Choi matrix has a
/// positive partial transpose.
pub fn is_entanglement_breaking(lam: &PauliLambda) -> Result<bool> {
    Ok(choi_pt_min_eigenvalue(lam)? >= -PPT_TOLERANCE)
}

/// Every bound for one channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub classical: f64,
    pub hashing_raw: f64,
    pub hashing: f64,
    pub cerf: f64,
    pub cerf_zero_capacity: bool,
    pub entanglement_breaking: bool,
}

impl CapacityReport {
    pub fn new(lam: &PauliLambda) -> Result<Self> {
        let p = lambda_probs(lam)?;
        let (hashing_raw, hashing) = hashing_bound(&p)?;
        let cerf = cerf_indicator(&p);
        Ok(CapacityReport {
            classical: classical_capacity(lam),
            hashing_raw,
            hashing,
            cerf,
            cerf_zero_capacity: cerf >= CERF_ZERO_CAPACITY,
            entanglement_breaking: is_entanglement_breaking(lam)?,
        })
    }
}

/// Rapidity grid step of the boost scan and the scan floor.
pub const BOOST_SCAN_STEP: f64 = 0.05;
pub const BOOST_SCAN_MIN: f64 = -10.0;
pub const BOOST_TOLERANCE: f64 = 1e-4;

fn hashing_at(gamma: f64, zeta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let lam = lambda_numeric(&PacketFrame::new(gamma, zeta)?, cfg)?;
    Ok(hashing_bound(&lambda_probs(&lam)?)?.0)
}

/// Rapidity `ζ* < 0` at which the raw hashing bound of a packet with zero
/// hashing rate at rest turns positive.
///
/// Scans `ζ` downwards in steps of 0.05 to −10, checks that the bound rises
/// monotonically over the scanned samples, then bisects to `|Δζ| < 10⁻⁴`.
pub fn boost_threshold(gamma: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let at_rest = hashing_at(gamma, 0.0, cfg)?;
    if at_rest > 0.0 {
        return Err(Error::Precondition(format!(
            "hashing bound is already positive at rest ({at_rest:.6} bits for Γ = {gamma})"
        )));
    }
    let mut hi = 0.0;
    let mut prev = at_rest;
    let steps = (BOOST_SCAN_MIN.abs() / BOOST_SCAN_STEP).round() as usize;
    for k in 1..=steps {
        let lo = -(k as f64) * BOOST_SCAN_STEP;
        let h = hashing_at(gamma, lo, cfg)?;
        if h < prev - 1e-9 {
            return Err(Error::Integrity(format!(
                "hashing bound decreases from {prev} to {h} as ζ falls to {lo}"
            )));
        }
        if h > 0.0 {
            let (mut lo, mut hi) = (lo, hi);
            while hi - lo > BOOST_TOLERANCE {
                let mid = 0.5 * (lo + hi);
                if hashing_at(gamma, mid, cfg)? > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        prev = h;
        hi = lo;
    }
    Err(Error::NotFound(format!(
        "hashing bound stays non-positive for ζ ∈ [{BOOST_SCAN_MIN}, 0] at Γ = {gamma}"
    )))
}

/// Scan range of `1/Γ` for [`gamma_threshold`].
pub const GAMMA_SCAN_RANGE: (f64, f64) = (1e-4, 2.0);
pub const GAMMA_SCAN_POINTS: usize = 60;
pub const GAMMA_TOLERANCE: f64 = 1e-4;

fn cerf_at(inv_gamma: f64, zeta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let lam = lambda_numeric(&PacketFrame::new(1.0 / inv_gamma, zeta)?, cfg)?;
    Ok(cerf_indicator(&lambda_probs(&lam)?))
}

/// `1/Γ*` at which the Cerf indicator falls through 1/2 at rapidity `ζ`.
///
/// Scans `1/Γ` logarithmically over `[10⁻⁴, 2]` and bisects the first
/// crossing (in `ln(1/Γ)`) to relative precision `10⁻⁴`.
pub fn gamma_threshold(zeta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let (a, b) = GAMMA_SCAN_RANGE;
    let (la, lb) = (a.ln(), b.ln());
    let grid = |i: usize| (la + (lb - la) * i as f64 / (GAMMA_SCAN_POINTS - 1) as f64).exp();
    let mut prev_x = grid(0);
    let mut prev_zero = cerf_at(prev_x, zeta, cfg)? >= CERF_ZERO_CAPACITY;
    for i in 1..GAMMA_SCAN_POINTS {
        let x = grid(i);
        let zero = cerf_at(x, zeta, cfg)? >= CERF_ZERO_CAPACITY;
        if zero != prev_zero {
            let (mut lo, mut hi) = (prev_x, x);
            while hi / lo - 1.0 > GAMMA_TOLERANCE {
                let mid = (lo * hi).sqrt();
                if (cerf_at(mid, zeta, cfg)? >= CERF_ZERO_CAPACITY) == prev_zero {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok((lo * hi).sqrt());
        }
        prev_x = x;
        prev_zero = zero;
    }
    Err(Error::NotFound(format!(
        "Cerf indicator does not cross 1/2 for 1/Γ in [{a}, {b}] at ζ = {zeta}"
    )))
}

/// Composition of a depolarizing channel with the one-Pauli channel
/// `p = (1/2, 0, 1/2, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eq7Report {
    pub strength: f64,
    pub composite: PauliLambda,
    pub hashing_one_pauli: f64,
    pub cerf_one_pauli: f64,
    pub cerf_composite: f64,
    /// The composite is certified to have zero quantum capacity.
    pub holds: bool,
}

pub fn eq7_check(strength: f64) -> Result<Eq7Report> {
    if !(0.0..=1.0).contains(&strength) {
        return Err(Error::domain(format!(
            "depolarizing strength must lie in [0, 1], got {strength}"
        )));
    }
    let one_pauli = PauliProbs::new(0.5, 0.0, 0.5, 0.0)?;
    let p2 = crate::channel::probs_lambda(&one_pauli);
    let composite = compose(&PauliLambda::depolarizing(strength)?, &p2);
    let (hashing_one_pauli, _) = hashing_bound(&one_pauli)?;
    let cerf_one_pauli = cerf_indicator(&one_pauli);
    let cerf_composite = cerf_indicator(&lambda_probs(&composite)?);
    Ok(Eq7Report {
        strength,
        composite,
        hashing_one_pauli,
        cerf_one_pauli,
        cerf_composite,
        holds: hashing_one_pauli == 0.0
            && cerf_one_pauli >= CERF_ZERO_CAPACITY
            && cerf_composite >= CERF_ZERO_CAPACITY,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::probs_lambda;
    use proptest::prelude::*;

    fn probs(p0: f64, p1: f64, p2: f64, p3: f64) -> PauliProbs {
        PauliProbs::new(p0, p1, p2, p3).unwrap()
    }

    fn lam(a: f64, b: f64, c: f64) -> PauliLambda {
        PauliLambda::new(a, b, c).unwrap()
    }

    #[test]
    fn classical_examples() {
        assert_eq!(classical_capacity(&PauliLambda::IDENTITY), 1.0);
        assert_eq!(classical_capacity(&lam(0.0, 0.0, 0.0)), 0.0);
        let c = classical_capacity(&lam(0.5, -0.2, 0.1));
        assert!((c - (1.0 - binary_entropy(0.75).unwrap())).abs() < 1e-15);
        assert!((c - 0.188_721_875_540_867).abs() < 1e-12);
    }

    #[test]
    fn hashing_examples() {
        assert_eq!(hashing_bound(&probs(1.0, 0.0, 0.0, 0.0)).unwrap(), (1.0, 1.0));
        assert_eq!(hashing_bound(&probs(0.25, 0.25, 0.25, 0.25)).unwrap(), (-1.0, 0.0));
        assert_eq!(hashing_bound(&probs(0.5, 0.0, 0.5, 0.0)).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn one_pauli_hashing_is_binary_entropy() {
        for i in 0..=20 {
            let p0 = i as f64 / 20.0;
            let (raw, _) = hashing_bound(&probs(p0, 0.0, 1.0 - p0, 0.0)).unwrap();
            assert_eq!(raw, 1.0 - binary_entropy(p0).unwrap());
        }
    }

    #[test]
    fn cerf_examples() {
        assert_eq!(cerf_indicator(&probs(1.0, 0.0, 0.0, 0.0)), 0.0);
        assert_eq!(cerf_indicator(&probs(0.5, 0.0, 0.5, 0.0)), 0.5);
        assert_eq!(cerf_indicator(&probs(0.25, 0.25, 0.25, 0.25)), 1.5);
        let r = CapacityReport::new(&probs_lambda(&probs(0.5, 0.0, 0.5, 0.0))).unwrap();
        assert!(r.cerf_zero_capacity);
    }

    #[test]
    fn entanglement_breaking_examples() {
        assert!(!is_entanglement_breaking(&PauliLambda::IDENTITY).unwrap());
        assert!(is_entanglement_breaking(&lam(0.0, 0.0, 0.0)).unwrap());
        // Depolarizing (t, t, t) breaks entanglement exactly for t ≤ 1/3.
        assert!(is_entanglement_breaking(&lam(0.333, 0.333, 0.333)).unwrap());
        assert!(!is_entanglement_breaking(&lam(0.334, 0.334, 0.334)).unwrap());
        let min = choi_pt_min_eigenvalue(&lam(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)).unwrap();
        assert!(min.abs() < 1e-12);
    }

    #[test]
    fn choi_matrix_is_a_state() {
        let p = lambda_probs(&lam(0.5, 0.2, 0.4)).unwrap();
        let c = choi_matrix(&p);
        let tr: f64 = (0..4).map(|i| c[(i, i)].re).sum();
        assert!((tr - 1.0).abs() < 1e-15);
        assert!(c.symmetric_eigenvalues().iter().all(|&e| e > -1e-14));
    }

    #[test]
    fn eq7_examples() {
        let r = eq7_check(1.0).unwrap();
        assert!(r.holds && r.cerf_composite == 0.5);
        let r = eq7_check(0.0).unwrap();
        assert!(r.holds && (r.cerf_composite - 1.5).abs() < 1e-15);
        for i in 0..=10 {
            assert!(eq7_check(i as f64 / 10.0).unwrap().holds);
        }
        assert!(eq7_check(1.5).is_err());
    }

    #[test]
    fn boost_threshold_requires_zero_rate_at_rest() {
        let r = boost_threshold(1.0 / 0.3, &QuadratureConfig::SWEEP);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    fn simplex() -> impl Strategy<Value = PauliProbs> {
        (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0).prop_map(|(a, b, c, d)| {
            let s = a + b + c + d + 1e-12;
            PauliProbs { p0: a / s, p1: b / s, p2: c / s, p3: d / s }
        })
    }

    proptest! {
        #[test]
        fn bound_ordering(p in simplex()) {
            let l = probs_lambda(&p);
            let r = CapacityReport::new(&l).unwrap();
            prop_assert!(r.hashing <= r.classical + 1e-12);
            prop_assert!((0.0..=1.0).contains(&r.classical));
            prop_assert!(r.cerf >= 0.0);
            if r.entanglement_breaking {
                prop_assert!(r.hashing == 0.0);
            }
        }

        #[test]
        fn classical_depends_on_max_modulus(p in simplex(), perm in 0usize..6, flip in 0usize..8) {
            let l = probs_lambda(&p).as_array();
            let idx = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]][perm];
            let sign = |k: usize| if flip >> k & 1 == 1 { -1.0 } else { 1.0 };
            let q = PauliLambda { l1: sign(0) * l[idx[0]], l2: sign(1) * l[idx[1]], l3: sign(2) * l[idx[2]] };
            let a = classical_capacity(&probs_lambda(&p));
            prop_assert!((a - classical_capacity(&q)).abs() < 1e-14);
        }

        #[test]
        fn hashing_symmetric_in_errors(p in simplex()) {
            let q = PauliProbs { p0: p.p0, p1: p.p3, p2: p.p1, p3: p.p2 };
            let a = hashing_bound(&p).unwrap().0;
            let b = hashing_bound(&q).unwrap().0;
            prop_assert!((a - b).abs() < 1e-14);
        }
    }
}

#[cfg(test)]
mod threshold_tests {
    use super::*;

    const CFG: QuadratureConfig = QuadratureConfig::SWEEP;

    #[test]
    fn boost_thresholds() {
        let z = boost_threshold(20.0, &CFG).unwrap();
        assert!((z + 0.052_379_4).abs() < 2e-4, "{z}");
        let z = boost_threshold(200.0, &CFG).unwrap();
        assert!((z + 0.148_412_6).abs() < 2e-4, "{z}");
    }

    #[test]
    fn gamma_thresholds() {
        let x = gamma_threshold(0.0, &CFG).unwrap();
        assert!((x / 0.054_813_389_49 - 1.0).abs() < 2e-4, "{x}");
        let x = gamma_threshold(-0.05, &CFG).unwrap();
        assert!((x / 0.026_385_6 - 1.0).abs() < 2e-4, "{x}");
        assert!(x < 0.054_813);
        // At ζ = −1 even 1/Γ = 10⁻⁴ is already outside the zero-capacity
        // region, so the crossing lies below the scan range.
        assert!(matches!(gamma_threshold(-1.0, &CFG), Err(Error::NotFound(_))));
        assert!(cerf_at(GAMMA_SCAN_RANGE.0, -1.0, &CFG).unwrap() < CERF_ZERO_CAPACITY);
    }
}
