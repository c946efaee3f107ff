use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Tolerance on channel eigenvalues and probabilities.
pub const CHANNEL_TOLERANCE: f64 = 1e-9;

/// Pauli-basis eigenvalues `(λ₁, λ₂, λ₃)`: the channel scales the Bloch
/// components `(x, y, z)` by `(λ₁, λ₂, λ₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliLambda {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
}

/// Probabilities of applying `I, X, Y, Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliProbs {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl PauliLambda {
    pub const IDENTITY: PauliLambda = PauliLambda {
        l1: 1.0,
        l2: 1.0,
        l3: 1.0,
    };

    /// Validated constructor: each `|λᵢ| ≤ 1` and the induced probabilities
    /// lie in the simplex, both within [`CHANNEL_TOLERANCE`].
    pub fn new(l1: f64, l2: f64, l3: f64) -> Result<Self> {
        let lam = PauliLambda { l1, l2, l3 };
        lam.validate()?;
        Ok(lam)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, l) in self.as_array().iter().enumerate() {
            ensure_finite("channel eigenvalue", *l)?;
            if l.abs() > 1.0 + CHANNEL_TOLERANCE {
                return Err(Error::NotAChannel(format!("λ{} = {l} lies outside [−1, 1]", i + 1)));
            }
        }
        lambda_probs(self).map(|_| ())
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.l1, self.l2, self.l3]
    }

    pub fn max_abs(&self) -> f64 {
        self.l1.abs().max(self.l2.abs()).max(self.l3.abs())
    }

    /// Depolarizing channel `(c, c, c)`.
    pub fn depolarizing(c: f64) -> Result<Self> {
        PauliLambda::new(c, c, c)
    }
}

impl PauliProbs {
    pub fn new(p0: f64, p1: f64, p2: f64, p3: f64) -> Result<Self> {
        let p = PauliProbs { p0, p1, p2, p3 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.as_array();
        for (i, p) in a.iter().enumerate() {
            ensure_finite("probability", *p)?;
            if *p < -CHANNEL_TOLERANCE {
                return Err(Error::NotAChannel(format!("p{i} = {p} is negative")));
            }
        }
        let total: f64 = a.iter().sum();
        if (total - 1.0).abs() > CHANNEL_TOLERANCE {
            return Err(Error::NotAChannel(format!("probabilities sum to {total}")));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.p0, self.p1, self.p2, self.p3]
    }
}

/// `p₀ = (1+λ₁+λ₂+λ₃)/4`, `p₁ = (1+λ₁−λ₂−λ₃)/4`, `p₂ = (1−λ₁+λ₂−λ₃)/4`,
/// `p₃ = (1−λ₁−λ₂+λ₃)/4`; components within tolerance below zero are
/// clamped to zero.
pub fn lambda_probs(lam: &PauliLambda) -> Result<PauliProbs> {
    let PauliLambda { l1, l2, l3 } = *lam;
    let raw = [
        (1.0 + l1 + l2 + l3) / 4.0,
        (1.0 + l1 - l2 - l3) / 4.0,
        (1.0 - l1 + l2 - l3) / 4.0,
        (1.0 - l1 - l2 + l3) / 4.0,
    ];
    for (i, p) in raw.iter().enumerate() {
        ensure_finite("probability", *p)?;
        if *p < -CHANNEL_TOLERANCE {
            return Err(Error::NotAChannel(format!(
                "λ = ({l1}, {l2}, {l3}) gives p{i} = {p}, the map is not completely positive"
            )));
        }
    }
    let c = raw.map(|p| p.max(0.0));
    Ok(PauliProbs {
        p0: c[0],
        p1: c[1],
        p2: c[2],
        p3: c[3],
    })
}

/// Inverse of [`lambda_probs`].
pub fn probs_lambda(p: &PauliProbs) -> PauliLambda {
    PauliLambda {
        l1: p.p0 + p.p1 - p.p2 - p.p3,
        l2: p.p0 - p.p1 + p.p2 - p.p3,
        l3: p.p0 - p.p1 - p.p2 + p.p3,
    }
}

/// Sequential application of two Pauli channels (order irrelevant).
pub fn compose(a: &PauliLambda, b: &PauliLambda) -> PauliLambda {
    PauliLambda {
        l1: a.l1 * b.l1,
        l2: a.l2 * b.l2,
        l3: a.l3 * b.l3,
    }
}

/// Input state in the output basis of the channel: Bloch vector
/// `(sin χ sin ξ, cos ξ, cos χ sin ξ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    pub chi: f64,
    pub xi: f64,
}

impl QubitState {
    pub fn new(chi: f64, xi: f64) -> Result<Self> {
        ensure_finite("chi", chi)?;
        ensure_finite("xi", xi)?;
        Ok(QubitState { chi, xi })
    }

    pub fn bloch(&self) -> [f64; 3] {
        let (sc, cc) = self.chi.sin_cos();
        let (sx, cx) = self.xi.sin_cos();
        [sc * sx, cx, cc * sx]
    }

    pub fn density(&self) -> DensityMatrix2 {
        apply_pauli(&PauliLambda::IDENTITY, self)
    }
}

/// A 2×2 density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2(pub Matrix2<Complex64>);

impl DensityMatrix2 {
    pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

    /// Validated constructor: Hermitian, unit trace, positive semidefinite.
    pub fn new(m: Matrix2<Complex64>) -> Result<Self> {
        let rho = DensityMatrix2(m);
        rho.validate()?;
        Ok(rho)
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.0;
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("density matrix has non-finite entries"));
        }
        let herm = (m - m.adjoint()).iter().fold(0.0_f64, |a, z| a.max(z.norm()));
        if herm > Self::HERMITIAN_TOLERANCE {
            return Err(Error::Integrity(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > CHANNEL_TOLERANCE {
            return Err(Error::Integrity(format!("density matrix trace is {tr}")));
        }
        let [lo, _] = self.eigenvalues();
        if lo < -CHANNEL_TOLERANCE {
            return Err(Error::Integrity(format!("density matrix eigenvalue {lo} is negative")));
        }
        Ok(())
    }

    pub fn trace(&self) -> f64 {
        self.0[(0, 0)].re + self.0[(1, 1)].re
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.0[(0, 0)].re;
        let d = self.0[(1, 1)].re;
        let b = 0.5 * (self.0[(0, 1)] + self.0[(1, 0)].conj());
        let mean = 0.5 * (a + d);
        let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [mean - r, mean + r]
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix2) -> f64 {
        (self.0 - other.0).iter().fold(0.0_f64, |a, z| a.max(z.re.abs()).max(z.im.abs()))
    }

    /// Bloch vector `(x, y, z)` with `ρ = (I + xX + yY + zZ)/2`.
    pub fn bloch(&self) -> [f64; 3] {
        let r01 = self.0[(0, 1)];
        [2.0 * r01.re, -2.0 * r01.im, self.0[(0, 0)].re - self.0[(1, 1)].re]
    }
}

/// Channel output `½[[1+λ₃z, λ₁x − iλ₂y], [λ₁x + iλ₂y, 1−λ₃z]]` for the
/// Bloch vector `(x, y, z)` of `state`.
pub fn apply_pauli(lam: &PauliLambda, state: &QubitState) -> DensityMatrix2 {
    let [x, y, z] = state.bloch();
    DensityMatrix2(Matrix2::new(
        Complex64::new(0.5 * (1.0 + lam.l3 * z), 0.0),
        Complex64::new(0.5 * lam.l1 * x, -0.5 * lam.l2 * y),
        Complex64::new(0.5 * lam.l1 * x, 0.5 * lam.l2 * y),
        Complex64::new(0.5 * (1.0 - lam.l3 * z), 0.0),
    ))
}

pub(crate) fn pauli_matrices() -> [Matrix2<Complex64>; 4] {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        Matrix2::new(l, o, o, l),
        Matrix2::new(o, l, l, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(l, o, o, -l),
    ]
}

/// Kraus form `Σ pᵢ σᵢ ρ σᵢ` of the channel applied to any 2×2 matrix.
pub fn apply_kraus(p: &PauliProbs, rho: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    pauli_matrices()
        .iter()
        .zip(p.as_array())
        .fold(Matrix2::zeros(), |acc, (s, w)| acc + s * rho * s * Complex64::new(w, 0.0))
}
