//! Globally adaptive Gauss–Kronrod (10/21 point) integration of
//! vector-valued integrands.
//!
//! All components share one subdivision: each step bisects the interval
//! with the largest error estimate, where an interval's error is the
//! largest per-component estimate. This lets a single pass integrate the
//! normalization and the three channel numerators together.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and work limit for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureConfig {
    /// Settings used by the verification suites.
    pub const VERIFY: QuadratureConfig = QuadratureConfig {
        abs_tol: 1e-15,
        rel_tol: 1e-10,
        max_subdivisions: 2000,
    };

    /// Settings used by parameter sweeps.
    pub const SWEEP: QuadratureConfig = QuadratureConfig {
        abs_tol: 1e-13,
        rel_tol: 1e-8,
        max_subdivisions: 2000,
    };

    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let cfg = QuadratureConfig {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::domain(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::domain(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::domain("max_subdivisions must be at least 1"));
        }
        Ok(())
    }

    /// A tighter configuration for integrals nested inside another
    /// integrand. Nested integrands here are bounded by about one, so the
    /// absolute floor follows the outer relative tolerance; a purely relative
    /// target would be unreachable when the inner integral cancels.
    pub fn nested(&self) -> QuadratureConfig {
        QuadratureConfig {
            abs_tol: (self.abs_tol * 1e-2).max(self.rel_tol * 1e-3),
            rel_tol: (self.rel_tol * 1e-2).max(1e-14),
            max_subdivisions: self.max_subdivisions,
        }
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig::VERIFY
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<const N: usize> {
    pub value: [f64; N],
    /// Sum of the per-interval error estimates (maximum over components).
    pub error: f64,
    pub subdivisions: usize,
}

// Kronrod abscissae (x ≥ 0, descending); even indices are new Kronrod
// points, odd indices coincide with the 10-point Gauss abscissae.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_460,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_958_109_831,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for the odd-indexed Kronrod abscissae.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

#[derive(Debug, Clone, Copy)]
struct Segment<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: f64,
}

impl<const N: usize> PartialEq for Segment<N> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<const N: usize> Eq for Segment<N> {}

impl<const N: usize> PartialOrd for Segment<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<const N: usize> Ord for Segment<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        // Ties broken by position so the refinement order is deterministic.
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn kronrod21<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Result<Segment<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv = [[0.0; N]; 21];
    fv[0] = f(center);
    for j in 0..10 {
        let dx = half * XGK[j];
        fv[1 + 2 * j] = f(center - dx);
        fv[2 + 2 * j] = f(center + dx);
    }
    for row in &fv {
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "integrand is not finite on [{a}, {b}]"
            )));
        }
    }

    let mut value = [0.0; N];
    let mut error = 0.0_f64;
    for c in 0..N {
        let fc = fv[0][c];
        let mut res_k = fc * WGK[10];
        let mut res_g = 0.0;
        let mut res_abs = (fc * WGK[10]).abs();
        for j in 0..10 {
            let sum = fv[1 + 2 * j][c] + fv[2 + 2 * j][c];
            res_k += WGK[j] * sum;
            res_abs += WGK[j] * (fv[1 + 2 * j][c].abs() + fv[2 + 2 * j][c].abs());
            if j % 2 == 1 {
                res_g += WG[j / 2] * sum;
            }
        }
        let mean = 0.5 * res_k;
        let mut res_asc = WGK[10] * (fc - mean).abs();
        for j in 0..10 {
            res_asc += WGK[j] * ((fv[1 + 2 * j][c] - mean).abs() + (fv[2 + 2 * j][c] - mean).abs());
        }
        let scale = half.abs();
        value[c] = res_k * half;
        let err = rescale_error((res_k - res_g) * half, res_abs * scale, res_asc * scale);
        error = error.max(err);
    }
    Ok(Segment { a, b, value, error })
}

/// Integrates a vector-valued `f` over `[breaks[0], breaks[last]]`,
/// starting from the subintervals delimited by `breaks`.
///
/// Converges when the summed error estimate is below
/// `max(abs_tol, rel_tol · max_i |I_i|)`.
pub fn integrate<const N: usize, F>(
    mut f: F,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Integral<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    cfg.validate()?;
    if breaks.len() < 2 {
        return Err(Error::domain("integration needs at least two breakpoints"));
    }
    if breaks.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("integration limits must be finite"));
    }
    if breaks.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("breakpoints must be non-decreasing"));
    }

    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment<N>> = Vec::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod21(&mut f, w[0], w[1])?);
        }
    }

    let mut subdivisions = 0;
    loop {
        let mut total = [0.0; N];
        let mut error = 0.0;
        for s in heap.iter().chain(frozen.iter()) {
            for (t, v) in total.iter_mut().zip(s.value.iter()) {
                *t += v;
            }
            error += s.error;
        }
        let scale = total.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let target = cfg.abs_tol.max(cfg.rel_tol * scale);
        if error <= target {
            return Ok(Integral {
                value: total,
                error,
                subdivisions,
            });
        }

        let worst = match heap.pop() {
            Some(s) => s,
            None => {
                return Err(Error::Convergence {
                    estimate: total.to_vec(),
                    error_bound: error,
                    subdivisions,
                })
            }
        };
        let mid = 0.5 * (worst.a + worst.b);
        if subdivisions >= cfg.max_subdivisions {
            heap.push(worst);
            return Err(Error::Convergence {
                estimate: total.to_vec(),
                error_bound: error,
                subdivisions,
            });
        }
        if !(mid > worst.a && mid < worst.b) {
            // Interval at floating-point resolution; its estimate is final.
            frozen.push(worst);
            continue;
        }
        subdivisions += 1;
        heap.push(kronrod21(&mut f, worst.a, mid)?);
        heap.push(kronrod21(&mut f, mid, worst.b)?);
    }
}

/// Scalar convenience wrapper over [`integrate`]; returns `(value, error)`.
pub fn integrate_scalar<F>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let r = integrate(|x| [f(x)], &[a, b], cfg)?;
    Ok((r.value[0], r.error))
}
