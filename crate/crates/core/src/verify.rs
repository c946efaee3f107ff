//! Self-verification suite behind `boostcap verify`.
//!
//! Every check reports a residual and the tolerance it is held to; a check
//! passes when `residual ≤ tolerance`. Checks that count violations use a
//! tolerance of zero.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{
    boost_threshold, eq7_check, gamma_threshold, CapacityReport, CERF_ZERO_CAPACITY,
};
use crate::channel::{
    apply_pauli, closed::check_pole_cancellation, identity_residuals, lambda12_series, lambda3_closed,
    lambda_numeric, rho_direct, series_cutoff, PauliLambda, QubitState,
};
use crate::error::Result;
use crate::lorentz::{
    boost_z, little_group, little_group_element, translation, z_boost_translation, FourVector,
};
use crate::quadrature::QuadratureConfig;
use crate::special::{ellip_e, ellip_k, erf, erfc, erfcx};
use crate::wavepacket::{normalization_closed_form, normalization_quadrature, rest_frame_trace, PacketFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyLevel {
    Fast,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub level: VerifyLevel,
    pub cfg: QuadratureConfig,
    /// Negative control: flips the sign of `λ₂` before the keystone check.
    pub inject_lambda2_sign_error: bool,
}

impl VerifyOptions {
    pub fn new(level: VerifyLevel) -> Self {
        VerifyOptions { level, cfg: QuadratureConfig::VERIFY, inject_lambda2_sign_error: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// `None` when the check could not be evaluated.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub level: VerifyLevel,
    pub checks: Vec<CheckResult>,
    pub failures: usize,
    pub passed: bool,
    pub seconds: f64,
}

impl VerifyReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Outcome {
    residual: f64,
    tolerance: f64,
    detail: String,
}

fn outcome(residual: f64, tolerance: f64, detail: impl Into<String>) -> Outcome {
    Outcome { residual, tolerance, detail: detail.into() }
}

fn run(name: &str, f: impl FnOnce() -> Result<Outcome>) -> CheckResult {
    let t = Instant::now();
    let r = f();
    let seconds = t.elapsed().as_secs_f64();
    match r {
        Ok(o) => CheckResult {
            name: name.into(),
            residual: Some(o.residual).filter(|r| r.is_finite()),
            tolerance: o.tolerance,
            passed: o.residual.is_finite() && o.residual <= o.tolerance,
            detail: o.detail,
            seconds,
        },
        Err(e) => CheckResult {
            name: name.into(),
            residual: None,
            tolerance: 0.0,
            passed: false,
            detail: e.to_string(),
            seconds,
        },
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

/// Rapidity and spread grid of the channel-identification checks.
pub fn channel_grid(level: VerifyLevel) -> Vec<(f64, f64)> {
    let (zetas, gammas): (&[f64], &[f64]) = match level {
        VerifyLevel::Full => (&[-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0], &[0.1, 0.5, 1.0, 5.0]),
        VerifyLevel::Fast => (&[-1.0, 0.0, 1.0], &[0.5, 5.0]),
    };
    zetas.iter().flat_map(|&z| gammas.iter().map(move |&g| (z, g))).collect()
}

/// Deterministic pseudo-random input states.
pub fn random_states(n: usize, seed: u64) -> Vec<QubitState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| QubitState { chi: rng.gen_range(0.0..2.0 * PI), xi: rng.gen_range(0.0..PI) })
        .collect()
}

fn pauli_identification(opts: &VerifyOptions) -> Result<Outcome> {
    let states = random_states(if opts.level == VerifyLevel::Full { 8 } else { 2 }, 0x5eed);
    let grid = channel_grid(opts.level);
    let worst = grid
        .par_iter()
        .map(|&(z, g)| -> Result<f64> {
            let frame = PacketFrame::new(g, z)?;
            let mut lam = lambda_numeric(&frame, &opts.cfg)?;
            if opts.inject_lambda2_sign_error {
                lam.l2 = -lam.l2;
            }
            let mut worst: f64 = 0.0;
            for s in &states {
                let direct = rho_direct(s, &frame, &opts.cfg)?;
                worst = worst.max(direct.max_abs_diff(&apply_pauli(&lam, s)));
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(outcome(
        max_of(worst),
        1e-7,
        format!("{} frames × {} states", grid.len(), states.len()),
    ))
}

fn channel_identities(opts: &VerifyOptions) -> Result<(Outcome, Outcome)> {
    let grid = channel_grid(opts.level);
    let r = grid
        .par_iter()
        .map(|&(z, g)| identity_residuals(&PacketFrame::new(g, z)?, &opts.cfg))
        .collect::<Result<Vec<_>>>()?;
    let detail = format!("{} frames", grid.len());
    Ok((
        outcome(max_of(r.iter().map(|x| x.0)), 1e-10, detail.clone()),
        outcome(max_of(r.iter().map(|x| x.1)), 1e-8, detail),
    ))
}

fn normalization_invariance(opts: &VerifyOptions) -> Result<Outcome> {
    let n = if opts.level == VerifyLevel::Full { 9 } else { 5 };
    let cases: Vec<(f64, f64)> = [0.2, 1.0, 5.0]
        .iter()
        .flat_map(|&g| linspace(-2.0, 2.0, n).into_iter().map(move |z| (g, z)))
        .collect();
    let r = cases
        .par_iter()
        .map(|&(g, z)| -> Result<f64> {
            let at_rest = normalization_quadrature(&PacketFrame::new(g, 0.0)?, &opts.cfg)?;
            let moving = normalization_quadrature(&PacketFrame::new(g, z)?, &opts.cfg)?;
            Ok(rel(moving, at_rest).max(rel(moving, normalization_closed_form(g))))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(outcome(max_of(r), 1e-8, format!("{} (Γ, ζ) pairs, ζ ∈ [−2, 2]", cases.len())))
}

fn rest_frame_agreement(opts: &VerifyOptions) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for g in [0.1, 0.5, 1.0, 2.0, 5.0, 20.0] {
        let n = normalization_quadrature(&PacketFrame::new(g, 0.0)?, &opts.cfg)?;
        worst = worst.max(rel(2.0 * PI * rest_frame_trace(g, &opts.cfg)?, n));
    }
    Ok(outcome(worst, 1e-8, "2π × s-integral against ∫∫K, Γ ∈ [0.1, 20]"))
}

fn lambda3_closed_form(opts: &VerifyOptions) -> Result<Outcome> {
    let n = if opts.level == VerifyLevel::Full { 10 } else { 4 };
    let r = linspace(0.5, 5.0, n)
        .par_iter()
        .map(|&g| -> Result<f64> {
            let numeric = lambda_numeric(&PacketFrame::new(g, 0.0)?, &opts.cfg)?.l3;
            Ok(rel(lambda3_closed(g)?, numeric))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(outcome(max_of(r), 1e-6, format!("{n} spreads in [0.5, 5] at ζ = 0")))
}

fn series_error(gamma: f64, n: u32, exact: &PauliLambda, cfg: &QuadratureConfig) -> Result<f64> {
    let (l1, l2) = lambda12_series(gamma, n, series_cutoff(gamma, n), cfg)?;
    Ok(rel(l1, exact.l1).max(rel(l2, exact.l2)))
}

fn series_accuracy(opts: &VerifyOptions) -> Result<Outcome> {
    let exact = lambda_numeric(&PacketFrame::new(5.0, 0.0)?, &opts.cfg)?;
    let err = series_error(5.0, 6, &exact, &opts.cfg)?;
    Ok(outcome(err, 1e-4, "Γ = 5, six correction orders, tail-bound cutoff"))
}

fn series_monotone(opts: &VerifyOptions) -> Result<Outcome> {
    let mut violations = 0;
    let mut trace = Vec::new();
    for g in [5.0, 10.0] {
        let exact = lambda_numeric(&PacketFrame::new(g, 0.0)?, &opts.cfg)?;
        let errs = (0..=6)
            .map(|n| series_error(g, n, &exact, &opts.cfg))
            .collect::<Result<Vec<_>>>()?;
        violations += errs.windows(2).filter(|w| w[1] >= w[0]).count();
        trace.push(format!(
            "Γ={g}: [{}]",
            errs.iter().map(|e| format!("{e:.1e}")).collect::<Vec<_>>().join(", ")
        ));
    }
    Ok(outcome(violations as f64, 0.0, trace.join("; ")))
}

fn little_group_theorem(opts: &VerifyOptions) -> Result<Outcome> {
    let n = if opts.level == VerifyLevel::Full { 100 } else { 25 };
    let mut rng = ChaCha8Rng::seed_from_u64(0x11771e);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let zeta = rng.gen_range(-3.0..3.0);
        let theta = rng.gen_range(1e-3..PI - 1e-3);
        let phi = rng.gen_range(0.0..2.0 * PI);
        let omega = rng.gen_range(0.1..10.0);
        let lambda = boost_z(zeta)?;
        let p = FourVector::photon(omega, theta, phi);
        let w = little_group_element(&lambda, &p)?;
        let d = little_group(&lambda, &p)?;
        let a1 = z_boost_translation(zeta, omega, theta);
        let scale = a1.abs().max(1.0);
        let form = w.max_abs_diff(&translation(a1, 0.0)) / (scale * scale);
        worst = worst
            .max(d.wigner_angle.abs())
            .max(d.a2.abs())
            .max((d.a1 - a1).abs() / scale)
            .max(form);
    }
    Ok(outcome(worst, 1e-10, format!("{n} random boosts and momenta")))
}

fn cerf_count(rows: &[CapacityReport]) -> usize {
    rows.windows(2)
        .filter(|w| (w[0].cerf >= CERF_ZERO_CAPACITY) != (w[1].cerf >= CERF_ZERO_CAPACITY))
        .count()
}

fn reports(frames: &[(f64, f64)], cfg: &QuadratureConfig) -> Result<Vec<CapacityReport>> {
    frames
        .par_iter()
        .map(|&(g, z)| CapacityReport::new(&lambda_numeric(&PacketFrame::new(g, z)?, cfg)?))
        .collect()
}

/// `C` rises with `1/Γ`, `0 ≤ Q↑ ≤ C ≤ 1`, one Cerf crossing.
fn fig2_shape(opts: &VerifyOptions) -> Result<Outcome> {
    let n = if opts.level == VerifyLevel::Full { 120 } else { 30 };
    let xs = linspace(0.001, 1.0, n);
    let frames: Vec<_> = xs.iter().map(|&x| (1.0 / x, 0.0)).collect();
    let r = reports(&frames, &opts.cfg)?;
    let monotone = r.windows(2).filter(|w| w[1].classical < w[0].classical - 1e-12).count();
    let ordering = r
        .iter()
        .filter(|c| !(0.0 <= c.hashing && c.hashing <= c.classical && c.classical <= 1.0))
        .count();
    let crossings = cerf_count(&r);
    let x = gamma_threshold(0.0, &opts.cfg)?;
    let bracket = usize::from(!(0.05 < x && x < 0.3));
    Ok(outcome(
        (monotone + ordering + bracket + crossings.abs_diff(1)) as f64,
        0.0,
        format!(
            "{n} points; C decreases {monotone}×, ordering violated {ordering}×, \
             {crossings} Cerf crossing(s), 1/Γ* = {x:.8}"
        ),
    ))
}

fn gamma_threshold_golden(opts: &VerifyOptions) -> Result<Outcome> {
    let x = gamma_threshold(0.0, &opts.cfg)?;
    Ok(outcome(rel(x, 0.054_813_389_49), 2e-4, format!("1/Γ* = {x:.10} at ζ = 0")))
}

fn hashing_at(gamma: f64, zeta: f64, cfg: &QuadratureConfig) -> Result<CapacityReport> {
    CapacityReport::new(&lambda_numeric(&PacketFrame::new(gamma, zeta)?, cfg)?)
}

/// Boosting towards the source lifts the hashing bound above zero.
fn fig3_boost(opts: &VerifyOptions) -> Result<Outcome> {
    let cfg = &opts.cfg;
    let mut violations = 0;
    let mut found = Vec::new();
    for inv in [0.005, 0.05] {
        let g = 1.0 / inv;
        if hashing_at(g, 0.0, cfg)?.hashing != 0.0 {
            violations += 1;
        }
        let z = boost_threshold(g, cfg)?;
        if !(z < 0.0 && hashing_at(g, z - 0.01, cfg)?.hashing > 0.0) {
            violations += 1;
        }
        found.push(z);
    }
    if found[0] >= found[1] {
        violations += 1;
    }
    let zs = linspace(-3.0, 0.0, if opts.level == VerifyLevel::Full { 13 } else { 5 });
    let frames: Vec<_> = zs.iter().map(|&z| (1.0 / 0.3, z)).collect();
    let r = reports(&frames, cfg)?;
    violations += r.windows(2).filter(|w| w[0].hashing <= w[1].hashing).count();
    let mut far = f64::INFINITY;
    for inv in [0.005, 0.05, 0.3] {
        let c = hashing_at(1.0 / inv, -6.0, cfg)?;
        far = far.min(c.classical).min(c.hashing);
    }
    if far <= 0.99 {
        violations += 1;
    }
    Ok(outcome(
        violations as f64,
        0.0,
        format!(
            "ζ* = {:.5} (1/Γ = 0.005), {:.5} (1/Γ = 0.05); min(C, Q↑) at ζ = −6: {far:.6}",
            found[0], found[1]
        ),
    ))
}

fn eq7(_: &VerifyOptions) -> Result<Outcome> {
    let mut violations = 0;
    let mut min_cerf = f64::INFINITY;
    for i in 0..=10 {
        let r = eq7_check(i as f64 / 10.0)?;
        min_cerf = min_cerf.min(r.cerf_composite);
        if !r.holds {
            violations += 1;
        }
    }
    Ok(outcome(violations as f64, 0.0, format!("smallest composite indicator {min_cerf}")))
}

/// Entanglement breaking only deep inside the Cerf zero-capacity region.
fn entanglement_breaking(opts: &VerifyOptions) -> Result<Outcome> {
    let n = if opts.level == VerifyLevel::Full { 40 } else { 15 };
    let xs: Vec<f64> = linspace((1e-3f64).ln(), 0.0, n).into_iter().map(f64::exp).collect();
    let frames: Vec<_> = xs.iter().map(|&x| (1.0 / x, 0.0)).collect();
    let r = reports(&frames, &opts.cfg)?;
    let outside = r.iter().filter(|c| c.entanglement_breaking && !c.cerf_zero_capacity).count();
    let last_eb = xs.iter().zip(&r).rfind(|(_, c)| c.entanglement_breaking).map(|(x, _)| *x);
    let first_open = xs.iter().zip(&r).find(|(_, c)| !c.cerf_zero_capacity).map(|(x, _)| *x);
    let earlier = match (last_eb, first_open) {
        (Some(a), Some(b)) => a < b,
        _ => false,
    };
    Ok(outcome(
        (outside + usize::from(!earlier)) as f64,
        0.0,
        format!("last EB at 1/Γ = {last_eb:?}, first positive-capacity candidate at {first_open:?}"),
    ))
}

fn special_functions(_: &VerifyOptions) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    worst = worst.max((erf(1.0) - 0.842_700_792_949_714_9).abs());
    worst = worst.max((erfc(1.0) - 0.157_299_207_050_285_13).abs());
    worst = worst.max((erfcx(1.0) - 0.427_583_576_155_807).abs());
    for i in 1..20 {
        let x = 0.3 * i as f64;
        worst = worst.max((erf(x) + erfc(x) - 1.0).abs());
    }
    // Legendre's relation E K' + E' K − K K' = π/2.
    for i in 1..10 {
        let m = i as f64 / 10.0;
        let (k, e, k1, e1) = (ellip_k(m), ellip_e(m), ellip_k(1.0 - m), ellip_e(1.0 - m));
        worst = worst.max((e * k1 + e1 * k - k * k1 - FRAC_PI_2).abs());
    }
    worst = worst.max(check_pole_cancellation()?);
    Ok(outcome(worst, 1e-10, "erf family, Legendre relation, pole cancellation"))
}

/// Runs every check of the requested level.
pub fn verify(opts: &VerifyOptions) -> VerifyReport {
    let t = Instant::now();
    let mut checks = vec![
        run("pauli_identification", || pauli_identification(opts)),
    ];
    match channel_identities(opts) {
        Ok((a, b)) => {
            checks.push(run("channel_identity_j1", || Ok(a)));
            checks.push(run("channel_identity_j2", || Ok(b)));
        }
        Err(e) => {
            let e2 = e.clone();
            checks.push(run("channel_identity_j1", || Err(e)));
            checks.push(run("channel_identity_j2", || Err(e2)));
        }
    }
    checks.push(run("normalization_invariance", || normalization_invariance(opts)));
    checks.push(run("rest_frame_trace", || rest_frame_agreement(opts)));
    checks.push(run("lambda3_closed_form", || lambda3_closed_form(opts)));
    checks.push(run("series_accuracy", || series_accuracy(opts)));
    checks.push(run("series_monotone", || series_monotone(opts)));
    checks.push(run("little_group", || little_group_theorem(opts)));
    checks.push(run("capacity_vs_spread", || fig2_shape(opts)));
    checks.push(run("gamma_threshold_golden", || gamma_threshold_golden(opts)));
    checks.push(run("boost_amplification", || fig3_boost(opts)));
    checks.push(run("depolarized_one_pauli", || eq7(opts)));
    checks.push(run("entanglement_breaking", || entanglement_breaking(opts)));
    checks.push(run("special_functions", || special_functions(opts)));
    let failures = checks.iter().filter(|c| !c.passed).count();
    VerifyReport {
        level: opts.level,
        checks,
        failures,
        passed: failures == 0,
        seconds: t.elapsed().as_secs_f64(),
    }
}
