use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use boostcap::capacity::{boost_threshold, gamma_threshold, CapacityReport};
use boostcap::channel::{lambda_numeric_with, lambda_probs, PhiMethod};
use boostcap::config::QuadratureOverrides;
use boostcap::lorentz::{boost_z, little_group, z_boost_translation, FourVector};
use boostcap::quadrature::QuadratureConfig;
use boostcap::sweep::{
    render_svg, sweep, to_json, write_csv, Column, RunManifest, SweepAxis, SweepSpec,
};
use boostcap::verify::{verify, VerifyLevel, VerifyOptions};
use boostcap::wavepacket::PacketFrame;
use boostcap::Error;

const EXIT_INVARIANT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;

/// Pauli channels of boosted photon wave packets and their capacity bounds.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(flatten)]
    quad: QuadArgs,

    /// Worker threads for grid evaluations (default: machine parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct QuadArgs {
    /// Key-value file with quadrature tolerances (overrides $BOOSTCAP_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    /// Interval budget per adaptive integral.
    #[arg(long, global = true)]
    max_subdivisions: Option<usize>,
}

impl QuadArgs {
    fn resolve(&self, base: QuadratureConfig) -> Result<QuadratureConfig, Error> {
        let file = match &self.config {
            Some(p) => QuadratureOverrides::from_file(p)?,
            None => QuadratureOverrides::from_env()?,
        };
        let flags = QuadratureOverrides {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_subdivisions: self.max_subdivisions,
        };
        file.merge(flags).apply(base)
    }
}

#[derive(Args, Clone, Copy)]
#[group(required = true, multiple = false)]
struct SpreadArg {
    /// Wave packet spread Γ.
    #[arg(long)]
    gamma: Option<f64>,
    /// Inverse spread 1/Γ.
    #[arg(long)]
    inv_gamma: Option<f64>,
}

impl SpreadArg {
    fn gamma(&self) -> Result<f64, Error> {
        let g = match (self.gamma, self.inv_gamma) {
            (Some(g), _) => g,
            (_, Some(x)) => 1.0 / x,
            _ => unreachable!("clap requires one of the two"),
        };
        if g.is_finite() && g > 0.0 {
            Ok(g)
        } else {
            Err(Error::Domain(format!("spread must be positive and finite, got Γ = {g}")))
        }
    }
}

#[derive(Args, Clone, Copy)]
#[group(multiple = false)]
struct BoostArg {
    /// Rapidity ζ (default 0).
    #[arg(long, allow_hyphen_values = true)]
    zeta: Option<f64>,
    /// Relative velocity v in (−1, 1), converted to ζ = artanh v.
    #[arg(long, allow_hyphen_values = true)]
    velocity: Option<f64>,
}

impl BoostArg {
    fn zeta(&self) -> Result<f64, Error> {
        match (self.zeta, self.velocity) {
            (Some(z), _) => Ok(z),
            (_, Some(v)) if v.abs() < 1.0 => Ok(v.atanh()),
            (_, Some(v)) => Err(Error::Domain(format!("velocity must lie in (−1, 1), got {v}"))),
            _ => Ok(0.0),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Adaptive,
    Elliptic,
}

#[derive(Args)]
struct OutputArgs {
    /// CSV destination (stdout when omitted); a sibling `.manifest.json` is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON destination (manifest plus rows).
    #[arg(long)]
    json: Option<PathBuf>,
    /// SVG plot destination.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Comma-separated output columns (default: all).
    #[arg(long, value_delimiter = ',')]
    columns: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Channel eigenvalues at one point.
    Lambdas {
        #[command(flatten)]
        spread: SpreadArg,
        #[command(flatten)]
        boost: BoostArg,
        #[arg(long, value_enum, default_value = "adaptive")]
        method: Method,
    },
    /// Capacity bounds at one point.
    Capacity {
        #[command(flatten)]
        spread: SpreadArg,
        #[command(flatten)]
        boost: BoostArg,
    },
    /// Sweep 1/Γ at fixed rapidity.
    SweepGamma {
        #[arg(long)]
        start: f64,
        #[arg(long)]
        stop: f64,
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        boost: BoostArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sweep ζ at fixed spread.
    SweepZeta {
        #[arg(long, allow_hyphen_values = true)]
        start: f64,
        #[arg(long, allow_hyphen_values = true)]
        stop: f64,
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        spread: SpreadArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rapidity at which the hashing bound turns positive.
    ThresholdBoost {
        #[command(flatten)]
        spread: SpreadArg,
    },
    /// Inverse spread at which the Cerf indicator crosses 1/2.
    ThresholdGamma {
        #[command(flatten)]
        boost: BoostArg,
    },
    /// Run the verification suite.
    Verify {
        #[arg(value_enum, default_value = "fast")]
        level: Level,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Negative control: flip the sign of λ₂ in the keystone check.
        #[arg(long, hide = true)]
        inject_lambda2_sign_error: bool,
    },
    /// Little-group decomposition for a z-boost acting on one photon momentum.
    WignerCheck {
        #[command(flatten)]
        boost: BoostArg,
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Fast,
    Full,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Convergence { .. } => EXIT_NONCONVERGENCE,
        Error::Domain(_) | Error::Range(_) | Error::Config(_) | Error::Precondition(_) => {
            EXIT_USAGE
        }
        Error::Singular(_)
        | Error::NotAChannel(_)
        | Error::Integrity(_)
        | Error::NotFound(_) => EXIT_INVARIANT,
    }
}

fn print_json(v: &serde_json::Value) -> Result<(), Error> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Error::Config(e.to_string()))?;
    println!("{s}");
    Ok(())
}

fn io_err(path: &Path) -> impl Fn(io::Error) -> Error + '_ {
    move |e| Error::Config(format!("cannot write {}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), Error> {
    std::fs::write(path, contents).map_err(io_err(path))
}

fn manifest_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn run_sweep(
    mut spec: SweepSpec,
    output: &OutputArgs,
    cfg: &QuadratureConfig,
    jobs: Option<usize>,
) -> Result<u8, Error> {
    if !output.columns.is_empty() {
        spec.outputs = output.columns.iter().map(|c| Column::from_name(c.trim())).collect::<Result<_, _>>()?;
    }
    spec.validate()?;
    let table = sweep(&spec, cfg, jobs)?;
    let mut manifest = RunManifest::new(&spec, cfg);
    manifest.data_files = [&output.out, &output.json, &output.svg]
        .into_iter()
        .flatten()
        .map(|p| p.display().to_string())
        .collect();
    match &output.out {
        Some(path) => {
            let f = File::create(path).map_err(io_err(path))?;
            write_csv(&table, BufWriter::new(f))?;
            let m = serde_json::to_vec_pretty(&manifest).map_err(|e| Error::Config(e.to_string()))?;
            write_file(&manifest_path(path), &m)?;
        }
        None => write_csv(&table, io::stdout().lock())?,
    }
    if let Some(path) = &output.json {
        let v = serde_json::to_vec_pretty(&to_json(&table, &manifest))
            .map_err(|e| Error::Config(e.to_string()))?;
        write_file(path, &v)?;
    }
    if let Some(path) = &output.svg {
        write_file(path, render_svg(&table, &manifest).as_bytes())?;
    }
    let failed = table.failures();
    if failed > 0 {
        eprintln!("{failed} of {} grid points failed; see the status column", table.rows.len());
        return Ok(EXIT_NONCONVERGENCE);
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Error> {
    let jobs = cli.jobs;
    if jobs == Some(0) {
        return Err(Error::Config("--jobs must be at least 1".into()));
    }
    if let Some(j) = jobs {
        // Parallel checks inside `verify` run on the global pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    match cli.command {
        Command::Lambdas { spread, boost, method } => {
            let cfg = cli.quad.resolve(QuadratureConfig::VERIFY)?;
            let frame = PacketFrame::new(spread.gamma()?, boost.zeta()?)?;
            let method = match method {
                Method::Adaptive => PhiMethod::Adaptive,
                Method::Elliptic => PhiMethod::Elliptic,
            };
            let est = lambda_numeric_with(&frame, &cfg, method)?;
            print_json(&json!({ "frame": frame, "estimate": est }))?;
        }
        Command::Capacity { spread, boost } => {
            let cfg = cli.quad.resolve(QuadratureConfig::VERIFY)?;
            let frame = PacketFrame::new(spread.gamma()?, boost.zeta()?)?;
            let est = lambda_numeric_with(&frame, &cfg, PhiMethod::Adaptive)?;
            let probs = lambda_probs(&est.lambda)?;
            let report = CapacityReport::new(&est.lambda)?;
            print_json(&json!({
                "frame": frame,
                "lambda": est.lambda,
                "probs": probs,
                "report": report,
            }))?;
        }
        Command::SweepGamma { start, stop, steps, boost, output } => {
            let cfg = cli.quad.resolve(QuadratureConfig::SWEEP)?;
            let spec = SweepSpec::new(SweepAxis::InvGamma, start, stop, steps, boost.zeta()?)?;
            return run_sweep(spec, &output, &cfg, jobs);
        }
        Command::SweepZeta { start, stop, steps, spread, output } => {
            let cfg = cli.quad.resolve(QuadratureConfig::SWEEP)?;
            let spec = SweepSpec::new(SweepAxis::Zeta, start, stop, steps, 1.0 / spread.gamma()?)?;
            return run_sweep(spec, &output, &cfg, jobs);
        }
        Command::ThresholdBoost { spread } => {
            let cfg = cli.quad.resolve(QuadratureConfig::SWEEP)?;
            let g = spread.gamma()?;
            let z = boost_threshold(g, &cfg)?;
            print_json(&json!({ "gamma": g, "zeta": z, "velocity": z.tanh() }))?;
        }
        Command::ThresholdGamma { boost } => {
            let cfg = cli.quad.resolve(QuadratureConfig::SWEEP)?;
            let z = boost.zeta()?;
            let x = gamma_threshold(z, &cfg)?;
            print_json(&json!({ "zeta": z, "inv_gamma": x, "gamma": 1.0 / x }))?;
        }
        Command::Verify { level, out, inject_lambda2_sign_error } => {
            let cfg = cli.quad.resolve(QuadratureConfig::VERIFY)?;
            let level = match level {
                Level::Fast => VerifyLevel::Fast,
                Level::Full => VerifyLevel::Full,
            };
            let report = verify(&VerifyOptions { level, cfg, inject_lambda2_sign_error });
            let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Config(e.to_string()))?;
            match &out {
                Some(path) => write_file(path, text.as_bytes())?,
                None => println!("{text}"),
            }
            for c in &report.checks {
                eprintln!(
                    "{} {:<26} residual {:<10} tol {:.0e}  {:.2}s  {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.residual.map_or("n/a".into(), |r| format!("{r:.2e}")),
                    c.tolerance,
                    c.seconds,
                    c.detail
                );
            }
            eprintln!("{} failure(s) in {:.1}s", report.failures, report.seconds);
            return Ok(if report.passed { 0 } else { EXIT_INVARIANT });
        }
        Command::WignerCheck { boost, theta, phi, omega } => {
            let zeta = boost.zeta()?;
            if !(0.0..=std::f64::consts::PI).contains(&theta) || omega.is_nan() || omega <= 0.0 {
                return Err(Error::Domain("need θ ∈ [0, π] and ω > 0".into()));
            }
            let d = little_group(&boost_z(zeta)?, &FourVector::photon(omega, theta, phi))?;
            let expected = z_boost_translation(zeta, omega, theta);
            let scale = expected.abs().max(1.0);
            let ok = d.wigner_angle.abs() < 1e-10
                && d.a2.abs() < 1e-10
                && (d.a1 - expected).abs() < 1e-10 * scale;
            print_json(&json!({
                "zeta": zeta,
                "theta": theta,
                "phi": phi,
                "omega": omega,
                "decomposition": d,
                "expected_a1": expected,
                "passed": ok,
            }))?;
            return Ok(if ok { 0 } else { EXIT_INVARIANT });
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    let _ = io::stdout().flush();
    ExitCode::from(code)
}
