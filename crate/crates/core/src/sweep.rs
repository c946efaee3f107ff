//! Parameter sweeps over `1/Γ` or `ζ`, with CSV, JSON and SVG output.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::capacity::{CapacityReport, CERF_ZERO_CAPACITY};
use crate::channel::{lambda_numeric, lambda_probs, PauliLambda, PauliProbs};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::wavepacket::PacketFrame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Sweep `1/Γ`; the fixed parameter is `ζ`.
    InvGamma,
    /// Sweep `ζ`; the fixed parameter is `1/Γ`.
    Zeta,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::InvGamma => "inv_gamma",
            SweepAxis::Zeta => "zeta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Column {
    Lambda1,
    Lambda2,
    Lambda3,
    P0,
    P1,
    P2,
    P3,
    Classical,
    HashingRaw,
    Hashing,
    Cerf,
    EntanglementBreaking,
}

impl Column {
    pub const ALL: [Column; 12] = [
        Column::Lambda1,
        Column::Lambda2,
        Column::Lambda3,
        Column::P0,
        Column::P1,
        Column::P2,
        Column::P3,
        Column::Classical,
        Column::HashingRaw,
        Column::Hashing,
        Column::Cerf,
        Column::EntanglementBreaking,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Column::Lambda1 => "lambda1",
            Column::Lambda2 => "lambda2",
            Column::Lambda3 => "lambda3",
            Column::P0 => "p0",
            Column::P1 => "p1",
            Column::P2 => "p2",
            Column::P3 => "p3",
            Column::Classical => "classical",
            Column::HashingRaw => "hashing_raw",
            Column::Hashing => "hashing",
            Column::Cerf => "cerf",
            Column::EntanglementBreaking => "entanglement_breaking",
        }
    }

    pub fn from_name(name: &str) -> Result<Column> {
        Column::ALL
            .into_iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::Config(format!("unknown output column {name:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    /// `ζ` for an `inv_gamma` sweep, `1/Γ` for a `zeta` sweep.
    pub fixed: f64,
    pub outputs: Vec<Column>,
}

impl SweepSpec {
    pub fn new(axis: SweepAxis, start: f64, stop: f64, steps: usize, fixed: f64) -> Result<Self> {
        let spec = SweepSpec { axis, start, stop, steps, fixed, outputs: Column::ALL.to_vec() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.fixed.is_finite()) {
            return Err(Error::Config("sweep bounds must be finite".into()));
        }
        if self.start >= self.stop {
            return Err(Error::Config(format!(
                "sweep needs start < stop, got {} and {}",
                self.start, self.stop
            )));
        }
        if self.steps < 2 {
            return Err(Error::Config(format!("sweep needs at least 2 steps, got {}", self.steps)));
        }
        if self.outputs.is_empty() {
            return Err(Error::Config("no output columns selected".into()));
        }
        let inv_gamma_ok = |x: f64| x > 0.0;
        let ok = match self.axis {
            SweepAxis::InvGamma => inv_gamma_ok(self.start),
            SweepAxis::Zeta => inv_gamma_ok(self.fixed),
        };
        if !ok {
            return Err(Error::Config("1/Γ must be positive".into()));
        }
        Ok(())
    }

    /// Evenly spaced grid including both end points.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / n as f64
                }
            })
            .collect()
    }

    pub fn frame(&self, x: f64) -> Result<PacketFrame> {
        match self.axis {
            SweepAxis::InvGamma => PacketFrame::new(1.0 / x, self.fixed),
            SweepAxis::Zeta => PacketFrame::new(1.0 / self.fixed, x),
        }
    }
}

/// Channel and bounds at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointValues {
    pub lambda: PauliLambda,
    pub probs: PauliProbs,
    pub report: CapacityReport,
}

impl PointValues {
    pub fn compute(frame: &PacketFrame, cfg: &QuadratureConfig) -> Result<Self> {
        let lambda = lambda_numeric(frame, cfg)?;
        Ok(PointValues {
            lambda,
            probs: lambda_probs(&lambda)?,
            report: CapacityReport::new(&lambda)?,
        })
    }

    fn number(&self, c: Column) -> Option<f64> {
        let r = &self.report;
        Some(match c {
            Column::Lambda1 => self.lambda.l1,
            Column::Lambda2 => self.lambda.l2,
            Column::Lambda3 => self.lambda.l3,
            Column::P0 => self.probs.p0,
            Column::P1 => self.probs.p1,
            Column::P2 => self.probs.p2,
            Column::P3 => self.probs.p3,
            Column::Classical => r.classical,
            Column::HashingRaw => r.hashing_raw,
            Column::Hashing => r.hashing,
            Column::Cerf => r.cerf,
            Column::EntanglementBreaking => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: f64,
    /// `Err` rows are flagged in every output format.
    pub values: std::result::Result<PointValues, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.values.is_err()).count()
    }

    /// Linear interpolation of the first sign change of `c⁰↓ − 1/2`.
    pub fn cerf_crossing(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter_map(|r| r.values.as_ref().ok().map(|v| (r.parameter, v.report.cerf)))
            .collect();
        pts.windows(2).find_map(|w| {
            let ((x0, c0), (x1, c1)) = (w[0], w[1]);
            let zero0 = c0 >= CERF_ZERO_CAPACITY;
            if zero0 == (c1 >= CERF_ZERO_CAPACITY) {
                return None;
            }
            Some(x0 + (x1 - x0) * (CERF_ZERO_CAPACITY - c0) / (c1 - c0))
        })
    }

    /// Number of sign changes of `c⁰↓ − 1/2` along the grid.
    pub fn cerf_crossings(&self) -> usize {
        let flags: Vec<bool> = self
            .rows
            .iter()
            .filter_map(|r| r.values.as_ref().ok().map(|v| v.report.cerf >= CERF_ZERO_CAPACITY))
            .collect();
        flags.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

/// Runs the sweep on a pool of `jobs` workers (machine parallelism when
/// `None`). Rows come back in grid order; failed points are kept as flagged
/// rows.
pub fn sweep(spec: &SweepSpec, cfg: &QuadratureConfig, jobs: Option<usize>) -> Result<SweepTable> {
    spec.validate()?;
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| {
        spec.grid()
            .into_par_iter()
            .map(|x| SweepRow {
                parameter: x,
                values: spec
                    .frame(x)
                    .and_then(|f| PointValues::compute(&f, cfg))
                    .map_err(|e| e.to_string()),
            })
            .collect()
    });
    Ok(SweepTable { spec: spec.clone(), rows })
}

/// Conventions a reader needs to interpret the numbers in a data file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignConventions {
    pub boost: String,
    pub rapidity: String,
    pub lambda2: String,
    pub normalization: String,
    pub bloch_vector: String,
    pub hashing_columns: String,
}

impl Default for SignConventions {
    fn default() -> Self {
        SignConventions {
            boost: "boost_z(ζ) maps (t, z) to (t cosh ζ − z sinh ζ, z cosh ζ − t sinh ζ); ζ < 0 is an approaching observer".into(),
            rapidity: "velocity v = tanh ζ, accepted only at the command line".into(),
            lambda2: "λ₂ = −(2/N) ∫K F₂ dθ, so sharp packets give the identity channel".into(),
            normalization: "N = 2π ∫K dθ = Γ π^{3/2} erfcx(1/Γ)".into(),
            bloch_vector: "state (χ, ξ) has Bloch vector (sin χ sin ξ, cos ξ, cos χ sin ξ)".into(),
            hashing_columns: "hashing_raw is 1 − H(p); hashing is max(0, hashing_raw)".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub quadrature: QuadratureConfig,
    pub sign_conventions: SignConventions,
    /// Seconds since the Unix epoch when the run started.
    pub timestamp: u64,
    pub spec: SweepSpec,
    pub data_files: Vec<String>,
}

impl RunManifest {
    pub fn new(spec: &SweepSpec, cfg: &QuadratureConfig) -> Self {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            quadrature: *cfg,
            sign_conventions: SignConventions::default(),
            timestamp,
            spec: spec.clone(),
            data_files: Vec::new(),
        }
    }
}

/// Shortest format carrying 17 significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with a header row; the `status` column is `ok` or the failure
/// message, and failed rows leave every numeric cell empty.
pub fn write_csv<W: Write>(table: &SweepTable, out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Config(format!("cannot write CSV: {e}"));
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![table.spec.axis.name()];
    header.extend(table.spec.outputs.iter().map(|c| c.name()));
    header.push("status");
    w.write_record(&header).map_err(io)?;
    for row in &table.rows {
        let mut rec = vec![format_number(row.parameter)];
        for &c in &table.spec.outputs {
            rec.push(match &row.values {
                Err(_) => String::new(),
                Ok(v) => match v.number(c) {
                    Some(x) => format_number(x),
                    None => v.report.entanglement_breaking.to_string(),
                },
            });
        }
        rec.push(match &row.values {
            Ok(_) => "ok".into(),
            Err(msg) => format!("failed: {msg}"),
        });
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Config(format!("cannot write CSV: {e}")))?;
    Ok(())
}

/// `{"manifest": …, "rows": [...]}`; failed rows carry `null` values and an
/// `error` string.
pub fn to_json(table: &SweepTable, manifest: &RunManifest) -> Value {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut m = Map::new();
            m.insert(table.spec.axis.name().into(), json!(row.parameter));
            for &c in &table.spec.outputs {
                let v = match &row.values {
                    Err(_) => Value::Null,
                    Ok(v) => match v.number(c) {
                        Some(x) => json!(x),
                        None => json!(v.report.entanglement_breaking),
                    },
                };
                m.insert(c.name().into(), v);
            }
            m.insert(
                "status".into(),
                match &row.values {
                    Ok(_) => json!("ok"),
                    Err(msg) => json!(format!("failed: {msg}")),
                },
            );
            Value::Object(m)
        })
        .collect();
    json!({ "manifest": manifest, "rows": rows })
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Static plot of `C` (dashed) and the clamped hashing bound against the
/// sweep axis, with the Cerf crossing drawn as a vertical rule.
pub fn render_svg(table: &SweepTable, manifest: &RunManifest) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const L: f64 = 60.0;
    const R: f64 = 20.0;
    const T: f64 = 20.0;
    const B: f64 = 50.0;
    let (x0, x1) = (table.spec.start, table.spec.stop);
    let sx = |x: f64| L + (x - x0) / (x1 - x0) * (W - L - R);
    let sy = |y: f64| T + (1.0 - y.clamp(0.0, 1.0)) * (H - T - B);
    let curve = |f: &dyn Fn(&PointValues) -> f64| {
        table
            .rows
            .iter()
            .filter_map(|r| r.values.as_ref().ok().map(|v| (r.parameter, f(v))))
            .map(|(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let manifest_json = serde_json::to_string(manifest).unwrap_or_default();
    let _ = writeln!(s, "<metadata>{}</metadata>", escape_xml(&manifest_json));
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{L}" y="{T}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - L - R,
        H - T - B
    );
    for i in 0..=5 {
        let fx = x0 + (x1 - x0) * i as f64 / 5.0;
        let fy = i as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(fx),
            H - B + 18.0,
            trim_tick(fx)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            L - 6.0,
            sy(fy) + 4.0,
            trim_tick(fy)
        );
    }
    let label = match table.spec.axis {
        SweepAxis::InvGamma => "1/Γ",
        SweepAxis::Zeta => "ζ",
    };
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
        0.5 * (L + W - R),
        H - 12.0
    );
    if let Some(xc) = table.cerf_crossing() {
        let _ = writeln!(
            s,
            r#"<line x1="{0:.2}" y1="{T}" x2="{0:.2}" y2="{1}" stroke="gray"/>"#,
            sx(xc),
            H - B
        );
    }
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="black" stroke-dasharray="6 4" points="{}"/>"#,
        curve(&|v| v.report.classical)
    );
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="black" points="{}"/>"#,
        curve(&|v| v.report.hashing)
    );
    s.push_str("</svg>\n");
    s
}

fn trim_tick(x: f64) -> String {
    let t = format!("{x:.3}");
    let t = t.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(spec: &SweepSpec, jobs: usize) -> SweepTable {
        sweep(spec, &QuadratureConfig::SWEEP, Some(jobs)).unwrap()
    }

    fn csv_bytes(t: &SweepTable) -> Vec<u8> {
        let mut buf = Vec::new();
        write_csv(t, &mut buf).unwrap();
        buf
    }

    #[test]
    fn spec_validation() {
        assert!(SweepSpec::new(SweepAxis::Zeta, 0.0, -1.0, 5, 0.1).is_err());
        assert!(SweepSpec::new(SweepAxis::Zeta, -1.0, 0.0, 1, 0.1).is_err());
        assert!(SweepSpec::new(SweepAxis::Zeta, -1.0, 0.0, 2, 0.0).is_err());
        assert!(SweepSpec::new(SweepAxis::InvGamma, 0.0, 1.0, 4, 0.0).is_err());
        let g = SweepSpec::new(SweepAxis::InvGamma, 0.1, 0.4, 4, 0.0).unwrap().grid();
        assert_eq!(g.len(), 4);
        assert_eq!((g[0], g[3]), (0.1, 0.4));
    }

    #[test]
    fn two_step_sweep() {
        let spec = SweepSpec::new(SweepAxis::InvGamma, 0.1, 0.3, 2, 0.0).unwrap();
        let t = table(&spec, 1);
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.failures(), 0);
        let text = String::from_utf8(csv_bytes(&t)).unwrap();
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers().unwrap().clone();
        assert_eq!(header.len(), 2 + Column::ALL.len());
        assert_eq!(&header[0], "inv_gamma");
        for rec in r.records() {
            let rec = rec.unwrap();
            assert_eq!(&rec[header.len() - 1], "ok");
            for cell in rec.iter().take(header.len() - 2) {
                assert!(cell.parse::<f64>().unwrap().is_finite());
            }
        }
    }

    #[test]
    fn output_independent_of_worker_count() {
        let spec = SweepSpec::new(SweepAxis::Zeta, -1.0, 0.5, 7, 0.05).unwrap();
        let a = csv_bytes(&table(&spec, 1));
        let b = csv_bytes(&table(&spec, 4));
        assert_eq!(a, b);
    }

    #[test]
    fn failed_points_are_flagged() {
        let mut spec = SweepSpec::new(SweepAxis::InvGamma, 0.1, 0.2, 3, 0.0).unwrap();
        spec.fixed = 800.0; // beyond the supported rapidity range
        let t = table(&spec, 2);
        assert_eq!(t.failures(), 3);
        let text = String::from_utf8(csv_bytes(&t)).unwrap();
        assert!(!text.contains("NaN") && !text.contains("inf"));
        assert_eq!(text.matches("failed:").count(), 3);
        let m = RunManifest::new(&spec, &QuadratureConfig::SWEEP);
        let j = to_json(&t, &m);
        assert!(j["rows"][0]["lambda1"].is_null());
    }

    #[test]
    fn json_and_svg() {
        let spec = SweepSpec::new(SweepAxis::InvGamma, 0.02, 0.2, 10, 0.0).unwrap();
        let t = table(&spec, 2);
        let m = RunManifest::new(&spec, &QuadratureConfig::SWEEP);
        let j = to_json(&t, &m);
        assert_eq!(j["rows"].as_array().unwrap().len(), 10);
        assert_eq!(j["manifest"]["spec"]["axis"], "inv_gamma");
        let back: RunManifest = serde_json::from_value(j["manifest"].clone()).unwrap();
        assert_eq!(back, m);
        let xc = t.cerf_crossing().unwrap();
        assert!((xc - 0.0548).abs() < 0.01, "{xc}");
        assert_eq!(t.cerf_crossings(), 1);
        let svg = render_svg(&t, &m);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<line").count(), 1);
    }

    #[test]
    fn number_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 0.972_617_08] {
            assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
        }
    }
}
