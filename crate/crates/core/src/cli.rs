//! Command-line front end. Exit codes: 0 success, 1 certification or
//! identity failure, 2 invalid input, 3 internal inconsistency.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bounds::{
    chain_from_gamma, fv_upper_bound, hardy_convex, planar_john_hardy, select_hardy, BoundsError,
    ChainInputs, ConstantChainReport, HardyEstimate,
};
use crate::planar_verifier::{estimate_friedrichs, QuadParams, SpectralEstimate, VerifierError};
use crate::poly_forms::{
    corrupt_scalar, generate_conjugate_pair, payne_residual_unchecked, scalar_value,
};
use crate::star_domain::{
    shape_factors, DomainError, DomainSpec, RadialProfile, ShapeFactors, ShapeOptions, StarDomain,
    DEFAULT_GRID_ND,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CERTIFICATION: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Relative roundoff allowance when comparing the spectral estimate with the
/// bound. Needed where the bound is attained (the disk, estimate 1 +- ulp).
pub const CERTIFICATION_RTOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "fvbound", version, about = "Bounds for Friedrichs-Velte type constants of star-shaped domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Upper bounds for Gamma, C and P from a domain file.
    Bound(BoundArgs),
    /// Planar spectral lower estimate of Gamma, certified against the bound.
    Estimate(EstimateArgs),
    /// Exact check of the Payne identity on random conjugate pairs.
    CheckIdentity(IdentityArgs),
    /// Hardy constant estimates.
    Hardy(HardyArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct BoundArgs {
    /// JSON domain specification.
    #[arg(long)]
    pub domain: PathBuf,
    /// Hardy constant to use instead of the built-in estimators.
    #[arg(long)]
    pub hardy: Option<f64>,
    /// Cone angle for the cone-condition Hardy estimate.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Report path; stdout if omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateArgs {
    /// JSON domain specification (planar only).
    #[arg(long)]
    pub domain: PathBuf,
    /// Highest power of z in the basis.
    #[arg(long)]
    pub degree: usize,
    /// Hardy constant override.
    #[arg(long)]
    pub hardy: Option<f64>,
    /// Cone angle for the Hardy estimate.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Gauss-Legendre nodes per ray.
    #[arg(long)]
    pub radial_order: Option<usize>,
    /// Trapezoid points in angle.
    #[arg(long)]
    pub angular_points: Option<usize>,
    /// Report path; stdout if omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct IdentityArgs {
    #[arg(long)]
    pub dim: usize,
    /// Maximum polynomial degree of the generated pairs.
    #[arg(long)]
    pub degree: u32,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Corrupts the u part of the given trial (negative control).
    #[arg(long, hide = true)]
    pub corrupt_trial: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct HardyArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certification {
    pub spectral_estimate: f64,
    pub gamma_upper: f64,
    pub margin: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool_version: &'static str,
    pub command: serde_json::Value,
    pub domain: DomainSpec,
    pub shape: ShapeFactors,
    pub chain: ConstantChainReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certification: Option<Certification>,
    pub timings_ms: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message: message.into(),
    }
}

fn internal(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INTERNAL,
        message: message.into(),
    }
}

impl From<DomainError> for Failure {
    fn from(e: DomainError) -> Self {
        match e {
            DomainError::Invalid(v) => invalid(format!(
                "invalid domain:\n{}",
                v.iter().map(|x| format!("  {x}")).collect::<Vec<_>>().join("\n")
            )),
            DomainError::Numerics(e) => internal(e.to_string()),
            e => invalid(e.to_string()),
        }
    }
}

impl From<BoundsError> for Failure {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::NegativeRadicand { .. } => internal(e.to_string()),
            e => invalid(e.to_string()),
        }
    }
}

impl From<VerifierError> for Failure {
    fn from(e: VerifierError) -> Self {
        match e {
            VerifierError::Domain(d) => d.into(),
            VerifierError::Numerics(e) => internal(e.to_string()),
            e => invalid(e.to_string()),
        }
    }
}

/// JSON formatter printing every float with 17 significant digits.
struct Precise<'a>(serde_json::ser::PrettyFormatter<'a>);

impl serde_json::ser::Formatter for Precise<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with 17 significant digits per float.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let fmt = Precise(serde_json::ser::PrettyFormatter::with_indent(b"  "));
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

fn emit(report: &RunReport, output: Option<&Path>) -> Result<(), Failure> {
    let text = to_json(report).map_err(|e| internal(format!("serializing report: {e}")))?;
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| invalid(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn load_domain(path: &Path) -> Result<(DomainSpec, StarDomain), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let spec = DomainSpec::from_json(&text)?;
    let dom = spec.to_domain()?.validated()?;
    Ok((spec, dom))
}

fn check_hardy_inputs(hardy: Option<f64>, theta: Option<f64>) -> Result<(), Failure> {
    if let Some(h) = hardy {
        if !(h > 0.0 && h.is_finite()) {
            return Err(invalid(format!("--hardy must be positive, got {h}")));
        }
    }
    if let Some(t) = theta {
        if !(t > 0.0 && t <= std::f64::consts::FRAC_PI_2) {
            return Err(invalid(format!("--theta must lie in (0, pi/2], got {t}")));
        }
    }
    Ok(())
}

/// Shape factors, bound and chain shared by `bound` and `estimate`.
fn bound_report(
    command: &Command,
    domain: &Path,
    hardy: Option<f64>,
    theta: Option<f64>,
) -> Result<(RunReport, StarDomain), Failure> {
    check_hardy_inputs(hardy, theta)?;
    let mut timings = BTreeMap::new();
    let t = Instant::now();
    let (spec, dom) = load_domain(domain)?;
    let shape = shape_factors(&dom, &ShapeOptions::default())?;
    timings.insert("shape".to_string(), ms(t));

    let t = Instant::now();
    let n = dom.dim();
    let gamma = fv_upper_bound(n, shape.eta, shape.q_factor)?;
    let h = select_hardy(n, hardy, dom.profile().is_convex_family(), theta)?
        .ok_or_else(|| invalid("no Hardy estimate applies; pass --hardy or --theta"))?;
    // a ball seen from its own center attains the bound
    let exact = matches!(dom.profile(), RadialProfile::Ball { .. }) && shape.eta == 1.0;
    let chain = chain_from_gamma(gamma, h, exact).with_inputs(ChainInputs {
        n,
        eta: shape.eta,
        q: shape.q_factor,
    });
    if chain.c_upper != chain.gamma_upper + 1.0 || chain.p_upper != chain.hardy.value * chain.c_upper {
        return Err(internal("constant chain is inconsistent"));
    }
    timings.insert("bound".to_string(), ms(t));

    let mut warnings = dom.warnings();
    if n >= 3 && shape.grid_resolution < DEFAULT_GRID_ND {
        warnings.push(format!(
            "angular grid reduced to {} points per angle for dim = {n}",
            shape.grid_resolution
        ));
    }
    let command = serde_json::to_value(command).map_err(|e| internal(e.to_string()))?;
    Ok((
        RunReport {
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            domain: spec,
            shape,
            chain,
            spectral: None,
            certification: None,
            timings_ms: timings,
            warnings,
        },
        dom,
    ))
}

fn cmd_bound(command: &Command, args: &BoundArgs) -> Result<i32, Failure> {
    let (report, _) = bound_report(command, &args.domain, args.hardy, args.theta)?;
    emit(&report, args.output.as_deref())?;
    Ok(EXIT_OK)
}

fn cmd_estimate(command: &Command, args: &EstimateArgs) -> Result<i32, Failure> {
    if args.degree == 0 {
        return Err(invalid("--degree must be at least 1"));
    }
    let (mut report, dom) = bound_report(command, &args.domain, args.hardy, args.theta)?;
    if dom.dim() != 2 {
        return Err(invalid(format!(
            "estimate requires a planar domain, got dim = {}",
            dom.dim()
        )));
    }
    let defaults = QuadParams::for_degree(args.degree);
    let quad = QuadParams {
        radial_order: args.radial_order.unwrap_or(defaults.radial_order),
        angular_points: args.angular_points.unwrap_or(defaults.angular_points),
    };
    let t = Instant::now();
    let est = estimate_friedrichs(&dom, args.degree, quad)?;
    report.timings_ms.insert("spectral".to_string(), ms(t));
    let gamma_upper = report.chain.gamma_upper;
    let cert = Certification {
        spectral_estimate: est.gamma_estimate,
        gamma_upper,
        margin: gamma_upper - est.gamma_estimate,
        passed: est.gamma_estimate <= gamma_upper * (1.0 + CERTIFICATION_RTOL),
    };
    report.spectral = Some(est);
    report.certification = Some(cert.clone());
    emit(&report, args.output.as_deref())?;
    if cert.passed {
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "certification failed: spectral estimate {} exceeds upper bound {}",
            cert.spectral_estimate, cert.gamma_upper
        );
        Ok(EXIT_CERTIFICATION)
    }
}

fn cmd_check_identity(args: &IdentityArgs) -> Result<i32, Failure> {
    if !(2..=6).contains(&args.dim) {
        return Err(invalid(format!("--dim must lie in 2..=6, got {}", args.dim)));
    }
    if args.trials == 0 {
        return Err(invalid("--trials must be at least 1"));
    }
    let mut out = io::stdout().lock();
    for trial in 0..args.trials {
        let seed = args.seed.wrapping_add(trial as u64);
        let pair = generate_conjugate_pair(args.dim, args.degree, seed);
        let (mut u, v) = pair.into_parts();
        if args.corrupt_trial == Some(trial) {
            u = corrupt_scalar(&u);
        }
        let residual = payne_residual_unchecked(&u, &v).map_err(|e| internal(e.to_string()))?;
        if !residual.is_zero() {
            let _ = writeln!(out, "trial {trial} seed {seed}: FAIL");
            eprintln!(
                "Payne identity violated at trial {trial} (seed {seed})\n  u = {}\n  v = {}\n  residual = {}",
                scalar_value(&u),
                v,
                residual
            );
            return Ok(EXIT_CERTIFICATION);
        }
        let _ = writeln!(
            out,
            "trial {trial} seed {seed}: ok ({} terms in u, {} components in v)",
            scalar_value(&u).len(),
            v.len()
        );
    }
    let _ = writeln!(
        out,
        "all {} trials passed (dim {}, degree <= {})",
        args.trials, args.dim, args.degree
    );
    Ok(EXIT_OK)
}

fn cmd_hardy(args: &HardyArgs) -> Result<i32, Failure> {
    if args.dim < 2 {
        return Err(invalid(format!("--dim must be at least 2, got {}", args.dim)));
    }
    check_hardy_inputs(None, args.theta)?;
    let cone = args
        .theta
        .map(|t| HardyEstimate::cone(args.dim, t))
        .transpose()?;
    let mut out = io::stdout().lock();
    let _ = writeln!(out, "convex: {}", hardy_convex());
    if args.dim == 2 {
        let _ = writeln!(out, "planar-john: {}", planar_john_hardy());
    }
    if let (Some(h), Some(t)) = (cone, args.theta) {
        let _ = writeln!(out, "cone(theta={t}): {}", h.value);
    }
    Ok(EXIT_OK)
}

fn execute(cli: &Cli) -> Result<i32, Failure> {
    match &cli.command {
        Command::Bound(a) => cmd_bound(&cli.command, a),
        Command::Estimate(a) => cmd_estimate(&cli.command, a),
        Command::CheckIdentity(a) => cmd_check_identity(a),
        Command::Hardy(a) => cmd_hardy(a),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let x = 0.1 + 0.2;
        let s = to_json(&serde_json::json!({ "x": x, "y": [1.0, f64::NAN] })).unwrap();
        assert!(s.contains("3.0000000000000004e-1"), "{s}");
        assert!(s.contains("1.0000000000000000e0"));
        assert!(s.contains("null"));
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(x));
    }
}
