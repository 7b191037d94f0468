use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, ValueEnum};
use serde::Deserialize;

use nullsim::analysis::{cartan_profile, de_sitter_reparam_offset, pseudo_de_sitter_length_with, AnalysisConfig};
use nullsim::catalog::{CatalogParams, ExampleCurve, NullHelix, SelfSimilarCase, SelfSimilarCurve};
use nullsim::curve::{AnalyticCurve, CurveSource, DerivativeConfig};
use nullsim::matching::{decide_similar_with, MatchConfig};
use nullsim::mink::{MinkVector4, NullRotationParams, PSimilarity, PseudoOrthonormalFrame, FRAME_TOL};
use nullsim::numeric::step_grid;
use nullsim::reconstruction::{
    reconstruct_curve, transport_frame, FrameSystem, ReconstructionConfig, ShapeCurvatureSpec, ShapeFunction,
};
use nullsim::Error;

use crate::error::{CliError, CliResult};
use crate::expr::Expr;
use crate::io::{self, num};

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Curve CSV with header t,x0,x1,x2,x3.
    pub input: PathBuf,
    /// Largest admissible |g'.g'| / |g'|^2 (Euclidean norm) at analysis points.
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    /// Parameter value t at which sigma equals --sigma-offset
    /// (default: the first analysis point).
    #[arg(long, allow_hyphen_values = true)]
    pub sigma_origin: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub sigma_offset: f64,
    /// Signature JSON output; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Table s,sigma,kappa,tau_mag at the analysis points.
    #[arg(long)]
    pub profile_out: Option<PathBuf>,
    /// Spacing in t the nine-point derivative stencil aims for.
    #[arg(long, default_value_t = DerivativeConfig::default().target_spacing)]
    pub fd_spacing: f64,
    /// Analyze every n-th interior sample (default: a quarter of the
    /// stencil stride).
    #[arg(long)]
    pub stride: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FrameSystemArg {
    /// The frame system with the structure matrix as printed.
    Printed,
    /// The structure matrix including the diag(-z2, z2, 0, 0) term.
    Consistent,
}

#[derive(Args, Debug)]
pub struct ReconstructArgs {
    /// Shape curvature kappa~ as an expression in x, or a signature JSON file.
    #[arg(long, allow_hyphen_values = true)]
    pub z1: String,
    /// Shape curvature tau~ as an expression in x, or a signature JSON file.
    #[arg(long, allow_hyphen_values = true)]
    pub z2: String,
    /// Initial frame: "n8", inline JSON {"L":[..],"N":[..],"W1":[..],"W2":[..]}, or a JSON file.
    #[arg(long, default_value = "n8")]
    pub frame: String,
    /// sigma at which --frame holds (default 0 for n8, --sigma0 otherwise).
    #[arg(long, allow_hyphen_values = true)]
    pub frame_sigma: Option<f64>,
    #[arg(long, default_value = "0,0,0,0", allow_hyphen_values = true)]
    pub x0: String,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma0: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau0: f64,
    /// Re-project the frame every n steps (0 = never).
    #[arg(long, default_value_t = 0)]
    pub reproject_every: usize,
    #[arg(long, value_enum, default_value_t = FrameSystemArg::Printed)]
    pub frame_system: FrameSystemArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Helix,
    Case1,
    Case2,
    Case3,
    Case4,
    Example,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Parameter interval "start,end" (default 0,2; 1,3 for example).
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct MatchArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub json_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub zeta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta: f64,
    /// Translation "b0,b1,b2,b3".
    #[arg(long, default_value = "0,0,0,0", allow_hyphen_values = true)]
    pub b: String,
    #[arg(long)]
    pub out: PathBuf,
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("{name} must be positive, got {v}")))
    }
}

pub fn analyze(args: AnalyzeArgs) -> CliResult<ExitCode> {
    let cfg = AnalysisConfig {
        null_tol: positive("--eps", args.eps)?,
        derivatives: DerivativeConfig {
            target_spacing: positive("--fd-spacing", args.fd_spacing)?,
        },
        ..Default::default()
    };
    if args.stride == Some(0) {
        return Err(CliError::Usage("--stride must be at least 1".into()));
    }
    let sampled = io::read_curve(&args.input)?;
    let grid = sampled.interior_params(&cfg.derivatives, args.stride.unwrap_or_else(|| sampled.analysis_stride(&cfg.derivatives)));
    let curve = CurveSource::Sampled(sampled);
    let profile = cartan_profile(&curve, &grid, &cfg)?;
    let start = match args.sigma_origin {
        Some(t) => args.sigma_offset + pseudo_de_sitter_length_with(&curve, t, grid[0], &cfg)?,
        None => args.sigma_offset,
    };
    let sig = de_sitter_reparam_offset(&profile, 0, start)?;
    if let Some(path) = &args.profile_out {
        io::write_profile(path, &profile, &sig.sigma)?;
    }
    let json = io::signature_json(&sig);
    match &args.out {
        Some(path) => io::write_text(path, &json)?,
        None => print!("{json}"),
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameJson {
    #[serde(rename = "L")]
    l: [f64; 4],
    #[serde(rename = "N")]
    n: [f64; 4],
    #[serde(rename = "W1")]
    w1: [f64; 4],
    #[serde(rename = "W2")]
    w2: [f64; 4],
}

fn parse_frame(arg: &str) -> CliResult<(PseudoOrthonormalFrame, bool)> {
    if arg == "n8" {
        return Ok((PseudoOrthonormalFrame::reference(), true));
    }
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::Io(format!("{arg}: {e}")))?
    };
    let f: FrameJson = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("frame: {e}")))?;
    let v = |c: [f64; 4]| MinkVector4::try_from_array(c);
    let frame = PseudoOrthonormalFrame::new(v(f.l)?, v(f.n)?, v(f.w1)?, v(f.w2)?, FRAME_TOL)?;
    Ok((frame, false))
}

/// An expression in `x`, or a column of a signature file when `arg` names one.
fn shape_function(arg: &str, flag: &str, pick: fn(nullsim::ShapeSignature) -> (Vec<f64>, Vec<f64>)) -> CliResult<ShapeFunction> {
    let path = Path::new(arg);
    if path.is_file() {
        let (x, y) = pick(io::read_signature(path)?);
        return Ok(ShapeFunction::sampled(x, y)?);
    }
    let e = Expr::parse(arg).map_err(|e| CliError::Parse(format!("{flag} '{arg}': {e}")))?;
    Ok(if e.depends_on_x() {
        ShapeFunction::closure(move |x| e.eval(x))
    } else {
        ShapeFunction::Constant(e.eval(0.0))
    })
}

pub fn reconstruct(args: ReconstructArgs) -> CliResult<ExitCode> {
    let z1 = shape_function(&args.z1, "--z1", |s| (s.sigma, s.kappa_tilde))?;
    let z2 = shape_function(&args.z2, "--z2", |s| (s.sigma, s.tau_tilde))?;
    let (frame, is_reference) = parse_frame(&args.frame)?;
    let x0 = io::parse_vec4(&args.x0).map_err(|m| CliError::Usage(format!("--x0: {m}")))?;
    let system = match args.frame_system {
        FrameSystemArg::Printed => FrameSystem::Printed,
        FrameSystemArg::Consistent => FrameSystem::Consistent,
    };
    let cfg = ReconstructionConfig {
        step: positive("--step", args.step)?,
        tau0: positive("--tau0", args.tau0)?,
        reproject_every: args.reproject_every,
        system,
        ..Default::default()
    };
    let frame_sigma = args.frame_sigma.unwrap_or(if is_reference { 0.0 } else { args.sigma0 });
    let ends = [args.sigma0, args.sigma_end, frame_sigma];
    let domain = (ends.iter().copied().fold(f64::INFINITY, f64::min), ends.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let mut k0 = frame.to_matrix();
    if frame_sigma != args.sigma0 {
        // the printed system never reads z2 while moving the frame alone
        let z2_transport = match system {
            FrameSystem::Printed => ShapeFunction::Constant(0.0),
            FrameSystem::Consistent => z2.clone(),
        };
        let transport = ShapeCurvatureSpec::new(z1.clone(), z2_transport, domain)?;
        // a coarse --step is meant for the curve, not for placing the frame
        let fine = ReconstructionConfig { step: cfg.step.min(ReconstructionConfig::default().step), ..cfg };
        k0 = transport_frame(&transport, &k0, frame_sigma, args.sigma0, &fine)?;
    }
    let spec = ShapeCurvatureSpec::new(z1, z2, domain)?;
    let r = reconstruct_curve(&spec, &k0, x0, args.sigma0, args.sigma_end, &cfg)?;
    let (mut t, mut x) = (r.sigma.clone(), r.curve.clone());
    if args.sigma_end < args.sigma0 {
        t.reverse();
        x.reverse();
    }
    if t.len() < io::MIN_ROWS {
        return Err(CliError::Core(Error::InsufficientSamples { got: t.len(), need: io::MIN_ROWS }));
    }
    io::write_curve(&args.out, &t, &x)?;
    if r.drift_warning {
        eprintln!("WARNING drift {} exceeds the warning level {}", num(r.orthonormality_drift), num(cfg.drift_warn));
    }
    println!("orthonormality_drift {}", num(r.orthonormality_drift));
    Ok(ExitCode::SUCCESS)
}

fn require(kind: Kind, name: &str, v: Option<f64>) -> CliResult<f64> {
    v.ok_or_else(|| CliError::Core(Error::InvalidParams(format!("--kind {kind:?} requires --{name}").to_lowercase())))
}

pub fn generate(args: GenerateArgs) -> CliResult<ExitCode> {
    let kind = args.kind;
    let given = [("kappa", args.kappa), ("tau", args.tau), ("a", args.a), ("b", args.b), ("c", args.c)];
    let used: &[&str] = match kind {
        Kind::Helix => &["kappa", "tau"],
        Kind::Case1 => &["c"],
        Kind::Case2 => &["b"],
        Kind::Case3 => &["a", "c"],
        Kind::Case4 => &["a", "b"],
        Kind::Example => &[],
    };
    if let Some((name, _)) = given.iter().find(|(n, v)| v.is_some() && !used.contains(n)) {
        return Err(CliError::Core(Error::InvalidParams(format!("--{name} does not apply to --kind {kind:?}").to_lowercase())));
    }
    let case = |c: SelfSimilarCase, p: CatalogParams| -> CliResult<Box<dyn AnalyticCurve>> { Ok(Box::new(SelfSimilarCurve::new(c, p)?)) };
    let curve: Box<dyn AnalyticCurve> = match kind {
        Kind::Helix => Box::new(NullHelix::new(require(kind, "kappa", args.kappa)?, require(kind, "tau", args.tau)?)?),
        Kind::Case1 => case(SelfSimilarCase::One, CatalogParams { c: require(kind, "c", args.c)?, ..Default::default() })?,
        Kind::Case2 => case(SelfSimilarCase::Two, CatalogParams { b: require(kind, "b", args.b)?, ..Default::default() })?,
        Kind::Case3 => case(
            SelfSimilarCase::Three,
            CatalogParams { a: require(kind, "a", args.a)?, c: require(kind, "c", args.c)?, ..Default::default() },
        )?,
        Kind::Case4 => case(
            SelfSimilarCase::Four,
            CatalogParams { a: require(kind, "a", args.a)?, b: require(kind, "b", args.b)?, ..Default::default() },
        )?,
        Kind::Example => Box::new(ExampleCurve::new()),
    };
    let (lo, hi) = match &args.range {
        Some(r) => io::parse_range(r).map_err(|m| CliError::Usage(format!("--range: {m}")))?,
        None if kind == Kind::Example => (1.0, 3.0),
        None => (0.0, 2.0),
    };
    let t = step_grid(lo, hi, positive("--step", args.step)?);
    if t.len() < io::MIN_ROWS {
        return Err(CliError::Usage(format!("--range and --step give {} rows, need at least {}", t.len(), io::MIN_ROWS)));
    }
    let x: Vec<MinkVector4> = t.iter().map(|&ti| curve.position(ti)).collect();
    if !x.iter().all(MinkVector4::is_finite) {
        return Err(CliError::Core(Error::NonFinite("generated curve")));
    }
    io::write_curve(&args.out, &t, &x)?;
    Ok(ExitCode::SUCCESS)
}

pub fn match_curves(args: MatchArgs) -> CliResult<ExitCode> {
    let a = CurveSource::Sampled(io::read_curve(&args.a)?);
    let b = CurveSource::Sampled(io::read_curve(&args.b)?);
    let mut cfg = MatchConfig::for_sources(&a, &b);
    if let Some(tol) = args.tol {
        cfg.tol = positive("--tol", tol)?;
    }
    let v = decide_similar_with(&a, &b, &cfg)?;
    let mu = v.mu().map_or_else(|| "null".to_string(), num);
    let json = format!(
        "{{\"similar\": {}, \"sigma_shift\": {}, \"residual\": {}, \"mu\": {}}}\n",
        v.similar,
        num(v.sigma_shift),
        num(v.residual),
        mu
    );
    if let Some(path) = &args.json_out {
        io::write_text(path, &json)?;
    }
    print!("{json}");
    if let Some(d) = &v.diagnostic {
        eprintln!("note: {d}");
    }
    Ok(if v.similar { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

pub fn transform(args: TransformArgs) -> CliResult<ExitCode> {
    if !(args.mu > 0.0) {
        return Err(CliError::Core(Error::NonPositiveScale(args.mu)));
    }
    let b = io::parse_vec4(&args.b).map_err(|m| CliError::Usage(format!("--b: {m}")))?;
    let rotation = NullRotationParams::new(args.lambda, args.epsilon, args.zeta, args.theta)?;
    let f = PSimilarity::new(args.mu, rotation, b)?;
    let curve = io::read_curve(&args.input)?;
    let moved = curve.transformed(&f);
    io::write_curve(&args.out, moved.params(), moved.positions())?;
    Ok(ExitCode::SUCCESS)
}
