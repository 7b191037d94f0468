//! Curves from prescribed shape curvatures: integrate `dK/dσ = M(σ)K` for the
//! frame `K = (L^sim, N^sim, W₁^sim, W₂^sim)ᵀ` together with
//! `γ' = e^{2A}/τ₀ · L^sim`, `A' = z₂`.

use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix4;

use crate::analysis::{structure_matrix_printed, structure_matrix_sim, ShapeSignature};
use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::mink::{gram_deviation, metric_matrix, pseudo_orthonormal_gram, MinkVector4, FRAME_TOL};
use crate::numeric::{interp_cubic, step_grid};

/// A real function of `σ`.
#[derive(Clone)]
pub enum ShapeFunction {
    Constant(f64),
    Closure(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    /// Piecewise cubic through `(x, y)` (four nearest nodes); undefined
    /// outside `[x₀, xₙ]`.
    Sampled { x: Vec<f64>, y: Vec<f64> },
}

impl fmt::Debug for ShapeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeFunction::Constant(c) => write!(f, "Constant({c})"),
            ShapeFunction::Closure(_) => write!(f, "Closure"),
            ShapeFunction::Sampled { x, .. } => write!(f, "Sampled({} points)", x.len()),
        }
    }
}

impl ShapeFunction {
    pub fn closure(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ShapeFunction::Closure(Arc::new(f))
    }

    pub fn sampled(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch(x.len(), y.len()));
        }
        if x.len() < 2 {
            return Err(Error::InsufficientSamples { got: x.len(), need: 2 });
        }
        if let Some(i) = x.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::NonMonotone { index: i + 1 });
        }
        Ok(ShapeFunction::Sampled { x, y })
    }

    /// Value at `s`; `None` where undefined or not finite.
    pub fn eval(&self, s: f64) -> Option<f64> {
        let v = match self {
            ShapeFunction::Constant(c) => Some(*c),
            ShapeFunction::Closure(f) => Some(f(s)),
            ShapeFunction::Sampled { x, y } => {
                // tolerate rounding at the ends of the table
                let slack = 1e-12 * (x[x.len() - 1] - x[0]);
                interp_cubic(x, y, s.clamp(x[0], x[x.len() - 1])).filter(|_| s >= x[0] - slack && s <= x[x.len() - 1] + slack)
            }
        };
        v.filter(|v| v.is_finite())
    }
}

/// Target shape curvatures `κ̃ = z₁`, `τ̃ = z₂` on a `σ` interval.
#[derive(Clone, Debug)]
pub struct ShapeCurvatureSpec {
    pub z1: ShapeFunction,
    pub z2: ShapeFunction,
    pub domain: (f64, f64),
}

impl ShapeCurvatureSpec {
    pub fn new(z1: ShapeFunction, z2: ShapeFunction, domain: (f64, f64)) -> Result<Self> {
        if !(domain.0.is_finite() && domain.1.is_finite() && domain.1 >= domain.0) {
            return Err(Error::InvalidParams(format!("bad domain [{}, {}]", domain.0, domain.1)));
        }
        Ok(ShapeCurvatureSpec { z1, z2, domain })
    }

    pub fn constant(z1: f64, z2: f64, domain: (f64, f64)) -> Result<Self> {
        Self::new(ShapeFunction::Constant(z1), ShapeFunction::Constant(z2), domain)
    }

    /// Interpolate a measured signature.
    pub fn from_signature(sig: &ShapeSignature) -> Result<Self> {
        let domain = (sig.sigma[0], sig.sigma[sig.len() - 1]);
        Self::new(
            ShapeFunction::sampled(sig.sigma.clone(), sig.kappa_tilde.clone())?,
            ShapeFunction::sampled(sig.sigma.clone(), sig.tau_tilde.clone())?,
            domain,
        )
    }

    fn eval(&self, s: f64) -> Result<(f64, f64)> {
        let (a, b) = self.domain;
        let slack = 1e-12 * (b - a).abs().max(1.0);
        if !(s >= a - slack && s <= b + slack) {
            return Err(Error::DomainError { sigma: s });
        }
        match (self.z1.eval(s), self.z2.eval(s)) {
            (Some(z1), Some(z2)) => Ok((z1, z2)),
            _ => Err(Error::DomainError { sigma: s }),
        }
    }
}

/// Which coefficient matrix drives the frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FrameSystem {
    /// `M = [[0,0,1,0],[0,0,z₁,1],[−z₁,−1,0,0],[−1,0,0,0]]`. The curve it
    /// produces has `τ̃ = z₂` but `κ̃ = z₁ − z₂' + z₂²/2`.
    #[default]
    Printed,
    /// `M` plus `diag(−z₂, z₂, 0, 0)`, the exact `σ`-derivative matrix of
    /// `C^sim`. The curve it produces has `κ̃ = z₁`, `τ̃ = z₂`.
    Consistent,
}

impl FrameSystem {
    pub fn matrix(self, z1: f64, z2: f64) -> Matrix4<f64> {
        match self {
            FrameSystem::Printed => structure_matrix_printed(z1),
            FrameSystem::Consistent => structure_matrix_sim(z1, z2),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconstructionConfig {
    /// Nominal RK4 step; the grid is uniform with the largest step not
    /// exceeding this that lands on the end point.
    pub step: f64,
    /// `τ` at `σ₀`; the quadrature weight is `e^{2A}/τ₀`.
    pub tau0: f64,
    /// Re-project the frame onto the pseudo-orthonormal Gram condition every
    /// this many steps; 0 disables.
    pub reproject_every: usize,
    pub drift_fail: f64,
    pub drift_warn: f64,
    pub system: FrameSystem,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        ReconstructionConfig {
            step: 1e-3,
            tau0: 1.0,
            reproject_every: 0,
            drift_fail: 1e-6,
            drift_warn: 1e-8,
            system: FrameSystem::Printed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructionResult {
    pub sigma: Vec<f64>,
    pub curve: Vec<MinkVector4>,
    /// Rows `L^sim, N^sim, W₁^sim, W₂^sim`.
    pub frames: Vec<Matrix4<f64>>,
    /// `A(σ) = ∫_{σ₀}^{σ} z₂`.
    pub log_weight: Vec<f64>,
    /// Largest `max|KηKᵀ − J*|` over the grid.
    pub orthonormality_drift: f64,
    /// Drift exceeded the warning threshold.
    pub drift_warning: bool,
}

impl ReconstructionResult {
    pub fn lsim(&self, i: usize) -> MinkVector4 {
        row(&self.frames[i], 0)
    }

    /// The curve as a sample table parameterized by `σ`.
    pub fn to_sampled(&self) -> Result<SampledCurve> {
        SampledCurve::new(self.sigma.clone(), self.curve.clone())
    }
}

fn row(k: &Matrix4<f64>, i: usize) -> MinkVector4 {
    MinkVector4([k[(i, 0)], k[(i, 1)], k[(i, 2)], k[(i, 3)]])
}

/// Newton-type projection `K ← (I − ½(G − J*)J*)K`, `G = KηKᵀ`, iterated.
/// Quadratically convergent to a frame with Gram matrix `J*`.
pub fn reproject_frame(k: &Matrix4<f64>) -> Matrix4<f64> {
    let (eta, j) = (metric_matrix(), pseudo_orthonormal_gram());
    let mut k = *k;
    for _ in 0..8 {
        let e = k * eta * k.transpose() - j;
        if e.abs().max() < 1e-16 {
            break;
        }
        k = (Matrix4::identity() - e * j * 0.5) * k;
    }
    k
}

fn uniform_grid(a: f64, b: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParams(format!("step must be positive, got {step}")));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::NonFinite("sigma range"));
    }
    Ok(step_grid(a, b, step))
}

fn check_initial_frame(k0: &Matrix4<f64>) -> Result<()> {
    let deviation = gram_deviation(k0);
    if !(deviation <= FRAME_TOL) {
        return Err(Error::NotPseudoOrthonormal { deviation });
    }
    Ok(())
}

/// Augmented RK4 state: frame, log-weight, position.
#[derive(Clone, Copy)]
struct State {
    k: Matrix4<f64>,
    a: f64,
    x: MinkVector4,
}

impl State {
    fn axpy(&self, h: f64, d: &State) -> State {
        State {
            k: self.k + d.k * h,
            a: self.a + d.a * h,
            x: self.x + d.x * h,
        }
    }
}

struct Rhs<'a> {
    spec: &'a ShapeCurvatureSpec,
    cfg: &'a ReconstructionConfig,
}

impl Rhs<'_> {
    fn eval(&self, s: f64, y: &State) -> Result<State> {
        let (z1, z2) = self.spec.eval(s)?;
        let w = (2.0 * y.a).exp() / self.cfg.tau0;
        if !w.is_finite() {
            return Err(Error::QuadratureError { sigma: s });
        }
        Ok(State {
            k: self.cfg.system.matrix(z1, z2) * y.k,
            a: z2,
            x: row(&y.k, 0) * w,
        })
    }
}

fn integrate(
    spec: &ShapeCurvatureSpec,
    k0: &Matrix4<f64>,
    x0: MinkVector4,
    sigma0: f64,
    sigma_end: f64,
    cfg: &ReconstructionConfig,
) -> Result<ReconstructionResult> {
    check_initial_frame(k0)?;
    if !(cfg.tau0 != 0.0 && cfg.tau0.is_finite()) {
        return Err(Error::InvalidParams(format!("tau0 must be finite and nonzero, got {}", cfg.tau0)));
    }
    if !x0.is_finite() {
        return Err(Error::NonFinite("x0"));
    }
    let grid = uniform_grid(sigma0, sigma_end, cfg.step)?;
    spec.eval(sigma0)?;
    let rhs = Rhs { spec, cfg };
    let mut y = State { k: *k0, a: 0.0, x: x0 };
    let mut out = ReconstructionResult {
        sigma: grid.clone(),
        curve: Vec::with_capacity(grid.len()),
        frames: Vec::with_capacity(grid.len()),
        log_weight: Vec::with_capacity(grid.len()),
        orthonormality_drift: gram_deviation(k0),
        drift_warning: false,
    };
    out.curve.push(y.x);
    out.frames.push(y.k);
    out.log_weight.push(y.a);
    for (i, w) in grid.windows(2).enumerate() {
        let (s, h) = (w[0], w[1] - w[0]);
        let k1 = rhs.eval(s, &y)?;
        let k2 = rhs.eval(s + 0.5 * h, &y.axpy(0.5 * h, &k1))?;
        let k3 = rhs.eval(s + 0.5 * h, &y.axpy(0.5 * h, &k2))?;
        let k4 = rhs.eval(w[1], &y.axpy(h, &k3))?;
        y = State {
            k: y.k + (k1.k + k2.k * 2.0 + k3.k * 2.0 + k4.k) * (h / 6.0),
            a: y.a + (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a) * (h / 6.0),
            x: y.x + (k1.x + k2.x * 2.0 + k3.x * 2.0 + k4.x) * (h / 6.0),
        };
        if !(y.x.is_finite() && y.a.is_finite()) {
            return Err(Error::QuadratureError { sigma: w[1] });
        }
        let drift = gram_deviation(&y.k);
        if !(drift <= cfg.drift_fail) {
            return Err(Error::DriftExceeded {
                drift,
                bound: cfg.drift_fail,
                sigma: w[1],
            });
        }
        out.orthonormality_drift = out.orthonormality_drift.max(drift);
        if cfg.reproject_every > 0 && (i + 1) % cfg.reproject_every == 0 {
            y.k = reproject_frame(&y.k);
        }
        out.curve.push(y.x);
        out.frames.push(y.k);
        out.log_weight.push(y.a);
    }
    out.drift_warning = out.orthonormality_drift > cfg.drift_warn;
    Ok(out)
}

/// Frames `K(σ)` on the uniform grid from `sigma0` to `sigma_end`
/// (`sigma_end < sigma0` integrates backwards).
pub fn integrate_frame_system(
    spec: &ShapeCurvatureSpec,
    k0: &Matrix4<f64>,
    sigma0: f64,
    sigma_end: f64,
    cfg: &ReconstructionConfig,
) -> Result<(Vec<f64>, Vec<Matrix4<f64>>, f64)> {
    let r = integrate(spec, k0, MinkVector4::ZERO, sigma0, sigma_end, cfg)?;
    Ok((r.sigma, r.frames, r.orthonormality_drift))
}

/// The frame at `sigma_end` obtained by integrating from `k0` at `sigma0`.
pub fn transport_frame(
    spec: &ShapeCurvatureSpec,
    k0: &Matrix4<f64>,
    sigma0: f64,
    sigma_end: f64,
    cfg: &ReconstructionConfig,
) -> Result<Matrix4<f64>> {
    let (_, frames, _) = integrate_frame_system(spec, k0, sigma0, sigma_end, cfg)?;
    Ok(frames[frames.len() - 1])
}

/// `γ(σ) = x₀ + (1/τ₀)∫_{σ₀}^{σ} e^{2A} L^sim dσ`.
pub fn reconstruct_curve(
    spec: &ShapeCurvatureSpec,
    k0: &Matrix4<f64>,
    x0: MinkVector4,
    sigma0: f64,
    sigma_end: f64,
    cfg: &ReconstructionConfig,
) -> Result<ReconstructionResult> {
    integrate(spec, k0, x0, sigma0, sigma_end, cfg)
}

/// Constant-torsion case: `z₂ = 0` and `γ = x₀ + (1/c)∫L^sim dσ`.
#[allow(clippy::too_many_arguments)]
pub fn reconstruct_tau_const(
    z1: ShapeFunction,
    c: f64,
    domain: (f64, f64),
    k0: &Matrix4<f64>,
    x0: MinkVector4,
    sigma0: f64,
    sigma_end: f64,
    cfg: &ReconstructionConfig,
) -> Result<ReconstructionResult> {
    if !(c != 0.0 && c.is_finite()) {
        return Err(Error::InvalidParams(format!("c must be finite and nonzero, got {c}")));
    }
    let spec = ShapeCurvatureSpec::new(z1, ShapeFunction::Constant(0.0), domain)?;
    integrate(&spec, k0, x0, sigma0, sigma_end, &ReconstructionConfig { tau0: c, ..*cfg })
}
