//! Cartan frame and curvatures of a null curve, the pseudo-de Sitter
//! parameter, and the shape curvatures `κ̃ = κ/τ`, `τ̃ = −τ'/(2τ)`.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::curve::{CurveSource, DerivativeConfig};
use crate::error::{Error, Result};
use crate::mink::{cross3, MinkVector4, PseudoOrthonormalFrame, ORIENTATION_SIGN};
use crate::numeric::{adaptive_simpson, cumulative_integral, gradient};

/// Tolerances for curve analysis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisConfig {
    /// Largest admissible `|γ'·γ'| / ‖γ'‖²`.
    pub null_tol: f64,
    /// Smallest admissible ratio of extreme singular values of the
    /// (row-normalized) derivative matrix.
    pub rank_tol: f64,
    /// Absolute tolerance of the pseudo-arc quadrature.
    pub quad_tol: f64,
    /// `|τ|` at or below this is treated as zero torsion.
    pub torsion_tol: f64,
    pub derivatives: DerivativeConfig,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            null_tol: 1e-6,
            rank_tol: 1e-8,
            quad_tol: 1e-10,
            torsion_tol: 1e-12,
            derivatives: DerivativeConfig::default(),
        }
    }
}

/// Everything the Cartan frame construction yields at one parameter value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CartanApparatus {
    pub t: f64,
    pub frame: PseudoOrthonormalFrame,
    pub kappa: f64,
    /// `|τ|`.
    pub tau_mag: f64,
    /// `τ` with the sign fixed by `W₂' = −τL` and the orientation convention.
    pub tau_signed: f64,
    /// `ds/dt = (γ''·γ'')^{1/4}`.
    pub speed: f64,
}

fn check_null(t: f64, d1: &MinkVector4, cfg: &AnalysisConfig) -> Result<()> {
    let n2 = d1.euclidean_norm_squared();
    let ratio = if n2 > 0.0 { d1.dot(d1).abs() / n2 } else { f64::INFINITY };
    if !(ratio <= cfg.null_tol) {
        return Err(Error::NotNullCurve { t, ratio });
    }
    Ok(())
}

fn acceleration_norm(t: f64, d2: &MinkVector4) -> Result<f64> {
    let g = d2.dot(d2);
    if !(g > 1e-14 * d2.euclidean_norm_squared()) || g <= 0.0 {
        return Err(Error::DegenerateAcceleration { t });
    }
    Ok(g)
}

fn check_rank(t: f64, d: &[MinkVector4; 4], cfg: &AnalysisConfig) -> Result<()> {
    let mut m = Matrix4::zeros();
    for (i, v) in d.iter().enumerate() {
        let n = v.euclidean_norm();
        if n > 0.0 {
            m.set_row(i, &(v.to_row() / n));
        }
    }
    let sv = m.singular_values();
    let ratio = sv.min() / sv.max();
    if !(ratio >= cfg.rank_tol) {
        return Err(Error::NotCartan { t, ratio });
    }
    Ok(())
}

/// `(γ''·γ'')^{1/4}` at `t`, after checking nullity and acceleration.
fn pseudo_arc_speed(c: &CurveSource, t: f64, cfg: &AnalysisConfig) -> Result<f64> {
    let d = c.derivatives(t, &cfg.derivatives)?;
    check_null(t, &d[0], cfg)?;
    Ok(acceleration_norm(t, &d[1])?.powf(0.25))
}

/// Pseudo-arc length `∫_{t0}^{t} (γ''·γ'')^{1/4} du` by adaptive quadrature.
/// Negative when `t < t0`.
pub fn pseudo_arc_length(c: &CurveSource, t0: f64, t: f64) -> Result<f64> {
    pseudo_arc_length_with(c, t0, t, &AnalysisConfig::default())
}

pub fn pseudo_arc_length_with(c: &CurveSource, t0: f64, t: f64, cfg: &AnalysisConfig) -> Result<f64> {
    if t == t0 {
        return Ok(0.0);
    }
    adaptive_simpson(&mut |u| pseudo_arc_speed(c, u, cfg), t0, t, cfg.quad_tol)
}

/// `σ(t) − σ(t0)`, the pseudo-de Sitter length `∫ √|τ| ds`. Adaptive
/// quadrature for analytic curves; for samples, the same cumulative rule the
/// profile uses, over the sample nodes between the end points.
pub fn pseudo_de_sitter_length_with(c: &CurveSource, t0: f64, t: f64, cfg: &AnalysisConfig) -> Result<f64> {
    if t == t0 {
        return Ok(0.0);
    }
    let mut rate = |u: f64| -> Result<f64> {
        let a = cartan_apparatus_with(c, u, cfg)?;
        if a.tau_mag <= cfg.torsion_tol {
            return Err(Error::ZeroTorsion { t: u });
        }
        Ok(a.tau_mag.sqrt() * a.speed)
    };
    match c {
        CurveSource::Analytic(_) => adaptive_simpson(&mut rate, t0, t, cfg.quad_tol),
        CurveSource::Sampled(sc) => {
            let (lo, hi) = (t0.min(t), t0.max(t));
            let mut nodes = vec![lo];
            nodes.extend(sc.params().iter().copied().filter(|&v| v > lo && v < hi));
            nodes.push(hi);
            if nodes.len() < 3 {
                nodes.insert(1, 0.5 * (lo + hi));
            }
            let r = nodes.iter().map(|&u| rate(u)).collect::<Result<Vec<_>>>()?;
            let total = cumulative_integral(&nodes, &r)[nodes.len() - 1];
            Ok(if t > t0 { total } else { -total })
        }
    }
}

/// Cartan frame and curvatures at `t`.
pub fn cartan_apparatus(c: &CurveSource, t: f64) -> Result<CartanApparatus> {
    cartan_apparatus_with(c, t, &AnalysisConfig::default())
}

pub fn cartan_apparatus_with(c: &CurveSource, t: f64, cfg: &AnalysisConfig) -> Result<CartanApparatus> {
    let d = c.derivatives(t, &cfg.derivatives)?;
    apparatus_from_derivatives(t, &d, cfg)
}

/// Build the Cartan apparatus from `γ', γ'', γ''', γ''''` in an arbitrary
/// regular parameter `t`.
pub fn apparatus_from_derivatives(t: f64, d: &[MinkVector4; 4], cfg: &AnalysisConfig) -> Result<CartanApparatus> {
    check_null(t, &d[0], cfg)?;
    let g = acceleration_norm(t, &d[1])?;
    check_rank(t, d, cfg)?;

    // derivatives of s(t)
    let gp = 2.0 * d[1].dot(&d[2]);
    let gpp = 2.0 * (d[2].dot(&d[2]) + d[1].dot(&d[3]));
    let s1 = g.powf(0.25);
    let s2 = 0.25 * g.powf(-0.75) * gp;
    let s3 = 0.25 * (-0.75 * g.powf(-1.75) * gp * gp + g.powf(-0.75) * gpp);

    // derivatives of γ in s; the fourth is only known modulo L, which
    // leaves κ, τ and the frame untouched
    let c1 = d[0] / s1;
    let c2 = (d[1] - c1 * s2) / (s1 * s1);
    let c3 = (d[2] - c2 * (3.0 * s1 * s2) - c1 * s3) / (s1 * s1 * s1);
    let c4 = (d[3] - c3 * (6.0 * s1 * s1 * s2) - c2 * (3.0 * s2 * s2 + 4.0 * s1 * s3)) / (s1 * s1 * s1 * s1);

    let kappa = 0.5 * c3.dot(&c3);
    let l = c1;
    let w1 = c2;
    let n = -c3 - l * kappa;
    // η·(Euclidean cross product) is Lorentz-orthogonal to L, N, W1
    let v = cross3(&l, &n, &w1).lowered();
    let vv = v.dot(&v);
    if !(vv > 0.0) {
        return Err(Error::NotCartan { t, ratio: 0.0 });
    }
    let w2 = v * (ORIENTATION_SIGN / vv.sqrt());
    let tau_signed = -c4.dot(&w2);
    let tau_mag = tau_signed.abs();
    if !(tau_mag > cfg.torsion_tol) {
        return Err(Error::ZeroTorsion { t });
    }
    Ok(CartanApparatus {
        t,
        frame: PseudoOrthonormalFrame::new_unchecked(l, n, w1, w2),
        kappa,
        tau_mag,
        tau_signed,
        speed: s1,
    })
}

/// Cartan data sampled along a curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanProfile {
    /// Curve parameter at each sample.
    pub t: Vec<f64>,
    /// Pseudo-arc length, zero at the first sample.
    pub s: Vec<f64>,
    pub kappa: Vec<f64>,
    pub tau_mag: Vec<f64>,
    /// `τ` with its sign; only `tau_mag` enters the shape invariants.
    pub tau_signed: Vec<f64>,
    pub frames: Vec<PseudoOrthonormalFrame>,
    /// `ds/dt`.
    pub speed: Vec<f64>,
}

impl CartanProfile {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `dσ/dt = √|τ|·ds/dt` at each sample.
    pub fn sigma_rate(&self) -> Vec<f64> {
        self.tau_mag.iter().zip(&self.speed).map(|(tau, sp)| tau.sqrt() * sp).collect()
    }
}

/// Cartan profile on the given strictly increasing parameter grid.
pub fn cartan_profile(c: &CurveSource, grid: &[f64], cfg: &AnalysisConfig) -> Result<CartanProfile> {
    if grid.len() < 3 {
        return Err(Error::InsufficientSamples { got: grid.len(), need: 3 });
    }
    if let Some(i) = grid.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::NonMonotone { index: i + 1 });
    }
    let app = grid
        .iter()
        .map(|&t| cartan_apparatus_with(c, t, cfg))
        .collect::<Result<Vec<_>>>()?;
    let speed: Vec<f64> = app.iter().map(|a| a.speed).collect();
    let s = match c {
        CurveSource::Analytic(_) => {
            let tol = cfg.quad_tol / (grid.len() - 1) as f64;
            let mut acc = 0.0;
            let mut s = Vec::with_capacity(grid.len());
            s.push(0.0);
            for w in grid.windows(2) {
                acc += adaptive_simpson(&mut |u| pseudo_arc_speed(c, u, cfg), w[0], w[1], tol)?;
                s.push(acc);
            }
            s
        }
        CurveSource::Sampled(_) => cumulative_integral(grid, &speed),
    };
    Ok(CartanProfile {
        t: grid.to_vec(),
        s,
        kappa: app.iter().map(|a| a.kappa).collect(),
        tau_mag: app.iter().map(|a| a.tau_mag).collect(),
        tau_signed: app.iter().map(|a| a.tau_signed).collect(),
        frames: app.iter().map(|a| a.frame).collect(),
        speed,
    })
}

/// Profile on the default grid: `points` uniform parameters for analytic
/// curves, every interior sample for sampled ones.
pub fn cartan_profile_default(c: &CurveSource, points: usize, cfg: &AnalysisConfig) -> Result<CartanProfile> {
    cartan_profile(c, &c.analysis_grid(points, &cfg.derivatives), cfg)
}

/// Shape curvatures sampled on a pseudo-de Sitter grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeSignature {
    pub sigma: Vec<f64>,
    pub kappa_tilde: Vec<f64>,
    pub tau_tilde: Vec<f64>,
}

impl ShapeSignature {
    pub fn new(sigma: Vec<f64>, kappa_tilde: Vec<f64>, tau_tilde: Vec<f64>) -> Result<Self> {
        if sigma.len() != kappa_tilde.len() {
            return Err(Error::LengthMismatch(sigma.len(), kappa_tilde.len()));
        }
        if sigma.len() != tau_tilde.len() {
            return Err(Error::LengthMismatch(sigma.len(), tau_tilde.len()));
        }
        if sigma.len() < 2 {
            return Err(Error::InsufficientSamples { got: sigma.len(), need: 2 });
        }
        if let Some(i) = sigma.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::NonMonotone { index: i + 1 });
        }
        if !sigma.iter().chain(&kappa_tilde).chain(&tau_tilde).all(|v| v.is_finite()) {
            return Err(Error::NonFinite("shape signature"));
        }
        Ok(ShapeSignature { sigma, kappa_tilde, tau_tilde })
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn extent(&self) -> f64 {
        self.sigma[self.sigma.len() - 1] - self.sigma[0]
    }
}

/// Pseudo-de Sitter values of a profile, zero at sample `origin`.
pub fn pseudo_de_sitter(profile: &CartanProfile, origin: usize) -> Result<Vec<f64>> {
    if origin >= profile.len() {
        return Err(Error::InvalidParams(format!(
            "sigma origin index {origin} outside profile of length {}",
            profile.len()
        )));
    }
    if let Some(i) = profile.tau_mag.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::ZeroTorsion { t: profile.t[i] });
    }
    let sig = cumulative_integral(&profile.t, &profile.sigma_rate());
    let at = sig[origin];
    Ok(sig.into_iter().map(|v| v - at).collect())
}

/// Shape signature with `σ = 0` at sample `origin`.
pub fn de_sitter_reparam(profile: &CartanProfile, origin: usize) -> Result<ShapeSignature> {
    de_sitter_reparam_offset(profile, origin, 0.0)
}

/// Shape signature with `σ = offset` at sample `origin`.
pub fn de_sitter_reparam_offset(profile: &CartanProfile, origin: usize, offset: f64) -> Result<ShapeSignature> {
    let sigma: Vec<f64> = pseudo_de_sitter(profile, origin)?.into_iter().map(|v| v + offset).collect();
    if let Some(i) = sigma.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::ZeroTorsion { t: profile.t[i + 1] });
    }
    let dtau = gradient(&sigma, &profile.tau_mag);
    let kappa_tilde = profile.kappa.iter().zip(&profile.tau_mag).map(|(k, t)| k / t).collect();
    let tau_tilde = dtau.iter().zip(&profile.tau_mag).map(|(d, t)| -d / (2.0 * t)).collect();
    ShapeSignature::new(sigma, kappa_tilde, tau_tilde)
}

/// The frames `C^sim` and `C^H = C^sim/τ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapeFrame {
    pub lsim: MinkVector4,
    pub nsim: MinkVector4,
    pub w1sim: MinkVector4,
    pub w2sim: MinkVector4,
    pub h1: MinkVector4,
    pub h2: MinkVector4,
    pub h3: MinkVector4,
    pub h4: MinkVector4,
}

impl ShapeFrame {
    pub fn from_cartan(frame: &PseudoOrthonormalFrame, tau: f64, t: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::ZeroTorsion { t });
        }
        let r = tau.sqrt();
        let (lsim, nsim, w1sim, w2sim) = (frame.l * r, frame.n / r, frame.w1, frame.w2);
        Ok(ShapeFrame {
            lsim,
            nsim,
            w1sim,
            w2sim,
            h1: lsim / tau,
            h2: nsim / tau,
            h3: w1sim / tau,
            h4: w2sim / tau,
        })
    }

    pub fn sim(&self) -> PseudoOrthonormalFrame {
        PseudoOrthonormalFrame::new_unchecked(self.lsim, self.nsim, self.w1sim, self.w2sim)
    }

    /// Rows `H₁..H₄`.
    pub fn h_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_rows(&[self.h1.to_row(), self.h2.to_row(), self.h3.to_row(), self.h4.to_row()])
    }
}

pub fn shape_frames(profile: &CartanProfile, at: usize) -> Result<ShapeFrame> {
    if at >= profile.len() {
        return Err(Error::InvalidParams(format!("sample {at} outside profile of length {}", profile.len())));
    }
    ShapeFrame::from_cartan(&profile.frames[at], profile.tau_mag[at], profile.t[at])
}

/// Coefficient matrix `P` of `d(C^sim)ᵀ/dσ = P(C^sim)ᵀ` as printed, which
/// leaves out the `τ̃` terms.
pub fn structure_matrix_printed(kappa_tilde: f64) -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, 1.0, 0.0,
        0.0, 0.0, kappa_tilde, 1.0,
        -kappa_tilde, -1.0, 0.0, 0.0,
        -1.0, 0.0, 0.0, 0.0,
    )
}

/// Exact `σ`-derivative matrix of `C^sim`: the printed `P` plus
/// `diag(−τ̃, τ̃, 0, 0)` from differentiating `√τ` and `1/√τ`.
pub fn structure_matrix_sim(kappa_tilde: f64, tau_tilde: f64) -> Matrix4<f64> {
    structure_matrix_printed(kappa_tilde) + Matrix4::from_diagonal(&nalgebra::Vector4::new(-tau_tilde, tau_tilde, 0.0, 0.0))
}

/// `P̃` of `d(C^H)ᵀ/dσ = P̃(C^H)ᵀ` as printed: `P + 2τ̃I`.
pub fn structure_matrix_h_printed(kappa_tilde: f64, tau_tilde: f64) -> Matrix4<f64> {
    structure_matrix_printed(kappa_tilde) + Matrix4::identity() * (2.0 * tau_tilde)
}

/// Exact `σ`-derivative matrix of `C^H`.
pub fn structure_matrix_h(kappa_tilde: f64, tau_tilde: f64) -> Matrix4<f64> {
    structure_matrix_sim(kappa_tilde, tau_tilde) + Matrix4::identity() * (2.0 * tau_tilde)
}
