//! p-similarity equivalence: align shape signatures by a `σ` translation, then
//! recover the similarity from the Cartan frames at an aligned point.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    cartan_apparatus_with, cartan_profile, pseudo_de_sitter, AnalysisConfig, CartanApparatus, ShapeSignature,
};
use crate::curve::CurveSource;
use crate::error::{Error, Result};
use crate::mink::{metric_matrix, null_rotation_from_point_matrix, pseudo_orthonormal_gram, MinkVector4, PSimilarity};
use crate::numeric::{interp_hermite, interp_linear, solve_monotone};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchConfig {
    /// Signatures closer than this (max of `|Δκ̃| + |Δτ̃|`) are similar.
    pub tol: f64,
    /// Required overlap as a fraction of the shorter signature.
    pub min_overlap: f64,
    /// Candidate shifts in the coarse scan.
    pub coarse_shifts: usize,
    /// Profile points for analytic curves.
    pub grid_points: usize,
    /// Use every this-many interior samples of sampled curves; `None` uses
    /// [`SampledCurve::analysis_stride`](crate::curve::SampledCurve::analysis_stride).
    pub sample_stride: Option<usize>,
    /// Holdout points used to verify the recovered similarity.
    pub verify_points: usize,
    pub analysis: AnalysisConfig,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            tol: 1e-5,
            min_overlap: 0.5,
            coarse_shifts: 200,
            grid_points: 801,
            sample_stride: None,
            verify_points: 10,
            analysis: AnalysisConfig::default(),
        }
    }
}

impl MatchConfig {
    /// Default tolerance for the given pair: `1e-5` when both are analytic,
    /// `1e-3` otherwise.
    pub fn for_sources(a: &CurveSource, b: &CurveSource) -> Self {
        let analytic = matches!((a, b), (CurveSource::Analytic(_), CurveSource::Analytic(_)));
        MatchConfig {
            tol: if analytic { 1e-5 } else { 1e-3 },
            ..Default::default()
        }
    }
}

/// Best `σ` translation between two signatures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignatureMatch {
    /// `σ_B = σ_A + shift` at corresponding points.
    pub shift: f64,
    pub residual: f64,
    /// Length of the overlapping `σ` interval.
    pub overlap: f64,
}

fn overlap_interval(a: &ShapeSignature, b: &ShapeSignature, shift: f64) -> (f64, f64) {
    let lo = a.sigma[0].max(b.sigma[0] - shift);
    let hi = a.sigma[a.len() - 1].min(b.sigma[b.len() - 1] - shift);
    (lo, hi)
}

/// `max |κ̃_A(σ) − κ̃_B(σ+shift)| + |τ̃_A(σ) − τ̃_B(σ+shift)|` over the
/// samples of `A` inside the overlap.
pub fn signature_residual(a: &ShapeSignature, b: &ShapeSignature, shift: f64) -> f64 {
    let (lo, hi) = overlap_interval(a, b, shift);
    let mut worst: f64 = 0.0;
    let mut any = false;
    for i in 0..a.len() {
        let s = a.sigma[i];
        if s < lo || s > hi {
            continue;
        }
        let sb = (s + shift).clamp(b.sigma[0], b.sigma[b.len() - 1]);
        let (Some(kb), Some(tb)) = (interp_linear(&b.sigma, &b.kappa_tilde, sb), interp_linear(&b.sigma, &b.tau_tilde, sb))
        else {
            continue;
        };
        any = true;
        worst = worst.max((a.kappa_tilde[i] - kb).abs() + (a.tau_tilde[i] - tb).abs());
    }
    if any {
        worst
    } else {
        f64::INFINITY
    }
}

/// Search the `σ` translation minimizing [`signature_residual`].
pub fn match_signatures(a: &ShapeSignature, b: &ShapeSignature, tol: f64) -> Result<(f64, f64)> {
    let m = match_signatures_with(a, b, &MatchConfig { tol, ..Default::default() })?;
    Ok((m.shift, m.residual))
}

pub fn match_signatures_with(a: &ShapeSignature, b: &ShapeSignature, cfg: &MatchConfig) -> Result<SignatureMatch> {
    let required = cfg.min_overlap * a.extent().min(b.extent());
    // admissible shifts keep at least `required` of overlap
    let lo = b.sigma[0] - a.sigma[a.len() - 1] + required;
    let hi = b.sigma[b.len() - 1] - a.sigma[0] - required;
    if !(hi >= lo) || required <= 0.0 {
        return Err(Error::InsufficientOverlap {
            overlap: a.extent().min(b.extent()),
            required,
        });
    }
    let cost = |d: f64| signature_residual(a, b, d);
    let n = cfg.coarse_shifts.max(3);
    let mut candidates: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    if (lo..=hi).contains(&0.0) {
        candidates.push(0.0);
    }
    let scored: Vec<(f64, f64)> = candidates.iter().map(|&d| (cost(d), d)).collect();
    let best_of = |xs: &[(f64, f64)]| {
        xs.iter()
            .copied()
            .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.abs().total_cmp(&y.1.abs())))
            .expect("nonempty")
    };
    let (rmin, dbest) = best_of(&scored);
    let rmax = scored.iter().map(|x| x.0).fold(f64::NEG_INFINITY, f64::max);

    let finish = |residual: f64, shift: f64| {
        let (o0, o1) = overlap_interval(a, b, shift);
        SignatureMatch { shift, residual, overlap: o1 - o0 }
    };

    // a flat residual means the shift is not identifiable (constant
    // signatures); choose the admissible shift nearest zero
    if rmax - rmin <= 0.1 * cfg.tol {
        let d = 0.0f64.clamp(lo, hi);
        return Ok(finish(cost(d), d));
    }

    // golden-section refinement inside the neighbouring coarse cells
    let step = (hi - lo) / (n - 1) as f64;
    let (mut x0, mut x1) = ((dbest - step).max(lo), (dbest + step).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = x1 - g * (x1 - x0);
    let mut d = x0 + g * (x1 - x0);
    let (mut fc, mut fd) = (cost(c), cost(d));
    for _ in 0..200 {
        if (x1 - x0) <= 1e-14 * (1.0 + dbest.abs()) {
            break;
        }
        if fc <= fd {
            x1 = d;
            d = c;
            fd = fc;
            c = x1 - g * (x1 - x0);
            fc = cost(c);
        } else {
            x0 = c;
            c = d;
            fc = fd;
            d = x0 + g * (x1 - x0);
            fd = cost(d);
        }
    }
    let (r, s) = best_of(&[(rmin, dbest), (fc, c), (fd, d)]);
    Ok(finish(r, s))
}

/// A similarity recovered from two aligned curves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoveredSimilarity {
    pub mu: f64,
    /// The Lorentz part `Φ` (frame-alignment matrix).
    pub phi: Matrix4<f64>,
    pub translation: MinkVector4,
    /// The same map as a [`PSimilarity`] when `Φ` is a null rotation.
    pub similarity: Option<PSimilarity>,
}

impl RecoveredSimilarity {
    pub fn apply(&self, x: &MinkVector4) -> MinkVector4 {
        MinkVector4::from_vector(&(self.phi * x.to_vector() * self.mu)) + self.translation
    }

    /// `μΦ`.
    pub fn linear(&self) -> Matrix4<f64> {
        self.phi * self.mu
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchVerdict {
    pub similar: bool,
    pub sigma_shift: f64,
    pub residual: f64,
    pub recovered: Option<RecoveredSimilarity>,
    /// Relative spread `(max − min)/mean` of `τ_A/τ_B` over the checked points.
    pub mu_spread: Option<f64>,
    /// Largest verification error divided by the curve scale.
    pub recovery_mismatch: Option<f64>,
    /// Why a signature match was downgraded, if it was.
    pub diagnostic: Option<String>,
}

impl MatchVerdict {
    pub fn mu(&self) -> Option<f64> {
        self.recovered.map(|r| r.mu)
    }
}

struct Analyzed {
    t: Vec<f64>,
    sigma: Vec<f64>,
    rate: Vec<f64>,
    signature: ShapeSignature,
}

fn analyze(c: &CurveSource, cfg: &MatchConfig) -> Result<Analyzed> {
    let grid = match (c, cfg.sample_stride) {
        (CurveSource::Sampled(s), Some(every)) => s.interior_params(&cfg.analysis.derivatives, every),
        _ => c.analysis_grid(cfg.grid_points, &cfg.analysis.derivatives),
    };
    let p = cartan_profile(c, &grid, &cfg.analysis)?;
    let sigma = pseudo_de_sitter(&p, 0)?;
    let signature = crate::analysis::de_sitter_reparam(&p, 0)?;
    Ok(Analyzed {
        rate: p.sigma_rate(),
        t: p.t,
        sigma,
        signature,
    })
}

impl Analyzed {
    /// Parameter `t` with `σ(t) = target` (cubic Hermite model of `σ(t)`).
    fn t_at(&self, target: f64) -> f64 {
        let n = self.t.len();
        let f = |t: f64| interp_hermite(&self.t, &self.sigma, &self.rate, t).unwrap_or(f64::NAN);
        solve_monotone(&f, target, self.t[0], self.t[n - 1])
    }
}

/// Rows `(L, N, W₁, W₂)` of the Cartan frame with `L` and `N` rescaled.
fn scaled_frame(a: &CartanApparatus, l_scale: f64) -> Matrix4<f64> {
    let f = a.frame;
    Matrix4::from_rows(&[
        (f.l * l_scale).to_row(),
        (f.n / l_scale).to_row(),
        f.w1.to_row(),
        f.w2.to_row(),
    ])
}

/// Decide whether `B = f∘A` for some p-similarity `f` and recover `f`.
pub fn decide_similar(a: &CurveSource, b: &CurveSource, tol: f64) -> Result<MatchVerdict> {
    decide_similar_with(a, b, &MatchConfig { tol, ..Default::default() })
}

pub fn decide_similar_with(a: &CurveSource, b: &CurveSource, cfg: &MatchConfig) -> Result<MatchVerdict> {
    let (pa, pb) = (analyze(a, cfg)?, analyze(b, cfg)?);
    let m = match_signatures_with(&pa.signature, &pb.signature, cfg)?;
    let mut verdict = MatchVerdict {
        similar: m.residual <= cfg.tol,
        sigma_shift: m.shift,
        residual: m.residual,
        recovered: None,
        mu_spread: None,
        recovery_mismatch: None,
        diagnostic: None,
    };
    if !verdict.similar {
        return Ok(verdict);
    }
    match recover(a, b, &pa, &pb, m, cfg) {
        Ok((rec, spread, mismatch)) => {
            verdict.mu_spread = Some(spread);
            verdict.recovery_mismatch = Some(mismatch);
            if mismatch > 10.0 * cfg.tol {
                verdict.similar = false;
                verdict.diagnostic = Some(Error::RecoveryInconsistent { mismatch }.to_string());
            } else {
                verdict.recovered = Some(rec);
            }
        }
        Err(e) => {
            verdict.similar = false;
            verdict.diagnostic = Some(e.to_string());
        }
    }
    Ok(verdict)
}

fn recover(
    a: &CurveSource,
    b: &CurveSource,
    pa: &Analyzed,
    pb: &Analyzed,
    m: SignatureMatch,
    cfg: &MatchConfig,
) -> Result<(RecoveredSimilarity, f64, f64)> {
    let (lo, hi) = overlap_interval(&pa.signature, &pb.signature, m.shift);
    let inside: Vec<usize> = (0..pa.t.len()).filter(|&i| pa.sigma[i] >= lo && pa.sigma[i] <= hi).collect();
    if inside.len() < 2 {
        return Err(Error::InsufficientOverlap { overlap: hi - lo, required: 0.0 });
    }
    let pair = |i: usize| -> Result<(CartanApparatus, CartanApparatus, f64)> {
        let tb = pb.t_at(pa.sigma[i] + m.shift);
        let xa = cartan_apparatus_with(a, pa.t[i], &cfg.analysis)?;
        let xb = cartan_apparatus_with(b, tb, &cfg.analysis)?;
        Ok((xa, xb, tb))
    };

    let anchor = inside[inside.len() / 2];
    let (fa, fb, tb) = pair(anchor)?;
    let mu = fa.tau_mag / fb.tau_mag;
    // f maps (L, N, W₁, W₂)_A to (L_B/√μ, √μ N_B, W₁_B, W₂_B) up to μ
    let rows_a = scaled_frame(&fa, 1.0);
    let rows_b = scaled_frame(&fb, 1.0 / mu.sqrt());
    // F_A⁻¹ = η F_Aᵀ J*
    let phi = rows_b.transpose() * pseudo_orthonormal_gram() * rows_a * metric_matrix();
    let xa = a.position(pa.t[anchor])?;
    let xb = b.position(tb)?;
    let image = MinkVector4::from_vector(&(phi * xa.to_vector() * mu));
    let translation = xb - image;
    let similarity = null_rotation_from_point_matrix(&phi, 1e-6)
        .ok()
        .and_then(|r| PSimilarity::new(mu, r, translation).ok());
    let rec = RecoveredSimilarity { mu, phi, translation, similarity };

    let k = cfg.verify_points.max(1);
    let mut mus = vec![mu];
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for j in 0..k {
        // evenly spread over the overlap, skipping the anchor
        let pos = ((j as f64 + 0.5) / k as f64 * (inside.len() - 1) as f64).round() as usize;
        let i = inside[pos.min(inside.len() - 1)];
        let (ya, yb, tb) = pair(i)?;
        mus.push(ya.tau_mag / yb.tau_mag);
        let target = b.position(tb)?;
        worst = worst.max((rec.apply(&a.position(pa.t[i])?) - target).euclidean_norm());
        scale = scale.max((target - xb).euclidean_norm());
    }
    let mean = mus.iter().sum::<f64>() / mus.len() as f64;
    let spread = (mus.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - mus.iter().cloned().fold(f64::INFINITY, f64::min)) / mean;
    let scale = if scale > 0.0 { scale } else { xb.euclidean_norm().max(1.0) };
    Ok((rec, spread, worst / scale))
}
