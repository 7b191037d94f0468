//! Curve sources: closed-form curves with exact derivatives, or dense sample
//! tables differentiated by finite differences.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mink::{MinkVector4, PSimilarity};
use crate::numeric::fornberg_weights;

/// Number of nodes in every finite-difference stencil.
pub const STENCIL_WIDTH: usize = 9;

/// A curve with analytic derivatives up to order 4.
pub trait AnalyticCurve: Send + Sync {
    /// `γ⁽ᵏ⁾(t)` for `order` in `0..=4`.
    fn derivative(&self, t: f64, order: usize) -> MinkVector4;

    /// Parameter interval on which the evaluators are defined.
    fn domain(&self) -> (f64, f64);

    fn position(&self, t: f64) -> MinkVector4 {
        self.derivative(t, 0)
    }
}

/// Positions sampled at strictly increasing parameter values.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledCurve {
    t: Vec<f64>,
    x: Vec<MinkVector4>,
}

impl SampledCurve {
    pub fn new(t: Vec<f64>, x: Vec<MinkVector4>) -> Result<Self> {
        if t.len() != x.len() {
            return Err(Error::LengthMismatch(t.len(), x.len()));
        }
        if t.len() < STENCIL_WIDTH {
            return Err(Error::InsufficientSamples {
                got: t.len(),
                need: STENCIL_WIDTH,
            });
        }
        if let Some(i) = t.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonMonotone { index: i });
        }
        if let Some(i) = t.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotone { index: i + 1 });
        }
        if !x.iter().all(MinkVector4::is_finite) {
            return Err(Error::NonFinite("sample position"));
        }
        Ok(SampledCurve { t, x })
    }

    /// Sample an analytic curve at the given parameters.
    pub fn from_analytic(curve: &dyn AnalyticCurve, t: Vec<f64>) -> Result<Self> {
        let x = t.iter().map(|&ti| curve.position(ti)).collect();
        Self::new(t, x)
    }

    pub fn params(&self) -> &[f64] {
        &self.t
    }

    pub fn positions(&self) -> &[MinkVector4] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn transformed(&self, f: &PSimilarity) -> SampledCurve {
        SampledCurve {
            t: self.t.clone(),
            x: self.x.iter().map(|p| f.apply(p)).collect(),
        }
    }

    /// Stride between stencil nodes so the effective spacing is close to
    /// `target_spacing`, limited by the number of samples.
    pub fn stride(&self, cfg: &DerivativeConfig) -> usize {
        let n = self.t.len();
        let h = (self.t[n - 1] - self.t[0]) / (n - 1) as f64;
        let want = (cfg.target_spacing / h).round().max(1.0) as usize;
        want.min((n - 1) / (STENCIL_WIDTH - 1)).max(1)
    }

    /// Sample stride between analysis points: a quarter of the stencil
    /// stride. Differentiating `τ` on a finer grid only amplifies the
    /// rounding noise of the fourth-derivative stencil.
    pub fn analysis_stride(&self, cfg: &DerivativeConfig) -> usize {
        (self.stride(cfg) / 4).max(1)
    }

    /// Interior samples taken every `every` indices.
    pub fn interior_params(&self, cfg: &DerivativeConfig, every: usize) -> Vec<f64> {
        self.interior_indices(cfg).step_by(every.max(1)).map(|i| self.t[i]).collect()
    }

    /// Indices whose centered strided stencil fits inside the table.
    pub fn interior_indices(&self, cfg: &DerivativeConfig) -> std::ops::RangeInclusive<usize> {
        let half = (STENCIL_WIDTH / 2) * self.stride(cfg);
        half..=self.t.len() - 1 - half
    }

    fn estimate(&self, t: f64, max_order: usize, cfg: &DerivativeConfig) -> Result<Vec<MinkVector4>> {
        let n = self.t.len();
        let (lo, hi) = (self.t[0], self.t[n - 1]);
        if !(lo..=hi).contains(&t) {
            return Err(Error::OutOfRange { t, min: lo, max: hi });
        }
        let k = self.stride(cfg);
        let span = (STENCIL_WIDTH - 1) * k;
        let nearest = match self.t.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i >= n => n - 1,
            Err(i) => {
                if t - self.t[i - 1] <= self.t[i] - t {
                    i - 1
                } else {
                    i
                }
            }
        };
        let start = nearest.saturating_sub(span / 2).min(n - 1 - span);
        let idx: Vec<usize> = (0..STENCIL_WIDTH).map(|j| start + j * k).collect();
        let nodes: Vec<f64> = idx.iter().map(|&i| self.t[i]).collect();
        // center the stencil on the evaluation point to keep weights small
        let w = fornberg_weights(0.0, &nodes.iter().map(|v| v - t).collect::<Vec<_>>(), max_order);
        Ok((0..=max_order)
            .map(|order| {
                idx.iter()
                    .zip(&w)
                    .fold(MinkVector4::ZERO, |acc, (&i, wj)| acc + self.x[i] * wj[order])
            })
            .collect())
    }
}

/// Finite-difference settings for sampled curves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeConfig {
    /// Effective node spacing the stencil aims for, in parameter units.
    /// Adjacent samples are too close for fourth derivatives in double
    /// precision once the spacing drops much below 1e-2; shape curvatures
    /// of unit-scale curves are most accurate near 0.05.
    pub target_spacing: f64,
}

impl Default for DerivativeConfig {
    fn default() -> Self {
        DerivativeConfig {
            target_spacing: 0.05,
        }
    }
}

/// A curve to analyze.
#[derive(Clone)]
pub enum CurveSource {
    Analytic(Arc<dyn AnalyticCurve>),
    Sampled(SampledCurve),
}

impl fmt::Debug for CurveSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveSource::Analytic(c) => write!(f, "Analytic({:?})", c.domain()),
            CurveSource::Sampled(s) => write!(f, "Sampled({} samples)", s.len()),
        }
    }
}

impl CurveSource {
    pub fn analytic<C: AnalyticCurve + 'static>(curve: C) -> Self {
        CurveSource::Analytic(Arc::new(curve))
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            CurveSource::Analytic(c) => c.domain(),
            CurveSource::Sampled(s) => (s.t[0], s.t[s.t.len() - 1]),
        }
    }

    pub fn position(&self, t: f64) -> Result<MinkVector4> {
        self.check_range(t)?;
        match self {
            CurveSource::Analytic(c) => Ok(c.position(t)),
            CurveSource::Sampled(s) => Ok(s.estimate(t, 0, &DerivativeConfig::default())?[0]),
        }
    }

    /// Derivatives of orders `1..=4` at `t`.
    pub fn derivatives(&self, t: f64, cfg: &DerivativeConfig) -> Result<[MinkVector4; 4]> {
        self.check_range(t)?;
        match self {
            CurveSource::Analytic(c) => Ok(std::array::from_fn(|k| c.derivative(t, k + 1))),
            CurveSource::Sampled(s) => {
                let d = s.estimate(t, 4, cfg)?;
                Ok([d[1], d[2], d[3], d[4]])
            }
        }
    }

    /// Apply a p-similarity to the curve (exactly for analytic sources,
    /// pointwise for samples).
    pub fn transformed(&self, f: PSimilarity) -> CurveSource {
        match self {
            CurveSource::Analytic(c) => CurveSource::Analytic(Arc::new(TransformedCurve {
                inner: Arc::clone(c),
                f,
            })),
            CurveSource::Sampled(s) => CurveSource::Sampled(s.transformed(&f)),
        }
    }

    /// Default parameter grid for building a profile: `points` uniform values
    /// for analytic curves, interior samples every
    /// [`SampledCurve::analysis_stride`] for sampled ones.
    pub fn analysis_grid(&self, points: usize, cfg: &DerivativeConfig) -> Vec<f64> {
        match self {
            CurveSource::Analytic(c) => {
                let (a, b) = c.domain();
                let n = points.max(2);
                (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
            }
            CurveSource::Sampled(s) => s.interior_params(cfg, s.analysis_stride(cfg)),
        }
    }

    fn check_range(&self, t: f64) -> Result<()> {
        let (min, max) = self.domain();
        let slack = 1e-12 * (max - min).abs().max(1.0);
        if t.is_nan() || t < min - slack || t > max + slack {
            return Err(Error::OutOfRange { t, min, max });
        }
        Ok(())
    }
}

/// `f∘γ` for an analytic `γ`: derivatives are `μΦγ⁽ᵏ⁾`.
pub struct TransformedCurve {
    inner: Arc<dyn AnalyticCurve>,
    f: PSimilarity,
}

impl TransformedCurve {
    pub fn new(inner: Arc<dyn AnalyticCurve>, f: PSimilarity) -> Self {
        TransformedCurve { inner, f }
    }
}

impl AnalyticCurve for TransformedCurve {
    fn derivative(&self, t: f64, order: usize) -> MinkVector4 {
        let d = self.inner.derivative(t, order);
        if order == 0 {
            self.f.apply(&d)
        } else {
            self.f.apply_linear(&d)
        }
    }

    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }
}

/// Derivative of order `order` (1..=4) at `t`. Analytic sources use their
/// evaluators; sampled sources use strided 9-node stencils.
pub fn estimate_derivatives(
    c: &CurveSource,
    t: f64,
    order: usize,
    cfg: &DerivativeConfig,
) -> Result<MinkVector4> {
    if !(1..=4).contains(&order) {
        return Err(Error::InvalidParams(format!(
            "derivative order must be 1..=4, got {order}"
        )));
    }
    Ok(c.derivatives(t, cfg)?[order - 1])
}
