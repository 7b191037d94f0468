//! Shared fixtures for the benchmarks.

use nullsim::catalog::{ExampleCurve, NullHelix};
use nullsim::curve::{CurveSource, SampledCurve};
use nullsim::mink::{MinkVector4, NullRotationParams, PSimilarity};

/// The Example curve sampled every `1e-3` on `[1, 3]`.
pub fn sampled_example() -> CurveSource {
    let t: Vec<f64> = (0..=2000).map(|i| 1.0 + i as f64 * 1e-3).collect();
    CurveSource::Sampled(SampledCurve::from_analytic(&ExampleCurve::new(), t).expect("valid samples"))
}

pub fn helix() -> CurveSource {
    CurveSource::analytic(NullHelix::new(1.0, 2.0).expect("nonzero torsion"))
}

/// A fixed p-similarity with every parameter active.
pub fn similarity() -> PSimilarity {
    let rotation = NullRotationParams::new(1.3, 0.4, -0.7, 2.1).expect("lambda != 0");
    PSimilarity::new(4.0, rotation, MinkVector4([1.0, -2.0, 0.5, 3.0])).expect("mu > 0")
}
