//! Similarity geometry of null Cartan curves in Minkowski space-time `M⁴`.
//!
//! * [`mink`]: Lorentzian algebra, pseudo-orthonormal frames, null rotations
//!   and p-similarities `x ↦ μφ(x) + b`.
//! * [`analysis`]: pseudo-arc length, Cartan frame and curvatures, the
//!   pseudo-de Sitter parameter and the shape curvatures `(κ̃, τ̃)`.
//! * [`reconstruction`]: curves from prescribed shape curvatures.
//! * [`catalog`]: closed-form self-similar curves and null helices.
//! * [`matching`]: p-similarity equivalence of two curves.

// `!(a > b)` is deliberate: NaN must fail every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod catalog;
pub mod curve;
pub mod error;
pub mod mink;
pub mod matching;
pub mod numeric;
pub mod reconstruction;

pub use analysis::{
    cartan_apparatus, cartan_profile, de_sitter_reparam, pseudo_arc_length, pseudo_de_sitter_length_with, shape_frames, AnalysisConfig,
    CartanApparatus, CartanProfile, ShapeFrame, ShapeSignature,
};
pub use catalog::{example_curve, null_helix, self_similar_case, CatalogParams, SelfSimilarCase};
pub use curve::{estimate_derivatives, AnalyticCurve, CurveSource, DerivativeConfig, SampledCurve};
pub use error::{Error, Result};
pub use mink::{
    apply_similarity, classify, compose_similarity, invert_similarity, lorentzian_dot, null_rotation_matrix,
    CausalType, MinkVector4, NullRotationParams, PSimilarity, PseudoOrthonormalFrame,
};
pub use reconstruction::{
    integrate_frame_system, reconstruct_curve, reconstruct_tau_const, FrameSystem, ReconstructionConfig,
    ReconstructionResult, ShapeCurvatureSpec, ShapeFunction,
};
pub use matching::{decide_similar, match_signatures, MatchConfig, MatchVerdict, RecoveredSimilarity};
