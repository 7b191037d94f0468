//! Lorentzian linear algebra in M⁴: the metric diag(-1, 1, 1, 1), causal
//! classification, pseudo-orthonormal frames, null rotations and the
//! p-similarity group `x ↦ μ·Φx + b`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

use nalgebra::{Matrix4, RowVector4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Metric signature `I* = diag(-1, 1, 1, 1)`.
pub const METRIC: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

/// Sign of `det(L, N, W₁, W₂)` (rows, standard coordinates) for a positively
/// oriented frame. The reference frame [`PseudoOrthonormalFrame::reference`]
/// has determinant -1 and is positively oriented by definition.
pub const ORIENTATION_SIGN: f64 = -1.0;

/// Default tolerance for frame construction checks.
pub const FRAME_TOL: f64 = 1e-9;

/// A point or vector of Minkowski space-time. Component 0 is timelike.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MinkVector4(pub [f64; 4]);

impl MinkVector4 {
    pub const ZERO: MinkVector4 = MinkVector4([0.0; 4]);

    /// Panics on NaN or infinite components; use [`MinkVector4::try_new`] for
    /// untrusted input.
    pub fn new(u1: f64, u2: f64, u3: f64, u4: f64) -> Self {
        Self::try_new(u1, u2, u3, u4).expect("MinkVector4 components must be finite")
    }

    pub fn try_new(u1: f64, u2: f64, u3: f64, u4: f64) -> Result<Self> {
        Self::try_from_array([u1, u2, u3, u4])
    }

    pub fn try_from_array(c: [f64; 4]) -> Result<Self> {
        if c.iter().all(|x| x.is_finite()) {
            Ok(MinkVector4(c))
        } else {
            Err(Error::NonFinite("vector component"))
        }
    }

    pub fn components(&self) -> [f64; 4] {
        self.0
    }

    /// Lorentzian inner product `u·v = -u₁v₁ + u₂v₂ + u₃v₃ + u₄v₄`.
    #[inline]
    pub fn dot(&self, other: &MinkVector4) -> f64 {
        let (a, b) = (&self.0, &other.0);
        -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
    }

    #[inline]
    pub fn euclidean_norm_squared(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    #[inline]
    pub fn euclidean_norm(&self) -> f64 {
        self.euclidean_norm_squared().sqrt()
    }

    /// The metric-lowered vector `I*·u`.
    pub fn lowered(&self) -> MinkVector4 {
        MinkVector4([-self.0[0], self.0[1], self.0[2], self.0[3]])
    }

    pub fn max_abs_diff(&self, other: &MinkVector4) -> f64 {
        (0..4).map(|i| (self.0[i] - other.0[i]).abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn to_vector(&self) -> Vector4<f64> {
        Vector4::from(self.0)
    }

    pub fn from_vector(v: &Vector4<f64>) -> Self {
        MinkVector4([v[0], v[1], v[2], v[3]])
    }

    pub fn to_row(&self) -> RowVector4<f64> {
        RowVector4::new(self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

impl fmt::Display for MinkVector4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

impl Index<usize> for MinkVector4 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for MinkVector4 {
    type Output = MinkVector4;
    fn add(self, o: MinkVector4) -> MinkVector4 {
        MinkVector4(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for MinkVector4 {
    type Output = MinkVector4;
    fn sub(self, o: MinkVector4) -> MinkVector4 {
        MinkVector4(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl AddAssign for MinkVector4 {
    fn add_assign(&mut self, o: MinkVector4) {
        for i in 0..4 {
            self.0[i] += o.0[i];
        }
    }
}

impl SubAssign for MinkVector4 {
    fn sub_assign(&mut self, o: MinkVector4) {
        for i in 0..4 {
            self.0[i] -= o.0[i];
        }
    }
}

impl Neg for MinkVector4 {
    type Output = MinkVector4;
    fn neg(self) -> MinkVector4 {
        MinkVector4(self.0.map(|x| -x))
    }
}

impl Mul<f64> for MinkVector4 {
    type Output = MinkVector4;
    fn mul(self, k: f64) -> MinkVector4 {
        MinkVector4(self.0.map(|x| x * k))
    }
}

impl Mul<MinkVector4> for f64 {
    type Output = MinkVector4;
    fn mul(self, v: MinkVector4) -> MinkVector4 {
        v * self
    }
}

impl Div<f64> for MinkVector4 {
    type Output = MinkVector4;
    fn div(self, k: f64) -> MinkVector4 {
        MinkVector4(self.0.map(|x| x / k))
    }
}

/// Lorentzian inner product.
pub fn lorentzian_dot(u: &MinkVector4, v: &MinkVector4) -> f64 {
    u.dot(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalType {
    Spacelike,
    Timelike,
    Null,
}

/// A causal type together with the tolerance it was decided with.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: CausalType,
    pub eps: f64,
}

/// Scale-aware nullity tolerance `1e-9 · max(1, ‖u‖²)`.
pub fn default_null_eps(u: &MinkVector4) -> f64 {
    1e-9 * u.euclidean_norm_squared().max(1.0)
}

/// Classify `u` as null when `|u·u| ≤ eps`. Negative `eps` is treated as 0.
pub fn classify(u: &MinkVector4, eps: f64) -> Classification {
    let eps = eps.max(0.0);
    let q = u.dot(u);
    let kind = if q.abs() <= eps {
        CausalType::Null
    } else if q < 0.0 {
        CausalType::Timelike
    } else {
        CausalType::Spacelike
    };
    Classification { kind, eps }
}

/// `J*`: the Gram matrix of a pseudo-orthonormal frame (L·N = 1, Wᵢ·Wᵢ = 1).
pub fn pseudo_orthonormal_gram() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0,
    )
}

/// `diag(-1, 1, 1, 1)` as a matrix.
pub fn metric_matrix() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::from(METRIC))
}

/// Gram matrix `K·I*·Kᵀ` of the rows of `k`.
pub fn gram_of_rows(k: &Matrix4<f64>) -> Matrix4<f64> {
    k * metric_matrix() * k.transpose()
}

/// `max |K·I*·Kᵀ - J*|`, zero exactly when the rows of `k` are pseudo-orthonormal.
pub fn gram_deviation(k: &Matrix4<f64>) -> f64 {
    (gram_of_rows(k) - pseudo_orthonormal_gram()).abs().max()
}

/// A pseudo-orthonormal frame `(L, N, W₁, W₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudoOrthonormalFrame {
    pub l: MinkVector4,
    pub n: MinkVector4,
    pub w1: MinkVector4,
    pub w2: MinkVector4,
}

impl PseudoOrthonormalFrame {
    /// Checked constructor: Gram relations within `tol` and positive orientation.
    pub fn new(
        l: MinkVector4,
        n: MinkVector4,
        w1: MinkVector4,
        w2: MinkVector4,
        tol: f64,
    ) -> Result<Self> {
        let frame = Self::new_unchecked(l, n, w1, w2);
        frame.validate(tol)?;
        Ok(frame)
    }

    pub const fn new_unchecked(
        l: MinkVector4,
        n: MinkVector4,
        w1: MinkVector4,
        w2: MinkVector4,
    ) -> Self {
        PseudoOrthonormalFrame { l, n, w1, w2 }
    }

    /// The initial frame used throughout the worked examples:
    /// L = (1,0,1,0)/√2, N = (-1,0,1,0)/√2, W₁ = (0,1,0,1)/√2, W₂ = (0,-1,0,1)/√2.
    pub fn reference() -> Self {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        PseudoOrthonormalFrame {
            l: MinkVector4([a, 0.0, a, 0.0]),
            n: MinkVector4([-a, 0.0, a, 0.0]),
            w1: MinkVector4([0.0, a, 0.0, a]),
            w2: MinkVector4([0.0, -a, 0.0, a]),
        }
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        if !self.vectors().iter().all(MinkVector4::is_finite) {
            return Err(Error::NonFinite("frame"));
        }
        let deviation = self.gram_deviation();
        if deviation > tol {
            return Err(Error::NotPseudoOrthonormal { deviation });
        }
        if !self.is_positively_oriented() {
            return Err(Error::WrongOrientation);
        }
        Ok(())
    }

    pub fn vectors(&self) -> [MinkVector4; 4] {
        [self.l, self.n, self.w1, self.w2]
    }

    /// Rows are L, N, W₁, W₂.
    pub fn to_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_rows(&[
            self.l.to_row(),
            self.n.to_row(),
            self.w1.to_row(),
            self.w2.to_row(),
        ])
    }

    pub fn from_matrix(k: &Matrix4<f64>) -> Self {
        let row = |i: usize| MinkVector4([k[(i, 0)], k[(i, 1)], k[(i, 2)], k[(i, 3)]]);
        PseudoOrthonormalFrame::new_unchecked(row(0), row(1), row(2), row(3))
    }

    pub fn gram(&self) -> Matrix4<f64> {
        gram_of_rows(&self.to_matrix())
    }

    pub fn gram_deviation(&self) -> f64 {
        gram_deviation(&self.to_matrix())
    }

    pub fn determinant(&self) -> f64 {
        self.to_matrix().determinant()
    }

    pub fn is_positively_oriented(&self) -> bool {
        self.determinant() * ORIENTATION_SIGN > 0.0
    }

    /// Frame whose rows are `R·(L, N, W₁, W₂)ᵀ`.
    pub fn transformed_by(&self, r: &Matrix4<f64>) -> Self {
        Self::from_matrix(&(r * self.to_matrix()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.to_matrix() - other.to_matrix()).abs().max()
    }
}

/// Parameters `(λ, ε, ζ, θ)` of a null rotation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullRotationParams {
    lambda: f64,
    epsilon: f64,
    zeta: f64,
    theta: f64,
}

impl NullRotationParams {
    pub fn new(lambda: f64, epsilon: f64, zeta: f64, theta: f64) -> Result<Self> {
        if ![lambda, epsilon, zeta, theta].iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("null rotation parameter"));
        }
        if lambda == 0.0 {
            return Err(Error::ZeroLambda);
        }
        Ok(NullRotationParams {
            lambda,
            epsilon,
            zeta,
            theta,
        })
    }

    pub const fn identity() -> Self {
        NullRotationParams {
            lambda: 1.0,
            epsilon: 0.0,
            zeta: 0.0,
            theta: 0.0,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn zeta(&self) -> f64 {
        self.zeta
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn is_identity(&self) -> bool {
        self.lambda == 1.0 && self.epsilon == 0.0 && self.zeta == 0.0 && self.theta == 0.0
    }

    /// The frame-action matrix: new frame rows = `R · (L̄, N̄, W̄₁, W̄₂)ᵀ`.
    pub fn frame_matrix(&self) -> Matrix4<f64> {
        let NullRotationParams {
            lambda: l,
            epsilon: e,
            zeta: z,
            theta: t,
        } = *self;
        let (s, c) = t.sin_cos();
        Matrix4::new(
            l, 0.0, 0.0, 0.0, //
            -0.5 * l * (e * e + z * z), 1.0 / l, -e, z, //
            l * e * c + l * z * s, 0.0, c, -s, //
            l * e * s - l * z * c, 0.0, s, c,
        )
    }

    /// Recover the parameters from a frame-action matrix, checking that every
    /// entry is consistent with the null-rotation form within `tol`.
    pub fn from_frame_matrix(r: &Matrix4<f64>, tol: f64) -> Result<Self> {
        let lambda = r[(0, 0)];
        if !lambda.is_finite() || lambda.abs() <= tol {
            return Err(Error::NotNullRotation {
                deviation: (1.0 - lambda.abs()).abs(),
            });
        }
        let theta = r[(3, 2)].atan2(r[(2, 2)]);
        let params = NullRotationParams::new(lambda, -r[(1, 2)], r[(1, 3)], theta)?;
        let deviation = (params.frame_matrix() - r).abs().max();
        if deviation > tol {
            return Err(Error::NotNullRotation { deviation });
        }
        Ok(params)
    }

    /// Coordinate matrix `Φ` of the point map: the unique linear map sending
    /// the reference frame `F₀` to `R·F₀`, i.e. `Φ = F₀ᵀ Rᵀ F₀⁻ᵀ`.
    pub fn point_matrix(&self) -> Matrix4<f64> {
        if self.is_identity() {
            return Matrix4::identity();
        }
        frame_action_to_point_matrix(&self.frame_matrix())
    }
}

impl Default for NullRotationParams {
    fn default() -> Self {
        Self::identity()
    }
}

/// `F₀⁻ᵀ = J*·F₀·I*`, exact because `F₀·I*·F₀ᵀ = J*`.
fn reference_inverse_transpose() -> Matrix4<f64> {
    pseudo_orthonormal_gram() * PseudoOrthonormalFrame::reference().to_matrix() * metric_matrix()
}

fn frame_action_to_point_matrix(r: &Matrix4<f64>) -> Matrix4<f64> {
    let f0 = PseudoOrthonormalFrame::reference().to_matrix();
    f0.transpose() * r.transpose() * reference_inverse_transpose()
}

fn point_matrix_to_frame_action(phi: &Matrix4<f64>) -> Matrix4<f64> {
    // R F₀ = F₀ Φᵀ  ⇒  R = F₀ Φᵀ F₀⁻¹
    let f0 = PseudoOrthonormalFrame::reference().to_matrix();
    f0 * phi.transpose() * reference_inverse_transpose().transpose()
}

/// The frame-action matrix of a null rotation.
pub fn null_rotation_matrix(p: &NullRotationParams) -> Matrix4<f64> {
    p.frame_matrix()
}

/// A p-similarity `f(x) = μ·Φx + b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PSimilarity {
    mu: f64,
    rotation: NullRotationParams,
    translation: MinkVector4,
}

impl PSimilarity {
    pub fn new(mu: f64, rotation: NullRotationParams, translation: MinkVector4) -> Result<Self> {
        if !mu.is_finite() || !translation.is_finite() {
            return Err(Error::NonFinite("similarity"));
        }
        if mu == 0.0 {
            return Err(Error::ZeroScale);
        }
        Ok(PSimilarity {
            mu,
            rotation,
            translation,
        })
    }

    pub const fn identity() -> Self {
        PSimilarity {
            mu: 1.0,
            rotation: NullRotationParams::identity(),
            translation: MinkVector4::ZERO,
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn rotation(&self) -> &NullRotationParams {
        &self.rotation
    }
    pub fn translation(&self) -> MinkVector4 {
        self.translation
    }

    /// Curve-level operations need `μ > 0` (pseudo-arc scales by `√μ`).
    pub fn require_positive_scale(&self) -> Result<()> {
        if self.mu > 0.0 {
            Ok(())
        } else {
            Err(Error::NonPositiveScale(self.mu))
        }
    }

    /// The linear part `μ·Φ`.
    pub fn linear_matrix(&self) -> Matrix4<f64> {
        self.rotation.point_matrix() * self.mu
    }

    /// `μ·Φ·v`, no translation.
    pub fn apply_linear(&self, v: &MinkVector4) -> MinkVector4 {
        if self.rotation.is_identity() {
            return *v * self.mu;
        }
        MinkVector4::from_vector(&(self.linear_matrix() * v.to_vector()))
    }

    pub fn apply(&self, x: &MinkVector4) -> MinkVector4 {
        // skipping a zero translation keeps the identity map bit-exact (-0.0)
        if self.translation == MinkVector4::ZERO {
            return self.apply_linear(x);
        }
        self.apply_linear(x) + self.translation
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PSimilarity) -> PSimilarity {
        // Φ_f Φ_g has frame action R_g R_f.
        let r = other.rotation.frame_matrix() * self.rotation.frame_matrix();
        let rotation = NullRotationParams::from_frame_matrix(&r, 1e-8)
            .expect("null rotations form a group");
        PSimilarity {
            mu: self.mu * other.mu,
            rotation,
            translation: self.apply_linear(&other.translation) + self.translation,
        }
    }

    pub fn inverse(&self) -> PSimilarity {
        let r_inv = self
            .rotation
            .frame_matrix()
            .try_inverse()
            .expect("null rotation matrices have determinant 1");
        let rotation = NullRotationParams::from_frame_matrix(&r_inv, 1e-8)
            .expect("null rotations form a group");
        let mu = 1.0 / self.mu;
        let partial = PSimilarity {
            mu,
            rotation,
            translation: MinkVector4::ZERO,
        };
        PSimilarity {
            mu,
            rotation,
            translation: -partial.apply_linear(&self.translation),
        }
    }
}

impl Default for PSimilarity {
    fn default() -> Self {
        Self::identity()
    }
}

pub fn apply_similarity(f: &PSimilarity, x: &MinkVector4) -> MinkVector4 {
    f.apply(x)
}

pub fn compose_similarity(f: &PSimilarity, g: &PSimilarity) -> PSimilarity {
    f.compose(g)
}

pub fn invert_similarity(f: &PSimilarity) -> PSimilarity {
    f.inverse()
}

/// The null-rotation parameters whose point map is `phi`, if `phi` belongs to
/// the null-rotation subgroup.
pub fn null_rotation_from_point_matrix(phi: &Matrix4<f64>, tol: f64) -> Result<NullRotationParams> {
    NullRotationParams::from_frame_matrix(&point_matrix_to_frame_action(phi), tol)
}

/// Euclidean generalized cross product of three vectors in ℝ⁴: the vector
/// `v` with `v·x = det(a, b, c, x)` for every `x`.
pub(crate) fn cross3(a: &MinkVector4, b: &MinkVector4, c: &MinkVector4) -> MinkVector4 {
    let m = |cols: [usize; 3]| {
        let r = |v: &MinkVector4| [v.0[cols[0]], v.0[cols[1]], v.0[cols[2]]];
        let (x, y, z) = (r(a), r(b), r(c));
        x[0] * (y[1] * z[2] - y[2] * z[1]) - x[1] * (y[0] * z[2] - y[2] * z[0])
            + x[2] * (y[0] * z[1] - y[1] * z[0])
    };
    MinkVector4([
        -m([1, 2, 3]),
        m([0, 2, 3]),
        -m([0, 1, 3]),
        m([0, 1, 2]),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_params(rng: &mut ChaCha8Rng) -> NullRotationParams {
        let lambda = rng.gen_range(0.5..2.0) * if rng.gen_bool(0.2) { -1.0 } else { 1.0 };
        NullRotationParams::new(
            lambda,
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.0..std::f64::consts::TAU),
        )
        .unwrap()
    }

    fn random_similarity(rng: &mut ChaCha8Rng) -> PSimilarity {
        PSimilarity::new(
            rng.gen_range(0.1..10.0),
            random_params(rng),
            MinkVector4(std::array::from_fn(|_| rng.gen_range(-3.0..3.0))),
        )
        .unwrap()
    }

    fn random_vector(rng: &mut ChaCha8Rng) -> MinkVector4 {
        MinkVector4(std::array::from_fn(|_| rng.gen_range(-2.0..2.0)))
    }

    #[test]
    fn dot_examples() {
        let e0 = MinkVector4::new(1.0, 0.0, 0.0, 0.0);
        assert_eq!(lorentzian_dot(&e0, &e0), -1.0);
        let n = MinkVector4::new(1.0, 1.0, 0.0, 0.0);
        assert_eq!(lorentzian_dot(&n, &n), 0.0);
        let f = PseudoOrthonormalFrame::reference();
        assert!((f.l.dot(&f.n) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constructors_reject_non_finite() {
        assert!(MinkVector4::try_new(f64::NAN, 0.0, 0.0, 0.0).is_err());
        assert!(MinkVector4::try_new(0.0, f64::INFINITY, 0.0, 0.0).is_err());
        assert_eq!(
            NullRotationParams::new(0.0, 0.0, 0.0, 0.0),
            Err(Error::ZeroLambda)
        );
        assert_eq!(
            PSimilarity::new(0.0, NullRotationParams::identity(), MinkVector4::ZERO),
            Err(Error::ZeroScale)
        );
    }

    #[test]
    fn classify_examples() {
        let c = |v: [f64; 4]| classify(&MinkVector4(v), 1e-12);
        assert_eq!(c([1.0, 1.0, 0.0, 0.0]).kind, CausalType::Null);
        assert_eq!(c([2.0, 1.0, 0.0, 0.0]).kind, CausalType::Timelike);
        assert_eq!(c([0.0, 1.0, 1.0, 0.0]).kind, CausalType::Spacelike);
        assert_eq!(c([0.0, 1.0, 1.0, 0.0]).eps, 1e-12);
    }

    #[test]
    fn reference_frame_is_pseudo_orthonormal_and_positive() {
        let f = PseudoOrthonormalFrame::reference();
        assert!(f.gram_deviation() < 1e-15);
        assert!((f.determinant() + 1.0).abs() < 1e-14);
        assert!(f.is_positively_oriented());
        assert!(PseudoOrthonormalFrame::new(f.l, f.n, f.w1, f.w2, FRAME_TOL).is_ok());
        assert_eq!(
            PseudoOrthonormalFrame::new(f.l, f.n, f.w1, -f.w2, FRAME_TOL),
            Err(Error::WrongOrientation)
        );
        assert!(matches!(
            PseudoOrthonormalFrame::new(f.l * 2.0, f.n, f.w1, f.w2, FRAME_TOL),
            Err(Error::NotPseudoOrthonormal { .. })
        ));
    }

    #[test]
    fn rotation_matrix_examples() {
        assert_eq!(
            NullRotationParams::identity().frame_matrix(),
            Matrix4::identity()
        );
        let m = NullRotationParams::new(2.0, 0.0, 0.0, 0.0).unwrap().frame_matrix();
        assert_eq!(m, Matrix4::from_diagonal(&Vector4::new(2.0, 0.5, 1.0, 1.0)));

        let p = NullRotationParams::new(1.5, 0.3, -0.7, 1.1).unwrap();
        let image = PseudoOrthonormalFrame::reference().transformed_by(&p.frame_matrix());
        assert!(image.gram_deviation() < 1e-12);
        assert!(image.is_positively_oriented());
    }

    #[test]
    fn point_matrix_reproduces_frame_action() {
        let p = NullRotationParams::new(1.5, 0.3, -0.7, 1.1).unwrap();
        let phi = p.point_matrix();
        let f0 = PseudoOrthonormalFrame::reference();
        let image = f0.transformed_by(&p.frame_matrix());
        for (src, dst) in f0.vectors().iter().zip(image.vectors()) {
            let mapped = MinkVector4::from_vector(&(phi * src.to_vector()));
            assert!(mapped.max_abs_diff(&dst) < 1e-14);
        }
        let back = null_rotation_from_point_matrix(&phi, 1e-10).unwrap();
        assert!((back.frame_matrix() - p.frame_matrix()).abs().max() < 1e-12);
    }

    #[test]
    fn similarity_examples() {
        let x = MinkVector4::new(0.3, -1.2, 2.5, 4.0);
        assert_eq!(PSimilarity::identity().apply(&x), x);
        let shift = PSimilarity::new(
            1.0,
            NullRotationParams::identity(),
            MinkVector4::new(1.0, 2.0, 3.0, 4.0),
        )
        .unwrap();
        assert_eq!(shift.apply(&MinkVector4::ZERO), MinkVector4::new(1.0, 2.0, 3.0, 4.0));
        let scale = PSimilarity::new(3.0, NullRotationParams::identity(), MinkVector4::ZERO).unwrap();
        let n = MinkVector4::new(1.0, 0.6, 0.8, 0.0);
        let img = scale.apply(&n);
        assert!(img.dot(&img).abs() < 1e-14);
        assert!(PSimilarity::new(-1.0, NullRotationParams::identity(), MinkVector4::ZERO)
            .unwrap()
            .require_positive_scale()
            .is_err());
    }

    #[test]
    fn compose_and_invert() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let f = random_similarity(&mut rng);
            let g = random_similarity(&mut rng);
            let x = random_vector(&mut rng);
            let fg = f.compose(&g);
            let direct = f.apply(&g.apply(&x));
            let scale = direct.euclidean_norm().max(1.0);
            assert!(fg.apply(&x).max_abs_diff(&direct) < 1e-12 * scale * 10.0);
            let back = f.inverse().apply(&f.apply(&x));
            assert!(back.max_abs_diff(&x) < 1e-11);
            let id = f.compose(&f.inverse());
            assert!((id.mu() - 1.0).abs() < 1e-14);
            assert!((id.rotation().frame_matrix() - Matrix4::identity()).abs().max() < 1e-10);
            assert!(id.translation().euclidean_norm() < 1e-10);
            let left = PSimilarity::identity().compose(&g);
            assert!((left.mu() - g.mu()).abs() < 1e-15);
            assert!(left.translation().max_abs_diff(&g.translation()) < 1e-15);
        }
    }

    #[test]
    fn cross3_is_orthogonal_and_oriented() {
        let f = PseudoOrthonormalFrame::reference();
        let v = cross3(&f.l, &f.n, &f.w1);
        for u in [f.l, f.n, f.w1] {
            let e: f64 = (0..4).map(|i| u.0[i] * v.0[i]).sum();
            assert!(e.abs() < 1e-15);
        }
        let det = PseudoOrthonormalFrame::new_unchecked(f.l, f.n, f.w1, v).determinant();
        assert!((det - v.euclidean_norm_squared()).abs() < 1e-14);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn params() -> impl Strategy<Value = NullRotationParams> {
            (0.3f64..3.0, prop::bool::ANY, -2.0f64..2.0, -2.0f64..2.0, 0.0f64..6.3).prop_map(
                |(l, neg, e, z, t)| {
                    NullRotationParams::new(if neg { -l } else { l }, e, z, t).unwrap()
                },
            )
        }

        fn vec4() -> impl Strategy<Value = MinkVector4> {
            prop::array::uniform4(-3.0f64..3.0).prop_map(MinkVector4)
        }

        proptest! {
            #[test]
            fn image_frame_is_pseudo_orthonormal(p in params(), q in params()) {
                let start = PseudoOrthonormalFrame::reference().transformed_by(&q.frame_matrix());
                let image = start.transformed_by(&p.frame_matrix());
                prop_assert!(image.gram_deviation() < 1e-12 * 50.0);
                prop_assert!(image.is_positively_oriented());
            }

            #[test]
            fn point_map_is_isometry(p in params(), u in vec4(), v in vec4()) {
                let phi = p.point_matrix();
                let pu = MinkVector4::from_vector(&(phi * u.to_vector()));
                let pv = MinkVector4::from_vector(&(phi * v.to_vector()));
                let scale = 1.0 + pu.euclidean_norm() * pv.euclidean_norm();
                prop_assert!((pu.dot(&pv) - u.dot(&v)).abs() < 1e-12 * scale);
            }

            #[test]
            fn similarity_scales_intervals(p in params(), mu in 0.1f64..10.0,
                                           b in vec4(), x in vec4(), y in vec4()) {
                let f = PSimilarity::new(mu, p, b).unwrap();
                let d = f.apply(&x) - f.apply(&y);
                let d0 = x - y;
                let scale = d.euclidean_norm_squared().max(mu * mu * d0.euclidean_norm_squared());
                prop_assert!((d.dot(&d) - mu * mu * d0.dot(&d0)).abs() <= 1e-12 * scale.max(1e-300) * 10.0);
            }

            #[test]
            fn null_stays_null(p in params(), x in -3.0f64..3.0, y in -3.0f64..3.0, z in -3.0f64..3.0) {
                let n = MinkVector4::new((x*x + y*y + z*z).sqrt(), x, y, z);
                let img = MinkVector4::from_vector(&(p.point_matrix() * n.to_vector()));
                prop_assert_eq!(classify(&img, 1e-10 * img.euclidean_norm_squared().max(1.0)).kind, CausalType::Null);
            }
        }
    }
}
