//! Closed-form null curves: the four self-similar families, null helices, and
//! the worked example with `κ̃ = 0, τ̃ = 1/σ` prescribed.
//!
//! Positions are evaluated exactly as the closed forms are printed. Every
//! curve here has a tangent of the form `A·e^{βσ}(cosh pσ, sinh pσ, cos qσ, sin qσ)`
//! (times `σ²` for the example), which gives exact derivatives of any order.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::AnalyticCurve;
use crate::error::{Error, Result};
use crate::mink::MinkVector4;

/// Constants of the closed forms. Unused fields are ignored by a given case.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CatalogParams {
    /// Constant `κ̃` (Cases 3, 4).
    pub a: f64,
    /// Constant `τ̃` (Cases 2, 4).
    pub b: f64,
    /// Constant `τ` when `τ̃ = 0` (Cases 1, 3).
    pub c: f64,
    /// Helix curvature.
    pub kappa: f64,
    /// Helix torsion.
    pub tau: f64,
}

impl CatalogParams {
    pub fn q1(&self) -> f64 {
        (-self.a + self.a.hypot(1.0)).sqrt()
    }
    pub fn q2(&self) -> f64 {
        (self.a + self.a.hypot(1.0)).sqrt()
    }
    pub fn w1(&self) -> f64 {
        2.0 * self.b + 1.0
    }
    pub fn w2(&self) -> f64 {
        2.0 * self.b - 1.0
    }
    pub fn m1(&self) -> f64 {
        2.0 * self.b + self.q1()
    }
    pub fn m2(&self) -> f64 {
        2.0 * self.b - self.q1()
    }
    pub fn v(&self) -> f64 {
        (self.kappa.hypot(self.tau) - self.kappa).sqrt()
    }
    pub fn r(&self) -> f64 {
        (self.kappa.hypot(self.tau) + self.kappa).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelfSimilarCase {
    /// `κ̃ = 0, τ̃ = 0`
    One,
    /// `κ̃ = 0, τ̃ = b`
    Two,
    /// `κ̃ = a, τ̃ = 0`
    Three,
    /// `κ̃ = a, τ̃ = b`
    Four,
}

impl SelfSimilarCase {
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Self::One),
            2 => Ok(Self::Two),
            3 => Ok(Self::Three),
            4 => Ok(Self::Four),
            _ => Err(Error::InvalidParams(format!("no self-similar case {i}"))),
        }
    }
}

/// `A·e^{βσ}(cosh pσ, sinh pσ, cos qσ, sin qσ)` and its derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
struct ExpTrig {
    amp: f64,
    beta: f64,
    p: f64,
    q: f64,
}

impl ExpTrig {
    fn derivative(&self, s: f64, n: usize) -> MinkVector4 {
        let n = n as i32;
        let (up, dn) = (self.beta + self.p, self.beta - self.p);
        let (eu, ed) = ((up * s).exp(), (dn * s).exp());
        let (ku, kd) = (up.powi(n) * eu, dn.powi(n) * ed);
        let z = Complex64::new(self.beta, self.q);
        let osc = z.powi(n) * (z * s).exp();
        MinkVector4([
            0.5 * self.amp * (ku + kd),
            0.5 * self.amp * (ku - kd),
            self.amp * osc.re,
            self.amp * osc.im,
        ])
    }
}

/// Null helix with constant Cartan curvatures `(κ, τ)`, `τ ≠ 0`, parameterized
/// by pseudo-arc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NullHelix {
    kappa: f64,
    tau: f64,
    v: f64,
    r: f64,
    domain: (f64, f64),
}

impl NullHelix {
    pub fn new(kappa: f64, tau: f64) -> Result<Self> {
        if !kappa.is_finite() || !tau.is_finite() || tau == 0.0 {
            return Err(Error::InvalidParams(format!(
                "null helix needs finite kappa and tau != 0 (kappa={kappa}, tau={tau})"
            )));
        }
        let p = CatalogParams {
            kappa,
            tau,
            ..Default::default()
        };
        let (v, r) = (p.v(), p.r());
        if v == 0.0 || r == 0.0 {
            return Err(Error::InvalidParams("helix radius vanished".into()));
        }
        Ok(NullHelix {
            kappa,
            tau,
            v,
            r,
            domain: (0.0, 2.0),
        })
    }

    pub fn with_domain(mut self, a: f64, b: f64) -> Self {
        self.domain = (a, b);
        self
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn v(&self) -> f64 {
        self.v
    }
    pub fn r(&self) -> f64 {
        self.r
    }

    fn tangent(&self) -> ExpTrig {
        ExpTrig {
            amp: 1.0 / self.v.hypot(self.r),
            beta: 0.0,
            p: self.v,
            q: self.r,
        }
    }
}

impl AnalyticCurve for NullHelix {
    fn derivative(&self, s: f64, order: usize) -> MinkVector4 {
        if order == 0 {
            let (v, r) = (self.v, self.r);
            let amp = 1.0 / v.hypot(r);
            MinkVector4([
                amp * (v * s).sinh() / v,
                amp * (v * s).cosh() / v,
                amp * (r * s).sin() / r,
                -amp * (r * s).cos() / r,
            ])
        } else {
            self.tangent().derivative(s, order - 1)
        }
    }

    fn domain(&self) -> (f64, f64) {
        self.domain
    }
}

/// `α(s)` of the null helix with curvatures `(κ, τ)`.
pub fn null_helix(kappa: f64, tau: f64, s: f64) -> Result<MinkVector4> {
    Ok(NullHelix::new(kappa, tau)?.position(s))
}

/// One of the four self-similar null curves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelfSimilarCurve {
    case: SelfSimilarCase,
    params: CatalogParams,
    domain: (f64, f64),
}

impl SelfSimilarCurve {
    pub fn new(case: SelfSimilarCase, params: CatalogParams) -> Result<Self> {
        let CatalogParams { a, b, c, .. } = params;
        let bad = |msg: &str| Err(Error::InvalidParams(format!("{case:?}: {msg}")));
        if ![a, b, c].iter().all(|x| x.is_finite()) {
            return bad("parameters must be finite");
        }
        match case {
            SelfSimilarCase::One if c == 0.0 => return bad("c must be nonzero"),
            SelfSimilarCase::Two if b == 0.0 => return bad("b must be nonzero"),
            SelfSimilarCase::Two if params.w1() == 0.0 || params.w2() == 0.0 => {
                return bad("b = ±1/2 makes the closed form singular")
            }
            SelfSimilarCase::Three if c == 0.0 => return bad("c must be nonzero"),
            SelfSimilarCase::Four if b == 0.0 => return bad("b must be nonzero"),
            SelfSimilarCase::Four if params.m1() == 0.0 || params.m2() == 0.0 => {
                return bad("2b = ±q1 makes the closed form singular")
            }
            _ => {}
        }
        // a = 0 is admitted for Cases 3 and 4 as the degenerate limit
        // (q1 = q2 = 1), which reproduces Cases 1 and 2.
        Ok(SelfSimilarCurve {
            case,
            params,
            domain: (0.0, 2.0),
        })
    }

    pub fn with_domain(mut self, a: f64, b: f64) -> Self {
        self.domain = (a, b);
        self
    }

    pub fn case(&self) -> SelfSimilarCase {
        self.case
    }

    pub fn params(&self) -> &CatalogParams {
        &self.params
    }

    fn tangent(&self) -> ExpTrig {
        let p = &self.params;
        match self.case {
            SelfSimilarCase::One => ExpTrig {
                amp: 1.0 / (p.c * SQRT_2),
                beta: 0.0,
                p: 1.0,
                q: 1.0,
            },
            SelfSimilarCase::Two => ExpTrig {
                amp: FRAC_1_SQRT_2,
                beta: 2.0 * p.b,
                p: 1.0,
                q: 1.0,
            },
            SelfSimilarCase::Three => ExpTrig {
                amp: 1.0 / (p.c * SQRT_2),
                beta: 0.0,
                p: p.q1(),
                q: p.q2(),
            },
            SelfSimilarCase::Four => ExpTrig {
                amp: FRAC_1_SQRT_2,
                beta: 2.0 * p.b,
                p: p.q1(),
                q: p.q2(),
            },
        }
    }

    fn closed_form(&self, s: f64) -> MinkVector4 {
        let p = &self.params;
        let k = 1.0 / (2.0 * SQRT_2);
        let ch_plus_sh = |x: f64| x.cosh() + x.sinh();
        match self.case {
            SelfSimilarCase::One => {
                let k = 1.0 / (p.c * SQRT_2);
                MinkVector4([k * s.sinh(), k * s.cosh(), k * s.sin(), -k * s.cos()])
            }
            SelfSimilarCase::Two => {
                let (w1, w2, b) = (p.w1(), p.w2(), p.b);
                let e1 = ch_plus_sh(w1 * s) / (2.0 * b + 1.0);
                let e2 = ch_plus_sh(w2 * s) / (2.0 * b - 1.0);
                let e = (2.0 * b * s).exp();
                let den = 4.0 * b * b + 1.0;
                MinkVector4([
                    k * (e1 + e2),
                    k * (e1 - e2),
                    k * (4.0 * b * e * s.cos() + 2.0 * e * s.sin()) / den,
                    k * (-2.0 * e * s.cos() + 4.0 * b * e * s.sin()) / den,
                ])
            }
            SelfSimilarCase::Three => {
                let (q1, q2) = (p.q1(), p.q2());
                let k = 1.0 / (p.c * SQRT_2);
                MinkVector4([
                    k * (q1 * s).sinh() / q1,
                    k * (q1 * s).cosh() / q1,
                    k * (q2 * s).sin() / q2,
                    -k * (q2 * s).cos() / q2,
                ])
            }
            SelfSimilarCase::Four => {
                let (q2, m1, m2, b) = (p.q2(), p.m1(), p.m2(), p.b);
                let e1 = ch_plus_sh(m1 * s) / m1;
                let e2 = ch_plus_sh(m2 * s) / m2;
                let e = (2.0 * b * s).exp();
                let den = 4.0 * b * b + q2 * q2;
                MinkVector4([
                    k * (e1 + e2),
                    k * (e1 - e2),
                    k * (4.0 * b * e * (q2 * s).cos() + 2.0 * q2 * e * (q2 * s).sin()) / den,
                    k * (-2.0 * q2 * e * (q2 * s).cos() + 4.0 * b * e * (q2 * s).sin()) / den,
                ])
            }
        }
    }
}

impl AnalyticCurve for SelfSimilarCurve {
    fn derivative(&self, s: f64, order: usize) -> MinkVector4 {
        if order == 0 {
            self.closed_form(s)
        } else {
            self.tangent().derivative(s, order - 1)
        }
    }

    fn domain(&self) -> (f64, f64) {
        self.domain
    }
}

pub fn self_similar_case(case: SelfSimilarCase, params: &CatalogParams, sigma: f64) -> Result<MinkVector4> {
    Ok(SelfSimilarCurve::new(case, *params)?.position(sigma))
}

/// The curve obtained from `κ̃ = 0, τ̃ = 1/σ` and the reference frame. Its
/// tangent is `σ²·L^sim(σ)` with `L^sim = (cosh σ, sinh σ, cos σ, sin σ)/√2`.
/// The acceleration degenerates at `σ = 0`, so the default domain is `[1, 3]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExampleCurve {
    domain: (f64, f64),
}

impl Default for ExampleCurve {
    fn default() -> Self {
        ExampleCurve { domain: (1.0, 3.0) }
    }
}

impl ExampleCurve {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_domain(mut self, a: f64, b: f64) -> Self {
        self.domain = (a, b);
        self
    }

    /// `L^sim(σ)` and its derivatives.
    pub fn lsim(sigma: f64, order: usize) -> MinkVector4 {
        ExpTrig {
            amp: FRAC_1_SQRT_2,
            beta: 0.0,
            p: 1.0,
            q: 1.0,
        }
        .derivative(sigma, order)
    }
}

impl AnalyticCurve for ExampleCurve {
    fn derivative(&self, s: f64, order: usize) -> MinkVector4 {
        if order == 0 {
            return example_curve(s);
        }
        // d^{n-1}(σ² L) = σ² L^{(n-1)} + 2(n-1)σ L^{(n-2)} + (n-1)(n-2) L^{(n-3)}
        let m = order - 1;
        let mut out = Self::lsim(s, m) * (s * s);
        if m >= 1 {
            out += Self::lsim(s, m - 1) * (2.0 * m as f64 * s);
        }
        if m >= 2 {
            out += Self::lsim(s, m - 2) * ((m * (m - 1)) as f64);
        }
        out
    }

    fn domain(&self) -> (f64, f64) {
        self.domain
    }
}

pub fn example_curve(sigma: f64) -> MinkVector4 {
    let s = sigma;
    let (sh, ch, sn, cs) = (s.sinh(), s.cosh(), s.sin(), s.cos());
    MinkVector4([
        (s * s + 2.0) * sh - 2.0 * s * ch,
        (s * s + 2.0) * ch - 2.0 * s * sh,
        (s * s - 2.0) * sn + 2.0 * s * cs,
        (2.0 - s * s) * cs + 2.0 * s * sn,
    ]) * FRAC_1_SQRT_2
}
