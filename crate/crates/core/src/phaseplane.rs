//! Geometry of the autonomous system
//!
//! ```text
//! X' = X (2 - (m-1) Y)
//! Y' = -m Y^2 - (N-2) Y + 2X - (m-1) X Y - K X^{(m-p)/(m-1)}
//! ```
//!
//! obtained from the profile equation through `X = (α/2m) ξ² f^{1-m}`,
//! `Y = ξ f'/f`, `η = ln ξ`. Critical points at infinity are described by the
//! asymptotic slope `Y/X` of the orbits reaching them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ModelParams, Regime};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "Y")]
    pub y: f64,
}

impl PhasePoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// `x^q` for `x ≥ 0`, with `0^q = 0` for `q > 0`.
#[inline]
pub fn frac_pow(x: f64, q: f64) -> f64 {
    if x == 0.0 {
        if q > 0.0 {
            0.0
        } else if q == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        (q * x.ln()).exp()
    }
}

/// Vector field without domain checks; `None` when `X < 0`.
#[inline]
pub(crate) fn field(params: &ModelParams, k: f64, x: f64, y: f64) -> Option<(f64, f64)> {
    if x < 0.0 {
        return None;
    }
    let m = params.m;
    let dx = x * (2.0 - (m - 1.0) * y);
    let dy = -m * y * y - (params.dim() - 2.0) * y + 2.0 * x - (m - 1.0) * x * y
        - k * frac_pow(x, params.reaction_power());
    Some((dx, dy))
}

pub fn vector_field(point: PhasePoint, params: &ModelParams, k: f64) -> Result<(f64, f64)> {
    field(params, k, point.x, point.y)
        .ok_or_else(|| Error::Domain(format!("X must be nonnegative, got {}", point.x)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalLabel {
    P0,
    P1,
    Q1,
    Q2,
    Q3,
    Q4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalKind {
    Saddle,
    StableNode,
    UnstableNode,
    SaddleNode,
}

/// Where a critical point sits: in the finite plane or on the equator of the
/// Poincaré sphere, identified by the asymptotic slope `Y/X` (±∞ for the
/// vertical directions) and the equator coordinates `(X̄, Ȳ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Location {
    Finite(PhasePoint),
    Infinity { slope: f64, xbar: f64, ybar: f64 },
}

impl Location {
    fn at_infinity(slope: f64) -> Self {
        if slope.is_infinite() {
            Location::Infinity { slope, xbar: 0.0, ybar: slope.signum() }
        } else {
            let norm = (1.0 + slope * slope).sqrt();
            Location::Infinity { slope, xbar: 1.0 / norm, ybar: slope / norm }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub label: CriticalLabel,
    pub location: Location,
    pub kind: CriticalKind,
    pub eigenvalues: (f64, f64),
    pub launch_direction: Option<[f64; 2]>,
}

fn unit(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

/// Direction, in `(X, Y)`, of the distinguished orbit leaving `P0`.
pub fn p0_unstable_direction(params: &ModelParams) -> [f64; 2] {
    unit([1.0, 2.0 / params.dim()])
}

pub fn finite_critical_points(params: &ModelParams) -> Vec<CriticalPoint> {
    let m = params.m;
    let n = params.dim();
    let p1_eigs = ((m * n - n + 2.0) / m, n - 2.0);
    let p1_loc = Location::Finite(PhasePoint::new(0.0, -(n - 2.0) / m));
    match params.n {
        1 => vec![
            CriticalPoint {
                label: CriticalLabel::P0,
                location: Location::Finite(PhasePoint::new(0.0, 0.0)),
                kind: CriticalKind::UnstableNode,
                eigenvalues: (2.0, 1.0),
                launch_direction: Some(p0_unstable_direction(params)),
            },
            CriticalPoint {
                label: CriticalLabel::P1,
                location: p1_loc,
                kind: CriticalKind::Saddle,
                eigenvalues: p1_eigs,
                launch_direction: Some([1.0, 0.0]),
            },
        ],
        2 => vec![CriticalPoint {
            label: CriticalLabel::P0,
            location: Location::Finite(PhasePoint::new(0.0, 0.0)),
            kind: CriticalKind::SaddleNode,
            eigenvalues: (2.0, 0.0),
            launch_direction: Some(p0_unstable_direction(params)),
        }],
        _ => vec![
            CriticalPoint {
                label: CriticalLabel::P0,
                location: Location::Finite(PhasePoint::new(0.0, 0.0)),
                kind: CriticalKind::Saddle,
                eigenvalues: (2.0, 2.0 - n),
                launch_direction: Some(p0_unstable_direction(params)),
            },
            CriticalPoint {
                label: CriticalLabel::P1,
                location: p1_loc,
                kind: CriticalKind::UnstableNode,
                eigenvalues: p1_eigs,
                launch_direction: None,
            },
        ],
    }
}

/// Roots `y₁ ≥ y₂` of `y² + (m-1) y + K = 0` (critical regime slopes of Q1
/// and Q4), or `None` when the discriminant is negative.
pub fn critical_slopes(params: &ModelParams, k: f64) -> Option<(f64, f64)> {
    let a = params.m - 1.0;
    let disc = a * a - 4.0 * k;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    Some(((-a + s) / 2.0, (-a - s) / 2.0))
}

/// Asymptotic slope of the saddle Q4 (the Type I ray), if Q4 exists.
pub fn q4_slope(params: &ModelParams, k: f64) -> Option<f64> {
    match params.regime() {
        Regime::Supercritical => Some(-(params.m - 1.0)),
        Regime::Critical => critical_slopes(params, k).map(|(_, y2)| y2),
        Regime::Subcritical => None,
    }
}

pub fn infinity_critical_points(params: &ModelParams, k: f64) -> Vec<CriticalPoint> {
    let m = params.m;
    let q2 = CriticalPoint {
        label: CriticalLabel::Q2,
        location: Location::at_infinity(f64::INFINITY),
        kind: CriticalKind::UnstableNode,
        eigenvalues: (1.0, m),
        launch_direction: None,
    };
    let q3 = CriticalPoint {
        label: CriticalLabel::Q3,
        location: Location::at_infinity(f64::NEG_INFINITY),
        kind: CriticalKind::StableNode,
        eigenvalues: (-1.0, -m),
        launch_direction: None,
    };
    match params.regime() {
        Regime::Supercritical => {
            let q1 = CriticalPoint {
                label: CriticalLabel::Q1,
                location: Location::at_infinity(0.0),
                kind: CriticalKind::StableNode,
                // (y, w) chart, w = z^{(m+p-2)/(m-1)}: one stable and one
                // center direction
                eigenvalues: (-(m - 1.0), 0.0),
                launch_direction: None,
            };
            let q4 = CriticalPoint {
                label: CriticalLabel::Q4,
                location: Location::at_infinity(-(m - 1.0)),
                kind: CriticalKind::Saddle,
                eigenvalues: (m - 1.0, -(m - 1.0) * (m + params.p - 2.0)),
                launch_direction: Some(unit([1.0, -(m - 1.0)])),
            };
            vec![q1, q2, q3, q4]
        }
        Regime::Critical => {
            let mut out = Vec::with_capacity(4);
            if let Some((y1, y2)) = critical_slopes(params, k) {
                let s = ((m - 1.0).powi(2) - 4.0 * k).max(0.0).sqrt();
                let merged = s == 0.0;
                out.push(CriticalPoint {
                    label: CriticalLabel::Q1,
                    location: Location::at_infinity(y1),
                    kind: if merged { CriticalKind::SaddleNode } else { CriticalKind::StableNode },
                    eigenvalues: (-s, (m - 1.0) * y1),
                    launch_direction: None,
                });
                out.push(q2);
                out.push(q3);
                out.push(CriticalPoint {
                    label: CriticalLabel::Q4,
                    location: Location::at_infinity(y2),
                    kind: if merged { CriticalKind::SaddleNode } else { CriticalKind::Saddle },
                    eigenvalues: (s, (m - 1.0) * y2),
                    launch_direction: Some(unit([1.0, y2])),
                });
            } else {
                out.push(q2);
                out.push(q3);
            }
            out
        }
        Regime::Subcritical => vec![q2, q3],
    }
}

/// The two branches of the isocline `Y' = 0` at a given `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoclineBranches {
    #[serde(rename = "X")]
    pub x: f64,
    pub delta: f64,
    pub y1: Option<f64>,
    pub y2: Option<f64>,
}

pub fn isocline_delta(x: f64, params: &ModelParams, k: f64) -> f64 {
    let m = params.m;
    let n = params.dim();
    (m - 1.0).powi(2) * x * x + 2.0 * (m * n + 2.0 * m - n + 2.0) * x + (n - 2.0).powi(2)
        - 4.0 * k * m * frac_pow(x, params.reaction_power())
}

pub fn isocline(x: f64, params: &ModelParams, k: f64) -> IsoclineBranches {
    let m = params.m;
    let delta = isocline_delta(x, params, k);
    let (y1, y2) = if delta >= 0.0 {
        let b = -(params.dim() - 2.0) - (m - 1.0) * x;
        let s = delta.sqrt();
        // roots multiply to -(2X - K X^q)/m; take the one without cancellation first
        let product = -(2.0 * x - k * frac_pow(x, params.reaction_power())) / m;
        if b < 0.0 {
            let lower = (b - s) / (2.0 * m);
            (Some(product / lower), Some(lower))
        } else {
            let upper = (b + s) / (2.0 * m);
            let lower = if upper == 0.0 { (b - s) / (2.0 * m) } else { product / upper };
            (Some(upper), Some(lower))
        }
    } else {
        (None, None)
    };
    IsoclineBranches { x, delta, y1, y2 }
}

/// Unique positive zero `(2/K)^{(m-1)/(1-p)}` of the upper isocline branch.
pub fn isocline_zero(params: &ModelParams, k: f64) -> f64 {
    (2.0 / k).powf((params.m - 1.0) / (1.0 - params.p))
}

pub type Mat2 = [[f64; 2]; 2];

/// Central-difference Jacobian of the vector field; the `X` column switches
/// to a second-order forward stencil when `X - h < 0`.
pub fn numerical_jacobian(point: PhasePoint, params: &ModelParams, k: f64, h: f64) -> Result<Mat2> {
    if !(h > 0.0) {
        return Err(Error::Step(format!("step must be positive, got {h}")));
    }
    if point.x < 0.0 {
        return Err(Error::Domain(format!("X must be nonnegative, got {}", point.x)));
    }
    let f = |x: f64, y: f64| field(params, k, x, y).expect("X >= 0 checked");
    let (dfx, dgx) = if point.x - h < 0.0 {
        let (f0, g0) = f(point.x, point.y);
        let (f1, g1) = f(point.x + h, point.y);
        let (f2, g2) = f(point.x + 2.0 * h, point.y);
        ((-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h), (-3.0 * g0 + 4.0 * g1 - g2) / (2.0 * h))
    } else {
        let (fxp, gxp) = f(point.x + h, point.y);
        let (fxm, gxm) = f(point.x - h, point.y);
        ((fxp - fxm) / (2.0 * h), (gxp - gxm) / (2.0 * h))
    };
    let (fyp, gyp) = f(point.x, point.y + h);
    let (fym, gym) = f(point.x, point.y - h);
    Ok([[dfx, (fyp - fym) / (2.0 * h)], [dgx, (gyp - gym) / (2.0 * h)]])
}

/// Real eigenvalues of a 2×2 matrix in decreasing order, `None` if complex.
pub fn eigenvalues(mat: &Mat2) -> Option<(f64, f64)> {
    let tr = mat[0][0] + mat[1][1];
    let det = mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0];
    let disc = tr * tr / 4.0 - det;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    Some((tr / 2.0 + s, tr / 2.0 - s))
}

/// Vector field of the chart at infinity in `(y, w)`, with `y = Y/X`,
/// `z = 1/X`, `w = z^{(m+p-2)/(m-1)}` (supercritical regime), time rescaled by
/// `X`.
pub fn chart_yw_field(params: &ModelParams, k: f64, y: f64, w: f64) -> (f64, f64) {
    let m = params.m;
    let n = params.dim();
    let theta = params.chart_power();
    let zw = frac_pow(w, 1.0 / theta); // z
    let dy = 2.0 * zw - (m - 1.0) * y - n * y * zw - y * y - k * w;
    let dw = (m + params.p - 2.0) * y * w - 2.0 * (m + params.p - 2.0) / (m - 1.0) * w * zw;
    (dy, dw)
}

/// Jacobian of [`chart_yw_field`] at Q4 = `(-(m-1), 0)`; `w ≥ 0` forces a
/// one-sided second-order difference in `w`.
pub fn q4_chart_jacobian(params: &ModelParams, k: f64, h: f64) -> Result<Mat2> {
    if params.regime() != Regime::Supercritical {
        return Err(Error::Domain("the (y, w) chart requires m + p > 2".into()));
    }
    if !(h > 0.0) {
        return Err(Error::Step(format!("step must be positive, got {h}")));
    }
    let y0 = -(params.m - 1.0);
    let f = |y: f64, w: f64| chart_yw_field(params, k, y, w);
    let (ayp, byp) = f(y0 + h, 0.0);
    let (aym, bym) = f(y0 - h, 0.0);
    let (a0, b0) = f(y0, 0.0);
    let (a1, b1) = f(y0, h);
    let (a2, b2) = f(y0, 2.0 * h);
    Ok([
        [(ayp - aym) / (2.0 * h), (-3.0 * a0 + 4.0 * a1 - a2) / (2.0 * h)],
        [(byp - bym) / (2.0 * h), (-3.0 * b0 + 4.0 * b1 - b2) / (2.0 * h)],
    ])
}
