//! Orbits of the phase-plane system and the classification of where they end.
//!
//! Integration runs in two stages. While `X` is moderate the system is
//! advanced in `η`. Once `X ≥ X_big` (or `Y` runs off to `-∞`) the state is
//! moved to the chart at infinity
//!
//! ```text
//! y = Y/X,  z = 1/X,  dτ = X dη
//! y' = -y² - (m-1) y - N y z + 2z - K z^θ
//! z' = (m-1) y z - 2z²
//! ```
//!
//! with `θ = (m+p-2)/(m-1)`, where the end point is decided by entering a
//! forward-invariant region around the attracting critical point.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ModelParams, Regime};
use crate::phaseplane::{critical_slopes, field, frac_pow, q4_slope, PhasePoint};
use crate::rk::{Advance, Stepper};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub eta_max: f64,
    #[serde(rename = "X_big")]
    pub x_big: f64,
    pub ratio_window: f64,
    pub launch_offset: f64,
    /// `Y` below `-y_blow` also hands the orbit to the chart at infinity.
    pub y_blow: f64,
    /// Time budget in the chart at infinity.
    pub tau_max: f64,
    pub max_steps: usize,
    pub h_min: f64,
    /// `1/X` at which a committed Q1 orbit stops refining its slope.
    pub z_final: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            h_init: 1e-3,
            h_max: 1.0,
            eta_max: 1e3,
            x_big: 1e4,
            ratio_window: 0.15,
            launch_offset: 1e-6,
            y_blow: 1e3,
            tau_max: 1e8,
            max_steps: 5_000_000,
            h_min: 1e-14,
            z_final: 1e-10,
        }
    }
}

impl IntegratorOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("h_init", self.h_init),
            ("h_max", self.h_max),
            ("eta_max", self.eta_max),
            ("X_big", self.x_big),
            ("ratio_window", self.ratio_window),
            ("launch_offset", self.launch_offset),
            ("y_blow", self.y_blow),
            ("tau_max", self.tau_max),
            ("h_min", self.h_min),
            ("z_final", self.z_final),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.x_big < 1e3 {
            return Err(Error::Domain(format!("X_big must be at least 1e3, got {}", self.x_big)));
        }
        if self.ratio_window >= 1.0 {
            return Err(Error::Domain("ratio_window must be below 1".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::Domain("max_steps must be positive".into()));
        }
        Ok(())
    }

    fn stepper(&self, h_max: f64) -> Stepper {
        Stepper { rel_tol: self.rel_tol, abs_tol: self.abs_tol, h_min: self.h_min, h_max }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EndTag {
    ToQ1,
    ToQ4,
    ToQ3,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitEnd {
    pub tag: EndTag,
    pub final_slope: f64,
    pub diagnostics: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSample {
    pub eta: f64,
    pub point: PhasePoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub samples: Vec<OrbitSample>,
    pub termination: OrbitEnd,
}

impl Orbit {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "eta,X,Y")?;
        for s in &self.samples {
            writeln!(out, "{},{},{}", s.eta, s.point.x, s.point.y)?;
        }
        Ok(())
    }
}

/// Starting point on the unstable manifold of `P0`, at `X = δ`, with the
/// local expansion `Y ≈ aX + bX² + cX^q`, `a = 2/N`.
pub fn launch_from_p0(params: &ModelParams, k: f64, opts: &IntegratorOptions) -> PhasePoint {
    let n = params.dim();
    let m = params.m;
    let q = params.reaction_power();
    let a = 2.0 / n;
    let b = -(a * a + (m - 1.0) * a) / (n + 2.0);
    let c = -k / (2.0 * q + n - 2.0);
    let x = opts.launch_offset;
    PhasePoint::new(x, a * x + b * x * x + c * frac_pow(x, q))
}

/// Thresholds of the forward-invariant regions used to commit an orbit.
struct Commit {
    regime: Regime,
    m1: f64,
    n: f64,
    k: f64,
    theta: f64,
    window: f64,
    z_commit: f64,
    /// Q3: `y < -(m-1)` and `z` below this.
    z_q3: f64,
    /// Supercritical Q1: `y > -(m-1)(1-w)` and `z` below this.
    z_q1: f64,
    /// Critical Q1 basin boundary `y₂` (when `K ≤ (m-1)²/4`).
    y_basin: Option<f64>,
    q4: Option<f64>,
}

impl Commit {
    fn new(params: &ModelParams, k: f64, opts: &IntegratorOptions) -> Self {
        let m1 = params.m - 1.0;
        let n = params.dim();
        let theta = params.chart_power();
        let w = opts.ratio_window;
        let z_q3 = (k / (2.0 + n * m1)).powf(1.0 / (1.0 - theta)).min(m1 / n);
        let z_q1 = if theta > 0.0 {
            (m1 * m1 * w * (1.0 - w) / k).powf(1.0 / theta)
        } else {
            0.0
        };
        let y_basin = match params.regime() {
            Regime::Critical => critical_slopes(params, k).map(|(_, y2)| y2),
            _ => None,
        };
        Self {
            regime: params.regime(),
            m1,
            n,
            k,
            theta,
            window: w,
            z_commit: 1.0 / opts.x_big,
            z_q3,
            z_q1,
            y_basin,
            q4: q4_slope(params, k),
        }
    }

    fn blow_up(&self, y: f64, z: f64) -> bool {
        let l = (2.0 * (self.m1 + self.n * z)).max(2.0 * z.sqrt()) + 1.0;
        y < -l
    }

    fn to_q3(&self, y: f64, z: f64) -> bool {
        (y < -self.m1 && z < self.z_q3.min(self.z_commit)) || self.blow_up(y, z)
    }

    fn to_q1(&self, y: f64, z: f64) -> bool {
        if z >= self.z_commit {
            return false;
        }
        match self.regime {
            Regime::Supercritical => y > -self.m1 * (1.0 - self.window) && z < self.z_q1,
            Regime::Critical => self.y_basin.is_some_and(|y2| y > y2 && 2.0 * z < self.k),
            Regime::Subcritical => false,
        }
    }

    fn near_q4(&self, y: f64) -> bool {
        self.q4.is_some_and(|s| (y - s).abs() < self.window * self.m1)
    }
}

fn chart_field(params: &ModelParams, k: f64, theta: f64, s: &[f64; 3]) -> Option<[f64; 3]> {
    let (y, z) = (s[0], s[1]);
    if z < 0.0 {
        return None;
    }
    let m1 = params.m - 1.0;
    let dy = -y * y - m1 * y - params.dim() * y * z + 2.0 * z - k * frac_pow(z, theta);
    let dz = m1 * y * z - 2.0 * z * z;
    Some([dy, dz, z])
}

fn non_finite(stage: &str, eta: f64) -> Error {
    Error::NonFinite(format!("state became non-finite in the {stage} stage at eta = {eta}"))
}

/// Shortens an overshooting step so that it ends on `X = X_big` (or on
/// `Y = -y_blow`), by regula falsi on the step length.
fn land_on_escape<F>(
    stepper: &Stepper,
    rhs: &F,
    eta: f64,
    state: &[f64; 2],
    h: f64,
    overshoot: [f64; 2],
    opts: &IntegratorOptions,
) -> (f64, [f64; 2])
where
    F: Fn(f64, &[f64; 2]) -> Option<[f64; 2]>,
{
    let gap = |s: &[f64; 2]| (s[0] / opts.x_big).ln().max((-s[1] / opts.y_blow).ln());
    let (mut lo, mut hi) = (0.0, h);
    let mut g_lo = gap(state);
    let mut g_hi = gap(&overshoot);
    let mut best = (eta + h, overshoot);
    for _ in 0..60 {
        if !(g_lo.is_finite() && g_lo < 0.0 && g_hi >= 0.0) || g_hi < 1e-14 {
            break;
        }
        let guess = lo + (hi - lo) * g_lo / (g_lo - g_hi);
        let mid = if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) };
        let Some((y, _)) = stepper.trial(rhs, eta, state, mid) else { break };
        let g = gap(&y);
        if g >= 0.0 {
            hi = mid;
            g_hi = g;
            best = (eta + mid, y);
        } else {
            lo = mid;
            g_lo = g;
        }
    }
    best
}

/// Integrates the orbit through `start` and classifies its end point.
pub fn integrate(start: PhasePoint, params: &ModelParams, k: f64, opts: &IntegratorOptions) -> Result<Orbit> {
    opts.validate()?;
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Domain(format!("K must be positive, got {k}")));
    }
    if !(start.x > 0.0 && start.x.is_finite() && start.y.is_finite()) {
        return Err(Error::Domain(format!("start must have finite X > 0, got {start:?}")));
    }
    let mut samples = vec![OrbitSample { eta: 0.0, point: start }];
    let mut steps = 0usize;

    // first stage: (X, Y) in η
    let rhs = |_t: f64, s: &[f64; 2]| field(params, k, s[0], s[1]).map(|(a, b)| [a, b]);
    let stepper = opts.stepper(opts.h_max);
    let mut eta = 0.0;
    let mut state = [start.x, start.y];
    let mut h = opts.h_init;
    while state[0] < opts.x_big && state[1] > -opts.y_blow {
        if eta > opts.eta_max || steps >= opts.max_steps {
            let slope = state[1] / state[0];
            return Ok(Orbit {
                samples,
                termination: OrbitEnd {
                    tag: EndTag::Unresolved,
                    final_slope: slope,
                    diagnostics: format!(
                        "budget exhausted before escape at eta = {eta}, X = {}, Y = {}",
                        state[0], state[1]
                    ),
                },
            });
        }
        match stepper.advance(&rhs, eta, &state, h, f64::INFINITY) {
            Advance::Accepted { t, y, h_next } => {
                if y.iter().any(|v| !v.is_finite()) {
                    return Err(non_finite("phase-plane", t));
                }
                let (t, y) = if y[0] >= opts.x_big || y[1] <= -opts.y_blow {
                    land_on_escape(&stepper, &rhs, eta, &state, t - eta, y, opts)
                } else {
                    (t, y)
                };
                eta = t;
                state = y;
                h = h_next;
                steps += 1;
                samples.push(OrbitSample { eta, point: PhasePoint::new(state[0], state[1]) });
            }
            Advance::Underflow { h } => {
                return Ok(Orbit {
                    samples,
                    termination: OrbitEnd {
                        tag: EndTag::Unresolved,
                        final_slope: state[1] / state[0],
                        diagnostics: format!("step size underflow ({h:e}) at eta = {eta}"),
                    },
                });
            }
        }
    }

    let escape_slope = state[1] / state[0];

    // second stage: chart at infinity in τ, carrying η along
    let commit = Commit::new(params, k, opts);
    let theta = commit.theta;
    let chart = |_t: f64, s: &[f64; 3]| chart_field(params, k, theta, s);
    let chart_stepper = opts.stepper(opts.tau_max);
    let mut tau = 0.0;
    let mut s = [state[1] / state[0], 1.0 / state[0], eta];
    let mut h = opts.h_init;
    let mut committed: Option<EndTag> = None;
    loop {
        let (y, z) = (s[0], s[1]);
        match committed {
            None if commit.to_q3(y, z) => {
                return Ok(Orbit {
                    samples,
                    termination: OrbitEnd {
                        tag: EndTag::ToQ3,
                        final_slope: escape_slope,
                        diagnostics: format!("entered the Q3 basin at X = {:e}, Y/X = {y}", 1.0 / z),
                    },
                });
            }
            None if commit.to_q1(y, z) => {
                committed = Some(EndTag::ToQ1);
                if commit.regime != Regime::Critical {
                    return Ok(Orbit {
                        samples,
                        termination: OrbitEnd {
                            tag: EndTag::ToQ1,
                            final_slope: escape_slope,
                            diagnostics: format!("entered the Q1 basin at X = {:e}, Y/X = {y}", 1.0 / z),
                        },
                    });
                }
            }
            Some(tag) if z <= opts.z_final => {
                return Ok(Orbit {
                    samples,
                    termination: OrbitEnd {
                        tag,
                        final_slope: y,
                        diagnostics: format!("converged slope at X = {:e}", 1.0 / z),
                    },
                });
            }
            _ => {}
        }
        let exhausted = tau >= opts.tau_max || s[2] > opts.eta_max || steps >= opts.max_steps;
        let underflow = if exhausted {
            None
        } else {
            match chart_stepper.advance(&chart, tau, &s, h, f64::INFINITY) {
                Advance::Accepted { t, y: yn, h_next } => {
                    if yn.iter().any(|v| !v.is_finite()) {
                        return Err(non_finite("chart", s[2]));
                    }
                    tau = t;
                    s = yn;
                    h = h_next;
                    steps += 1;
                    if s[1] > 0.0 {
                        samples.push(OrbitSample {
                            eta: s[2],
                            point: PhasePoint::new(1.0 / s[1], s[0] / s[1]),
                        });
                    }
                    continue;
                }
                Advance::Underflow { h } => Some(h),
            }
        };
        let y = s[0];
        let final_slope = if committed.is_some() { y } else { escape_slope };
        let (tag, diagnostics) = match committed {
            Some(tag) => (tag, format!("slope not fully converged at X = {:e}", 1.0 / s[1])),
            None if commit.near_q4(y) => (
                EndTag::ToQ4,
                format!("still within the Q4 window at X = {:e}, Y/X = {y}, tau = {tau:e}", 1.0 / s[1]),
            ),
            None => (
                EndTag::Unresolved,
                match underflow {
                    Some(h) => format!("step size underflow ({h:e}) in the chart at tau = {tau:e}"),
                    None => format!("chart budget exhausted at X = {:e}, Y/X = {y}, tau = {tau:e}", 1.0 / s[1]),
                },
            ),
        };
        return Ok(Orbit { samples, termination: OrbitEnd { tag, final_slope, diagnostics } });
    }
}

/// Cubic Hermite resampling of `Y(X)` along an orbit whose `X` is increasing,
/// with slopes `dY/dX` from the vector field.
pub fn resample_y_of_x(orbit: &Orbit, params: &ModelParams, k: f64, grid: &[f64]) -> Result<Vec<f64>> {
    let pts: Vec<PhasePoint> = orbit.samples.iter().map(|s| s.point).collect();
    let slope = |p: &PhasePoint| {
        let (dx, dy) = field(params, k, p.x, p.y).unwrap_or((f64::NAN, f64::NAN));
        dy / dx
    };
    let mut out = Vec::with_capacity(grid.len());
    let mut i = 0;
    for &x in grid {
        while i + 1 < pts.len() && pts[i + 1].x < x {
            i += 1;
        }
        if i + 1 >= pts.len() || pts[i].x > x {
            return Err(Error::Grid(format!("orbit does not cover X = {x}")));
        }
        let (a, b) = (pts[i], pts[i + 1]);
        if !(b.x > a.x) {
            return Err(Error::Grid(format!("X not increasing near X = {x}")));
        }
        let hx = b.x - a.x;
        let t = (x - a.x) / hx;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        out.push(h00 * a.y + h10 * hx * slope(&a) + h01 * b.y + h11 * hx * slope(&b));
    }
    Ok(out)
}

/// Checks that the `P0`-orbit for the larger `K` lies strictly below the one
/// for the smaller `K` on a common logarithmic `X`-grid.
pub fn orbit_monotonicity_check(params: &ModelParams, k1: f64, k2: f64, opts: &IntegratorOptions) -> Result<bool> {
    if !(k1 > 0.0 && k2 > k1) {
        return Err(Error::Domain(format!("need 0 < K1 < K2, got K1 = {k1}, K2 = {k2}")));
    }
    let lo = (1e3 * opts.launch_offset).max(1e-3);
    let hi = opts.x_big;
    let count = 400;
    let grid: Vec<f64> = (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect();
    let mut curves = Vec::with_capacity(2);
    for k in [k1, k2] {
        let orbit = integrate(launch_from_p0(params, k, opts), params, k, opts)?;
        curves.push(resample_y_of_x(&orbit, params, k, &grid)?);
    }
    Ok(curves[1].iter().zip(&curves[0]).all(|(a, b)| a < b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baseline() -> ModelParams {
        ModelParams::new(2.0, 0.5, 4).unwrap()
    }

    fn run(params: &ModelParams, k: f64, opts: &IntegratorOptions) -> Orbit {
        integrate(launch_from_p0(params, k, opts), params, k, opts).unwrap()
    }

    #[test]
    fn launch_points() {
        let opts = IntegratorOptions::default();
        let p = launch_from_p0(&baseline(), 0.1, &opts);
        assert_eq!(p.x, 1e-6);
        assert!(p.y < 5e-7 && p.y > 5e-7 * (1.0 - 1e-4));
        let p2 = launch_from_p0(&ModelParams::new(2.0, 0.5, 2).unwrap(), 0.1, &opts);
        assert!((p2.y / 1e-6 - 1.0).abs() < 1e-4);
        let p1 = launch_from_p0(&ModelParams::new(2.0, 0.5, 1).unwrap(), 0.1, &opts);
        assert!((p1.y / 1e-6 - 2.0).abs() < 1e-4);
    }

    /// The launch expansion leaves a residual of higher order than its terms.
    #[test]
    fn launch_expansion_is_invariant_to_leading_orders() {
        let params = baseline();
        let k = 0.7;
        let q = params.reaction_power();
        for delta in [1e-3, 1e-4] {
            let opts = IntegratorOptions { launch_offset: delta, ..Default::default() };
            let p = launch_from_p0(&params, k, &opts);
            let (dx, dy) = field(&params, k, p.x, p.y).unwrap();
            // d/dη of the curve Y(X) at the launch point
            let a = 2.0 / params.dim();
            let b = -(a * a + a) / (params.dim() + 2.0);
            let c = -k / (2.0 * q + params.dim() - 2.0);
            let curve_slope = a + 2.0 * b * p.x + c * q * p.x.powf(q - 1.0);
            let defect = (dy - curve_slope * dx).abs();
            assert!(defect < 10.0 * delta.powf(q + 1.0), "delta {delta}: defect {defect}");
        }
    }

    #[test]
    fn small_k_reaches_q1() {
        let orbit = run(&baseline(), 0.1, &IntegratorOptions::default());
        assert_eq!(orbit.termination.tag, EndTag::ToQ1, "{}", orbit.termination.diagnostics);
    }

    #[test]
    fn large_k_reaches_q3() {
        let orbit = run(&baseline(), 8.0, &IntegratorOptions::default());
        assert_eq!(orbit.termination.tag, EndTag::ToQ3, "{}", orbit.termination.diagnostics);
    }

    #[test]
    fn critical_slope_converges_to_stable_root() {
        let params = ModelParams::new(1.5, 0.5, 3).unwrap();
        let orbit = run(&params, 0.05, &IntegratorOptions::default());
        assert_eq!(orbit.termination.tag, EndTag::ToQ1, "{}", orbit.termination.diagnostics);
        let (y1, _) = critical_slopes(&params, 0.05).unwrap();
        assert!((orbit.termination.final_slope - y1).abs() < 1e-6, "{:?}", orbit.termination);
        assert!((y1 + 0.13820).abs() < 1e-5);
    }

    #[test]
    fn x_increases_below_vertical_line() {
        let params = baseline();
        for k in [0.1, 8.0] {
            let orbit = run(&params, k, &IntegratorOptions::default());
            for w in orbit.samples.windows(2) {
                assert!(w[1].eta > w[0].eta);
                if w[0].point.y < 2.0 / (params.m - 1.0) {
                    assert!(w[1].point.x > w[0].point.x);
                }
            }
        }
    }

    #[test]
    fn tolerance_and_offset_robustness() {
        let params = baseline();
        for k in [0.1, 8.0] {
            let base = run(&params, k, &IntegratorOptions::default());
            let tight = run(&params, k, &IntegratorOptions { rel_tol: 5e-11, ..Default::default() });
            assert_eq!(base.termination.tag, tight.termination.tag);
            let (a, b) = (base.termination.final_slope, tight.termination.final_slope);
            assert!((a - b).abs() <= 1e-4 * a.abs().max(b.abs()), "K={k}: {a} vs {b}");
            for delta in [1e-5, 1e-7] {
                let o = run(&params, k, &IntegratorOptions { launch_offset: delta, ..Default::default() });
                assert_eq!(o.termination.tag, base.termination.tag);
            }
        }
    }

    #[test]
    fn subcritical_always_q3() {
        let params = ModelParams::new(1.2, 0.5, 3).unwrap();
        for i in 0..13 {
            let k = 10f64.powf(-3.0 + 0.5 * i as f64);
            let orbit = run(&params, k, &IntegratorOptions::default());
            assert_eq!(orbit.termination.tag, EndTag::ToQ3, "K={k}: {}", orbit.termination.diagnostics);
        }
    }

    #[test]
    fn restart_from_interior_sample() {
        let params = baseline();
        let opts = IntegratorOptions::default();
        let orbit = run(&params, 0.1, &opts);
        let mid = orbit.samples[orbit.samples.len() / 3];
        assert!(mid.point.x < opts.x_big);
        let rest = integrate(mid.point, &params, 0.1, &opts).unwrap();
        assert_eq!(rest.termination.tag, orbit.termination.tag);
        // compare Y at a common X
        let x = 0.5 * (mid.point.x + opts.x_big.min(orbit.samples.last().unwrap().point.x));
        let a = resample_y_of_x(&orbit, &params, 0.1, &[x]).unwrap()[0];
        let b = resample_y_of_x(&rest, &params, 0.1, &[x]).unwrap()[0];
        assert!((a - b).abs() < 1e-7 * (1.0 + a.abs()), "{a} vs {b}");
    }

    #[test]
    fn monotone_in_k() {
        let opts = IntegratorOptions::default();
        assert!(orbit_monotonicity_check(&baseline(), 0.1, 0.2, &opts).unwrap());
        let crit = ModelParams::new(1.5, 0.5, 3).unwrap();
        assert!(orbit_monotonicity_check(&crit, 0.01, 0.05, &opts).unwrap());
        assert!(orbit_monotonicity_check(&baseline(), 0.1, 0.1, &opts).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        let opts = IntegratorOptions::default();
        assert!(integrate(PhasePoint::new(0.0, 0.0), &baseline(), 0.1, &opts).is_err());
        assert!(integrate(PhasePoint::new(1e-6, 0.0), &baseline(), -1.0, &opts).is_err());
        let bad = IntegratorOptions { x_big: 10.0, ..Default::default() };
        assert!(integrate(PhasePoint::new(1e-6, 0.0), &baseline(), 0.1, &bad).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let orbit = run(&baseline(), 0.1, &IntegratorOptions::default());
        let mut buf = Vec::new();
        orbit.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("eta,X,Y"));
        assert_eq!(lines.count(), orbit.samples.len());
    }
}
