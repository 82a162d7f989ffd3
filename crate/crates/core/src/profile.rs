//! Radial profiles `f(ξ)` solving
//!
//! ```text
//! (f^m)'' + (N-1)/ξ (f^m)' - α f + β ξ f' + ξ^σ f^p = 0,   f(0) = 1, f'(0) = 0
//! ```
//!
//! integrated outward until `f` reaches the interface, and the local power
//! law `f ~ C (ξ0 - ξ)^γ` fitted there.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::{centered_derivative, golden_section};
use crate::integrator::{launch_from_p0, IntegratorOptions};
use crate::params::{alpha_beta_from_k, ModelParams, Regime};
use crate::phaseplane::{field, frac_pow};
use crate::rk::{Advance, Rosenbrock, Stepper};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Integration stops once `f` falls below this.
    pub f_floor: f64,
    /// Samples over the bulk of the support.
    pub uniform_points: usize,
    /// Geometrically spaced samples approaching the interface.
    pub refine_points: usize,
    /// Samples with `f` below this fraction of `f(0)` enter the interface fit.
    pub fit_f_window: f64,
    /// Relative distance to a target exponent accepted by the classification.
    pub fit_window: f64,
    /// Launch offset `X = δ` on the unstable manifold of `P0`.
    pub launch_offset: f64,
    /// `X` beyond which the orbit is continued in the chart at infinity.
    pub x_switch: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-20,
            f_floor: 1e-8,
            uniform_points: 3000,
            refine_points: 1200,
            fit_f_window: 1e-3,
            fit_window: 0.1,
            launch_offset: 1e-6,
            x_switch: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InterfaceType {
    TypeI,
    TypeII,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceFit {
    pub xi0: f64,
    pub exponent: f64,
    pub constant: f64,
    pub type_label: InterfaceType,
    /// The exponent matches `1/m`: `f` changes sign rather than forming an
    /// admissible interface.
    pub sign_change: bool,
    /// Number of samples used in the regression.
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub params: ModelParams,
    #[serde(rename = "K")]
    pub k: f64,
    pub alpha: f64,
    pub beta: f64,
    pub xi: Vec<f64>,
    pub f: Vec<f64>,
    /// `f'` at the samples, from the ODE state.
    pub df: Vec<f64>,
    pub xi0: Option<f64>,
    pub interface_fit: Option<InterfaceFit>,
}

/// Distance scale `√(2mN/(α(m-1)))` of the central hump of the normalized
/// profile.
fn core_scale(params: &ModelParams, alpha: f64) -> f64 {
    (2.0 * params.m * params.dim() / (alpha * (params.m - 1.0))).sqrt()
}

/// Orbit state in either coordinate system: `(X, Y)` while `X` is moderate,
/// `(y, z) = (Y/X, 1/X)` beyond.
#[derive(Debug, Clone, Copy)]
struct Sample {
    eta: f64,
    x: f64,
    y: f64,
}

/// Traces the `P0`-orbit launched at `η = 0` and records it at the requested
/// `η` values (every step when `targets` is `None`), until `stop` holds or
/// the step size underflows.
struct Tracer<'a> {
    params: &'a ModelParams,
    k: f64,
    opts: &'a ProfileOptions,
}

impl Tracer<'_> {
    fn run<S: Fn(&Sample) -> bool>(&self, targets: Option<&[f64]>, stop: S) -> Result<Vec<Sample>> {
        let params = self.params;
        let k = self.k;
        let opts = self.opts;
        let io = IntegratorOptions { launch_offset: opts.launch_offset, ..Default::default() };
        let start = launch_from_p0(params, k, &io);
        let mut out = Vec::new();
        let mut pending = targets.map(|t| t.iter().copied().peekable());
        let record_all = pending.is_none();
        let first = Sample { eta: 0.0, x: start.x, y: start.y };
        out.push(first);

        // (X, Y) in η
        let stepper = Stepper { rel_tol: opts.rel_tol, abs_tol: opts.abs_tol, h_min: 1e-14, h_max: 0.5 };
        let rhs = |_t: f64, s: &[f64; 2]| field(params, k, s[0], s[1]).map(|(a, b)| [a, b]);
        let mut eta = 0.0;
        let mut s = [start.x, start.y];
        let mut h = 1e-3;
        while s[0] < opts.x_switch {
            let cap = match pending.as_mut().map(|p| p.peek().copied()) {
                Some(Some(t)) if t > eta => t - eta,
                Some(Some(_)) => {
                    pending.as_mut().unwrap().next();
                    continue;
                }
                Some(None) => return Ok(out),
                None => f64::INFINITY,
            };
            match stepper.advance(&rhs, eta, &s, h, cap) {
                Advance::Accepted { t, y, h_next } => {
                    if y.iter().any(|v| !v.is_finite()) {
                        return Err(Error::NonFinite(format!("orbit state at eta = {t}")));
                    }
                    let landed = cap.is_finite() && (t - eta - cap).abs() <= 4.0 * f64::EPSILON * t.abs().max(1.0);
                    eta = if landed { eta + cap } else { t };
                    s = y;
                    h = h_next;
                    if landed {
                        pending.as_mut().unwrap().next();
                    }
                    let sample = Sample { eta, x: s[0], y: s[1] };
                    let done = stop(&sample);
                    if record_all || landed || done {
                        out.push(sample);
                    }
                    if done {
                        return Ok(out);
                    }
                }
                Advance::Underflow { .. } => return Ok(out),
            }
        }

        // (y, z, η) in τ
        let m1 = params.m - 1.0;
        let n = params.dim();
        let theta = params.chart_power();
        let chart = |_t: f64, c: &[f64; 3]| {
            if c[1] < 0.0 {
                return None;
            }
            let (y, z) = (c[0], c[1]);
            Some([
                -y * y - m1 * y - n * y * z + 2.0 * z - k * frac_pow(z, theta),
                m1 * y * z - 2.0 * z * z,
                z,
            ])
        };
        let explicit = Stepper { rel_tol: opts.rel_tol, abs_tol: opts.abs_tol, h_min: 1e-14, h_max: 1e12 };
        // deep in the Q1 basin y relaxes at rate m-1 while z decays only
        // algebraically; the implicit pair takes over there
        let implicit = Rosenbrock { rel_tol: opts.rel_tol.max(1e-10), abs_tol: opts.abs_tol, h_min: 1e-14, h_max: 1e12 };
        let mut stiff = false;
        let mut c = [s[1] / s[0], 1.0 / s[0], eta];
        let mut tau = 0.0;
        let mut h = 1e-3;
        for _ in 0..10_000_000usize {
            let next_target = match pending.as_mut().map(|p| p.peek().copied()) {
                Some(Some(t)) if t > c[2] => Some(t),
                Some(Some(_)) => {
                    pending.as_mut().unwrap().next();
                    continue;
                }
                Some(None) => return Ok(out),
                None => None,
            };
            let step = if stiff {
                implicit.advance(&chart, tau, &c, h, f64::INFINITY)
            } else {
                explicit.advance(&chart, tau, &c, h, f64::INFINITY)
            };
            match step {
                Advance::Accepted { t, y: cn, h_next } => {
                    if cn.iter().any(|v| !v.is_finite()) {
                        return Err(Error::NonFinite(format!("chart state at eta = {}", c[2])));
                    }
                    let (t, cn, landed) = match next_target {
                        Some(target) if cn[2] >= target => {
                            let trial = |h: f64| {
                                if stiff {
                                    implicit.trial(&chart, tau, &c, h).map(|r| r.0)
                                } else {
                                    explicit.trial(&chart, tau, &c, h).map(|r| r.0)
                                }
                            };
                            let (hl, cl) = land_on_eta(trial, &c, t - tau, cn, target);
                            (tau + hl, cl, true)
                        }
                        _ => (t, cn, false),
                    };
                    tau = t;
                    c = cn;
                    h = h_next;
                    if !stiff && h * m1 > 2.0 && c[0] > -m1 / 2.0 && c[1] < 1e-3 {
                        stiff = true;
                    }
                    if landed {
                        pending.as_mut().unwrap().next();
                    }
                    let sample = Sample { eta: c[2], x: 1.0 / c[1], y: c[0] / c[1] };
                    let done = stop(&sample);
                    if record_all || landed || done {
                        out.push(sample);
                    }
                    if done {
                        return Ok(out);
                    }
                }
                Advance::Underflow { .. } => return Ok(out),
            }
        }
        Err(Error::Step("profile orbit exceeded its step budget".into()))
    }
}

/// Shortens a chart step so that it ends at `η = target`, given the state
/// reached by a trial step of any length.
fn land_on_eta<T>(trial: T, state: &[f64; 3], h: f64, overshoot: [f64; 3], target: f64) -> (f64, [f64; 3])
where
    T: Fn(f64) -> Option<[f64; 3]>,
{
    let (mut lo, mut hi) = (0.0, h);
    let (mut g_lo, mut g_hi) = (state[2] - target, overshoot[2] - target);
    let mut best = (h, overshoot);
    for _ in 0..100 {
        if g_hi == 0.0 || hi - lo <= 1e-15 * h {
            break;
        }
        let guess = lo + (hi - lo) * g_lo / (g_lo - g_hi);
        let mid = if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) };
        let Some(y) = trial(mid) else { break };
        let g = y[2] - target;
        if g >= 0.0 {
            hi = mid;
            g_hi = g;
            best = (mid, y);
        } else {
            lo = mid;
            g_lo = g;
        }
        if g.abs() <= 4.0 * f64::EPSILON * target.abs().max(1.0) {
            best = (mid, y);
            break;
        }
    }
    best
}

/// Maps orbit samples to `(ξ, f, f')` of the profile with `f(0) = 1`.
struct Normalizer {
    m: f64,
    alpha: f64,
    /// `ln` of the factor taking orbit `ξ = e^η` to profile `ξ`.
    log_shift: f64,
    inv_amp: f64,
}

impl Normalizer {
    /// The launch point sits at `η = 0`, i.e. at orbit radius 1; the series
    /// `g^{m-1} = A^{m-1} + α(m-1)ξ²/(2mN)` gives the central value `A`, and
    /// the symmetry `A^{-1} g(A^{(m-1)/2} ξ)` normalizes it.
    fn new(params: &ModelParams, alpha: f64, launch_x: f64) -> Self {
        let m = params.m;
        let c = alpha * (m - 1.0) / (2.0 * m * params.dim());
        let a_pow = alpha / (2.0 * m * launch_x) - c;
        let ln_a = a_pow.ln() / (m - 1.0);
        Self { m, alpha, log_shift: -(m - 1.0) / 2.0 * ln_a, inv_amp: (-ln_a).exp() }
    }

    fn eta_of_xi(&self, xi: f64) -> f64 {
        xi.ln() - self.log_shift
    }

    fn map(&self, s: &Sample) -> (f64, f64, f64) {
        let xo = s.eta.exp();
        let g = (self.alpha * xo * xo / (2.0 * self.m * s.x)).powf(1.0 / (self.m - 1.0));
        let f = g * self.inv_amp;
        let xi = xo * self.log_shift.exp();
        (xi, f, s.y * f / xi)
    }
}

/// Reconstructs the profile for shooting parameter `K`.
pub fn reconstruct(params: &ModelParams, k: f64, opts: &ProfileOptions) -> Result<Profile> {
    if params.regime() == Regime::Subcritical {
        return Err(Error::Domain("profiles with interface need m + p >= 2".into()));
    }
    let sp = alpha_beta_from_k(params, k)?;
    let io = IntegratorOptions { launch_offset: opts.launch_offset, ..Default::default() };
    let norm = Normalizer::new(params, sp.alpha, launch_from_p0(params, k, &io).x);
    let tracer = Tracer { params, k, opts };
    let below_floor = |s: &Sample| norm.map(s).1 < opts.f_floor;

    let build = |samples: &[Sample]| -> Profile {
        let mut profile = Profile {
            params: *params,
            k,
            alpha: sp.alpha,
            beta: sp.beta,
            xi: Vec::with_capacity(samples.len()),
            f: Vec::with_capacity(samples.len()),
            df: Vec::with_capacity(samples.len()),
            xi0: None,
            interface_fit: None,
        };
        for s in samples {
            let (xi, f, df) = norm.map(s);
            if profile.xi.last().is_some_and(|&last| xi <= last) {
                continue;
            }
            profile.xi.push(xi);
            profile.f.push(f);
            profile.df.push(df);
        }
        profile
    };

    let first = build(&tracer.run(None, below_floor)?);
    let f_last = *first.f.last().unwrap();
    if f_last >= first.f[0] {
        return Err(Error::Domain(format!("profile failed to decrease (K = {k})")));
    }
    let xi_end = *first.xi.last().unwrap();
    let anchor = fit_interface(&first, opts.fit_f_window, opts.fit_window)
        .map(|fit| (fit.xi0, 0.5 * (fit.xi0 - xi_end)))
        .unwrap_or((xi_end, 1e-12 * xi_end));
    let grid = plan_grid(first.xi[0], core_scale(params, sp.alpha), anchor, opts);
    let targets: Vec<f64> = grid.iter().map(|&x| norm.eta_of_xi(x)).collect();
    let mut profile = build(&tracer.run(Some(&targets), below_floor)?);

    if let Ok(fit) = fit_interface(&profile, opts.fit_f_window, opts.fit_window) {
        profile.xi0 = Some(extrapolate_xi0(&profile, fit.exponent));
        profile.interface_fit = Some(fit);
    }
    Ok(profile)
}

/// Samples dense near the centre (`sinh` spacing on the scale of the hump),
/// roughly logarithmic in the bulk, and geometric in the distance to the
/// interface.
fn plan_grid(xi_first: f64, scale: f64, (xi0, d_min): (f64, f64), opts: &ProfileOptions) -> Vec<f64> {
    let bulk_end = 0.95 * xi0;
    let kappa = (bulk_end / scale).asinh();
    let nb = opts.uniform_points;
    let mut grid: Vec<f64> = (1..=nb)
        .map(|i| scale * (kappa * i as f64 / nb as f64).sinh())
        .filter(|&x| x > xi_first)
        .collect();
    let near = xi0 - bulk_end;
    let d_min = d_min.max(1e-13 * xi0).min(0.1 * near);
    let nt = opts.refine_points;
    for i in 1..nt {
        grid.push(xi0 - near * (d_min / near).powf(i as f64 / (nt - 1) as f64));
    }
    grid
}

/// `ξ0` from one Newton step on `f^{1/γ}`, which is linear in `ξ` at a
/// power-law interface.
fn extrapolate_xi0(profile: &Profile, exponent: f64) -> f64 {
    let i = profile.xi.len() - 1;
    let (xi, f, df) = (profile.xi[i], profile.f[i], profile.df[i]);
    if df < 0.0 {
        xi - exponent * f / df
    } else {
        xi
    }
}

/// Residual of the profile equation at sample `index`, with `(f^m)''` from
/// finite differences of the stored `(f^m)' = m f^{m-1} f'`.
pub fn ode_residual(profile: &Profile, index: usize) -> Result<f64> {
    let n = profile.xi.len();
    if index < 1 || index + 2 > n {
        return Err(Error::Domain(format!("index {index} outside 1..={}", n.saturating_sub(2))));
    }
    let m = profile.params.m;
    let flux: Vec<f64> = profile
        .f
        .iter()
        .zip(&profile.df)
        .map(|(f, d)| m * f.powf(m - 1.0) * d)
        .collect();
    let xi = profile.xi[index];
    let f = profile.f[index];
    let second = centered_derivative(&profile.xi, &flux, index);
    let r = second + (profile.params.dim() - 1.0) / xi * flux[index] - profile.alpha * f
        + profile.beta * xi * profile.df[index]
        + xi.powf(profile.params.sigma) * f.powf(profile.params.p);
    Ok(r.abs())
}

/// Fits `ln f = ln C + γ ln(ξ0 - ξ)` over the decreasing tail where
/// `f < window·f(0)`, choosing `ξ0` to minimize the regression residual.
pub fn fit_interface(profile: &Profile, window: f64, fit_window: f64) -> Result<InterfaceFit> {
    let peak = profile
        .f
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let limit = window * profile.f[0];
    let idx: Vec<usize> = (peak..profile.xi.len()).filter(|&i| profile.f[i] < limit && profile.f[i] > 0.0).collect();
    if idx.len() < 20 {
        return Err(Error::Grid(format!(
            "only {} samples with f < {limit:e} near the interface",
            idx.len()
        )));
    }
    let xs: Vec<f64> = idx.iter().map(|&i| profile.xi[i]).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| profile.f[i].ln()).collect();
    let last = *xs.last().unwrap();
    let span = last - xs[0];

    let regress = |x0: f64| -> (f64, f64, f64) {
        let ls: Vec<f64> = xs.iter().map(|x| (x0 - x).ln()).collect();
        let n = ls.len() as f64;
        let mx = ls.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = ls.iter().zip(&ys).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = ls.iter().map(|a| (a - mx).powi(2)).sum();
        let slope = sxy / sxx;
        let icpt = my - slope * mx;
        let rss: f64 = ls.iter().zip(&ys).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
        (slope, icpt, rss)
    };
    // search ξ0 - last on a log scale
    let lo = (1e-16 * last).max(f64::EPSILON * last).ln();
    let hi = span.ln();
    let t = golden_section(|t| regress(last + t.exp()).2, lo, hi, 1e-10);
    let xi0 = last + t.exp();
    let (exponent, icpt, _) = regress(xi0);

    let params = &profile.params;
    let near = |target: f64| (exponent - target).abs() < fit_window * target;
    let type_label = if near(params.type_one_exponent()) {
        InterfaceType::TypeI
    } else if near(params.type_two_exponent()) {
        InterfaceType::TypeII
    } else {
        InterfaceType::Indeterminate
    };
    Ok(InterfaceFit {
        xi0,
        exponent,
        constant: icpt.exp(),
        type_label,
        sign_change: near(params.sign_change_exponent()),
        samples: idx.len(),
    })
}

/// The rescaled profile `g(ξ) = λ^{-2/(m-1)} f(λξ)`, again a solution.
pub fn rescale(profile: &Profile, lambda: f64) -> Result<Profile> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    let e = -2.0 / (profile.params.m - 1.0);
    let amp = lambda.powf(e);
    let damp = amp * lambda;
    Ok(Profile {
        params: profile.params,
        k: profile.k,
        alpha: profile.alpha,
        beta: profile.beta,
        xi: profile.xi.iter().map(|x| x / lambda).collect(),
        f: profile.f.iter().map(|f| f * amp).collect(),
        df: profile.df.iter().map(|d| d * damp).collect(),
        xi0: profile.xi0.map(|x| x / lambda),
        interface_fit: profile.interface_fit.map(|fit| InterfaceFit {
            xi0: fit.xi0 / lambda,
            constant: fit.constant * lambda.powf(fit.exponent + e),
            ..fit
        }),
    })
}

impl Profile {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let pr = &self.params;
        writeln!(out, "# m={} p={} N={} sigma={}", pr.m, pr.p, pr.n, pr.sigma)?;
        writeln!(out, "# K={} alpha={} beta={}", self.k, self.alpha, self.beta)?;
        match self.xi0 {
            Some(x) => writeln!(out, "# xi0={x}")?,
            None => writeln!(out, "# xi0=none")?,
        }
        writeln!(out, "xi,f")?;
        for (x, f) in self.xi.iter().zip(&self.f) {
            writeln!(out, "{x},{f}")?;
        }
        Ok(())
    }

    /// Phase-plane image `(X, Y) = ((α/2m) ξ² f^{1-m}, ξ f'/f)` of the samples.
    pub fn phase_plane(&self) -> Vec<(f64, f64)> {
        let m = self.params.m;
        self.xi
            .iter()
            .zip(self.f.iter().zip(&self.df))
            .map(|(x, (f, d))| (self.alpha / (2.0 * m) * x * x * f.powf(1.0 - m), x * d / f))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baseline() -> ModelParams {
        ModelParams::new(2.0, 0.5, 4).unwrap()
    }

    fn max_interior_residual(p: &Profile) -> f64 {
        let xi0 = p.xi0.unwrap();
        let mut worst: f64 = 0.0;
        for i in 1..p.xi.len() - 1 {
            if p.xi[i] > 0.99 * xi0 {
                break;
            }
            let bound = 1e-6 * (p.alpha * p.f[i]).abs().max(1.0);
            worst = worst.max(ode_residual(p, i).unwrap() / bound);
        }
        worst
    }

    #[test]
    fn normalized_at_centre() {
        let params = baseline();
        let p = reconstruct(&params, 0.1, &ProfileOptions::default()).unwrap();
        let sp = alpha_beta_from_k(&params, 0.1).unwrap();
        let q = params.reaction_power();
        let c = -0.1 / (2.0 * q + 2.0);
        // ln f = X/N + c X^q/(2q) + O(X²) with X = αξ²/(2m) near the centre
        for i in 0..5 {
            let x = sp.alpha * p.xi[i] * p.xi[i] / 4.0;
            let expect = (x / 4.0 + c * x.powf(q) / (2.0 * q)).exp();
            assert!((p.f[i] / expect - 1.0).abs() < 1e-8, "i={i}: {} vs {expect}", p.f[i]);
        }
    }

    #[test]
    fn small_k_profile_has_type_two_interface() {
        let p = reconstruct(&baseline(), 0.1, &ProfileOptions::default()).unwrap();
        let fit = p.interface_fit.unwrap();
        assert_eq!(fit.type_label, InterfaceType::TypeII, "{fit:?}");
        assert!(p.xi0.unwrap() > *p.xi.last().unwrap());
        assert!((p.xi0.unwrap() - fit.xi0).abs() < 1e-6 * fit.xi0);
        assert!(p.df[1] > 0.0);
        let n = p.xi.len();
        let tail_start = p.xi[0] + 0.9 * (p.xi[n - 1] - p.xi[0]);
        for i in 0..n {
            if p.xi[i] >= tail_start {
                assert!(p.df[i] < 0.0);
            }
        }
        assert!(p.f.iter().all(|&f| f > 0.0));
        assert!(p.xi.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn residual_is_small_away_from_interface() {
        let p = reconstruct(&baseline(), 0.1, &ProfileOptions::default()).unwrap();
        let worst = max_interior_residual(&p);
        assert!(worst < 1.0, "worst residual ratio {worst}");
        assert!(ode_residual(&p, 0).is_err());
        assert!(ode_residual(&p, p.xi.len() - 1).is_err());
    }

    #[test]
    fn large_k_profile_changes_sign() {
        let p = reconstruct(&baseline(), 8.0, &ProfileOptions::default()).unwrap();
        let fit = p.interface_fit.unwrap();
        assert!(fit.sign_change, "{fit:?}");
        assert!((fit.exponent - 0.5).abs() < 0.05);
    }

    #[test]
    fn critical_profile_fits_common_exponent() {
        let params = ModelParams::new(1.5, 0.5, 3).unwrap();
        let p = reconstruct(&params, 0.03, &ProfileOptions::default()).unwrap();
        let fit = p.interface_fit.unwrap();
        assert_eq!(fit.type_label, InterfaceType::TypeI, "{fit:?}");
    }

    #[test]
    fn rescaling_is_a_symmetry() {
        let p = reconstruct(&baseline(), 0.1, &ProfileOptions::default()).unwrap();
        let same = rescale(&p, 1.0).unwrap();
        assert_eq!(same, p);
        for lambda in [0.5, 2.0, 10.0] {
            let g = rescale(&p, lambda).unwrap();
            assert!((g.f[0] / p.f[0] - lambda.powf(-2.0)).abs() < 1e-15);
            assert!((g.xi0.unwrap() - p.xi0.unwrap() / lambda).abs() < 1e-12 * p.xi0.unwrap());
            let worst = max_interior_residual(&g);
            assert!(worst < 10.0, "lambda {lambda}: {worst}");
        }
        assert!(rescale(&p, 0.0).is_err());
    }

    #[test]
    fn subcritical_is_rejected() {
        let params = ModelParams::new(1.2, 0.5, 3).unwrap();
        assert!(reconstruct(&params, 1.0, &ProfileOptions::default()).is_err());
    }
}
