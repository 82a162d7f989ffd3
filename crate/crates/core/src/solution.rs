//! The eternal solution `u(x, t) = e^{αt} f(|x| e^{-βt})` built from a
//! profile, and its traveling-wave image
//! `F(z) = e^{-2z/(m-1)} f(e^z)`, which moves with speed `β`.

use std::f64::consts::PI;
use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interp::{adaptive_simpson, hermite, locate};
use crate::params::ModelParams;
use crate::profile::Profile;

const SIMPSON_DEPTH: u32 = 48;

/// Interpolated eternal solution. Between samples `ln f` is a cubic Hermite
/// using the stored slopes `f'/f`; past the last sample `f` follows the fitted
/// interface power down to `ξ0`.
#[derive(Debug, Clone)]
pub struct EternalSolution {
    pub profile: Profile,
    pub alpha: f64,
    pub beta: f64,
    xi0: f64,
    tail_exponent: f64,
    ln_f: Vec<f64>,
    slope: Vec<f64>,
}

impl EternalSolution {
    pub fn new(profile: Profile) -> Result<Self> {
        if profile.xi.len() < 2 {
            return Err(Error::Grid("profile has fewer than two samples".into()));
        }
        if profile.f.iter().any(|&f| !(f > 0.0 && f.is_finite())) {
            return Err(Error::NonFinite("profile values must be positive and finite".into()));
        }
        let last = *profile.xi.last().unwrap();
        let xi0 = profile.xi0.filter(|&x| x > last).unwrap_or(last);
        let tail_exponent = profile
            .interface_fit
            .map(|fit| fit.exponent)
            .filter(|e| *e > 0.0)
            .unwrap_or_else(|| profile.params.type_one_exponent());
        let ln_f = profile.f.iter().map(|f| f.ln()).collect();
        let slope = profile.df.iter().zip(&profile.f).map(|(d, f)| d / f).collect();
        Ok(Self {
            alpha: profile.alpha,
            beta: profile.beta,
            profile,
            xi0,
            tail_exponent,
            ln_f,
            slope,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.profile.params
    }

    /// Right edge of the profile's support.
    pub fn xi0(&self) -> f64 {
        self.xi0
    }

    /// Support radius at time `t`.
    pub fn support_radius(&self, t: f64) -> f64 {
        self.xi0 * (self.beta * t).exp()
    }

    /// Profile value `f(ξ)`, extended evenly to `ξ < 0` and by zero past `ξ0`.
    pub fn profile_value(&self, xi: f64) -> f64 {
        let xi = xi.abs();
        let xs = &self.profile.xi;
        let n = xs.len();
        if xi >= self.xi0 {
            return 0.0;
        }
        if xi > xs[n - 1] {
            let ratio = (self.xi0 - xi) / (self.xi0 - xs[n - 1]);
            return self.profile.f[n - 1] * ratio.powf(self.tail_exponent);
        }
        if xi < xs[0] {
            let (x0, l0, s0) = (xs[0], self.ln_f[0], self.slope[0]);
            return hermite(-x0, x0, l0, l0, -s0, s0, xi).exp();
        }
        let i = locate(xs, xi);
        hermite(xs[i], xs[i + 1], self.ln_f[i], self.ln_f[i + 1], self.slope[i], self.slope[i + 1], xi).exp()
    }

    /// Total mass `ω_{N-1} ∫ u r^{N-1} dr` at time `t`.
    pub fn mass(&self, t: f64) -> Result<f64> {
        let n = self.params().dim();
        let radius = self.support_radius(t);
        let integrand = |r: f64| evaluate_u(self, r, t) * r.powf(n - 1.0);
        let rough: f64 = (1..=64)
            .map(|i| integrand(radius * (i as f64 - 0.5) / 64.0))
            .sum::<f64>()
            * radius
            / 64.0;
        if !rough.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand at t = {t}")));
        }
        let tol = 1e-11 * rough.abs().max(f64::MIN_POSITIVE);
        let mut total = 0.0;
        let pieces = 32;
        for j in 0..pieces {
            let a = radius * j as f64 / pieces as f64;
            let b = radius * (j + 1) as f64 / pieces as f64;
            total += adaptive_simpson(&integrand, a, b, tol / pieces as f64, SIMPSON_DEPTH)
                .ok_or_else(|| Error::Quadrature(format!("no convergence on [{a}, {b}] at t = {t}")))?;
        }
        Ok(sphere_area(self.params().n) * total)
    }
}

/// Surface area of the unit sphere in `R^N`; 2 for `N = 1`.
pub fn sphere_area(n: u32) -> f64 {
    let half = n as f64 / 2.0;
    2.0 * PI.powf(half) / gamma_half_integer(n)
}

/// `Γ(n/2)` by the recursion from `Γ(1) = 1` or `Γ(1/2) = √π`.
fn gamma_half_integer(n: u32) -> f64 {
    let mut x = if n.is_multiple_of(2) { 1.0 } else { 0.5 };
    let mut g = if n.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    while x < n as f64 / 2.0 {
        g *= x;
        x += 1.0;
    }
    g
}

/// `u(r, t) = e^{αt} f(r e^{-βt})`.
pub fn evaluate_u(sol: &EternalSolution, r: f64, t: f64) -> f64 {
    (sol.alpha * t).exp() * sol.profile_value(r * (-sol.beta * t).exp())
}

fn first_difference<F: Fn(f64) -> f64>(g: F, x: f64, h: f64) -> f64 {
    (g(x - 2.0 * h) - 8.0 * g(x - h) + 8.0 * g(x + h) - g(x + 2.0 * h)) / (12.0 * h)
}

fn second_difference<F: Fn(f64) -> f64>(g: F, x: f64, h: f64) -> f64 {
    (-g(x - 2.0 * h) + 16.0 * g(x - h) - 30.0 * g(x) + 16.0 * g(x + h) - g(x + 2.0 * h)) / (12.0 * h * h)
}

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::Step(format!("step must be positive, got {h}")))
    }
}

/// `u_t - (u^m)_rr - (N-1)/r (u^m)_r - r^σ u^p` from fourth-order central
/// differences with step `h` in both `r` and `t`.
pub fn pde_residual(sol: &EternalSolution, r: f64, t: f64, h: f64) -> Result<f64> {
    check_step(h)?;
    let r = r.abs();
    if r + 5.0 * h >= sol.support_radius(t) {
        return Err(Error::Domain(format!("r = {r} is within 5h of the interface")));
    }
    let params = sol.params();
    let m = params.m;
    let flux = |s: f64| evaluate_u(sol, s, t).powf(m);
    let u_t = first_difference(|s| evaluate_u(sol, r, s), t, h);
    let v_rr = second_difference(flux, r, h);
    let radial = if r == 0.0 {
        (params.dim() - 1.0) * v_rr
    } else {
        (params.dim() - 1.0) / r * first_difference(flux, r, h)
    };
    let u = evaluate_u(sol, r, t);
    Ok(u_t - v_rr - radial - r.powf(params.sigma) * u.powf(params.p))
}

/// Growth rate of `ln M(t)` from a least-squares line through `t_samples`.
pub fn mass_growth_rate(sol: &EternalSolution, t_samples: &[f64]) -> Result<f64> {
    if t_samples.len() < 2 {
        return Err(Error::Domain("need at least two time samples".into()));
    }
    let logs = t_samples
        .iter()
        .map(|&t| sol.mass(t).map(f64::ln))
        .collect::<Result<Vec<f64>>>()?;
    let n = t_samples.len() as f64;
    let mt = t_samples.iter().sum::<f64>() / n;
    let ml = logs.iter().sum::<f64>() / n;
    let sxx: f64 = t_samples.iter().map(|t| (t - mt).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("time samples must not all coincide".into()));
    }
    let sxy: f64 = t_samples.iter().zip(&logs).map(|(t, l)| (t - mt) * (l - ml)).sum();
    Ok(sxy / sxx)
}

/// Coefficients `(A, B)` of the one-dimensional equation
/// `-cF' - (F^m)'' - A (F^m)' - B F^m - F^p = 0`.
pub fn tw_coefficients(params: &ModelParams) -> (f64, f64) {
    let (m, n) = (params.m, params.dim());
    let a = (n * (m - 1.0) + 2.0 * (m + 1.0)) / (m - 1.0);
    let b = 2.0 * m * (n * (m - 1.0) + 2.0) / ((m - 1.0) * (m - 1.0));
    (a, b)
}

/// Sign convention recorded with every exported wave.
pub const TW_CONVENTION: &str = "w(y,tau) = F(y - c tau), r = e^y, w = r^(-2/(m-1)) u; \
residual = -c F' - (F^m)'' - A (F^m)' - B F^m - F^p";

/// `F(z) = e^{-2z/(m-1)} f(e^z)` sampled at `z = ln ξ` of the profile grid
/// and at `ln ξ0`, where it vanishes.
#[derive(Debug, Clone)]
pub struct TravelingWave {
    pub params: ModelParams,
    pub c: f64,
    pub z_grid: Vec<f64>,
    pub f: Vec<f64>,
    source: EternalSolution,
}

#[derive(Debug, Clone, Serialize)]
pub struct TwMetadata {
    pub c: f64,
    pub convection: f64,
    pub reaction: f64,
    pub z_edge: f64,
    pub convention: &'static str,
}

pub fn to_traveling_wave(sol: &EternalSolution) -> TravelingWave {
    let mut z_grid: Vec<f64> = sol.profile.xi.iter().map(|x| x.ln()).collect();
    let edge = sol.xi0().ln();
    if z_grid.last().is_some_and(|&z| z < edge) {
        z_grid.push(edge);
    }
    let mut tw = TravelingWave {
        params: *sol.params(),
        c: sol.beta,
        f: Vec::new(),
        z_grid,
        source: sol.clone(),
    };
    tw.f = tw.z_grid.iter().map(|&z| tw.value(z)).collect();
    tw
}

impl TravelingWave {
    /// The same wave profile tested against another speed.
    pub fn with_speed(&self, c: f64) -> Self {
        Self { c, ..self.clone() }
    }

    pub fn z_edge(&self) -> f64 {
        self.source.xi0().ln()
    }

    pub fn value(&self, z: f64) -> f64 {
        if z >= self.z_edge() {
            return 0.0;
        }
        let gamma = 2.0 / (self.params.m - 1.0);
        (-gamma * z).exp() * self.source.profile_value(z.exp())
    }

    pub fn metadata(&self) -> TwMetadata {
        let (convection, reaction) = tw_coefficients(&self.params);
        TwMetadata { c: self.c, convection, reaction, z_edge: self.z_edge(), convention: TW_CONVENTION }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let (a, b) = tw_coefficients(&self.params);
        writeln!(out, "# m={} p={} N={} c={} A={a} B={b}", self.params.m, self.params.p, self.params.n, self.c)?;
        writeln!(out, "# convention: {TW_CONVENTION}")?;
        writeln!(out, "z,F")?;
        for (z, f) in self.z_grid.iter().zip(&self.f) {
            writeln!(out, "{z},{f}")?;
        }
        Ok(())
    }
}

/// The five terms `[-cF', -(F^m)'', -A (F^m)', -B F^m, -F^p]` at `z`.
pub fn tw_terms(tw: &TravelingWave, z: f64, h: f64) -> Result<[f64; 5]> {
    check_step(h)?;
    if z + 5.0 * h >= tw.z_edge() {
        return Err(Error::Domain(format!("z = {z} is within 5h of the support edge")));
    }
    let m = tw.params.m;
    let (a, b) = tw_coefficients(&tw.params);
    let power = |s: f64| tw.value(s).powf(m);
    let f = tw.value(z);
    Ok([
        -tw.c * first_difference(|s| tw.value(s), z, h),
        -second_difference(power, z, h),
        -a * first_difference(power, z, h),
        -b * f.powf(m),
        -f.powf(tw.params.p),
    ])
}

pub fn tw_residual(tw: &TravelingWave, z: f64, h: f64) -> Result<f64> {
    Ok(tw_terms(tw, z, h)?.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{reconstruct, ProfileOptions};

    fn baseline() -> EternalSolution {
        let params = ModelParams::new(2.0, 0.5, 4).unwrap();
        EternalSolution::new(reconstruct(&params, 0.1, &ProfileOptions::default()).unwrap()).unwrap()
    }

    #[test]
    fn sphere_areas() {
        assert_eq!(sphere_area(1), 2.0);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn tw_coefficients_for_m2_n4() {
        let params = ModelParams::new(2.0, 0.5, 4).unwrap();
        assert_eq!(tw_coefficients(&params), (10.0, 24.0));
    }

    #[test]
    fn u_basics() {
        let sol = baseline();
        assert!((evaluate_u(&sol, 0.0, 0.0) - 1.0).abs() < 1e-8);
        for t in [-0.3, 0.0, 0.2] {
            assert_eq!(evaluate_u(&sol, sol.support_radius(t), t), 0.0);
        }
        let (r, t, d) = (3.0, 0.05, 0.07);
        let lhs = evaluate_u(&sol, r, t + d);
        let rhs = (sol.alpha * d).exp() * evaluate_u(&sol, r * (-sol.beta * d).exp(), t);
        assert!((lhs / rhs - 1.0).abs() < 1e-6);
    }

    #[test]
    fn interpolation_matches_samples() {
        let sol = baseline();
        for i in [0, 10, 500, 3000] {
            let xi = sol.profile.xi[i];
            assert!((sol.profile_value(xi) / sol.profile.f[i] - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn pde_residual_interior_and_time_scaling() {
        let sol = baseline();
        let h = 1e-3;
        for r in [0.0, 0.01, 1.0, 50.0, 300.0, 500.0] {
            let u = evaluate_u(&sol, r, 0.0);
            let res = pde_residual(&sol, r, 0.0, h).unwrap();
            assert!(res.abs() < 1e-4 * sol.alpha * u, "r={r}: {res} vs {u}");
            let later = pde_residual(&sol, r * (sol.beta * 0.1).exp(), 0.1, h).unwrap();
            assert!(later.abs() < 1e-4 * sol.alpha * u * (sol.alpha * 0.1).exp(), "r={r}");
        }
        assert!(pde_residual(&sol, sol.xi0() - 1e-3, 0.0, h).is_err());
    }

    #[test]
    fn mass_grows_at_alpha_plus_n_beta() {
        let sol = baseline();
        let rate = mass_growth_rate(&sol, &[-0.1, 0.0, 0.1]).unwrap();
        let expect = sol.alpha + 4.0 * sol.beta;
        assert!(rate > 0.0);
        assert!((rate / expect - 1.0).abs() < 1e-3, "{rate} vs {expect}");
    }

    #[test]
    fn wave_edge_and_left_growth() {
        let sol = baseline();
        let tw = to_traveling_wave(&sol);
        assert_eq!(*tw.f.last().unwrap(), 0.0);
        assert_eq!(tw.value(tw.z_edge() + 0.1), 0.0);
        assert!(tw.value(tw.z_edge() - 1e-6) > 0.0);
        let z = tw.z_grid[0];
        assert!((tw.value(z) / (-2.0 * z).exp() - 1.0).abs() < 1e-4);
        assert_eq!(tw.c, sol.beta);
    }

    #[test]
    fn wave_residual_and_wrong_speed() {
        let sol = baseline();
        let tw = to_traveling_wave(&sol);
        let wrong = tw.with_speed(tw.c + 0.5);
        let h = 1e-3;
        let mut worst_wrong: f64 = 0.0;
        for z in [-3.0, 0.0, 2.0, 4.0, 6.0] {
            let terms = tw_terms(&tw, z, h).unwrap();
            let scale = terms.iter().fold(0.0f64, |a, t| a.max(t.abs()));
            let res: f64 = terms.iter().sum();
            assert!(res.abs() < 1e-3 * scale, "z={z}: {res} vs {scale}");
            worst_wrong = worst_wrong.max(tw_residual(&wrong, z, h).unwrap().abs() / (1e-3 * scale));
        }
        assert!(worst_wrong >= 10.0);
    }
}
