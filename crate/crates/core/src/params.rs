//! Exponent algebra for `u_t = Δu^m + |x|^σ u^p` at the critical weight
//! `σ = 2(1-p)/(m-1)`.
//!
//! Everything downstream is parameterised by [`ModelParams`] (the fixed data
//! of the problem) and the shooting parameter `K`, which is in one-to-one
//! correspondence with the self-similar exponents `(α, β)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used to detect `m + p = 2`.
pub const TOL_REGIME: f64 = 1e-12;

/// The sign of `m + p - 2`, which selects structurally different behaviour at
/// infinity of the phase plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Supercritical,
    Critical,
    Subcritical,
}

/// Model exponents. `sigma` is always derived from `m` and `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub m: f64,
    pub p: f64,
    #[serde(rename = "N")]
    pub n: u32,
    pub sigma: f64,
}

/// `2(1-p)/(m-1)`, the weight exponent at which exponential self-similarity
/// is possible.
pub fn sigma_critical(m: f64, p: f64) -> Result<f64> {
    check_exponents(m, p)?;
    Ok(2.0 * (1.0 - p) / (m - 1.0))
}

fn check_exponents(m: f64, p: f64) -> Result<()> {
    if !(m.is_finite() && m > 1.0) {
        return Err(Error::Domain(format!("m must satisfy m > 1, got {m}")));
    }
    if !(p.is_finite() && p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p must lie in (0, 1), got {p}")));
    }
    Ok(())
}

impl ModelParams {
    pub fn new(m: f64, p: f64, n: u32) -> Result<Self> {
        let sigma = sigma_critical(m, p)?;
        if n == 0 {
            return Err(Error::Domain("dimension N must be at least 1".into()));
        }
        Ok(Self { m, p, n, sigma })
    }

    /// Like [`ModelParams::new`] but also checks a user-supplied weight against
    /// the derived one.
    pub fn with_sigma(m: f64, p: f64, n: u32, sigma: f64) -> Result<Self> {
        let params = Self::new(m, p, n)?;
        let tol = 1e-12 * params.sigma.abs().max(1.0);
        if (sigma - params.sigma).abs() > tol {
            return Err(Error::Domain(format!(
                "sigma = {sigma} does not match the critical weight 2(1-p)/(m-1) = {}",
                params.sigma
            )));
        }
        Ok(params)
    }

    pub fn dim(&self) -> f64 {
        f64::from(self.n)
    }

    pub fn regime(&self) -> Regime {
        regime(self)
    }

    /// Exponent `(m-p)/(m-1)` of the reaction term in the phase plane, snapped
    /// to exactly 2 in the critical regime.
    pub fn reaction_power(&self) -> f64 {
        match self.regime() {
            Regime::Critical => 2.0,
            _ => (self.m - self.p) / (self.m - 1.0),
        }
    }

    /// `(m+p-2)/(m-1) = 2 - (m-p)/(m-1)`: power of `z = 1/X` multiplying `K`
    /// in the chart at infinity.
    pub fn chart_power(&self) -> f64 {
        2.0 - self.reaction_power()
    }

    /// `(m-1)^2/4`, the critical-regime threshold where Q1 and Q4 merge.
    pub fn k_star_critical(&self) -> f64 {
        (self.m - 1.0).powi(2) / 4.0
    }

    /// Type I interface exponent `1/(m-1)`.
    pub fn type_one_exponent(&self) -> f64 {
        1.0 / (self.m - 1.0)
    }

    /// Type II interface exponent `1/(1-p)`.
    pub fn type_two_exponent(&self) -> f64 {
        1.0 / (1.0 - self.p)
    }

    /// Sign-change exponent `1/m`.
    pub fn sign_change_exponent(&self) -> f64 {
        1.0 / self.m
    }
}

pub fn regime(params: &ModelParams) -> Regime {
    let s = params.m + params.p;
    if (s - 2.0).abs() <= TOL_REGIME * 2.0 {
        Regime::Critical
    } else if s > 2.0 {
        Regime::Supercritical
    } else {
        Regime::Subcritical
    }
}

/// The shooting parameter `K` together with the self-similar exponents it
/// encodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingParam {
    #[serde(rename = "K")]
    pub k: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// Inverts `K = (1/m)(2m/α)^{(m-p)/(m-1)}`.
pub fn alpha_beta_from_k(params: &ModelParams, k: f64) -> Result<ShootingParam> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Domain(format!("K must be positive, got {k}")));
    }
    let m = params.m;
    let alpha = 2.0 * m * (m * k).powf(-1.0 / params.reaction_power());
    Ok(ShootingParam {
        k,
        alpha,
        beta: (m - 1.0) * alpha / 2.0,
    })
}

pub fn k_from_alpha(params: &ModelParams, alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let m = params.m;
    Ok((2.0 * m / alpha).powf(params.reaction_power()) / m)
}

pub fn shooting_from_alpha(params: &ModelParams, alpha: f64) -> Result<ShootingParam> {
    let k = k_from_alpha(params, alpha)?;
    Ok(ShootingParam {
        k,
        alpha,
        beta: (params.m - 1.0) * alpha / 2.0,
    })
}

/// `4√m/(m-1)`, the threshold exponent when `m + p = 2`.
pub fn alpha_star_critical(m: f64) -> Result<f64> {
    if !(m.is_finite() && m > 1.0) {
        return Err(Error::Domain(format!("m must satisfy m > 1, got {m}")));
    }
    Ok(4.0 * m.sqrt() / (m - 1.0))
}
