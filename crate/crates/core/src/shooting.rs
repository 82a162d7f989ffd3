//! Shooting on `K`: the `P0`-orbit ends at Q1 for `K < K*` and at Q3 for
//! `K > K*`; the single transition is the Type I connection to Q4.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{integrate, launch_from_p0, EndTag, IntegratorOptions, OrbitEnd};
use crate::params::{alpha_beta_from_k, ModelParams, Regime};

pub const K_SEARCH_MIN: f64 = 1e-6;
pub const K_SEARCH_MAX: f64 = 1e6;
const MAX_UNRESOLVED_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub params: ModelParams,
    pub regime: Regime,
    #[serde(rename = "K_grid")]
    pub k_grid: Vec<(f64, EndTag)>,
    #[serde(rename = "K_star")]
    pub k_star: Option<f64>,
    #[serde(rename = "K_star_bracket")]
    pub k_star_bracket: Option<(f64, f64)>,
    pub alpha_star: Option<f64>,
    /// `(m-1)²/4` when `m + p = 2`.
    #[serde(rename = "K_star_analytic")]
    pub k_star_analytic: Option<f64>,
    /// Relative gap between the numerical and the analytic threshold.
    pub discrepancy: Option<f64>,
}

impl ClassificationReport {
    pub fn new(params: &ModelParams) -> Self {
        Self {
            params: *params,
            regime: params.regime(),
            k_grid: Vec::new(),
            k_star: None,
            k_star_bracket: None,
            alpha_star: None,
            k_star_analytic: None,
            discrepancy: None,
        }
    }

    pub fn unresolved(&self) -> usize {
        self.k_grid.iter().filter(|(_, t)| *t == EndTag::Unresolved).count()
    }

    /// True when every resolved entry ends at Q3.
    pub fn all_resolved_q3(&self) -> bool {
        self.k_grid.iter().all(|(_, t)| matches!(t, EndTag::ToQ3 | EndTag::Unresolved))
    }

    /// True when the resolved tags along increasing `K` switch from Q1 to Q3
    /// at most once.
    pub fn is_monotone(&self) -> bool {
        let mut grid = self.k_grid.clone();
        grid.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut seen_q3 = false;
        for (_, tag) in grid {
            match tag {
                EndTag::ToQ3 => seen_q3 = true,
                EndTag::ToQ1 if seen_q3 => return false,
                _ => {}
            }
        }
        true
    }
}

/// Classifies the `P0`-orbit, retrying inconclusive runs with tighter
/// tolerances and a larger escape radius.
pub fn classify(params: &ModelParams, k: f64, opts: &IntegratorOptions) -> Result<EndTag> {
    classify_orbit(params, k, opts).map(|end| end.tag)
}

/// As [`classify`], keeping the final slope and diagnostics of the deciding run.
pub fn classify_orbit(params: &ModelParams, k: f64, opts: &IntegratorOptions) -> Result<OrbitEnd> {
    let mut o = *opts;
    let mut end = None;
    for _ in 0..3 {
        let orbit = integrate(launch_from_p0(params, k, &o), params, k, &o)?;
        if matches!(orbit.termination.tag, EndTag::ToQ1 | EndTag::ToQ3) {
            return Ok(orbit.termination);
        }
        end = Some(orbit.termination);
        o.rel_tol = (o.rel_tol * 0.1).max(1e-13);
        o.abs_tol = (o.abs_tol * 0.1).max(1e-15);
        o.x_big *= 10.0;
    }
    Ok(end.expect("at least one attempt"))
}

/// Classifies every `K` of the grid in parallel, in grid order.
pub fn classify_grid(params: &ModelParams, ks: &[f64], opts: &IntegratorOptions) -> Result<Vec<(f64, EndTag)>> {
    ks.par_iter()
        .map(|&k| classify(params, k, opts).map(|t| (k, t)))
        .collect()
}

/// Locates the Q1/Q3 transition by an expanding search from `K = 1`
/// followed by bisection.
pub fn find_k_star(params: &ModelParams, tol_k: f64, opts: &IntegratorOptions) -> Result<ClassificationReport> {
    check_regime(params)?;
    let mut probes = Vec::new();
    let mut probe = |k: f64| -> Result<EndTag> {
        let tag = classify(params, k, opts)?;
        probes.push((k, tag));
        Ok(tag)
    };
    let mut k = 1.0;
    let first = probe(k)?;
    let (lo, hi) = match first {
        EndTag::ToQ1 => loop {
            let next = k * 4.0;
            if next > K_SEARCH_MAX {
                return Err(bracket_error());
            }
            if probe(next)? == EndTag::ToQ3 {
                break (k, next);
            }
            k = next;
        },
        EndTag::ToQ3 => loop {
            let next = k / 4.0;
            if next < K_SEARCH_MIN {
                return Err(bracket_error());
            }
            if probe(next)? == EndTag::ToQ1 {
                break (next, k);
            }
            k = next;
        },
        _ => return Err(Error::Unresolved(format!("probe at K = {k} was inconclusive"))),
    };
    let mut report = bisect(params, lo, hi, tol_k, opts)?;
    probes.append(&mut report.k_grid);
    probes.sort_by(|a, b| a.0.total_cmp(&b.0));
    report.k_grid = probes;
    check_unresolved(&report)?;
    Ok(report)
}

/// Bisection from a caller-supplied bracket, which must classify as Q1 at
/// `lo` and Q3 at `hi`.
pub fn find_k_star_in(
    params: &ModelParams,
    lo: f64,
    hi: f64,
    tol_k: f64,
    opts: &IntegratorOptions,
) -> Result<ClassificationReport> {
    check_regime(params)?;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Domain(format!("need 0 < K_lo < K_hi, got [{lo}, {hi}]")));
    }
    let tags = classify_grid(params, &[lo, hi], opts)?;
    if tags[0].1 != EndTag::ToQ1 || tags[1].1 != EndTag::ToQ3 {
        return Err(Error::Bracket(format!(
            "[{lo}, {hi}] is not a bracket: tags {:?} and {:?}",
            tags[0].1, tags[1].1
        )));
    }
    let mut report = bisect(params, lo, hi, tol_k, opts)?;
    report.k_grid.extend(tags);
    report.k_grid.sort_by(|a, b| a.0.total_cmp(&b.0));
    check_unresolved(&report)?;
    Ok(report)
}

fn bisect(params: &ModelParams, mut lo: f64, mut hi: f64, tol_k: f64, opts: &IntegratorOptions) -> Result<ClassificationReport> {
    if !(tol_k > 0.0 && tol_k.is_finite()) {
        return Err(Error::Domain(format!("tol_K must be positive, got {tol_k}")));
    }
    let mut report = ClassificationReport::new(params);
    while hi - lo >= tol_k * lo {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let mut tag = classify(params, mid, opts)?;
        report.k_grid.push((mid, tag));
        if tag == EndTag::ToQ4 {
            // the orbit sat on the saddle for the whole budget
            lo = mid;
            hi = mid;
            break;
        }
        if tag == EndTag::Unresolved {
            // nudge off the inconclusive point
            let nudged = lo + 0.25 * (hi - lo);
            tag = classify(params, nudged, opts)?;
            report.k_grid.push((nudged, tag));
            match tag {
                EndTag::ToQ1 => lo = nudged,
                EndTag::ToQ3 => hi = nudged,
                _ => {
                    return Err(Error::Unresolved(format!(
                        "inconclusive probes at K = {mid} and K = {nudged}"
                    )))
                }
            }
            continue;
        }
        match tag {
            EndTag::ToQ1 => lo = mid,
            _ => hi = mid,
        }
    }
    let k_star = 0.5 * (lo + hi);
    report.k_star = Some(k_star);
    report.k_star_bracket = Some((lo, hi));
    report.alpha_star = Some(alpha_beta_from_k(params, k_star)?.alpha);
    if params.regime() == Regime::Critical {
        let exact = params.k_star_critical();
        report.k_star_analytic = Some(exact);
        report.discrepancy = Some((k_star - exact).abs() / exact);
    }
    Ok(report)
}

fn check_regime(params: &ModelParams) -> Result<()> {
    if params.regime() == Regime::Subcritical {
        return Err(Error::Domain(
            "no threshold exists for m + p < 2; use the nonexistence sweep".into(),
        ));
    }
    Ok(())
}

fn bracket_error() -> Error {
    Error::Bracket(format!(
        "no Q1/Q3 transition found for K in [{K_SEARCH_MIN:e}, {K_SEARCH_MAX:e}]"
    ))
}

fn check_unresolved(report: &ClassificationReport) -> Result<()> {
    let total = report.k_grid.len();
    let bad = report.unresolved();
    if total > 0 && bad as f64 > MAX_UNRESOLVED_FRACTION * total as f64 {
        return Err(Error::Unresolved(format!("{bad} of {total} probes were inconclusive")));
    }
    Ok(())
}

/// Classifies a `K`-grid for `m + p < 2`, where every orbit should end at Q3.
pub fn nonexistence_sweep(params: &ModelParams, ks: &[f64], opts: &IntegratorOptions) -> Result<ClassificationReport> {
    if params.regime() != Regime::Subcritical {
        return Err(Error::Domain("the nonexistence sweep needs m + p < 2".into()));
    }
    let mut report = ClassificationReport::new(params);
    report.k_grid = classify_grid(params, ks, opts)?;
    Ok(report)
}
