//! Command-line front end. Every run prints one JSON document to standard
//! output; with `--out DIR` the JSON and any CSV data are also written there.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::error::Error;
use crate::integrator::{integrate, launch_from_p0, EndTag, IntegratorOptions, Orbit};
use crate::params::{alpha_beta_from_k, shooting_from_alpha, ModelParams, Regime, ShootingParam};
use crate::phaseplane::{finite_critical_points, infinity_critical_points, CriticalPoint, PhasePoint};
use crate::profile::{reconstruct, InterfaceFit, ProfileOptions};
use crate::shooting::{classify_grid, classify_orbit, find_k_star, ClassificationReport};
use crate::solution::{to_traveling_wave, EternalSolution, TwMetadata};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "eternal", version, about = "Eternal self-similar solutions by phase-plane shooting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the orbit leaving P0 for one K
    Classify {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        shoot: ShootArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Locate the threshold K* by bracketing and bisection
    FindKstar {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "tol-k", default_value_t = 1e-10)]
        tol_k: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Classify a log-spaced K grid
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "k-min", default_value_t = 1e-3)]
        k_min: f64,
        #[arg(long = "k-max", default_value_t = 1e3)]
        k_max: f64,
        #[arg(long, default_value_t = 13)]
        points: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Reconstruct the profile f(xi) and fit its interface
    Profile {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        target: TargetArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Phase portrait: orbits from P0 and from a grid of starting points
    Portrait {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        shoot: ShootArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Traveling wave obtained from the profile
    Tw {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        target: TargetArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub m: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub p: f64,
    #[arg(long = "N")]
    pub n: u32,
    /// Checked against 2(1-p)/(m-1)
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ShootArgs {
    #[arg(long = "K", allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct TargetArgs {
    #[arg(long = "K", allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Use the midpoint of the final K* bracket
    #[arg(long)]
    pub kstar: bool,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long = "rel-tol")]
    pub rel_tol: Option<f64>,
    #[arg(long = "abs-tol")]
    pub abs_tol: Option<f64>,
    #[arg(long = "x-big")]
    pub x_big: Option<f64>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

impl ModelArgs {
    fn params(&self) -> CliResult<ModelParams> {
        match self.sigma {
            Some(s) => ModelParams::with_sigma(self.m, self.p, self.n, s),
            None => ModelParams::new(self.m, self.p, self.n),
        }
        .map_err(usage)
    }
}

impl ShootArgs {
    fn resolve(&self, params: &ModelParams) -> CliResult<ShootingParam> {
        match (self.k, self.alpha) {
            (Some(k), _) => alpha_beta_from_k(params, k),
            (_, Some(a)) => shooting_from_alpha(params, a),
            _ => unreachable!("clap enforces one of --K/--alpha"),
        }
        .map_err(usage)
    }
}

impl CommonArgs {
    fn options(&self) -> CliResult<IntegratorOptions> {
        let mut o = IntegratorOptions::default();
        if let Some(v) = self.rel_tol {
            o.rel_tol = v;
        }
        if let Some(v) = self.abs_tol {
            o.abs_tol = v;
        }
        if let Some(v) = self.x_big {
            o.x_big = v;
        }
        o.validate().map_err(usage)?;
        Ok(o)
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct ClassifyOut {
    params: ModelParams,
    #[serde(rename = "K")]
    k: f64,
    alpha: f64,
    beta: f64,
    tag: EndTag,
    final_slope: f64,
    diagnostics: String,
}

#[derive(Serialize)]
struct SweepOut {
    #[serde(flatten)]
    report: ClassificationReport,
    monotone: bool,
    unresolved: usize,
    nonexistence_confirmed: Option<bool>,
    csv: Option<String>,
}

#[derive(Serialize)]
struct ProfileOut {
    params: ModelParams,
    #[serde(rename = "K")]
    k: f64,
    alpha: f64,
    beta: f64,
    k_star_bracket: Option<(f64, f64)>,
    samples: usize,
    xi0: Option<f64>,
    interface_fit: Option<InterfaceFit>,
    csv: Option<String>,
}

#[derive(Serialize)]
struct TwOut {
    params: ModelParams,
    #[serde(rename = "K")]
    k: f64,
    alpha: f64,
    beta: f64,
    k_star_bracket: Option<(f64, f64)>,
    #[serde(flatten)]
    wave: TwMetadata,
    csv: Option<String>,
}

#[derive(Serialize)]
struct PortraitOrbit {
    start: PhasePoint,
    from_p0: bool,
    tag: Option<EndTag>,
    final_slope: Option<f64>,
    error: Option<String>,
    csv: Option<String>,
}

#[derive(Serialize)]
struct PortraitOut {
    params: ModelParams,
    #[serde(rename = "K")]
    k: f64,
    alpha: f64,
    beta: f64,
    critical_points: Vec<CriticalPoint>,
    orbits: Vec<PortraitOrbit>,
}

/// Runs one command and returns the JSON document it printed.
pub fn run(cli: &Cli) -> CliResult<String> {
    let name = command_name(&cli.command);
    let (json, out) = match &cli.command {
        Command::Classify { model, shoot, common } => {
            let params = model.params()?;
            let sp = shoot.resolve(&params)?;
            let end = classify_orbit(&params, sp.k, &common.options()?)?;
            let body = ClassifyOut {
                params,
                k: sp.k,
                alpha: sp.alpha,
                beta: sp.beta,
                tag: end.tag,
                final_slope: end.final_slope,
                diagnostics: end.diagnostics,
            };
            (to_json(name, body)?, common.out.as_deref())
        }
        Command::FindKstar { model, tol_k, common } => {
            let params = model.params()?;
            require_interface_regime(&params)?;
            if !(*tol_k > 0.0) {
                return Err(CliError::Usage(format!("--tol-k must be positive, got {tol_k}")));
            }
            let report = find_k_star(&params, *tol_k, &common.options()?)?;
            (to_json(name, report)?, common.out.as_deref())
        }
        Command::Sweep { model, k_min, k_max, points, common } => {
            let params = model.params()?;
            let ks = log_grid(*k_min, *k_max, *points)?;
            let mut report = ClassificationReport::new(&params);
            report.k_grid = classify_grid(&params, &ks, &common.options()?)?;
            let csv = match &common.out {
                Some(dir) => Some(write_file(dir, "sweep.csv", |w| {
                    write_meta(w, &params)?;
                    writeln!(w, "K,tag")?;
                    for (k, tag) in &report.k_grid {
                        writeln!(w, "{k},{tag:?}")?;
                    }
                    Ok(())
                })?),
                None => None,
            };
            let body = SweepOut {
                monotone: report.is_monotone(),
                unresolved: report.unresolved(),
                nonexistence_confirmed: (params.regime() == Regime::Subcritical).then(|| report.all_resolved_q3()),
                report,
                csv,
            };
            (to_json(name, body)?, common.out.as_deref())
        }
        Command::Profile { model, target, common } => {
            let params = model.params()?;
            require_interface_regime(&params)?;
            let (sp, bracket) = target.resolve(&params, &common.options()?)?;
            let profile = reconstruct(&params, sp.k, &ProfileOptions::default())?;
            let csv = match &common.out {
                Some(dir) => Some(write_file(dir, "profile.csv", |w| profile.write_csv(w))?),
                None => None,
            };
            let body = ProfileOut {
                params,
                k: sp.k,
                alpha: sp.alpha,
                beta: sp.beta,
                k_star_bracket: bracket,
                samples: profile.xi.len(),
                xi0: profile.xi0,
                interface_fit: profile.interface_fit,
                csv,
            };
            (to_json(name, body)?, common.out.as_deref())
        }
        Command::Tw { model, target, common } => {
            let params = model.params()?;
            require_interface_regime(&params)?;
            let (sp, bracket) = target.resolve(&params, &common.options()?)?;
            let sol = EternalSolution::new(reconstruct(&params, sp.k, &ProfileOptions::default())?)?;
            let tw = to_traveling_wave(&sol);
            let csv = match &common.out {
                Some(dir) => Some(write_file(dir, "tw.csv", |w| tw.write_csv(w))?),
                None => None,
            };
            let body = TwOut {
                params,
                k: sp.k,
                alpha: sp.alpha,
                beta: sp.beta,
                k_star_bracket: bracket,
                wave: tw.metadata(),
                csv,
            };
            (to_json(name, body)?, common.out.as_deref())
        }
        Command::Portrait { model, shoot, common } => {
            let params = model.params()?;
            let sp = shoot.resolve(&params)?;
            let body = portrait(&params, sp, &common.options()?, common.out.as_deref())?;
            (to_json(name, body)?, common.out.as_deref())
        }
    };
    if let Some(dir) = out {
        write_file(dir, &format!("{name}.json"), |w| writeln!(w, "{json}"))?;
    }
    Ok(json)
}

impl TargetArgs {
    fn resolve(&self, params: &ModelParams, opts: &IntegratorOptions) -> CliResult<(ShootingParam, Option<(f64, f64)>)> {
        if self.kstar {
            let report = find_k_star(params, 1e-10, opts)?;
            let k = report.k_star.ok_or_else(|| Error::Bracket("no threshold found".into()))?;
            return Ok((alpha_beta_from_k(params, k)?, report.k_star_bracket));
        }
        let shoot = ShootArgs { k: self.k, alpha: self.alpha };
        Ok((shoot.resolve(params)?, None))
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Classify { .. } => "classify",
        Command::FindKstar { .. } => "find-kstar",
        Command::Sweep { .. } => "sweep",
        Command::Profile { .. } => "profile",
        Command::Portrait { .. } => "portrait",
        Command::Tw { .. } => "tw",
    }
}

fn require_interface_regime(params: &ModelParams) -> CliResult<()> {
    if params.regime() == Regime::Subcritical {
        return Err(CliError::Usage(format!(
            "m + p = {} < 2: no profiles with interface; use sweep",
            params.m + params.p
        )));
    }
    Ok(())
}

fn log_grid(lo: f64, hi: f64, points: usize) -> CliResult<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || points == 0 || (points == 1 && hi != lo) {
        return Err(CliError::Usage(format!("bad K grid [{lo}, {hi}] with {points} points")));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.log10(), hi.log10());
    Ok((0..points)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (points - 1) as f64))
        .collect())
}

fn portrait(params: &ModelParams, sp: ShootingParam, opts: &IntegratorOptions, out: Option<&Path>) -> CliResult<PortraitOut> {
    let mut critical_points = finite_critical_points(params);
    critical_points.extend(infinity_critical_points(params, sp.k));
    let mut starts = vec![(launch_from_p0(params, sp.k, opts), true)];
    for x in [0.25, 0.5, 1.0, 2.0, 4.0] {
        for y in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            starts.push((PhasePoint::new(x, y), false));
        }
    }
    let mut orbits = Vec::with_capacity(starts.len());
    for (i, (start, from_p0)) in starts.into_iter().enumerate() {
        let entry = match integrate(start, params, sp.k, opts) {
            Ok(orbit) => {
                let csv = match out {
                    Some(dir) => Some(write_file(dir, &format!("orbit_{i:03}.csv"), |w| {
                        write_meta(w, params)?;
                        writeln!(w, "# K={} start_X={} start_Y={}", sp.k, start.x, start.y)?;
                        orbit_csv(&orbit, w)
                    })?),
                    None => None,
                };
                PortraitOrbit {
                    start,
                    from_p0,
                    tag: Some(orbit.termination.tag),
                    final_slope: Some(orbit.termination.final_slope),
                    error: None,
                    csv,
                }
            }
            Err(e) => PortraitOrbit { start, from_p0, tag: None, final_slope: None, error: Some(e.to_string()), csv: None },
        };
        orbits.push(entry);
    }
    Ok(PortraitOut { params: *params, k: sp.k, alpha: sp.alpha, beta: sp.beta, critical_points, orbits })
}

fn orbit_csv(orbit: &Orbit, w: &mut dyn Write) -> io::Result<()> {
    orbit.write_csv(w)
}

fn write_meta(w: &mut dyn Write, params: &ModelParams) -> io::Result<()> {
    writeln!(w, "# m={} p={} N={} sigma={}", params.m, params.p, params.n, params.sigma)
}

fn to_json<T: Serialize>(command: &str, body: T) -> CliResult<String> {
    let env = Envelope { schema_version: SCHEMA_VERSION, command, body };
    serde_json::to_string_pretty(&env).map_err(|e| CliError::Io(io::Error::other(e)))
}

fn write_file<F>(dir: &Path, name: &str, fill: F) -> CliResult<String>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut w = BufWriter::new(fs::File::create(&path)?);
    fill(&mut w)?;
    w.flush()?;
    Ok(name.to_string())
}
