//! Run configuration: command-line flags over an optional `key = value` file over defaults.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use shrinker::shooting::SearchConfig;
use shrinker::{make_params, FoliationParams, Tolerances};

use crate::CliError;

/// Flags shared by every command. Each one can also come from the config file
/// under the same name without the leading dashes.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Flags {
    #[arg(long, global = true)]
    pub g: Option<u32>,
    #[arg(long, global = true)]
    pub m1: Option<u32>,
    #[arg(long, global = true)]
    pub m2: Option<u32>,
    /// Local error tolerance of the integrator.
    #[arg(long, global = true)]
    pub tol_step: Option<f64>,
    /// Time resolution of event location.
    #[arg(long, global = true)]
    pub tol_event: Option<f64>,
    /// Bracket width at which the critical-value search stops.
    #[arg(long, global = true)]
    pub tol_bisect: Option<f64>,
    /// Largest accepted |cos alpha| at a closing crossing.
    #[arg(long, global = true)]
    pub tol_orth: Option<f64>,
    /// Integration horizon of a single classification.
    #[arg(long, global = true)]
    pub t_max: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub xi0: Option<f64>,
    #[arg(long, global = true)]
    pub sweep_from: Option<f64>,
    #[arg(long, global = true)]
    pub sweep_to: Option<f64>,
    #[arg(long, global = true)]
    pub sweep_count: Option<usize>,
    /// Angular steps of the revolved mesh.
    #[arg(long, global = true)]
    pub segments: Option<usize>,
    /// Profile points kept for the mesh.
    #[arg(long, global = true)]
    pub profile_points: Option<usize>,
    /// Worker threads for sweeps (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

impl Flags {
    /// Fill every unset field from `base`.
    fn or(self, base: Flags) -> Flags {
        Flags {
            g: self.g.or(base.g),
            m1: self.m1.or(base.m1),
            m2: self.m2.or(base.m2),
            tol_step: self.tol_step.or(base.tol_step),
            tol_event: self.tol_event.or(base.tol_event),
            tol_bisect: self.tol_bisect.or(base.tol_bisect),
            tol_orth: self.tol_orth.or(base.tol_orth),
            t_max: self.t_max.or(base.t_max),
            out: self.out.or(base.out),
            xi0: self.xi0.or(base.xi0),
            sweep_from: self.sweep_from.or(base.sweep_from),
            sweep_to: self.sweep_to.or(base.sweep_to),
            sweep_count: self.sweep_count.or(base.sweep_count),
            segments: self.segments.or(base.segments),
            profile_points: self.profile_points.or(base.profile_points),
            jobs: self.jobs.or(base.jobs),
        }
    }
}

pub fn read_config_file(path: &Path) -> Result<Flags, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::params(format!("bad config file {}: {e}", path.display())))
}

/// Fully resolved settings of one run; written into every metadata file.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub mode: &'static str,
    pub g: u32,
    pub m1: u32,
    pub m2: u32,
    pub tolerances: Tolerances,
    pub t_max: f64,
    pub search: SearchConfig,
    pub out: PathBuf,
    pub xi0: Option<f64>,
    pub sweep_from: f64,
    pub sweep_to: f64,
    pub sweep_count: usize,
    pub segments: usize,
    pub profile_points: usize,
    pub jobs: usize,
    #[serde(skip)]
    pub params: FoliationParams,
}

pub const DEFAULT_SWEEP_SPAN: f64 = 3.0;
pub const DEFAULT_SWEEP_COUNT: usize = 31;

impl RunConfig {
    pub fn resolve(
        mode: &'static str,
        flags: Flags,
        file: Option<Flags>,
    ) -> Result<Self, CliError> {
        let f = match file {
            Some(file) => flags.or(file),
            None => flags,
        };
        let (g, m1, m2) = (f.g.unwrap_or(1), f.m1.unwrap_or(1), f.m2.unwrap_or(1));
        let params = make_params(g, m1, m2).map_err(|e| CliError::params(e.to_string()))?;

        let d = Tolerances::default();
        let tolerances = Tolerances {
            step: f.tol_step.unwrap_or(d.step),
            event: f.tol_event.unwrap_or(d.event),
            bisect: f.tol_bisect.unwrap_or(d.bisect),
            orth: f.tol_orth.unwrap_or(d.orth),
            ..d
        };
        tolerances.validate().map_err(CliError::params)?;
        let floor = f64::EPSILON * params.xi_sphere.abs();
        if tolerances.bisect < floor {
            return Err(CliError::params(format!(
                "tol-bisect {} is below machine resolution {floor:e} at xi_sphere",
                tolerances.bisect
            )));
        }

        let search = SearchConfig {
            t_max: f.t_max.unwrap_or(SearchConfig::default().t_max),
            ..SearchConfig::default()
        };
        if !(search.t_max > 0.0 && search.t_max.is_finite()) {
            return Err(CliError::params(format!(
                "t-max must be positive, got {}",
                search.t_max
            )));
        }
        if let Some(xi0) = f.xi0 {
            if !xi0.is_finite() {
                return Err(CliError::params(format!("xi0 must be finite, got {xi0}")));
            }
        }
        let sweep_from = f.sweep_from.unwrap_or(params.xi_sphere);
        let sweep_to = f.sweep_to.unwrap_or(params.xi_sphere + DEFAULT_SWEEP_SPAN);
        let jobs = f
            .jobs
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if jobs == 0 {
            return Err(CliError::params("jobs must be at least 1".into()));
        }
        Ok(Self {
            mode,
            g,
            m1,
            m2,
            tolerances,
            t_max: search.t_max,
            search,
            out: f.out.unwrap_or_else(|| PathBuf::from(".")),
            xi0: f.xi0,
            sweep_from,
            sweep_to,
            sweep_count: f.sweep_count.unwrap_or(DEFAULT_SWEEP_COUNT),
            segments: f.segments.unwrap_or(64),
            profile_points: f.profile_points.unwrap_or(400),
            jobs,
            params,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}
