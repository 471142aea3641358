//! Merges command-line flags, the optional JSON config file and built-in defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::args::{Command, CommonArgs, Mode};
use crate::error::{CliError, CliResult};
use crate::scan::Axis;

pub const DEFAULT_GAMMA: f64 = 0.5;
pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 2024;
pub const DEFAULT_SEARCH_MAX: f64 = glocal::entanglement::DEFAULT_SEARCH_MAX;
pub const DEFAULT_AXES: [&str; 2] = ["gamma:0:0.999:101", "n_l:0:3:101"];

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub gamma: Option<f64>,
    pub n_g: Option<f64>,
    pub n_l: Option<f64>,
    pub t: Option<f64>,
    pub mode: Option<Mode>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub rho0: Option<PathBuf>,
    pub axes: Option<Vec<String>>,
    pub gammas: Option<Vec<f64>>,
    pub search_max: Option<f64>,
    pub analytic: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
        let mut config: FileConfig =
            serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.into(), source })?;
        // Paths inside the file are relative to the file itself.
        let base = path.parent().unwrap_or(Path::new(""));
        config.out = config.out.map(|p| base.join(p));
        config.rho0 = config.rho0.map(|p| base.join(p));
        Ok(config)
    }
}

/// Fully resolved parameter set, echoed into every output.
#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub command: &'static str,
    pub gamma: f64,
    pub n_g: f64,
    pub n_l: f64,
    /// `None` only for the stationary `kraus` map.
    pub t: Option<f64>,
    pub mode: Mode,
    #[serde(skip)]
    pub mode_explicit: bool,
    pub samples: usize,
    pub seed: u64,
    pub rho0: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub config: Option<PathBuf>,
    pub axes: Vec<Axis>,
    pub gammas: Vec<f64>,
    pub search_max: f64,
    pub analytic: bool,
}

fn default_gammas() -> Vec<f64> {
    (0..20).map(|k| k as f64 * 0.05).collect()
}

impl Settings {
    pub fn resolve(common: &CommonArgs, command: &Command) -> CliResult<Self> {
        let file = match &common.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let t_default = match command {
            Command::Evolve | Command::Choi => Some(1.0),
            _ => None,
        };
        let (cli_axes, cli_gammas, cli_search_max, cli_analytic) = match command {
            Command::Scan { axes } => (Some(axes.clone()).filter(|a| !a.is_empty()), None, None, false),
            Command::OptimalCurve { gammas, search_max } => {
                (None, Some(gammas.clone()).filter(|g| !g.is_empty()), *search_max, false)
            }
            Command::Kraus { analytic } => (None, None, None, *analytic),
            _ => (None, None, None, false),
        };
        let axis_specs = cli_axes
            .or(file.axes)
            .unwrap_or_else(|| DEFAULT_AXES.iter().map(|s| s.to_string()).collect());
        let axes = axis_specs.iter().map(|s| s.parse()).collect::<CliResult<Vec<Axis>>>()?;
        let mode = common.mode.or(file.mode);
        Ok(Settings {
            command: command.name(),
            gamma: common.gamma.or(file.gamma).unwrap_or(DEFAULT_GAMMA),
            n_g: common.n_g.or(file.n_g).unwrap_or(0.0),
            n_l: common.n_l.or(file.n_l).unwrap_or(0.0),
            t: common.t.or(file.t).or(t_default),
            mode: mode.unwrap_or(Mode::Exact),
            mode_explicit: mode.is_some(),
            samples: common.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES),
            seed: common.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            rho0: common.rho0.clone().or(file.rho0),
            out: common.out.clone().or(file.out),
            config: common.config.clone(),
            axes,
            gammas: cli_gammas.or(file.gammas).unwrap_or_else(default_gammas),
            search_max: cli_search_max.or(file.search_max).unwrap_or(DEFAULT_SEARCH_MAX),
            analytic: cli_analytic || file.analytic.unwrap_or(false),
        })
    }

    pub fn params(&self) -> CliResult<glocal::ModelParams> {
        Ok(glocal::ModelParams::new(self.gamma, self.n_g, self.n_l)?)
    }

    /// JSON echo of the settings that bear on this command.
    pub fn echo(&self) -> serde_json::Value {
        let mut value = serde_json::to_value(self).expect("settings serialise");
        let map = value.as_object_mut().expect("settings serialise to an object");
        if self.command != "scan" {
            map.remove("axes");
        }
        if self.command != "optimal-curve" {
            map.remove("gammas");
            map.remove("search_max");
        }
        if self.command != "kraus" {
            map.remove("analytic");
        }
        value
    }

    /// `key=value` lines for CSV headers.
    pub fn header_lines(&self) -> Vec<String> {
        let path = |p: &Option<PathBuf>| p.as_ref().map_or("none".to_string(), |p| p.display().to_string());
        let mut lines = vec![
            format!("command={}", self.command),
            format!("gamma={}", self.gamma),
            format!("n_g={}", self.n_g),
            format!("n_l={}", self.n_l),
            format!("mode={}", self.mode),
            format!("samples={}", self.samples),
            format!("seed={}", self.seed),
        ];
        match self.command {
            "scan" => lines.extend(self.axes.iter().map(|a| format!("axis={a}"))),
            "optimal-curve" => {
                let gammas: Vec<String> = self.gammas.iter().map(f64::to_string).collect();
                lines.push(format!("gammas={}", gammas.join(",")));
                lines.push(format!("search_max={}", self.search_max));
            }
            _ => {}
        }
        lines.push(format!("config={}", path(&self.config)));
        lines
    }
}
