//! Parameter grids for the `scan` subcommand.

use std::fmt;
use std::str::FromStr;

use glocal::entanglement::{entangling_power_closed_form, entangling_power_monte_carlo, ClosedFormMode};
use glocal::{EntanglingPowerResult, ModelParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::Mode;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanParam {
    Gamma,
    NG,
    NL,
}

impl ScanParam {
    fn name(self) -> &'static str {
        match self {
            ScanParam::Gamma => "gamma",
            ScanParam::NG => "n_g",
            ScanParam::NL => "n_l",
        }
    }
}

/// One grid axis: `points` values from `min` to `max` inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub param: ScanParam,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log: bool,
}

impl Axis {
    pub fn new(param: ScanParam, min: f64, max: f64, points: usize, log: bool) -> CliResult<Self> {
        if points < 2 {
            return Err(CliError::Usage(format!("axis {} needs at least 2 points, got {points}", param.name())));
        }
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(CliError::Usage(format!("axis {} needs finite min < max, got {min} and {max}", param.name())));
        }
        if log && min <= 0.0 {
            return Err(CliError::Usage(format!("log axis {} needs min > 0, got {min}", param.name())));
        }
        Ok(Axis { param, min, max, points, log })
    }

    /// Grid values. The end points are exactly `min` and `max`.
    pub fn values(&self) -> Vec<f64> {
        let last = self.points - 1;
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == last {
                    return self.max;
                }
                let s = i as f64 / last as f64;
                if self.log {
                    (self.min.ln() + s * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + s * (self.max - self.min)
                }
            })
            .collect()
    }
}

impl FromStr for Axis {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let bad = || CliError::Usage(format!("axis '{s}' is not name:min:max:points[:log]"));
        let parts: Vec<&str> = s.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(bad());
        }
        let param = match parts[0] {
            "gamma" => ScanParam::Gamma,
            "n_g" | "n-g" => ScanParam::NG,
            "n_l" | "n-l" => ScanParam::NL,
            other => return Err(CliError::Usage(format!("unknown scan parameter '{other}'"))),
        };
        let min = parts[1].parse().map_err(|_| bad())?;
        let max = parts[2].parse().map_err(|_| bad())?;
        let points = parts[3].parse().map_err(|_| bad())?;
        let log = match parts.get(4) {
            None | Some(&"lin") => false,
            Some(&"log") => true,
            Some(_) => return Err(bad()),
        };
        Axis::new(param, min, max, points, log)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let spacing = if self.log { "log" } else { "lin" };
        write!(f, "{}:{}:{}:{}:{}", self.param.name(), self.min, self.max, self.points, spacing)
    }
}

impl Serialize for Axis {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A validated scan: axes plus the fixed values of the remaining parameters.
#[derive(Debug, Clone)]
pub struct ScanSpec {
    pub axes: Vec<Axis>,
    pub fixed: [f64; 3],
    pub mode: Mode,
    pub mode_explicit: bool,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub params: [f64; 3],
    pub result: EntanglingPowerResult,
}

impl ScanSpec {
    pub fn validate(&self) -> CliResult<()> {
        match self.axes.as_slice() {
            [_] => {}
            [a, b] if a.param != b.param => {}
            [_, _] => return Err(CliError::Usage("the two scan axes must vary different parameters".into())),
            _ => return Err(CliError::Usage(format!("a scan takes one or two axes, got {}", self.axes.len()))),
        }
        if !self.mode_explicit && self.points().iter().any(|p| p[0] >= 1.0) {
            return Err(CliError::Usage(
                "scan reaches gamma = 1, where exact and limit modes differ; pass --mode explicitly".into(),
            ));
        }
        Ok(())
    }

    /// Parameter triples in grid order, the first axis varying slowest.
    pub fn points(&self) -> Vec<[f64; 3]> {
        let slot = |p: ScanParam| p as usize;
        let mut points = vec![self.fixed];
        for axis in &self.axes {
            let values = axis.values();
            points = points
                .into_iter()
                .flat_map(|base| {
                    values.iter().map(move |&v| {
                        let mut q = base;
                        q[slot(axis.param)] = v;
                        q
                    })
                })
                .collect();
        }
        points
    }

    fn evaluate(&self, q: [f64; 3]) -> CliResult<EntanglingPowerResult> {
        let p = ModelParams::new(q[0], q[1], q[2])?;
        Ok(match self.mode {
            Mode::Exact => entangling_power_closed_form(&p, ClosedFormMode::Exact)?,
            Mode::Limit => entangling_power_closed_form(&p, ClosedFormMode::Limit)?,
            Mode::Mc => entangling_power_monte_carlo(&p, self.samples, self.seed)?,
        })
    }

    /// Evaluates every grid point in parallel; rows come back in grid order.
    pub fn run(&self) -> CliResult<Vec<ScanRow>> {
        self.validate()?;
        self.points()
            .into_par_iter()
            .map(|q| self.evaluate(q).map(|result| ScanRow { params: q, result }))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(axes: &[&str], mode_explicit: bool) -> ScanSpec {
        ScanSpec {
            axes: axes.iter().map(|a| a.parse().unwrap()).collect(),
            fixed: [0.5, 0.0, 0.0],
            mode: Mode::Exact,
            mode_explicit,
            samples: 1000,
            seed: 1,
        }
    }

    #[test]
    fn axis_parsing_and_spacing() {
        let a: Axis = "n_l:0:3:4".parse().unwrap();
        assert_eq!(a.values(), vec![0.0, 1.0, 2.0, 3.0]);
        let a: Axis = "n_g:0.01:1:3:log".parse().unwrap();
        let v = a.values();
        assert_eq!(v[0], 0.01);
        assert!((v[1] - 0.1).abs() < 1e-15);
        assert_eq!(v[2], 1.0);
        assert_eq!(a.to_string(), "n_g:0.01:1:3:log");
    }

    #[test]
    fn invalid_axes_are_rejected() {
        for bad in ["n_l:0:3:1", "n_l:3:0:5", "n_l:0:3:5:log", "temp:0:1:5", "n_l:0:3", "n_l:a:3:5", "n_l:0:3:5:cubic"] {
            assert!(bad.parse::<Axis>().is_err(), "{bad}");
        }
    }

    #[test]
    fn grid_order_is_first_axis_major() {
        let s = spec(&["gamma:0:0.5:2", "n_l:0:2:3"], false);
        let pts = s.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[1], [0.0, 0.0, 1.0]);
        assert_eq!(pts[3], [0.5, 0.0, 0.0]);
    }

    #[test]
    fn unit_gamma_needs_explicit_mode() {
        assert!(spec(&["gamma:0:1:5"], false).validate().is_err());
        assert!(spec(&["gamma:0:1:5"], true).validate().is_ok());
        assert!(spec(&["gamma:0:0.999:5"], false).validate().is_ok());
        assert!(spec(&["n_l:0:1:5", "n_l:0:2:5"], false).validate().is_err());
    }
}
