//! Flat `key = value` run configuration.
//!
//! ```text
//! # comments and blank lines are ignored
//! gamma = 2
//! dim = 1
//! perturbation.type = bump
//! perturbation.epsilon = 0.01
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use vacuumfront::diagnostics::fit_window;
use vacuumfront::state::{RunOptions, SnapshotLadder};
use vacuumfront::{Dim, PerturbationSpec};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub gamma: f64,
    pub mass: f64,
    pub dim: Dim,
    pub grid_n: usize,
    pub cfl: f64,
    pub t_end: f64,
    pub perturbation: PerturbationSpec,
    pub output_dir: PathBuf,
    pub snapshot_ladder: SnapshotLadder,
    pub rate_window: (f64, f64),
    pub ode_tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gamma: 2.0,
            mass: 1.0,
            dim: Dim::One,
            grid_n: 200,
            cfl: 0.4,
            t_end: 1e3,
            perturbation: PerturbationSpec::Zero,
            output_dir: PathBuf::from("out"),
            snapshot_ladder: SnapshotLadder::default(),
            rate_window: fit_window(1e3),
            ode_tol: 1e-12,
        }
    }
}

const KEYS: [&str; 17] = [
    "gamma",
    "mass",
    "dim",
    "grid_n",
    "cfl",
    "t_end",
    "perturbation.type",
    "perturbation.epsilon",
    "perturbation.v0",
    "perturbation.center",
    "perturbation.width",
    "output_dir",
    "snapshot_ladder",
    "snapshot_ladder.per_octave",
    "snapshot_ladder.every",
    "rate_window",
    "ode_tol",
];

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn real(map: &BTreeMap<String, String>, key: &str, default: f64) -> Result<f64, CliError> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| bad(format!("{key}: expected a finite number, got '{v}'"))),
    }
}

impl RunConfig {
    /// Parses configuration text; unknown or repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(bad(format!("line {}: unknown key '{key}'", lineno + 1)));
            }
            if map.insert(key.to_string(), value.to_string()).is_some() {
                return Err(bad(format!("line {}: duplicate key '{key}'", lineno + 1)));
            }
        }
        Self::from_map(&map)
    }

    fn from_map(map: &BTreeMap<String, String>) -> Result<Self, CliError> {
        let d = Self::default();
        let gamma = real(map, "gamma", d.gamma)?;
        let mass = real(map, "mass", d.mass)?;
        let dim = match map.get("dim").map(String::as_str) {
            None => d.dim,
            Some(v) => v
                .parse::<u32>()
                .ok()
                .and_then(Dim::from_n)
                .ok_or_else(|| bad(format!("dim: expected 1 or 3, got '{v}'")))?,
        };
        let grid_n = match map.get("grid_n") {
            None => d.grid_n,
            Some(v) => v.parse::<usize>().map_err(|_| bad(format!("grid_n: expected a count, got '{v}'")))?,
        };
        let cfl = real(map, "cfl", d.cfl)?;
        let t_end = real(map, "t_end", d.t_end)?;
        let eps = real(map, "perturbation.epsilon", 0.0)?;
        let perturbation = match map.get("perturbation.type").map(String::as_str).unwrap_or("zero") {
            "zero" => PerturbationSpec::Zero,
            "translation" | "dilation" => PerturbationSpec::Translation { epsilon: eps },
            "kick" => PerturbationSpec::Kick {
                v0: real(map, "perturbation.v0", 0.0)?,
            },
            "bump" => PerturbationSpec::Bump {
                epsilon: eps,
                center: real(map, "perturbation.center", 0.0)?,
                width: real(map, "perturbation.width", 0.3)?,
            },
            other => return Err(bad(format!("perturbation.type: unknown '{other}'"))),
        };
        let snapshot_ladder = match map.get("snapshot_ladder").map(String::as_str).unwrap_or("geometric") {
            "geometric" => SnapshotLadder::Geometric {
                per_octave: real(map, "snapshot_ladder.per_octave", 4.0)? as u32,
            },
            "linear" => SnapshotLadder::Linear {
                every: real(map, "snapshot_ladder.every", t_end / 100.0)?,
            },
            other => return Err(bad(format!("snapshot_ladder: expected geometric or linear, got '{other}'"))),
        };
        let rate_window = match map.get("rate_window") {
            None => fit_window(t_end),
            Some(v) => {
                let parts: Vec<&str> = v.split(',').map(str::trim).collect();
                match parts.as_slice() {
                    [lo, hi] => match (lo.parse::<f64>(), hi.parse::<f64>()) {
                        (Ok(lo), Ok(hi)) if lo > 0.0 && hi > lo => (lo, hi),
                        _ => return Err(bad(format!("rate_window: expected 0 < lo < hi, got '{v}'"))),
                    },
                    _ => return Err(bad(format!("rate_window: expected 'lo, hi', got '{v}'"))),
                }
            }
        };
        let cfg = Self {
            gamma,
            mass,
            dim,
            grid_n,
            cfl,
            t_end,
            perturbation,
            output_dir: map.get("output_dir").map_or(d.output_dir, PathBuf::from),
            snapshot_ladder,
            rate_window,
            ode_tol: real(map, "ode_tol", d.ode_tol)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.gamma > 1.0) {
            return Err(bad(format!("gamma must exceed 1, got {}", self.gamma)));
        }
        if !(self.mass > 0.0) {
            return Err(bad(format!("mass must be positive, got {}", self.mass)));
        }
        if self.grid_n < 16 {
            return Err(bad(format!("grid_n must be at least 16, got {}", self.grid_n)));
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.9) {
            return Err(bad(format!("cfl must lie in (0, 0.9], got {}", self.cfl)));
        }
        if !(self.t_end > 0.0) {
            return Err(bad(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.ode_tol > 0.0 && self.ode_tol < 1e-2) {
            return Err(bad(format!("ode_tol must lie in (0, 1e-2), got {}", self.ode_tol)));
        }
        match self.snapshot_ladder {
            SnapshotLadder::Geometric { per_octave: 0 } => {
                return Err(bad("snapshot_ladder.per_octave must be at least 1"))
            }
            SnapshotLadder::Linear { every } if !(every > 0.0) => {
                return Err(bad("snapshot_ladder.every must be positive"))
            }
            _ => {}
        }
        if let PerturbationSpec::Bump { width, .. } = self.perturbation {
            if !(width > 0.0) {
                return Err(bad("perturbation.width must be positive"));
            }
        }
        Ok(())
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions {
            cfl: self.cfl,
            ladder: self.snapshot_ladder,
            dt_max: None,
        }
    }
}
