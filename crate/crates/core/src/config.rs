//! Run configuration: JSON file, `key=value` overrides and sweep grids.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest number of points a single grid may expand to.
pub const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub eta_a: f64,
    pub eta_b: f64,
    pub delta_a: f64,
    pub delta_b: f64,
    /// Mean photon number of each probe, |α|² = |β|² = n_p.
    pub n_p: f64,
    pub theta_alpha: f64,
    pub theta_beta: f64,
    pub bs_t_mag: f64,
    pub phi: f64,
    pub phi_prime: f64,
    pub tau_start: f64,
    pub tau_stop: f64,
    pub tau_step: f64,
    pub n_max: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            eta_a: 7.7,
            eta_b: 7.7,
            delta_a: 1.0,
            delta_b: 1.0,
            n_p: 10.0,
            theta_alpha: 0.0,
            theta_beta: 0.0,
            bs_t_mag: std::f64::consts::FRAC_1_SQRT_2,
            phi: 0.0,
            phi_prime: 0.0,
            tau_start: 0.0,
            tau_stop: 10.0,
            tau_step: 0.05,
            n_max: 2,
        }
    }
}

fn invalid(field: &str, reason: impl Into<String>) -> Error {
    Error::ConfigValidation {
        field: field.to_string(),
        reason: reason.into(),
    }
}

impl RunConfig {
    /// Checks every field invariant, naming the first offending field.
    pub fn validate(&self) -> Result<()> {
        let reals = [
            ("eta_a", self.eta_a),
            ("eta_b", self.eta_b),
            ("delta_a", self.delta_a),
            ("delta_b", self.delta_b),
            ("n_p", self.n_p),
            ("theta_alpha", self.theta_alpha),
            ("theta_beta", self.theta_beta),
            ("bs_t_mag", self.bs_t_mag),
            ("phi", self.phi),
            ("phi_prime", self.phi_prime),
            ("tau_start", self.tau_start),
            ("tau_stop", self.tau_stop),
            ("tau_step", self.tau_step),
        ];
        for (name, v) in reals {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        for (name, v) in [("eta_a", self.eta_a), ("eta_b", self.eta_b)] {
            if v.abs() >= 1e3 {
                return Err(invalid(name, "must satisfy |eta| < 1e3"));
            }
        }
        if !(0.0..=1e6).contains(&self.n_p) {
            return Err(invalid("n_p", "must lie in [0, 1e6]"));
        }
        if !(0.0..=1.0).contains(&self.bs_t_mag) {
            return Err(invalid("bs_t_mag", "must lie in [0, 1]"));
        }
        if self.tau_step <= 0.0 {
            return Err(invalid("tau_step", "must be positive"));
        }
        if self.tau_start < 0.0 {
            return Err(invalid("tau_start", "must be non-negative"));
        }
        if self.tau_stop < self.tau_start {
            return Err(invalid("tau_stop", "must be at least tau_start"));
        }
        if grid_len(self.tau_start, self.tau_stop, self.tau_step) > MAX_GRID_POINTS {
            return Err(invalid("tau_step", format!("grid exceeds {MAX_GRID_POINTS} points")));
        }
        if !(2..=64).contains(&self.n_max) {
            return Err(invalid("n_max", "must lie in [2, 64]"));
        }
        Ok(())
    }

    /// Applies a single `key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| invalid(assignment.trim(), "override must have the form key=value"))?;
        let key = key.trim();
        let value = value.trim();
        if key == "n_max" {
            self.n_max = value
                .parse()
                .map_err(|_| invalid(key, format!("expected a non-negative integer, got `{value}`")))?;
            return Ok(());
        }
        let slot = match key {
            "eta_a" => &mut self.eta_a,
            "eta_b" => &mut self.eta_b,
            "delta_a" => &mut self.delta_a,
            "delta_b" => &mut self.delta_b,
            "n_p" => &mut self.n_p,
            "theta_alpha" => &mut self.theta_alpha,
            "theta_beta" => &mut self.theta_beta,
            "bs_t_mag" => &mut self.bs_t_mag,
            "phi" => &mut self.phi,
            "phi_prime" => &mut self.phi_prime,
            "tau_start" => &mut self.tau_start,
            "tau_stop" => &mut self.tau_stop,
            "tau_step" => &mut self.tau_step,
            _ => return Err(invalid(key, "unknown field")),
        };
        *slot = parse_real(key, value)?;
        Ok(())
    }

    /// τ values start, start + step, … up to stop.
    pub fn tau_grid(&self) -> Vec<f64> {
        let n = grid_len(self.tau_start, self.tau_stop, self.tau_step);
        (0..n).map(|i| self.tau_start + i as f64 * self.tau_step).collect()
    }

    /// θ_αβ = θ_α − θ_β
    pub fn theta_ab(&self) -> f64 {
        self.theta_alpha - self.theta_beta
    }
}

fn parse_real(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| invalid(key, format!("expected a number, got `{value}`")))?;
    if !v.is_finite() {
        return Err(invalid(key, "must be finite"));
    }
    Ok(v)
}

fn grid_len(start: f64, stop: f64, step: f64) -> usize {
    let span = (stop - start) / step;
    if span.is_nan() || span < 0.0 {
        return 0;
    }
    if span > MAX_GRID_POINTS as f64 {
        return MAX_GRID_POINTS + 1;
    }
    (span + 1e-9).floor() as usize + 1
}

/// Parses a JSON config. Absent fields take their defaults.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let config = from_json(text)?;
    config.validate()?;
    Ok(config)
}

fn from_json(text: &str) -> Result<RunConfig> {
    serde_json::from_str(text).map_err(|e| Error::ConfigParse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Reads and parses `path`, then applies `overrides` in order and validates.
pub fn parse_config(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig> {
    let mut config = match path {
        Some(p) => from_json(&std::fs::read_to_string(p)?)?,
        None => RunConfig::default(),
    };
    for o in overrides {
        config.set(o)?;
    }
    config.validate()?;
    Ok(config)
}

/// A list of values, given as `start:stop:step`, `a,b,c` or a single number.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(invalid("grid", "empty grid"));
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(invalid("grid", format!("range `{spec}` must be start:stop:step")));
        };
        let start = parse_real("grid", start.trim())?;
        let stop = parse_real("grid", stop.trim())?;
        let step = parse_real("grid", step.trim())?;
        if step <= 0.0 {
            return Err(invalid("grid", "step must be positive"));
        }
        if stop < start {
            return Err(invalid("grid", "stop must be at least start"));
        }
        let n = grid_len(start, stop, step);
        if n > MAX_GRID_POINTS {
            return Err(invalid("grid", format!("range expands to more than {MAX_GRID_POINTS} points")));
        }
        return Ok((0..n).map(|i| start + i as f64 * step).collect());
    }
    let values: Vec<f64> = spec
        .split(',')
        .map(|v| parse_real("grid", v.trim()))
        .collect::<Result<_>>()?;
    if values.len() > MAX_GRID_POINTS {
        return Err(invalid("grid", format!("more than {MAX_GRID_POINTS} values")));
    }
    Ok(values)
}

/// Sweep axes accepted by `--grid key=spec`.
pub const GRID_KEYS: [&str; 10] = [
    "tau",
    "eta",
    "eta_a",
    "eta_b",
    "delta_a",
    "delta_b",
    "n_p",
    "theta_alpha",
    "theta_beta",
    "theta_ab",
];

#[derive(Debug, Clone, PartialEq)]
pub struct GridArg {
    /// `None` when the argument had no `key=` prefix.
    pub key: Option<String>,
    pub values: Vec<f64>,
}

pub fn parse_grid_arg(arg: &str) -> Result<GridArg> {
    match arg.split_once('=') {
        Some((key, spec)) => {
            let key = key.trim();
            if !GRID_KEYS.contains(&key) {
                return Err(invalid(key, format!("not a sweepable axis (expected one of {})", GRID_KEYS.join(", "))));
            }
            Ok(GridArg {
                key: Some(key.to_string()),
                values: parse_grid(spec)?,
            })
        }
        None => Ok(GridArg {
            key: None,
            values: parse_grid(arg)?,
        }),
    }
}
