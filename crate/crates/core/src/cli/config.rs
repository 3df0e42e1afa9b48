//! `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Recognised keys are `x0, lambda, c, T, b_lb, g_kind, g0, g1, dt,
//! precision`; anything else is rejected. Keys left out keep the values of
//! the reference scenario in [`RunConfig::default`].

use std::collections::HashSet;
use std::path::PathBuf;

use super::CliError;
use crate::welfare::{check_feasibility, GFunction, WelfarePolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GKind {
    Constant,
    Affine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub x0: f64,
    pub lambda: f64,
    pub c: f64,
    pub horizon: f64,
    pub b_lb: f64,
    pub g_kind: GKind,
    pub g0: f64,
    pub g1: f64,
    /// Sampling step of `curves`.
    pub dt: f64,
    /// Decimal places of every printed number.
    pub precision: usize,
    pub out_path: Option<PathBuf>,
}

impl Default for RunConfig {
    /// `x0 = 0.01, T = 15, b_lb = 3.06, c = 0.15, g(b) = 1 + b/T, lambda = 0.5`.
    fn default() -> Self {
        RunConfig {
            x0: 0.01,
            lambda: 0.5,
            c: 0.15,
            horizon: 15.0,
            b_lb: 3.06,
            g_kind: GKind::Affine,
            g0: 1.0,
            g1: 1.0,
            dt: 0.01,
            precision: 6,
            out_path: None,
        }
    }
}

/// Largest accepted `precision`; f64 carries 17 significant digits.
pub const MAX_PRECISION: usize = 17;

fn parse_number(line: usize, key: &str, value: &str) -> Result<f64, CliError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Input(format!("config line {line}: {key} = '{value}' is not a finite number")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        let mut seen = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| CliError::Input(format!("config line {line}: expected 'key = value'")))?;
            if !seen.insert(key.to_string()) {
                return Err(CliError::Input(format!("config line {line}: duplicate key '{key}'")));
            }
            match key {
                "x0" => cfg.x0 = parse_number(line, key, value)?,
                "lambda" => cfg.lambda = parse_number(line, key, value)?,
                "c" => cfg.c = parse_number(line, key, value)?,
                "T" => cfg.horizon = parse_number(line, key, value)?,
                "b_lb" => cfg.b_lb = parse_number(line, key, value)?,
                "g0" => cfg.g0 = parse_number(line, key, value)?,
                "g1" => cfg.g1 = parse_number(line, key, value)?,
                "dt" => cfg.dt = parse_number(line, key, value)?,
                "g_kind" => {
                    cfg.g_kind = match value {
                        "constant" => GKind::Constant,
                        "affine" => GKind::Affine,
                        other => {
                            return Err(CliError::Input(format!(
                                "config line {line}: g_kind = '{other}' (expected constant or affine)"
                            )))
                        }
                    }
                }
                "precision" => {
                    cfg.precision = value.parse().map_err(|_| {
                        CliError::Input(format!("config line {line}: precision = '{value}' is not a count"))
                    })?
                }
                other => return Err(CliError::Input(format!("config line {line}: unknown key '{other}'"))),
            }
        }
        Ok(cfg)
    }

    pub fn g(&self) -> Result<GFunction, CliError> {
        match self.g_kind {
            GKind::Constant => GFunction::constant(self.g0),
            GKind::Affine => GFunction::affine(self.g0, self.g1, self.horizon),
        }
        .map_err(CliError::from)
    }

    /// Builds the policy and checks output controls and feasibility.
    pub fn validate(&self) -> Result<WelfarePolicy, CliError> {
        let policy = WelfarePolicy::new(self.x0, self.lambda, self.c, self.horizon, self.b_lb, self.g()?)?;
        if !(self.dt > 0.0 && self.dt <= self.horizon) {
            return Err(CliError::Input(format!("dt outside (0, T] (got {})", self.dt)));
        }
        if self.precision > MAX_PRECISION {
            return Err(CliError::Input(format!(
                "precision outside [0, {MAX_PRECISION}] (got {})",
                self.precision
            )));
        }
        let feas = check_feasibility(&policy);
        if !feas.feasible {
            return Err(CliError::Infeasible(format!(
                "infeasible policy: g(b) * a(b) / 4 = {} > 1 at b = {}",
                feas.worst_load, feas.worst_b
            )));
        }
        Ok(policy)
    }
}
