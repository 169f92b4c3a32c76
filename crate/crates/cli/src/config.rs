//! Flat `key = value` run configuration. Command-line flags are applied as
//! extra key/value pairs after the file, so both paths share one parser.

use std::path::PathBuf;

use serde::Serialize;
use smm_gate_core::dynamics::calibrate_pi_pulse;
use smm_gate_core::model::{omega1, omega2};
use smm_gate_core::perturbation::GAUSS;
use smm_gate_core::{Frame, ModelParams, PulseParams};

use crate::error::{CliError, Result};
use crate::output::Format;

pub const KEYS: [&str; 17] = [
    "d_kelvin",
    "g_factor",
    "bz_tesla",
    "jz_kelvin",
    "jxy_kelvin",
    "b_perp_gauss",
    "omega_mode",
    "duration_s",
    "frame",
    "sweep_start_tesla",
    "sweep_end_tesla",
    "sweep_points",
    "initial",
    "samples",
    "states",
    "output",
    "format",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BPerp {
    /// Amplitude chosen so the pulse is a π rotation on the conditional pair.
    Calibrated,
    Gauss(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OmegaMode {
    Omega1,
    Omega2,
    /// Carrier given directly in rad/s.
    Explicit(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sweep {
    pub start_tesla: f64,
    pub end_tesla: f64,
    pub points: usize,
}

impl Sweep {
    pub const DEFAULT: Sweep = Sweep {
        start_tesla: 0.0,
        end_tesla: 1.4,
        points: 141,
    };

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.end_tesla
                } else {
                    self.start_tesla
                        + (self.end_tesla - self.start_tesla) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelParams,
    pub b_perp: BPerp,
    pub omega_mode: OmegaMode,
    pub duration_s: f64,
    pub frame: Frame,
    pub sweep_start_tesla: Option<f64>,
    pub sweep_end_tesla: Option<f64>,
    pub sweep_points: Option<usize>,
    pub initial: Option<String>,
    pub samples: usize,
    pub states: Vec<String>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelParams::default(),
            b_perp: BPerp::Calibrated,
            omega_mode: OmegaMode::Omega1,
            duration_s: 1e-8,
            frame: Frame::Rotating,
            sweep_start_tesla: None,
            sweep_end_tesla: None,
            sweep_points: None,
            initial: None,
            samples: 101,
            states: Vec::new(),
            output: None,
            format: None,
        }
    }
}

fn number(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| CliError::config(format!("{key}: `{value}` is not a number")))
}

fn count(key: &str, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| CliError::config(format!("{key}: `{value}` is not a non-negative integer")))
}

impl RunConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Applies every `key = value` line. `#` starts a comment; blank lines are
    /// skipped; a key may appear once.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut seen = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::config(format!(
                    "line {}: expected `key = value`",
                    n + 1
                )));
            };
            let key = key.trim();
            if seen.contains(&key) {
                return Err(CliError::config(format!(
                    "line {}: duplicate key `{key}`",
                    n + 1
                )));
            }
            seen.push(key);
            self.apply(key, value.trim())
                .map_err(|e| CliError::config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "d_kelvin" => self.model.d_kelvin = number(key, value)?,
            "g_factor" => self.model.g_factor = number(key, value)?,
            "bz_tesla" => self.model.bz_tesla = number(key, value)?,
            "jz_kelvin" => self.model.jz_kelvin = number(key, value)?,
            "jxy_kelvin" => self.model.jxy_kelvin = number(key, value)?,
            "b_perp_gauss" => {
                self.b_perp = if value.eq_ignore_ascii_case("pi") {
                    BPerp::Calibrated
                } else {
                    BPerp::Gauss(number(key, value)?)
                }
            }
            "omega_mode" => {
                self.omega_mode = match value.to_ascii_lowercase().as_str() {
                    "omega1" => OmegaMode::Omega1,
                    "omega2" => OmegaMode::Omega2,
                    _ => OmegaMode::Explicit(number(key, value).map_err(|_| {
                        CliError::config(format!(
                            "omega_mode: expected omega1, omega2 or a frequency in rad/s, got `{value}`"
                        ))
                    })?),
                }
            }
            "duration_s" => self.duration_s = number(key, value)?,
            "frame" => {
                self.frame = value
                    .parse()
                    .map_err(|_| CliError::config(format!("frame: expected lab or rotating, got `{value}`")))?
            }
            "sweep_start_tesla" => self.sweep_start_tesla = Some(number(key, value)?),
            "sweep_end_tesla" => self.sweep_end_tesla = Some(number(key, value)?),
            "sweep_points" => self.sweep_points = Some(count(key, value)?),
            "initial" => self.initial = Some(value.to_string()),
            "samples" => self.samples = count(key, value)?,
            "states" => {
                self.states = value
                    .split(';')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect()
            }
            "output" => self.output = Some(PathBuf::from(value)),
            "format" => {
                self.format = Some(match value.to_ascii_lowercase().as_str() {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    _ => return Err(CliError::config(format!("format: expected csv or json, got `{value}`"))),
                })
            }
            _ => {
                return Err(CliError::config(format!(
                    "unknown key `{key}`; expected one of {}",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if let BPerp::Gauss(b) = self.b_perp {
            if !(b.is_finite() && b >= 0.0) {
                return Err(CliError::config(
                    "b_perp_gauss: must be finite and non-negative",
                ));
            }
        }
        if let OmegaMode::Explicit(w) = self.omega_mode {
            if !w.is_finite() {
                return Err(CliError::config("omega_mode: frequency must be finite"));
            }
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(CliError::config("duration_s: must be finite and positive"));
        }
        if self.samples < 2 {
            return Err(CliError::config("samples: at least 2 are needed"));
        }
        self.sweep().map(|_| ())
    }

    /// The configured sweep, or the default 0 to 1.4 T when no sweep key is set.
    pub fn sweep(&self) -> Result<Sweep> {
        let d = Sweep::DEFAULT;
        let sweep = Sweep {
            start_tesla: self.sweep_start_tesla.unwrap_or(d.start_tesla),
            end_tesla: self.sweep_end_tesla.unwrap_or(d.end_tesla),
            points: self.sweep_points.unwrap_or(d.points),
        };
        if sweep.points < 2 {
            return Err(CliError::config("sweep_points: at least 2 are needed"));
        }
        if !(sweep.start_tesla.is_finite() && sweep.end_tesla.is_finite()) {
            return Err(CliError::config("sweep bounds must be finite"));
        }
        Ok(sweep)
    }

    pub fn omega(&self) -> f64 {
        match self.omega_mode {
            OmegaMode::Omega1 => omega1(&self.model),
            OmegaMode::Omega2 => omega2(&self.model),
            OmegaMode::Explicit(w) => w,
        }
    }

    pub fn b_perp_tesla(&self) -> Result<f64> {
        match self.b_perp {
            BPerp::Calibrated => Ok(calibrate_pi_pulse(&self.model, self.duration_s)?),
            BPerp::Gauss(g) => Ok(g * GAUSS),
        }
    }

    pub fn pulse(&self) -> Result<PulseParams> {
        Ok(PulseParams::new(
            self.b_perp_tesla()?,
            self.omega(),
            self.duration_s,
        )?)
    }

    /// Fully resolved parameter set embedded in every output.
    pub fn echo(&self) -> Result<ConfigEcho> {
        let sweep = self.sweep()?;
        Ok(ConfigEcho {
            d_kelvin: self.model.d_kelvin,
            g_factor: self.model.g_factor,
            bz_tesla: self.model.bz_tesla,
            jz_kelvin: self.model.jz_kelvin,
            jxy_kelvin: self.model.jxy_kelvin,
            spin: self.model.spin.value(),
            b_perp_mode: match self.b_perp {
                BPerp::Calibrated => "pi",
                BPerp::Gauss(_) => "explicit",
            },
            b_perp_gauss: self.b_perp_tesla()? / GAUSS,
            omega_mode: match self.omega_mode {
                OmegaMode::Omega1 => "omega1",
                OmegaMode::Omega2 => "omega2",
                OmegaMode::Explicit(_) => "explicit",
            },
            omega_radps: self.omega(),
            duration_s: self.duration_s,
            frame: self.frame,
            sweep_start_tesla: sweep.start_tesla,
            sweep_end_tesla: sweep.end_tesla,
            sweep_points: sweep.points,
            initial: self.initial.clone(),
            samples: self.samples,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub d_kelvin: f64,
    pub g_factor: f64,
    pub bz_tesla: f64,
    pub jz_kelvin: f64,
    pub jxy_kelvin: f64,
    pub spin: f64,
    pub b_perp_mode: &'static str,
    pub b_perp_gauss: f64,
    pub omega_mode: &'static str,
    pub omega_radps: f64,
    pub duration_s: f64,
    pub frame: Frame,
    pub sweep_start_tesla: f64,
    pub sweep_end_tesla: f64,
    pub sweep_points: usize,
    pub initial: Option<String>,
    pub samples: usize,
}
