//! Command-line surface for the dimer CNOT simulator: spectra, gap and rate
//! tables, time evolution, gate extraction and pulse calibration, emitted
//! as deterministic CSV or JSON.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::RunConfig;
pub use error::{CliError, Result};
pub use output::{Format, Report};

#[derive(Debug, Parser)]
#[command(
    name = "smm-gate",
    version,
    about = "CNOT gate simulation in an exchange-coupled S=9/2 dimer"
)]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

/// Every option mirrors a config-file key and overrides it.
#[derive(Debug, Default, Clone, Args)]
pub struct GlobalOpts {
    /// Flat `key = value` config file.
    #[arg(long, short, global = true)]
    pub config: Option<PathBuf>,
    /// Single-unit anisotropy D, Kelvin.
    #[arg(long, global = true)]
    pub d_kelvin: Option<String>,
    #[arg(long, global = true)]
    pub g_factor: Option<String>,
    /// Longitudinal field, Tesla.
    #[arg(long, global = true)]
    pub bz_tesla: Option<String>,
    #[arg(long, global = true)]
    pub jz_kelvin: Option<String>,
    #[arg(long, global = true)]
    pub jxy_kelvin: Option<String>,
    /// Transverse amplitude in Gauss, or `pi` for the calibrated π pulse.
    #[arg(long, global = true)]
    pub b_perp_gauss: Option<String>,
    /// `omega1`, `omega2` or a carrier in rad/s.
    #[arg(long, global = true)]
    pub omega_mode: Option<String>,
    #[arg(long, global = true)]
    pub duration_s: Option<String>,
    /// `rotating` or `lab`.
    #[arg(long, global = true)]
    pub frame: Option<String>,
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Zeroth-order energies against the longitudinal field (CSV).
    Spectrum {
        #[arg(long)]
        sweep_start_tesla: Option<String>,
        #[arg(long)]
        sweep_end_tesla: Option<String>,
        #[arg(long)]
        sweep_points: Option<String>,
        /// Column state such as `(-9/2,9/2)`; repeatable.
        #[arg(long = "state")]
        states: Vec<String>,
    },
    /// Gap table of the computing states and the target splitting (JSON).
    Gaps,
    /// First-order drive and exchange rates out of the computing basis (JSON).
    Rates,
    /// Population time series under the configured pulse (CSV).
    Evolve {
        /// Initial product state, default `(-9/2,9/2)`.
        #[arg(long)]
        initial: Option<String>,
        #[arg(long)]
        samples: Option<String>,
    },
    /// Propagated 4x4 gate, leakage and CNOT fidelities (JSON).
    Gate,
    /// Transverse amplitude for a π pulse and the achieved Rabi angles (JSON).
    Calibrate,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::Gaps => "gaps",
            Command::Rates => "rates",
            Command::Evolve { .. } => "evolve",
            Command::Gate => "gate",
            Command::Calibrate => "calibrate",
        }
    }
}

/// Reads the config file, then applies command-line overrides.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.opts.config {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        cfg.apply_text(&text)?;
    }
    let o = &cli.opts;
    let mut pairs: Vec<(&str, Option<&String>)> = vec![
        ("d_kelvin", o.d_kelvin.as_ref()),
        ("g_factor", o.g_factor.as_ref()),
        ("bz_tesla", o.bz_tesla.as_ref()),
        ("jz_kelvin", o.jz_kelvin.as_ref()),
        ("jxy_kelvin", o.jxy_kelvin.as_ref()),
        ("b_perp_gauss", o.b_perp_gauss.as_ref()),
        ("omega_mode", o.omega_mode.as_ref()),
        ("duration_s", o.duration_s.as_ref()),
        ("frame", o.frame.as_ref()),
    ];
    match &cli.command {
        Command::Spectrum {
            sweep_start_tesla,
            sweep_end_tesla,
            sweep_points,
            states,
        } => {
            pairs.push(("sweep_start_tesla", sweep_start_tesla.as_ref()));
            pairs.push(("sweep_end_tesla", sweep_end_tesla.as_ref()));
            pairs.push(("sweep_points", sweep_points.as_ref()));
            if !states.is_empty() {
                cfg.states = states.clone();
            }
        }
        Command::Evolve { initial, samples } => {
            pairs.push(("initial", initial.as_ref()));
            pairs.push(("samples", samples.as_ref()));
        }
        _ => {}
    }
    for (key, value) in pairs {
        if let Some(v) = value {
            cfg.apply(key, v.trim())?;
        }
    }
    if let Some(path) = &o.output {
        cfg.output = Some(path.clone());
    }
    if let Some(f) = o.format {
        cfg.format = Some(f);
    }
    Ok(cfg)
}

pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Report> {
    match command {
        Command::Spectrum { .. } => commands::spectrum(cfg),
        Command::Gaps => commands::gaps(cfg),
        Command::Rates => commands::rates(cfg),
        Command::Evolve { .. } => commands::evolve(cfg),
        Command::Gate => commands::gate(cfg),
        Command::Calibrate => commands::calibrate(cfg),
    }
}

/// Runs a parsed invocation and returns the rendered text and its
/// destination (`None` for stdout).
pub fn run(cli: &Cli) -> Result<(String, Option<PathBuf>)> {
    let cfg = resolve_config(cli)?;
    let report = execute(&cli.command, &cfg)?;
    let format = cfg.format.unwrap_or(report.default_format);
    Ok((report.render(format)?, cfg.output.clone()))
}
