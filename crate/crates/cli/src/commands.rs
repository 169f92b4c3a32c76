use std::f64::consts::PI;

use serde::Serialize;
use smm_gate_core::dynamics::{
    basis_vector, calibrate_pi_pulse, effective_rabi_frequency, extract_gate_with,
    pi_pulse_duration, propagate, rabi_angle, CNOT_PERMUTATION,
};
use smm_gate_core::model::{
    analytic_energy, angular_to_kelvin, delta_omega, gap_table, omega1, omega2,
};
use smm_gate_core::perturbation::{Channel, Perturbation, TransitionRecord, GAUSS};
use smm_gate_core::{ComputingBasis, ModelParams, ProductState, PropagationOptions, PulseParams};

use crate::config::{BPerp, RunConfig};
use crate::error::Result;
use crate::output::{Cell, Format, Report, Table};

/// Population above which `evolve` gives a state its own column.
pub const POPULATION_FLOOR: f64 = 1e-6;

/// Transverse amplitude and duration of the reference drive setting.
pub const REFERENCE_SETTING: (f64, f64) = (3.8, 1e-8);

/// Literature values `(from, to, channel, B⊥ in Gauss, T, rate)` listed
/// beside the computed rates.
pub const REFERENCE_RATES: [(&str, &str, Channel, f64, f64, f64); 16] = [
    (
        "(-9/2,9/2)",
        "(-9/2,7/2)",
        Channel::DriveAbsorption,
        3.8,
        1e-8,
        1.0e8,
    ),
    (
        "(-9/2,9/2)",
        "(-9/2,7/2)",
        Channel::DriveAbsorption,
        0.38,
        1e-7,
        1.0e7,
    ),
    (
        "(9/2,9/2)",
        "(9/2,7/2)",
        Channel::DriveAbsorption,
        3.8,
        1e-8,
        2.4e2,
    ),
    (
        "(9/2,9/2)",
        "(9/2,7/2)",
        Channel::DriveAbsorption,
        0.38,
        1e-7,
        0.23,
    ),
    (
        "(-9/2,7/2)",
        "(-9/2,5/2)",
        Channel::DriveAbsorption,
        3.8,
        1e-8,
        4.4e1,
    ),
    (
        "(9/2,7/2)",
        "(9/2,5/2)",
        Channel::DriveAbsorption,
        3.8,
        1e-8,
        8.8,
    ),
    (
        "(9/2,7/2)",
        "(7/2,7/2)",
        Channel::DriveAbsorption,
        3.8,
        1e-8,
        3.6e2,
    ),
    (
        "(-9/2,7/2)",
        "(-9/2,5/2)",
        Channel::DriveAbsorption,
        0.38,
        1e-7,
        2.5e-2,
    ),
    (
        "(9/2,7/2)",
        "(9/2,5/2)",
        Channel::DriveAbsorption,
        0.38,
        1e-7,
        4.3e-2,
    ),
    (
        "(9/2,7/2)",
        "(7/2,7/2)",
        Channel::DriveAbsorption,
        0.38,
        1e-7,
        3.6e-1,
    ),
    (
        "(9/2,7/2)",
        "(7/2,9/2)",
        Channel::Exchange,
        0.0,
        1e-8,
        8.9e-13,
    ),
    (
        "(-9/2,9/2)",
        "(-7/2,7/2)",
        Channel::Exchange,
        0.0,
        1e-8,
        3.8e-21,
    ),
    (
        "(-9/2,7/2)",
        "(-7/2,5/2)",
        Channel::Exchange,
        0.0,
        1e-8,
        1.3e-20,
    ),
    (
        "(9/2,7/2)",
        "(7/2,9/2)",
        Channel::Exchange,
        0.0,
        1e-7,
        8.9e-12,
    ),
    (
        "(-9/2,9/2)",
        "(-7/2,7/2)",
        Channel::Exchange,
        0.0,
        1e-7,
        6.2e-22,
    ),
    (
        "(-9/2,7/2)",
        "(-7/2,5/2)",
        Channel::Exchange,
        0.0,
        1e-7,
        1.1e-21,
    ),
];

fn label(s: &ProductState) -> String {
    s.to_string()
}

/// The sixteen states with `|m1|, |m2|` in `{s, s-1}`, in basis order.
pub fn default_spectrum_states(params: &ModelParams) -> Vec<ProductState> {
    let t = params.spin.twice() as i32;
    params
        .basis()
        .states()
        .filter(|s| {
            let low = |m: i32| m.abs() >= t - 2;
            low(s.twice_m1()) && low(s.twice_m2())
        })
        .collect()
}

fn selected_states(cfg: &RunConfig) -> Result<Vec<ProductState>> {
    if cfg.states.is_empty() {
        return Ok(default_spectrum_states(&cfg.model));
    }
    let basis = cfg.model.basis();
    cfg.states
        .iter()
        .map(|s| Ok(basis.parse_state(s)?))
        .collect()
}

pub fn spectrum(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let states = selected_states(cfg)?;
    let mut report = Report::new("spectrum", cfg.echo()?, Format::Csv);
    let mut table =
        Table::new(std::iter::once("Bz_tesla".to_string()).chain(states.iter().map(label)));
    for bz in cfg.sweep()?.values() {
        let p = ModelParams {
            bz_tesla: bz,
            ..cfg.model
        };
        p.validate()?;
        let mut row = vec![Cell::Num(bz)];
        row.extend(states.iter().map(|s| Cell::Num(analytic_energy(&p, s))));
        table.push(row);
    }
    report.insert("columns", &table.columns)?;
    report.insert("rows", table.to_json()["rows"].clone())?;
    report.table = table;
    Ok(report)
}

#[derive(Serialize)]
struct GapRow {
    row: usize,
    from: ProductState,
    to: ProductState,
    expression: &'static str,
    gap_kelvin: f64,
    gap_radps: f64,
}

pub fn gaps(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let p = &cfg.model;
    let mut report = Report::new("gaps", cfg.echo()?, Format::Json);
    let mut table = Table::new(["row", "from", "to", "expression", "gap_kelvin", "gap_radps"]);
    let mut rows = Vec::new();
    for (i, (row, entry)) in gap_table(p)?.into_iter().enumerate() {
        let r = GapRow {
            row: i + 1,
            from: entry.from_state,
            to: entry.to_state,
            expression: row.expression,
            gap_kelvin: entry.gap_kelvin,
            gap_radps: entry.gap_angular,
        };
        table.push(vec![
            Cell::Int(r.row as u64),
            label(&r.from).into(),
            label(&r.to).into(),
            r.expression.into(),
            r.gap_kelvin.into(),
            r.gap_radps.into(),
        ]);
        rows.push(r);
    }
    let dw = delta_omega(p);
    report.summarize("omega1_radps", omega1(p));
    report.summarize("omega2_radps", omega2(p));
    report.summarize("delta_omega_expression", "9Jz");
    report.summarize("delta_omega_kelvin", angular_to_kelvin(dw));
    report.summarize("delta_omega_radps", dw);
    report.insert("rows", rows)?;
    report.insert("ordering", ordering(p))?;
    report.table = table;
    Ok(report)
}

#[derive(Serialize)]
struct LevelRank {
    label: &'static str,
    state: ProductState,
    energy_kelvin: f64,
    /// Zero-based position among all product levels, lowest first.
    rank: usize,
}

#[derive(Serialize)]
struct Ordering {
    ground_state: ProductState,
    ground_energy_kelvin: f64,
    computing_states: Vec<LevelRank>,
}

/// Where the computing states sit in the full zeroth-order spectrum.
fn ordering(p: &ModelParams) -> Ordering {
    let mut levels: Vec<(f64, ProductState)> = p
        .basis()
        .states()
        .map(|s| (analytic_energy(p, &s), s))
        .collect();
    levels.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.index().cmp(&b.1.index())));
    let cb = ComputingBasis::new(p.spin);
    let computing_states = cb
        .states()
        .iter()
        .zip(ComputingBasis::LOGICAL_LABELS)
        .map(|(s, label)| LevelRank {
            label,
            state: *s,
            energy_kelvin: analytic_energy(p, s),
            rank: levels
                .iter()
                .position(|(_, l)| l == s)
                .unwrap_or(usize::MAX),
        })
        .collect();
    Ordering {
        ground_state: levels[0].1,
        ground_energy_kelvin: levels[0].0,
        computing_states,
    }
}

#[derive(Serialize)]
struct ReferenceRow {
    from: String,
    to: String,
    channel: Channel,
    b_perp_gauss: f64,
    duration_s: f64,
    quoted_rate: f64,
    computed_rate: f64,
    ratio: f64,
    amplitude_modulus: f64,
}

fn reference_rows(p: &ModelParams) -> Result<Vec<ReferenceRow>> {
    let pert = Perturbation::new(p)?;
    let basis = p.basis();
    let w = omega1(p);
    REFERENCE_RATES
        .iter()
        .map(|&(from, to, channel, b, t, quoted)| {
            let fs = basis.parse_state(from)?;
            let ts = basis.parse_state(to)?;
            let amplitude = match channel {
                Channel::Exchange => pert.exchange_amplitude(t, &fs, &ts),
                _ => {
                    let pulse = PulseParams::new(b * GAUSS, w, t)?;
                    pert.drive_amplitude(&pulse, &fs, &ts)
                }
            };
            let computed = amplitude.norm_sqr() / t;
            Ok(ReferenceRow {
                from: from.to_string(),
                to: to.to_string(),
                channel,
                b_perp_gauss: b,
                duration_s: t,
                quoted_rate: quoted,
                computed_rate: computed,
                ratio: computed / quoted,
                amplitude_modulus: amplitude.norm(),
            })
        })
        .collect()
}

pub fn rates(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let pulse = cfg.pulse()?;
    let pert = Perturbation::new(&cfg.model)?;
    let records: Vec<TransitionRecord> = pert.rate_table(&pulse)?;
    let mut report = Report::new("rates", cfg.echo()?, Format::Json);
    let mut table = Table::new([
        "from",
        "to",
        "channel",
        "amplitude_re",
        "amplitude_im",
        "rate",
        "within_basis",
        "perturbative",
    ]);
    for r in &records {
        let channel = serde_json::to_value(r.channel)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default();
        table.push(vec![
            label(&r.from_state).into(),
            label(&r.to_state).into(),
            channel.into(),
            r.amplitude.re.into(),
            r.amplitude.im.into(),
            r.rate.into(),
            r.within_basis.into(),
            r.perturbative.into(),
        ]);
    }
    report.insert("records", &records)?;
    report.insert("reference", reference_rows(&cfg.model)?)?;
    report.table = table;
    Ok(report)
}

pub fn evolve(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let pulse = cfg.pulse()?;
    let basis = cfg.model.basis();
    let initial = match &cfg.initial {
        Some(s) => basis.parse_state(s)?,
        None => ComputingBasis::new(cfg.model.spin).c,
    };
    let mut resolved = cfg.clone();
    resolved.initial = Some(label(&initial));

    let opts = PropagationOptions::default()
        .frame(cfg.frame)
        .samples(cfg.samples);
    let res = propagate(
        &cfg.model,
        &pulse,
        &basis_vector(&cfg.model, &initial),
        opts,
    )?;

    let shown: Vec<usize> = (0..res.labels.len())
        .filter(|&k| res.populations.iter().any(|row| row[k] > POPULATION_FLOOR))
        .collect();
    let mut table = Table::new(
        std::iter::once("t_s".to_string())
            .chain(shown.iter().map(|&k| label(&res.labels[k])))
            .chain(std::iter::once("other".to_string())),
    );
    for (t, row) in res.times.iter().zip(&res.populations) {
        let mut cells = vec![Cell::Num(*t)];
        cells.extend(shown.iter().map(|&k| Cell::Num(row[k])));
        let other: f64 = row
            .iter()
            .enumerate()
            .filter(|(k, _)| !shown.contains(k))
            .map(|(_, p)| p)
            .sum();
        cells.push(Cell::Num(other));
        table.push(cells);
    }

    let mut report = Report::new("evolve", resolved.echo()?, Format::Csv);
    report.summarize("max_norm_drift", res.max_norm_drift);
    report.summarize("integrator_steps", Cell::Int(res.steps as u64));
    report.insert("columns", &table.columns)?;
    report.insert("rows", table.to_json()["rows"].clone())?;
    report.table = table;
    Ok(report)
}

#[derive(Serialize)]
struct TruthRow {
    input: &'static str,
    input_state: ProductState,
    output: &'static str,
    output_state: ProductState,
    probability: f64,
    leakage: f64,
}

pub fn gate(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let pulse = cfg.pulse()?;
    let opts = PropagationOptions::default().frame(cfg.frame);
    let g = extract_gate_with(&cfg.model, &pulse, opts)?;
    let cb = ComputingBasis::new(cfg.model.spin);
    let states = cb.states();
    let labels = ComputingBasis::LOGICAL_LABELS;

    let mut report = Report::new("gate", cfg.echo()?, Format::Json);
    report.summarize("truth_table_fidelity", g.truth_table_fidelity);
    report.summarize("phase_aware_fidelity", g.phase_aware_fidelity);
    report.summarize("rabi_angle_rad", rabi_angle(&cfg.model, &pulse));

    let mut table = Table::new([
        "input",
        "input_state",
        "output",
        "output_state",
        "probability",
        "leakage",
    ]);
    let mut truth = Vec::new();
    for k in 0..4 {
        let j = CNOT_PERMUTATION[k];
        let row = TruthRow {
            input: labels[k],
            input_state: states[k],
            output: labels[j],
            output_state: states[j],
            probability: g.truth_table_probability(k),
            leakage: g.leakage_per_state[k],
        };
        table.push(vec![
            row.input.into(),
            label(&row.input_state).into(),
            row.output.into(),
            label(&row.output_state).into(),
            row.probability.into(),
            row.leakage.into(),
        ]);
        truth.push(row);
    }
    let re: Vec<Vec<f64>> = g
        .matrix
        .iter()
        .map(|r| r.iter().map(|z| z.re).collect())
        .collect();
    let im: Vec<Vec<f64>> = g
        .matrix
        .iter()
        .map(|r| r.iter().map(|z| z.im).collect())
        .collect();
    report.insert("basis", states.iter().map(label).collect::<Vec<_>>())?;
    report.insert("matrix_re", re)?;
    report.insert("matrix_im", im)?;
    report.insert("leakage_per_state", g.leakage_per_state)?;
    report.insert("truth_table", truth)?;
    report.table = table;
    Ok(report)
}

#[derive(Serialize)]
struct Setting {
    setting: &'static str,
    b_perp_gauss: f64,
    duration_s: f64,
    rabi_angle_rad: f64,
    pi_fraction: f64,
    pi_duration_s: f64,
}

pub fn calibrate(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let p = &cfg.model;
    let cb = ComputingBasis::new(p.spin);
    let setting = |name: &'static str, b_tesla: f64, duration: f64| -> Result<Setting> {
        let pulse = PulseParams::new(b_tesla, omega1(p), duration)?;
        let angle = rabi_angle(p, &pulse);
        Ok(Setting {
            setting: name,
            b_perp_gauss: b_tesla / GAUSS,
            duration_s: duration,
            rabi_angle_rad: angle,
            pi_fraction: angle / PI,
            pi_duration_s: if b_tesla > 0.0 {
                pi_pulse_duration(p, b_tesla)?
            } else {
                f64::INFINITY
            },
        })
    };
    let calibrated = setting(
        "calibrated",
        calibrate_pi_pulse(p, cfg.duration_s)?,
        cfg.duration_s,
    )?;
    let configured = setting("configured", cfg.b_perp_tesla()?, cfg.duration_s)?;
    let (ref_gauss, ref_t) = REFERENCE_SETTING;
    let reference = setting("reference", ref_gauss * GAUSS, ref_t)?;

    let unit = PulseParams::new(GAUSS, omega1(p), cfg.duration_s)?;
    let mut report = Report::new("calibrate", cfg.echo()?, Format::Json);
    report.summarize(
        "rabi_radps_per_gauss",
        effective_rabi_frequency(p, &unit, &cb.c, &cb.d),
    );
    report.summarize(
        "reference_is_pi_pulse",
        (reference.pi_fraction - 1.0).abs() < 1e-3,
    );
    let mut table = Table::new([
        "setting",
        "b_perp_gauss",
        "duration_s",
        "rabi_angle_rad",
        "pi_fraction",
        "pi_duration_s",
    ]);
    let settings = match cfg.b_perp {
        BPerp::Calibrated => vec![calibrated, reference],
        BPerp::Gauss(_) => vec![calibrated, configured, reference],
    };
    for s in &settings {
        table.push(vec![
            s.setting.into(),
            s.b_perp_gauss.into(),
            s.duration_s.into(),
            s.rabi_angle_rad.into(),
            s.pi_fraction.into(),
            s.pi_duration_s.into(),
        ]);
    }
    report.insert("settings", settings)?;
    report.table = table;
    Ok(report)
}
