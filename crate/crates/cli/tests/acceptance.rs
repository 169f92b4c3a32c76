//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Reference values are computed here from hand formulas and
//! CODATA 2018 constants rather than through the library.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command as Process;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{rngs::StdRng, Rng, SeedableRng};
use smm_gate_core::dynamics::{
    basis_vector, calibrate_pi_pulse, effective_rabi_frequency, extract_gate, propagate,
    rabi_evolve, TwoLevelState,
};
use smm_gate_core::model::{eigendecompose, h_zero, omega1, omega2};
use smm_gate_core::perturbation::{Perturbation, PulseParams, GAUSS};
use smm_gate_core::{ComputingBasis, Frame, ModelParams, ProductState, PropagationOptions};

const MU_B: f64 = 9.2740100783e-24;
const K_B: f64 = 1.380649e-23;
const HBAR: f64 = 1.054571817e-34;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn energy(p: &ModelParams, m1: f64, m2: f64) -> f64 {
    p.d_kelvin * (m1 * m1 + m2 * m2)
        + p.g_factor * MU_B / K_B * p.bz_tesla * (m1 + m2)
        + p.jz_kelvin * m1 * m2
}

fn radps(kelvin: f64) -> f64 {
    kelvin * K_B / HBAR
}

fn ladder(s: f64, m_from: f64, m_to: f64) -> f64 {
    let (lo, hi) = if m_to > m_from {
        (m_from, m_to)
    } else {
        (m_to, m_from)
    };
    if (hi - lo - 1.0).abs() > 1e-12 {
        return 0.0;
    }
    (s * (s + 1.0) - lo * hi).sqrt()
}

fn window_integral(w: f64, duration: f64) -> Complex64 {
    let cycles = (w.abs() * duration / (2.0 * PI)).ceil() as usize;
    let n = (cycles * 256).max(4000) & !1;
    let h = duration / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=n {
        let weight = match k {
            0 => 1.0,
            _ if k == n => 1.0,
            _ if k % 2 == 1 => 4.0,
            _ => 2.0,
        };
        acc += Complex64::from_polar(weight, w * (-0.5 * duration + h * k as f64));
    }
    acc * (h / 3.0)
}

fn st(p: &ModelParams, m1: f64, m2: f64) -> ProductState {
    p.basis().state(m1, m2).unwrap()
}

fn no_exchange() -> ModelParams {
    ModelParams::default().with_jxy(0.0)
}

fn calibrated(p: &ModelParams, omega: f64) -> PulseParams {
    PulseParams::new(calibrate_pi_pulse(p, 1e-8).unwrap(), omega, 1e-8).unwrap()
}

fn spectrum_exactness() -> Outcome {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(20_240_901);
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let p = ModelParams {
            d_kelvin: rng.gen_range(-1.5..-0.1),
            g_factor: rng.gen_range(1.8..2.2),
            bz_tesla: rng.gen_range(0.0..1.4),
            jz_kelvin: rng.gen_range(-0.3..0.3),
            ..ModelParams::default()
        };
        let eig = eigendecompose(&h_zero(&p).unwrap()).unwrap();
        let mut hand: Vec<f64> = (0..100)
            .map(|i| energy(&p, 4.5 - (i / 10) as f64, 4.5 - (i % 10) as f64))
            .collect();
        hand.sort_by(f64::total_cmp);
        for (x, y) in eig.values.iter().zip(&hand) {
            worst = worst.max((x - y).abs());
        }
    }
    let elapsed = started.elapsed();
    outcome(
        worst <= 1e-10 && elapsed < Duration::from_secs(1),
        format!("max |dE| = {worst:.2e} K over 3x100 levels in {elapsed:.2?}"),
    )
}

fn resonant_rates() -> Outcome {
    let p = ModelParams::default();
    let pert = Perturbation::new(&p).unwrap();
    let cb = ComputingBasis::new(p.spin);
    let mut pass = true;
    let mut parts = Vec::new();
    for (b, t, quoted) in [(3.8, 1e-8, 1.0e8), (0.38, 1e-7, 1.0e7)] {
        let pulse = PulseParams::new(b * GAUSS, omega1(&p), t).unwrap();
        let fwd = pert.drive_rate(&pulse, &cb.c, &cb.d);
        let back = pert.drive_rate(&pulse, &cb.d, &cb.c);
        let ok = (fwd / quoted - 1.0).abs() <= 0.02 && (back / quoted - 1.0).abs() <= 0.02;
        pass &= ok;
        parts.push(format!("T={t:e}: {fwd:.4e} vs {quoted:.1e}"));
    }
    outcome(pass, parts.join("; "))
}

fn detuned_rates() -> Outcome {
    let p = ModelParams::default();
    let pert = Perturbation::new(&p).unwrap();
    let cases = [
        ((4.5, 4.5), (4.5, 3.5), 3.8, 1e-8, 2.4e2, 2.0),
        ((4.5, 4.5), (4.5, 3.5), 0.38, 1e-7, 0.23, 2.0),
        ((-4.5, 3.5), (-4.5, 2.5), 3.8, 1e-8, 4.4e1, 10.0),
        ((4.5, 3.5), (4.5, 2.5), 3.8, 1e-8, 8.8, 10.0),
        ((4.5, 3.5), (3.5, 3.5), 3.8, 1e-8, 3.6e2, 10.0),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (from, to, b, t, quoted, factor) in cases {
        let pulse = PulseParams::new(b * GAUSS, omega1(&p), t).unwrap();
        let w = pert.drive_rate(&pulse, &st(&p, from.0, from.1), &st(&p, to.0, to.1));
        let ratio = w / quoted;
        pass &= ratio <= factor && ratio >= 1.0 / factor;
        parts.push(format!("{ratio:.3}"));
    }
    let mut checked = 0;
    for (b, t) in [(3.8, 1e-8), (0.38, 1e-7)] {
        let pulse = PulseParams::new(b * GAUSS, omega1(&p), t).unwrap();
        for rec in pert.rate_table(&pulse).unwrap() {
            if let Some(bound) = pert.drive_rate_envelope(&pulse, &rec.from_state, &rec.to_state) {
                checked += 1;
                pass &= rec.rate <= bound * (1.0 + 1e-12);
            }
        }
    }
    outcome(
        pass,
        format!(
            "computed/quoted ratios [{}]; envelope holds on {checked} detuned records",
            parts.join(", ")
        ),
    )
}

fn delta_omega_identity() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let jz = rng.gen_range(-0.5..0.5);
        let p = ModelParams {
            jz_kelvin: jz,
            ..ModelParams::default()
        };
        let expect = radps(9.0 * jz);
        worst = worst.max(((omega1(&p) - omega2(&p)) - expect).abs() / expect.abs());
    }
    outcome(
        worst <= 1e-9,
        format!("max relative deviation {worst:.2e} over 50 Jz"),
    )
}

fn rabi_cross_validation() -> Outcome {
    let p = no_exchange();
    let cb = ComputingBasis::new(p.spin);
    let b = 3.8 * GAUSS;
    let rabi = p.g_factor * MU_B * b / HBAR * ladder(4.5, 3.5, 4.5);
    let probe = PulseParams::new(b, omega1(&p), 1e-8).unwrap();
    assert!((effective_rabi_frequency(&p, &probe, &cb.c, &cb.d) / rabi - 1.0).abs() < 1e-12);
    let pulse = PulseParams::new(b, omega1(&p), 4.0 * PI / rabi).unwrap();
    let (ea, eb) = (radps(energy(&p, -4.5, 4.5)), radps(energy(&p, -4.5, 3.5)));
    let psi0 = basis_vector(&p, &cb.c);

    let amplitude_error = |opts: PropagationOptions| {
        let res = propagate(&p, &pulse, &psi0, opts).unwrap();
        let t0 = res.times[0];
        let start = Complex64::from_polar(1.0, ea * t0);
        let worst = res
            .times
            .iter()
            .zip(&res.states)
            .map(|(t, psi)| {
                let expect = rabi_evolve(TwoLevelState::lower(), rabi, t - t0);
                let ca = psi[cb.c.index()] * Complex64::from_polar(1.0, ea * t);
                let cd = psi[cb.d.index()] * Complex64::from_polar(1.0, eb * t);
                (ca - expect.c_a * start)
                    .norm()
                    .max((cd - expect.c_b * start).norm())
            })
            .fold(0.0, f64::max);
        (worst, res.max_norm_drift)
    };

    let mut worst = 0.0f64;
    let mut drift = 0.0f64;
    for frame in [Frame::Rotating, Frame::Lab] {
        let opts = PropagationOptions::default()
            .frame(frame)
            .samples(81)
            .subspace(vec![cb.c, cb.d]);
        let (w, d) = amplitude_error(opts);
        worst = worst.max(w);
        drift = drift.max(d);
    }
    // Reported only: the unrestricted dimer adds off-resonant couplings.
    let (full_err, full_drift) = amplitude_error(PropagationOptions::default().samples(81));
    drift = drift.max(full_drift);
    outcome(
        worst <= 1e-6 && drift <= 1e-9,
        format!(
            "two cycles, both frames: max amplitude error {worst:.2e}, norm drift {drift:.2e}; \
             unrestricted dimer amplitude error {full_err:.2e}"
        ),
    )
}

fn gate_properties() -> Outcome {
    let p = no_exchange();
    let g = extract_gate(&p, &calibrated(&p, omega1(&p))).unwrap();
    let rows: Vec<f64> = (0..4).map(|k| g.truth_table_probability(k)).collect();
    let leak = g.leakage_per_state.iter().cloned().fold(0.0, f64::max);
    let pass = g.truth_table_fidelity >= 0.99 && leak <= 5e-3 && rows.iter().all(|&r| r >= 0.99);
    let reference = PulseParams::new(3.8 * GAUSS, omega1(&p), 1e-8).unwrap();
    let r = extract_gate(&p, &reference).unwrap();
    outcome(
        pass,
        format!(
            "calibrated: fidelity {:.6}, phase-aware {:.6}, max leakage {leak:.2e}, min row {:.6}; \
             3.8 G / 10 ns setting: fidelity {:.4} (sub-pi)",
            g.truth_table_fidelity,
            g.phase_aware_fidelity,
            rows.iter().cloned().fold(1.0, f64::min),
            r.truth_table_fidelity
        ),
    )
}

fn wrong_frequency() -> Outcome {
    let p = no_exchange();
    let bad = extract_gate(&p, &calibrated(&p, omega2(&p))).unwrap();
    let good = extract_gate(&p, &calibrated(&p, omega1(&p))).unwrap();
    let (lb, lg) = (bad.leakage_per_state[0], good.leakage_per_state[0]);
    outcome(
        lb > 0.1 && lg < 1e-3,
        format!("leakage from (9/2,9/2): {lb:.4} at omega2, {lg:.2e} at omega1"),
    )
}

fn exchange_mixing() -> Outcome {
    let p = ModelParams::default();
    let cb = ComputingBasis::new(p.spin);
    let partner = st(&p, 3.5, 4.5);
    let expected = 2.0 * radps(4.5 * p.jxy_kelvin);
    let span = 2.0 * (2.0 * PI / expected);
    let pulse = PulseParams::new(0.0, omega1(&p), span).unwrap();
    let opts = PropagationOptions::default().samples(801);
    let res = propagate(&p, &pulse, &basis_vector(&p, &cb.b), opts).unwrap();
    let pop: Vec<f64> = res.populations.iter().map(|r| r[partner.index()]).collect();
    let dt = res.times[1] - res.times[0];
    // First maximum, refined by a parabola through its neighbours.
    let k = (1..pop.len() - 1)
        .find(|&k| pop[k] >= pop[k - 1] && pop[k] >= pop[k + 1])
        .unwrap();
    let (a, b, c) = (pop[k - 1], pop[k], pop[k + 1]);
    let shift = 0.5 * (a - c) / (a - 2.0 * b + c);
    let t_max = (k as f64 + shift) * dt;
    let measured = PI / t_max;
    let peak = pop.iter().cloned().fold(0.0, f64::max);
    let freq_ok = (measured / expected - 1.0).abs() <= 0.01 && peak >= 0.999;

    // First-order exchange amplitudes against quadrature of the pulse window.
    let pert = Perturbation::new(&p).unwrap();
    let quoted = [
        ((4.5, 3.5), (3.5, 4.5), 1e-8, 8.9e-13),
        ((-4.5, 4.5), (-3.5, 3.5), 1e-8, 3.8e-21),
        ((-4.5, 3.5), (-3.5, 2.5), 1e-8, 1.3e-20),
        ((4.5, 3.5), (3.5, 4.5), 1e-7, 8.9e-12),
        ((-4.5, 4.5), (-3.5, 3.5), 1e-7, 6.2e-22),
        ((-4.5, 3.5), (-3.5, 2.5), 1e-7, 1.1e-21),
    ];
    let mut oracle_dev = 0.0f64;
    let mut ratios = Vec::new();
    for (from, to, t, q) in quoted {
        let got = pert.exchange_amplitude(t, &st(&p, from.0, from.1), &st(&p, to.0, to.1));
        let element = 0.5 * p.jxy_kelvin * ladder(4.5, from.0, to.0) * ladder(4.5, from.1, to.1);
        let w = radps(energy(&p, to.0, to.1) - energy(&p, from.0, from.1));
        let expect = Complex64::new(0.0, -radps(element)) * window_integral(w, t);
        oracle_dev = oracle_dev.max((got - expect).norm() / expect.norm());
        ratios.push(format!("{:.1e}", got.norm_sqr() / t / q));
    }
    outcome(
        freq_ok && oracle_dev <= 1e-6,
        format!(
            "oscillation {measured:.6e} vs {expected:.6e} rad/s, peak transfer {peak:.9}; \
             formula vs quadrature {oracle_dev:.1e}; computed/quoted exchange rates [{}] \
             (quoted values not reproducible)",
            ratios.join(", ")
        ),
    )
}

fn frame_equivalence() -> Outcome {
    let p = no_exchange();
    let cb = ComputingBasis::new(p.spin);
    let pulse = calibrated(&p, omega1(&p));
    let started = Instant::now();
    let worst = std::thread::scope(|scope| {
        let handles: Vec<_> = cb
            .states()
            .into_iter()
            .map(|s| {
                let (p, pulse) = (&p, &pulse);
                scope.spawn(move || {
                    let psi = basis_vector(p, &s);
                    let run = |frame| {
                        let opts = PropagationOptions::default().frame(frame).samples(11);
                        propagate(p, pulse, &psi, opts).unwrap().populations
                    };
                    let (rot, lab) = (run(Frame::Rotating), run(Frame::Lab));
                    rot.iter()
                        .flatten()
                        .zip(lab.iter().flatten())
                        .map(|(x, y)| (x - y).abs())
                        .fold(0.0, f64::max)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap())
            .fold(0.0, f64::max)
    });
    outcome(
        worst <= 1e-7,
        format!(
            "max population difference {worst:.2e} over 4 inputs x 11 samples in {:.2?}",
            started.elapsed()
        ),
    )
}

fn cli_determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_smm-gate");
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "jxy_kelvin = 0\nb_perp_gauss = pi\nomega_mode = omega1\nduration_s = 1e-8\nsamples = 21\nsweep_points = 29\n",
    )
    .unwrap();
    let invocations: [&[&str]; 7] = [
        &["spectrum"],
        &["gaps"],
        &["rates"],
        &["evolve"],
        &["gate"],
        &["calibrate"],
        &["gate", "--format", "csv"],
    ];
    let mut mismatches = Vec::new();
    for args in invocations {
        let run = || {
            let out = Process::new(exe)
                .arg("--config")
                .arg(&cfg)
                .args(args)
                .output()
                .unwrap();
            assert!(
                out.status.success(),
                "{args:?}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            out.stdout
        };
        let (first, second) = (run(), run());
        if first != second || first.is_empty() {
            mismatches.push(args.join(" "));
        }
    }
    let to_file = |name: &str| {
        let path = dir.path().join(name);
        let status = Process::new(exe)
            .arg("--config")
            .arg(&cfg)
            .args(["evolve", "--frame", "lab", "--samples", "5", "--output"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(path).unwrap()
    };
    if to_file("a.csv") != to_file("b.csv") {
        mismatches.push("evolve --frame lab --output".into());
    }
    outcome(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "8 invocations byte-identical across repeated runs".into()
        } else {
            format!("differing output: {}", mismatches.join(", "))
        },
    )
}

fn main() {
    let started = Instant::now();
    let criteria: [Criterion; 10] = [
        ("spectrum exactness", spectrum_exactness),
        ("resonant rate reproduction", resonant_rates),
        ("detuned rate reproduction", detuned_rates),
        ("target splitting identity", delta_omega_identity),
        ("Rabi cross-validation", rabi_cross_validation),
        ("gate property suite", gate_properties),
        ("wrong-frequency hazard", wrong_frequency),
        ("exchange mixing", exchange_mixing),
        ("frame equivalence", frame_equivalence),
        ("CLI determinism", cli_determinism),
    ];
    let mut results = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let res = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        results.push((i + 1, *name, res));
    }
    let total = started.elapsed();
    // Frame equivalence also carries the whole-suite time budget.
    if let Some((_, _, r)) = results.iter_mut().find(|(n, _, _)| *n == 9) {
        r.pass &= total < Duration::from_secs(120);
        r.detail.push_str(&format!("; suite {total:.1?}"));
    }
    let mut failed = 0;
    for (n, name, r) in &results {
        let tag = if r.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {n:>2} {name}: {}", r.detail);
        failed += usize::from(!r.pass);
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
