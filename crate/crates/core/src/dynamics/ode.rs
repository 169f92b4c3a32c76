//! Adaptive Dormand–Prince 5(4) stepping for complex linear ODE systems.

use num_complex::Complex64;

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

/// Integrates `y' = f(t, y)` in place. The first-same-as-last stage is
/// reused across steps; `h` carries the step size between calls.
pub struct DormandPrince {
    k: [Vec<Complex64>; 7],
    stage: Vec<Complex64>,
    y_new: Vec<Complex64>,
    fresh: bool,
    pub h: f64,
    pub steps: usize,
}

impl DormandPrince {
    pub fn new(n: usize, h0: f64) -> Self {
        let zero = vec![Complex64::new(0.0, 0.0); n];
        Self {
            k: std::array::from_fn(|_| zero.clone()),
            stage: zero.clone(),
            y_new: zero,
            fresh: true,
            h: h0,
            steps: 0,
        }
    }

    /// Advances `y` from `t` to `t_end`. `on_step` sees every accepted state.
    pub fn integrate<F>(
        &mut self,
        f: &F,
        t: f64,
        t_end: f64,
        y: &mut [Complex64],
        tol: &Tolerances,
        mut on_step: impl FnMut(&[Complex64]),
    ) -> Result<()>
    where
        F: Fn(f64, &[Complex64], &mut [Complex64]),
    {
        let mut t = t;
        if self.fresh {
            f(t, y, &mut self.k[0]);
            self.fresh = false;
        }
        while t < t_end {
            if self.steps >= tol.max_steps {
                return Err(Error::MaxStepsExceeded(tol.max_steps));
            }
            let min_h = 16.0 * f64::EPSILON * t.abs().max(t_end.abs());
            if self.h < min_h {
                return Err(Error::StepSizeUnderflow(t));
            }
            let last = t + self.h >= t_end;
            let h = if last { t_end - t } else { self.h };

            for s in 1..7 {
                for (i, st) in self.stage.iter_mut().enumerate() {
                    let mut acc = y[i];
                    for (j, a) in A[s][..s].iter().enumerate() {
                        if *a != 0.0 {
                            acc += self.k[j][i] * (h * a);
                        }
                    }
                    *st = acc;
                }
                let (_, rest) = self.k.split_at_mut(s);
                f(t + C[s] * h, &self.stage, &mut rest[0]);
                if s == 6 {
                    // Stage 6 input is the fifth-order solution.
                    self.y_new.copy_from_slice(&self.stage);
                }
            }

            let mut err = 0.0f64;
            for (i, (old, new)) in y.iter().zip(&self.y_new).enumerate() {
                let mut e = Complex64::new(0.0, 0.0);
                for (j, w) in E.iter().enumerate() {
                    if *w != 0.0 {
                        e += self.k[j][i] * w;
                    }
                }
                let scale = tol.atol + tol.rtol * old.norm().max(new.norm());
                err = err.max(h * e.norm() / scale);
            }

            if err <= 1.0 {
                y.copy_from_slice(&self.y_new);
                self.k.swap(0, 6);
                t = if last { t_end } else { t + h };
                self.steps += 1;
                on_step(y);
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                if !last || factor < 1.0 {
                    self.h = h * factor;
                }
            } else {
                self.h = h * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            }
        }
        Ok(())
    }
}
