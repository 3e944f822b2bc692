//! Embedded Dormand-Prince 5(4) stepper with dense output.
//!
//! The classic 7-stage FSAL pair: fifth-order propagation, fourth-order
//! embedded error estimate, and a fifth-order interpolant on each accepted
//! step. Consumers drive it one accepted step at a time and use the dense
//! interpolant for sampling, event location, and closest-approach searches.
//!
//! The right-hand side returns `Result`, and a failing stage (for example a
//! drift lookup past the weak region) rejects the step and retries at half
//! the size rather than aborting the integration.

use crate::error::{Error, Result};

/// Integrator controls. Defaults target ~1e-8 endpoint accuracy over unit
/// time scales.
#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub initial_step: f64,
    pub max_step: f64,
    /// Give up after this many accepted steps.
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            initial_step: 1e-3,
            max_step: 0.1,
            max_steps: 5_000_000,
        }
    }
}

/// One accepted step together with its dense interpolant.
#[derive(Clone, Copy, Debug)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    cont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    /// Evaluate the interpolant at `t` in `[t0, t1]`.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let h = self.t1 - self.t0;
        let s = if h == 0.0 { 0.0 } else { (t - self.t0) / h };
        let s1 = 1.0 - s;
        let mut out = [0.0; N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.cont[0][i]
                + (self.cont[1][i]
                    + (self.cont[2][i] + (self.cont[3][i] + self.cont[4][i] * s1) * s) * s1)
                    * s;
        }
        out
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
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

const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

// Error = 5th order minus embedded 4th order.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

// Dense output weights.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Driveable stepper: owns the current state and produces accepted steps.
pub struct Integrator<const N: usize, F>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    f: F,
    t: f64,
    y: [f64; N],
    h: f64,
    opts: OdeOptions,
    k1: Option<[f64; N]>,
    accepted: usize,
}

impl<const N: usize, F> Integrator<N, F>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    pub fn new(f: F, t0: f64, y0: [f64; N], opts: OdeOptions) -> Self {
        Integrator {
            f,
            t: t0,
            y: y0,
            h: opts.initial_step.min(opts.max_step),
            opts,
            k1: None,
            accepted: 0,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    /// Advance by one accepted step, never past `t_end`.
    pub fn step_toward(&mut self, t_end: f64) -> Result<DenseStep<N>> {
        debug_assert!(t_end > self.t);
        if self.accepted >= self.opts.max_steps {
            return Err(Error::NoConvergence {
                detail: format!("integrator exceeded {} steps", self.opts.max_steps),
            });
        }
        let k1 = match self.k1 {
            Some(k) => k,
            None => {
                let k = (self.f)(self.t, &self.y)?;
                self.k1 = Some(k);
                k
            }
        };

        loop {
            let h = self.h.min(t_end - self.t).min(self.opts.max_step);
            if h < 1e-14 * self.t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { t: self.t });
            }

            match self.try_step(h, &k1)? {
                StepOutcome::Accepted { step, k_last, err } => {
                    self.t = step.t1;
                    self.y = step.y1;
                    self.k1 = Some(k_last);
                    self.accepted += 1;
                    // I-controller with the usual fifth-order exponent.
                    let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
                    self.h = (h * fac).min(self.opts.max_step);
                    return Ok(step);
                }
                StepOutcome::Rejected { err } => {
                    let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                    self.h = h * fac;
                }
                StepOutcome::StageFailed => {
                    self.h = h * 0.5;
                }
            }
        }
    }

    fn try_step(&mut self, h: f64, k1: &[f64; N]) -> Result<StepOutcome<N>> {
        let mut k = [[0.0; N]; 7];
        k[0] = *k1;

        for stage in 0..6 {
            let mut yi = self.y;
            for (j, kj) in k.iter().enumerate().take(stage + 1) {
                let a = A[stage][j];
                if a != 0.0 {
                    for i in 0..N {
                        yi[i] += h * a * kj[i];
                    }
                }
            }
            match (self.f)(self.t + C[stage] * h, &yi) {
                Ok(ki) => k[stage + 1] = ki,
                // A failing stage (for example, the drift extension left
                // the weak region) is treated like an oversize step.
                Err(Error::StrongWind { .. }) | Err(Error::PointOutsideDomain { .. }) => {
                    return Ok(StepOutcome::StageFailed)
                }
                Err(e) => return Err(e),
            }
        }

        // Fifth-order solution is the last stage's argument (FSAL): stage 6
        // used the b-row of the tableau, so y1 equals that argument.
        let mut y1 = self.y;
        for (j, kj) in k.iter().enumerate().take(6) {
            let a = A[5][j];
            if a != 0.0 {
                for i in 0..N {
                    y1[i] += h * a * kj[i];
                }
            }
        }
        let k_last = k[6];

        let mut err_sq = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            e *= h;
            let scale = self.opts.abs_tol + self.opts.rel_tol * self.y[i].abs().max(y1[i].abs());
            err_sq += (e / scale) * (e / scale);
        }
        let err = (err_sq / N as f64).sqrt().max(1e-30);

        if err > 1.0 {
            return Ok(StepOutcome::Rejected { err });
        }

        let mut cont = [[0.0; N]; 5];
        for i in 0..N {
            let ydiff = y1[i] - self.y[i];
            let bspl = h * k[0][i] - ydiff;
            cont[0][i] = self.y[i];
            cont[1][i] = ydiff;
            cont[2][i] = bspl;
            cont[3][i] = ydiff - h * k_last[i] - bspl;
            let mut dsum = 0.0;
            for (j, kj) in k.iter().enumerate() {
                dsum += D[j] * kj[i];
            }
            cont[4][i] = h * dsum;
        }

        Ok(StepOutcome::Accepted {
            step: DenseStep {
                t0: self.t,
                t1: self.t + h,
                y0: self.y,
                y1,
                cont,
            },
            k_last,
            err,
        })
    }
}

enum StepOutcome<const N: usize> {
    Accepted {
        step: DenseStep<N>,
        k_last: [f64; N],
        err: f64,
    },
    Rejected {
        err: f64,
    },
    StageFailed,
}

/// Golden-section minimization of `f` over `[a, b]`.
pub fn golden_section_min<G: FnMut(f64) -> f64>(
    mut f: G,
    mut a: f64,
    mut b: f64,
    iterations: usize,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iterations {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
