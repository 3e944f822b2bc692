//! Independent verification path: raw control simulation.
//!
//! The steering system is `x' = (cos theta(t), sin theta(t)) + w(x)`. This
//! module simulates it for piecewise-constant heading schedules and
//! minimizes arrival time directly, with no Finsler machinery anywhere in
//! the chain: derivative-free coordinate descent over the total time and
//! the segment headings, with golden-section line searches and a linear
//! goal-miss penalty. Against the geodesic solver it is deliberately
//! crude -- that is what makes the cross-check meaningful.

use crate::error::{Error, Result};
use crate::geodesic::{GeodesicState, TerminalReason, Trajectory, TrajectorySample};
use crate::ode::{golden_section_min, Integrator, OdeOptions};
use crate::randers::metric_value;
use crate::vec2::Vec2;
use crate::wind::WindField;

/// Piecewise-constant steering plan with equal-duration segments.
#[derive(Clone, Debug)]
pub struct HeadingSchedule {
    pub total_time: f64,
    pub headings: Vec<f64>,
}

impl HeadingSchedule {
    pub fn new(total_time: f64, headings: Vec<f64>) -> Result<HeadingSchedule> {
        if total_time.is_nan()
            || total_time <= 0.0
            || headings.is_empty()
            || headings.iter().any(|h| !h.is_finite())
        {
            return Err(Error::ParseError(
                "schedule needs positive total time and at least one finite heading".into(),
            ));
        }
        Ok(HeadingSchedule {
            total_time,
            headings,
        })
    }

    pub fn constant(theta: f64, total_time: f64) -> Result<HeadingSchedule> {
        HeadingSchedule::new(total_time, vec![theta])
    }

    pub fn segment_count(&self) -> usize {
        self.headings.len()
    }

    pub fn segment_duration(&self) -> f64 {
        self.total_time / self.segment_count() as f64
    }

    /// Applied heading at time `t` (clamped to the schedule).
    pub fn heading_at(&self, t: f64) -> f64 {
        let i = (t / self.segment_duration()).floor() as usize;
        self.headings[i.min(self.headings.len() - 1)]
    }
}

/// Simulate the steering system under `schedule`. The trajectory records
/// the applied heading, and its metric value is identically 1 because the
/// steering vector has unit length by construction.
pub fn simulate_control(
    field: &WindField,
    x0: Vec2,
    schedule: &HeadingSchedule,
) -> Result<Trajectory> {
    if !field.domain().contains(x0) {
        return Err(Error::PointOutsideDomain { point: x0 });
    }
    let opts = OdeOptions::default();
    let stride = (schedule.total_time / 200.0).max(1e-6);
    let mut samples: Vec<TrajectorySample> = Vec::new();
    let mut exited = false;

    let mut t_base = 0.0;
    let mut x = x0;
    let push =
        |samples: &mut Vec<TrajectorySample>, field: &WindField, t: f64, x: Vec2, theta: f64| {
            let w = field.eval_extended(x);
            let u = Vec2::from_angle(theta);
            let y = w + u;
            let f = metric_value(w, y).unwrap_or(f64::NAN);
            samples.push(TrajectorySample {
                t,
                state: GeodesicState { x, y },
                f,
                theta,
            });
        };
    push(&mut samples, field, 0.0, x, schedule.headings[0]);

    'segments: for (i, &theta) in schedule.headings.iter().enumerate() {
        let u = Vec2::from_angle(theta);
        let t_end = if i + 1 == schedule.segment_count() {
            schedule.total_time
        } else {
            (i + 1) as f64 * schedule.segment_duration()
        };
        let mut integ = Integrator::new(
            |_t: f64, s: &[f64; 2]| {
                let w = field.eval_extended(Vec2::new(s[0], s[1]));
                Ok([u.x + w.x, u.y + w.y])
            },
            t_base,
            [x.x, x.y],
            opts,
        );
        let domain = field.domain();
        while integ.t() < t_end - 1e-13 * t_end.max(1.0) {
            let step = integ.step_toward(t_end)?;
            let point = |t: f64| {
                let s = step.eval(t);
                Vec2::new(s[0], s[1])
            };
            if !domain.contains(point(step.t1)) {
                // Bisect the exit and truncate.
                let mut lo = step.t0;
                let mut hi = step.t1;
                for _ in 0..80 {
                    if hi - lo <= 1e-14 * hi.abs().max(1.0) {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    if domain.contains(point(mid)) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                push(&mut samples, field, lo, point(lo), theta);
                exited = true;
                break 'segments;
            }
            let mut s = samples.last().map(|s| s.t).unwrap_or(0.0) + stride;
            while s < step.t1 - 1e-12 {
                if s > step.t0 {
                    push(&mut samples, field, s, point(s), theta);
                }
                s += stride;
            }
        }
        x = Vec2::new(integ.y()[0], integ.y()[1]);
        t_base = integ.t();
        if !exited {
            push(&mut samples, field, t_base, x, theta);
        }
    }

    Ok(Trajectory {
        samples,
        terminal_reason: if exited {
            TerminalReason::DomainExit
        } else {
            TerminalReason::TimeLimit
        },
    })
}

/// Endpoint of the simulated schedule, without building a trajectory.
/// Domain exits return the exit point and a flag.
fn schedule_endpoint(
    field: &WindField,
    x0: Vec2,
    total_time: f64,
    headings: &[f64],
    ode: &OdeOptions,
) -> Result<(Vec2, bool)> {
    let seg = total_time / headings.len() as f64;
    let domain = field.domain();
    let mut x = x0;
    let mut t_base = 0.0;
    for (i, &theta) in headings.iter().enumerate() {
        let u = Vec2::from_angle(theta);
        let t_end = if i + 1 == headings.len() {
            total_time
        } else {
            (i + 1) as f64 * seg
        };
        let mut integ = Integrator::new(
            |_t: f64, s: &[f64; 2]| {
                let w = field.eval_extended(Vec2::new(s[0], s[1]));
                Ok([u.x + w.x, u.y + w.y])
            },
            t_base,
            [x.x, x.y],
            *ode,
        );
        while integ.t() < t_end - 1e-13 * t_end.max(1.0) {
            let step = integ.step_toward(t_end)?;
            let end = Vec2::new(step.y1[0], step.y1[1]);
            if !domain.contains(end) {
                let point = |t: f64| {
                    let s = step.eval(t);
                    Vec2::new(s[0], s[1])
                };
                let mut lo = step.t0;
                let mut hi = step.t1;
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if domain.contains(point(mid)) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Ok((point(lo), true));
            }
        }
        x = Vec2::new(integ.y()[0], integ.y()[1]);
        t_base = integ.t();
    }
    Ok((x, false))
}

/// Tuning knobs for [`optimize_headings_with`].
#[derive(Clone, Copy, Debug)]
pub struct OptimizeOptions {
    /// Coordinate-descent sweeps allowed before giving up.
    pub max_sweeps: usize,
    /// Weight of the linear goal-miss penalty. Any value above the
    /// worst-case time sensitivity `1 / (1 - W)` makes the penalty exact,
    /// so the optimizer drives the miss toward zero instead of trading it
    /// for time.
    pub penalty_weight: f64,
    /// Golden-section evaluations per line search.
    pub line_search_evals: usize,
    /// Largest closest-approach miss accepted in the returned schedule.
    pub miss_cap: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            max_sweeps: 500,
            penalty_weight: 200.0,
            line_search_evals: 28,
            miss_cap: 1e-4,
        }
    }
}

/// Minimize arrival time over `(total_time, headings)` by coordinate
/// descent with golden-section line searches, starting from the
/// straight-line crab solution. Terminates when a full sweep improves the
/// penalized time by less than `tol`.
pub fn optimize_headings(
    field: &WindField,
    start: Vec2,
    goal: Vec2,
    segment_count: usize,
    tol: f64,
) -> Result<(HeadingSchedule, f64)> {
    optimize_headings_with(
        field,
        start,
        goal,
        segment_count,
        tol,
        &OptimizeOptions::default(),
    )
}

pub fn optimize_headings_with(
    field: &WindField,
    start: Vec2,
    goal: Vec2,
    segment_count: usize,
    tol: f64,
    opts: &OptimizeOptions,
) -> Result<(HeadingSchedule, f64)> {
    assert!(segment_count >= 1, "need at least one segment");
    assert!(tol > 0.0, "tolerance must be positive");
    if !field.domain().contains(start) {
        return Err(Error::PointOutsideDomain { point: start });
    }
    if !field.domain().contains(goal) {
        return Err(Error::PointOutsideDomain { point: goal });
    }

    // Simulation tolerance: comfortably below the optimizer's resolution.
    let ode = OdeOptions {
        abs_tol: 1e-11,
        rel_tol: 1e-11,
        ..OdeOptions::default()
    };

    // Crab initialization: aim so that steering plus the midpoint drift
    // points straight at the goal.
    let d = start.dist(goal);
    let e = (goal - start) / d;
    let w_mid = field.eval(0.5 * (start + goal))?;
    let ew = e.dot(w_mid);
    let net_speed = ew + (ew * ew + 1.0 - w_mid.norm_sq()).max(1e-12).sqrt();
    let theta0 = (e * net_speed - w_mid).angle();
    let t0 = d / net_speed;

    let mut total_time = t0;
    let mut headings = vec![theta0; segment_count];

    let merit = |total_time: f64, headings: &[f64]| -> Result<f64> {
        let (end, _exited) = schedule_endpoint(field, start, total_time, headings, &ode)?;
        Ok(total_time + opts.penalty_weight * end.dist(goal))
    };

    let mut current = merit(total_time, &headings)?;
    let mut radius_t = 0.5 * t0;
    let mut radius_h = 0.9;

    let mut converged = false;
    for _sweep in 0..opts.max_sweeps {
        let before = current;

        // Total time first; it couples to every heading.
        let lo = (total_time - radius_t).max(1e-3 * t0);
        let hi = total_time + radius_t;
        let (t_best, m_best) = golden_section_min(
            |t| merit(t, &headings).unwrap_or(f64::INFINITY),
            lo,
            hi,
            opts.line_search_evals,
        );
        if m_best < current {
            total_time = t_best;
            current = m_best;
        }

        for i in 0..segment_count {
            let center = headings[i];
            let mut trial = headings.clone();
            let (h_best, m_best) = golden_section_min(
                |h| {
                    trial[i] = h;
                    merit(total_time, &trial).unwrap_or(f64::INFINITY)
                },
                center - radius_h,
                center + radius_h,
                opts.line_search_evals,
            );
            if m_best < current {
                headings[i] = h_best;
                current = m_best;
            }
        }

        radius_t = (radius_t * 0.65).max(1e-9);
        radius_h = (radius_h * 0.65).max(1e-9);

        if before - current < tol {
            converged = true;
            break;
        }
    }

    if !converged {
        return Err(Error::NoConvergence {
            detail: format!(
                "coordinate descent did not settle in {} sweeps",
                opts.max_sweeps
            ),
        });
    }

    let schedule = HeadingSchedule::new(total_time, headings)?;
    let miss = closest_approach(field, start, goal, &schedule)?;
    if miss > opts.miss_cap {
        return Err(Error::NoConvergence {
            detail: format!("optimized schedule misses the goal by {miss:e}"),
        });
    }
    Ok((schedule, total_time))
}

/// Closest approach of the simulated schedule to `goal`.
pub fn closest_approach(
    field: &WindField,
    x0: Vec2,
    goal: Vec2,
    schedule: &HeadingSchedule,
) -> Result<f64> {
    let traj = simulate_control(field, x0, schedule)?;
    let coarse = traj
        .samples
        .iter()
        .fold(f64::INFINITY, |acc, s| acc.min(s.state.x.dist(goal)));
    // The endpoint is the interesting candidate for optimized schedules;
    // the sampled minimum covers interior passes.
    Ok(coarse.min(traj.endpoint().state.x.dist(goal)))
}
