//! Start-to-goal planning by shooting over the initial heading.
//!
//! In the plane, the unit-speed geodesic through a point is determined by
//! one number: the launch heading. The boundary-value problem therefore
//! reduces to a one-dimensional root find on the signed miss distance as a
//! function of heading. A coarse scan over 64 headings brackets every sign
//! change; each bracket is refined by a safeguarded secant iteration; the
//! fastest arrival among the refined candidates wins. The scan guards
//! against headings that are locally but not globally optimal in spatially
//! varying drifts.

use crate::error::{Error, Result};
use crate::geodesic::{
    integrate_geodesic, GoalSpec, IntegrationOptions, SprayEval, TerminalReason, Trajectory,
};
use crate::ode::{golden_section_min, Integrator, OdeOptions};
use crate::vec2::Vec2;
use crate::wind::WindField;

/// Headings scanned before bracketing.
const SCAN_HEADINGS: usize = 64;
/// Secant refinements allowed per bracket.
const MAX_REFINEMENTS: usize = 100;
/// Arrival-time ties closer than this break toward smaller |theta0|.
const TIE_BREAK: f64 = 1e-9;

/// A start-to-goal query against a drift field.
#[derive(Clone, Debug)]
pub struct NavigationProblem<'a> {
    pub field: &'a WindField,
    pub start: Vec2,
    pub goal: Vec2,
    /// A shot counts as arriving when it passes this close to the goal.
    pub goal_radius: f64,
    /// Shots are abandoned after this much travel time.
    pub t_ceiling: f64,
    /// Supremum of the drift norm over the domain.
    max_drift: f64,
}

impl<'a> NavigationProblem<'a> {
    /// Validates endpoints and weakness; defaults the goal radius to 1e-6
    /// and the time ceiling to twice the analytic upper bound
    /// `d / (1 - W)`.
    pub fn new(field: &'a WindField, start: Vec2, goal: Vec2) -> Result<NavigationProblem<'a>> {
        let domain = field.domain();
        if !domain.contains(start) {
            return Err(Error::PointOutsideDomain { point: start });
        }
        if !domain.contains(goal) {
            return Err(Error::PointOutsideDomain { point: goal });
        }
        if start == goal {
            return Err(Error::NoConvergence {
                detail: "start and goal coincide".into(),
            });
        }
        let report = field.validate_weak(field.margin())?;
        let max_drift = report.max_norm.min(field.margin());
        let d = start.dist(goal);
        Ok(NavigationProblem {
            field,
            start,
            goal,
            goal_radius: 1e-6,
            t_ceiling: 2.0 * d / (1.0 - max_drift),
            max_drift,
        })
    }

    pub fn with_goal_radius(mut self, radius: f64) -> NavigationProblem<'a> {
        assert!(radius > 0.0, "goal radius must be positive");
        self.goal_radius = radius;
        self
    }

    pub fn with_t_ceiling(mut self, t_ceiling: f64) -> NavigationProblem<'a> {
        assert!(t_ceiling > 0.0, "time ceiling must be positive");
        self.t_ceiling = t_ceiling;
        self
    }

    /// Analytic travel-time bracket `[d/(1+W), d/(1-W)]`.
    pub fn time_bracket(&self) -> (f64, f64) {
        let d = self.start.dist(self.goal);
        (d / (1.0 + self.max_drift), d / (1.0 - self.max_drift))
    }
}

/// Outcome of a single shot.
#[derive(Clone, Copy, Debug)]
pub struct ShotOutcome {
    /// Distance to the goal at closest approach, signed by which side of
    /// the start-goal line the closest point lies on.
    pub signed_miss: f64,
    /// Travel time at closest approach.
    pub time_at_closest: f64,
    /// True if the shot left the domain before the ceiling.
    pub exited: bool,
}

/// Integrate one shot and report the signed miss at closest approach.
/// Shots that leave the domain report the miss at (up to) the exit.
pub fn miss_distance(problem: &NavigationProblem, theta0: f64) -> Result<ShotOutcome> {
    let eval = SprayEval::new(problem.field);
    shoot(problem, &eval, theta0)
}

fn shoot(problem: &NavigationProblem, eval: &SprayEval, theta0: f64) -> Result<ShotOutcome> {
    let w0 = problem.field.eval(problem.start)?;
    let y0 = w0 + Vec2::from_angle(theta0);
    let domain = problem.field.domain();
    let goal = problem.goal;

    let mut integ = Integrator::new(
        |_t: f64, s: &[f64; 4]| eval.rhs(s),
        0.0,
        [problem.start.x, problem.start.y, y0.x, y0.y],
        OdeOptions::default(),
    );

    let mut best_d = problem.start.dist(goal);
    let mut best_t = 0.0;
    let mut best_p = problem.start;
    let mut exited = false;

    loop {
        let step = integ.step_toward(problem.t_ceiling)?;
        let point = |t: f64| {
            let s = step.eval(t);
            Vec2::new(s[0], s[1])
        };

        // Truncate the searchable span at the domain exit, if any.
        let end_inside = domain.contains(point(step.t1));
        let t_hi = if end_inside {
            step.t1
        } else {
            exited = true;
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
            lo
        };

        // Closest approach within the step: coarse scan plus refinement.
        let dist = |t: f64| point(t).dist(goal);
        let slots = 4;
        let mut slot_t = step.t0;
        let mut slot_d = f64::INFINITY;
        for i in 0..=slots {
            let t = step.t0 + (t_hi - step.t0) * i as f64 / slots as f64;
            let d = dist(t);
            if d < slot_d {
                slot_d = d;
                slot_t = t;
            }
        }
        let span = (t_hi - step.t0) / slots as f64;
        let (t_ref, d_ref) = golden_section_min(
            dist,
            (slot_t - span).max(step.t0),
            (slot_t + span).min(t_hi),
            45,
        );
        let (t_min, d_min) = if slot_d < d_ref {
            (slot_t, slot_d)
        } else {
            (t_ref, d_ref)
        };
        if d_min < best_d {
            best_d = d_min;
            best_t = t_min;
            best_p = point(t_min);
        }

        if exited || integ.t() >= problem.t_ceiling - 1e-13 * problem.t_ceiling.max(1.0) {
            break;
        }
    }

    let normal = (goal - problem.start).perp();
    let side = (best_p - goal).dot(normal);
    let signed = if side < 0.0 { -best_d } else { best_d };
    Ok(ShotOutcome {
        signed_miss: signed,
        time_at_closest: best_t,
        exited,
    })
}

/// One refined arrival.
#[derive(Clone, Copy, Debug)]
pub struct HeadingCandidate {
    pub theta0: f64,
    pub time: f64,
    pub miss: f64,
    pub refinements: usize,
}

/// The solved navigation problem.
#[derive(Clone, Debug)]
pub struct NavigationSolution {
    /// Optimal launch heading.
    pub theta0: f64,
    /// Travel time to the goal.
    pub time: f64,
    pub trajectory: Trajectory,
    /// Distance to the goal at closest approach of the returned path.
    pub residual_miss: f64,
    /// Number of shots integrated while solving.
    pub evaluations: usize,
    /// Every refined arrival, fastest first. More than one entry means
    /// several headings reach the goal; the solver returns the fastest
    /// found without claiming global optimality.
    pub candidates: Vec<HeadingCandidate>,
}

/// Scan, bracket, refine, and pick the fastest arrival.
pub fn solve_navigation(problem: &NavigationProblem) -> Result<NavigationSolution> {
    let eval = SprayEval::new(problem.field);
    let mut evaluations = 0usize;

    let mut scan = Vec::with_capacity(SCAN_HEADINGS);
    let mut all_exited = true;
    for k in 0..SCAN_HEADINGS {
        let theta = -std::f64::consts::PI + std::f64::consts::TAU * k as f64 / SCAN_HEADINGS as f64;
        let outcome = shoot(problem, &eval, theta)?;
        evaluations += 1;
        all_exited &= outcome.exited;
        scan.push((theta, outcome));
    }

    let mut candidates: Vec<HeadingCandidate> = Vec::new();
    for k in 0..SCAN_HEADINGS {
        let (th_a, out_a) = scan[k];
        let (mut th_b, out_b) = scan[(k + 1) % SCAN_HEADINGS];
        if k + 1 == SCAN_HEADINGS {
            th_b += std::f64::consts::TAU;
        }
        if out_a.signed_miss == 0.0 {
            candidates.push(HeadingCandidate {
                theta0: th_a,
                time: out_a.time_at_closest,
                miss: 0.0,
                refinements: 0,
            });
            continue;
        }
        if out_a.signed_miss * out_b.signed_miss >= 0.0 {
            continue;
        }
        if let Some(c) = refine_bracket(
            problem,
            &eval,
            (th_a, out_a),
            (th_b, out_b),
            &mut evaluations,
        )? {
            candidates.push(c);
        }
    }

    if candidates.is_empty() {
        return Err(if all_exited {
            Error::GoalUnreachable
        } else {
            Error::NoConvergence {
                detail: format!(
                    "no heading bracket reached the goal radius {:e}",
                    problem.goal_radius
                ),
            }
        });
    }

    candidates.sort_by(|a, b| {
        let dt = a.time - b.time;
        if dt.abs() < TIE_BREAK {
            a.theta0.abs().total_cmp(&b.theta0.abs())
        } else {
            dt.total_cmp(&0.0)
        }
    });
    let best = candidates[0];

    // Analytic travel-time bracket, padded by the slack a goal-radius miss
    // can introduce.
    let (lo, hi) = problem.time_bracket();
    let slack = problem.goal_radius / (1.0 - problem.max_drift) + 1e-9;
    if best.time < lo - slack || best.time > hi + slack {
        return Err(Error::NoConvergence {
            detail: format!(
                "arrival time {} violates the analytic bracket [{}, {}]",
                best.time, lo, hi
            ),
        });
    }

    let opts = IntegrationOptions {
        goal: Some(GoalSpec {
            center: problem.goal,
            radius: problem.goal_radius,
        }),
        ..IntegrationOptions::default()
    };
    let mut trajectory =
        integrate_geodesic(problem.field, problem.start, best.theta0, best.time, &opts)?;
    // The winning shot passes within the goal radius, so the goal event
    // normally fires; if roundoff leaves the endpoint a hair outside the
    // circle, the time-limit endpoint is the arrival.
    trajectory.terminal_reason = TerminalReason::GoalEvent;

    Ok(NavigationSolution {
        theta0: best.theta0,
        time: best.time,
        trajectory,
        residual_miss: best.miss,
        evaluations,
        candidates,
    })
}

/// Safeguarded secant iteration on the signed miss inside a sign-change
/// bracket. Falls back to bisection whenever the secant step leaves the
/// bracket or stalls.
fn refine_bracket(
    problem: &NavigationProblem,
    eval: &SprayEval,
    a: (f64, ShotOutcome),
    b: (f64, ShotOutcome),
    evaluations: &mut usize,
) -> Result<Option<HeadingCandidate>> {
    let (mut lo, mut m_lo) = (a.0, a.1.signed_miss);
    let mut hi = b.0;
    // Secant iterates start at the bracket ends, better end current.
    let a_better = a.1.signed_miss.abs() < b.1.signed_miss.abs();
    let (mut latest_theta, mut latest) = if a_better { a } else { b };
    let (mut prev_theta, mut prev_miss) = if a_better {
        (b.0, b.1.signed_miss)
    } else {
        (a.0, a.1.signed_miss)
    };

    for iteration in 0..MAX_REFINEMENTS {
        if latest.signed_miss.abs() <= problem.goal_radius {
            return Ok(Some(HeadingCandidate {
                theta0: normalize_angle(latest_theta),
                time: latest.time_at_closest,
                miss: latest.signed_miss.abs(),
                refinements: iteration,
            }));
        }

        let denom = latest.signed_miss - prev_miss;
        let secant = if denom.abs() > 1e-300 {
            latest_theta - latest.signed_miss * (latest_theta - prev_theta) / denom
        } else {
            f64::NAN
        };
        let theta_next = if secant.is_finite() && secant > lo && secant < hi {
            secant
        } else {
            0.5 * (lo + hi)
        };

        let outcome = shoot(problem, eval, theta_next)?;
        *evaluations += 1;

        prev_theta = latest_theta;
        prev_miss = latest.signed_miss;
        latest_theta = theta_next;
        latest = outcome;

        // Keep the sign change inside [lo, hi].
        if outcome.signed_miss * m_lo < 0.0 {
            hi = theta_next;
        } else {
            lo = theta_next;
            m_lo = outcome.signed_miss;
        }
    }

    if latest.signed_miss.abs() <= problem.goal_radius {
        return Ok(Some(HeadingCandidate {
            theta0: normalize_angle(latest_theta),
            time: latest.time_at_closest,
            miss: latest.signed_miss.abs(),
            refinements: MAX_REFINEMENTS,
        }));
    }
    Ok(None)
}

fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(std::f64::consts::TAU);
    if t > std::f64::consts::PI {
        t -= std::f64::consts::TAU;
    }
    t
}
