//! Geodesic integration in unit-speed parameterization.
//!
//! A minimum-time path satisfies `x'' + 2 G(x, x') = 0`. Launching with
//! `x'(0) = w(x0) + (cos theta, sin theta)` puts the initial velocity on
//! the unit indicatrix, `F(x0, x'(0)) = 1`, and since `F` is conserved
//! along spray integral curves the curve parameter *is* elapsed travel
//! time. That conservation is also the built-in accuracy monitor: every
//! sample records `F`, and drift away from 1 measures integration error.
//!
//! The recorded heading is the control signal a pilot would steer: the
//! angle of `x' - w(x)`, unwrapped into a continuous signal.

use crate::affine_spray::{affine_constants, spray_with_constants, AffineConstants};
use crate::error::{Error, Result};
use crate::ode::{golden_section_min, DenseStep, Integrator, OdeOptions};
use crate::randers::{metric_value, zeta_spray, zeta_spray_parts};
use crate::vec2::Vec2;
use crate::wind::{AffineWind, WindField};

/// Position and velocity of the vehicle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicState {
    pub x: Vec2,
    pub y: Vec2,
}

/// One record along an integrated path.
#[derive(Clone, Copy, Debug)]
pub struct TrajectorySample {
    pub t: f64,
    pub state: GeodesicState,
    /// Metric value at the sample; stays 1 along unit-speed geodesics.
    pub f: f64,
    /// Unwrapped heading of `y - w(x)`.
    pub theta: f64,
}

/// Why integration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TerminalReason {
    TimeLimit,
    DomainExit,
    GoalEvent,
}

/// Time-stamped record of an integrated path.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub terminal_reason: TerminalReason,
}

impl Trajectory {
    pub fn endpoint(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectories are non-empty")
    }

    pub fn duration(&self) -> f64 {
        self.endpoint().t
    }

    /// Largest deviation of the recorded metric value from 1.
    pub fn max_f_deviation(&self) -> f64 {
        self.samples
            .iter()
            .fold(0.0f64, |acc, s| acc.max((s.f - 1.0).abs()))
    }

    /// CSV export: `t,x1,x2,y1,y2,F,theta`, 15 significant digits.
    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "t,x1,x2,y1,y2,F,theta")?;
        for s in &self.samples {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                fmt15(s.t),
                fmt15(s.state.x.x),
                fmt15(s.state.x.y),
                fmt15(s.state.y.x),
                fmt15(s.state.y.y),
                fmt15(s.f),
                fmt15(s.theta)
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// Fixed-width scientific formatting with 15 significant digits.
pub(crate) fn fmt15(v: f64) -> String {
    format!("{:.14e}", v)
}

/// Stop condition at a goal circle.
#[derive(Clone, Copy, Debug)]
pub struct GoalSpec {
    pub center: Vec2,
    pub radius: f64,
}

/// Controls for [`integrate_geodesic`].
#[derive(Clone, Copy, Debug)]
pub struct IntegrationOptions {
    pub ode: OdeOptions,
    /// Spacing of recorded samples along the parameter.
    pub sample_stride: f64,
    /// Optional early stop when the path enters a goal circle.
    pub goal: Option<GoalSpec>,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions {
            ode: OdeOptions::default(),
            sample_stride: 0.05,
            goal: None,
        }
    }
}

/// Initial velocity for heading `theta`: drift plus a unit steering
/// vector. Satisfies `F(x0, y0) = 1` by the indicatrix identity.
pub fn unit_initial_velocity(field: &WindField, x0: Vec2, theta: f64) -> Result<Vec2> {
    let w = field.eval(x0)?;
    Ok(w + Vec2::from_angle(theta))
}

/// Recover the steering angle from a unit-speed state by inverting
/// `y = w(x) + (cos theta, sin theta)`.
pub fn recover_heading(field: &WindField, state: &GeodesicState) -> Result<f64> {
    let u = state.y - field.eval(state.x)?;
    let norm = u.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NotOnIndicatrix { norm });
    }
    Ok(u.angle())
}

/// Spray lookup that snapshots the closed-form ledger for affine fields
/// and falls back to the general tensor chain otherwise. Evaluations use
/// the extended drift so that integrator trial stages slightly past the
/// boundary do not abort steps that will be truncated at the exit anyway.
pub(crate) enum SprayEval<'a> {
    Affine {
        wind: &'a AffineWind,
        constants: Box<AffineConstants>,
    },
    General {
        field: &'a WindField,
    },
}

impl<'a> SprayEval<'a> {
    pub fn new(field: &'a WindField) -> SprayEval<'a> {
        match field {
            WindField::Affine(wind) => SprayEval::Affine {
                wind,
                constants: Box::new(affine_constants(wind)),
            },
            _ => SprayEval::General { field },
        }
    }

    pub fn spray(&self, x: Vec2, y: Vec2) -> Result<Vec2> {
        match self {
            SprayEval::Affine { wind, constants } => {
                spray_with_constants(constants, x, wind.value_unchecked(x), y)
            }
            SprayEval::General { field } => {
                zeta_spray_parts(field.eval_extended(x), field.jacobian_extended(x), y)
            }
        }
    }

    pub fn rhs(&self, state: &[f64; 4]) -> Result<[f64; 4]> {
        let x = Vec2::new(state[0], state[1]);
        let y = Vec2::new(state[2], state[3]);
        let g = self.spray(x, y)?;
        Ok([y.x, y.y, -2.0 * g.x, -2.0 * g.y])
    }
}

/// Phase-space right-hand side `(dx, dy) = (y, -2 G(x, y))`. Affine
/// fields use the closed-form spray, everything else the general chain.
pub fn geodesic_rhs(field: &WindField, state: &GeodesicState) -> Result<(Vec2, Vec2)> {
    if !field.domain().contains(state.x) {
        return Err(Error::PointOutsideDomain { point: state.x });
    }
    let g = match field {
        WindField::Affine(wind) => crate::affine_spray::affine_spray_eval(wind, state.x, state.y)?,
        _ => zeta_spray(field, state.x, state.y)?,
    };
    Ok((state.y, g * -2.0))
}

/// Integrate the unit-speed geodesic launched from `x0` with heading
/// `theta0`, up to `t_max` or until the path leaves the domain (a
/// truncation, not an error) or enters the requested goal circle.
pub fn integrate_geodesic(
    field: &WindField,
    x0: Vec2,
    theta0: f64,
    t_max: f64,
    opts: &IntegrationOptions,
) -> Result<Trajectory> {
    assert!(t_max > 0.0, "t_max must be positive");
    assert!(opts.sample_stride > 0.0, "sample stride must be positive");
    let y0 = unit_initial_velocity(field, x0, theta0)?;
    let eval = SprayEval::new(field);
    let domain = field.domain();

    let mut integ = Integrator::new(
        |_t: f64, s: &[f64; 4]| eval.rhs(s),
        0.0,
        [x0.x, x0.y, y0.x, y0.y],
        opts.ode,
    );

    let mut recorder = SampleRecorder::new(field, opts.sample_stride);
    recorder.push(0.0, x0, y0);

    loop {
        let step = integ.step_toward(t_max)?;

        let exit_t = if domain.contains(point_of(&step.eval(step.t1))) {
            None
        } else {
            Some(locate_exit(&step, &domain))
        };

        let goal_t = opts.goal.and_then(|goal| {
            let cap = exit_t.unwrap_or(step.t1);
            locate_goal_entry(&step, &goal, cap)
        });

        match (goal_t, exit_t) {
            (Some(tg), _) => {
                recorder.record_until(&step, tg);
                recorder.push_state(tg, &step.eval(tg));
                return Ok(recorder.finish(TerminalReason::GoalEvent));
            }
            (None, Some(tx)) => {
                recorder.record_until(&step, tx);
                recorder.push_state(tx, &step.eval(tx));
                return Ok(recorder.finish(TerminalReason::DomainExit));
            }
            (None, None) => {
                recorder.record_until(&step, step.t1);
                if integ.t() >= t_max - 1e-13 * t_max.max(1.0) {
                    recorder.push_state(integ.t(), integ.y());
                    return Ok(recorder.finish(TerminalReason::TimeLimit));
                }
            }
        }
    }
}

fn point_of(state: &[f64; 4]) -> Vec2 {
    Vec2::new(state[0], state[1])
}

fn velocity_of(state: &[f64; 4]) -> Vec2 {
    Vec2::new(state[2], state[3])
}

/// Last parameter value still inside the domain, by bisection on the
/// dense interpolant. The step starts inside and ends outside.
fn locate_exit(step: &DenseStep<4>, domain: &crate::wind::Domain) -> f64 {
    let mut lo = step.t0;
    let mut hi = step.t1;
    for _ in 0..80 {
        if hi - lo <= 1e-14 * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if domain.contains(point_of(&step.eval(mid))) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Earliest parameter in `[t0, cap]` at which the path is inside the goal
/// circle, if any.
fn locate_goal_entry(step: &DenseStep<4>, goal: &GoalSpec, cap: f64) -> Option<f64> {
    let dist = |t: f64| point_of(&step.eval(t)).dist(goal.center);
    if dist(step.t0) <= goal.radius {
        return Some(step.t0);
    }
    // Coarse scan, then golden-section refinement around the best slot.
    let mut best_t = step.t0;
    let mut best_d = f64::INFINITY;
    let slots = 8;
    for i in 0..=slots {
        let t = step.t0 + (cap - step.t0) * i as f64 / slots as f64;
        let d = dist(t);
        if d < best_d {
            best_d = d;
            best_t = t;
        }
    }
    let span = (cap - step.t0) / slots as f64;
    let (tmin, dmin) = golden_section_min(
        dist,
        (best_t - span).max(step.t0),
        (best_t + span).min(cap),
        48,
    );
    let (tmin, dmin) = if best_d < dmin {
        (best_t, best_d)
    } else {
        (tmin, dmin)
    };
    if dmin > goal.radius {
        return None;
    }
    // Bisect the first crossing of the radius in [t0, tmin].
    let mut lo = step.t0;
    let mut hi = tmin;
    for _ in 0..80 {
        if hi - lo <= 1e-14 * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if dist(mid) <= goal.radius {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Accumulates stride samples from dense steps, recording the metric
/// value and the unwrapped heading per sample.
struct SampleRecorder<'a> {
    field: &'a WindField,
    stride: f64,
    next_t: f64,
    prev_theta: Option<f64>,
    samples: Vec<TrajectorySample>,
}

impl<'a> SampleRecorder<'a> {
    fn new(field: &'a WindField, stride: f64) -> Self {
        SampleRecorder {
            field,
            stride,
            next_t: stride,
            prev_theta: None,
            samples: Vec::new(),
        }
    }

    fn record_until(&mut self, step: &DenseStep<4>, t_end: f64) {
        while self.next_t < t_end - 1e-12 {
            if self.next_t >= step.t0 {
                let s = step.eval(self.next_t);
                self.push_state(self.next_t, &s);
            }
            self.next_t += self.stride;
        }
    }

    fn push_state(&mut self, t: f64, state: &[f64; 4]) {
        self.push(t, point_of(state), velocity_of(state));
    }

    fn push(&mut self, t: f64, x: Vec2, y: Vec2) {
        let w = self.field.eval_extended(x);
        let f = metric_value(w, y).unwrap_or(f64::NAN);
        let raw = (y - w).angle();
        let theta = match self.prev_theta {
            Some(prev) => {
                let k = ((prev - raw) / std::f64::consts::TAU).round();
                raw + std::f64::consts::TAU * k
            }
            None => raw,
        };
        self.prev_theta = Some(theta);
        self.samples.push(TrajectorySample {
            t,
            state: GeodesicState { x, y },
            f,
            theta,
        });
    }

    fn finish(self, terminal_reason: TerminalReason) -> Trajectory {
        Trajectory {
            samples: self.samples,
            terminal_reason,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec2::Mat2;
    use crate::wind::{AffineWind, Domain, DEFAULT_MARGIN};

    fn big_domain() -> Domain {
        Domain::new(-20.0, 20.0, -20.0, 20.0).unwrap()
    }

    #[test]
    fn initial_velocity_examples() {
        let zero: WindField = AffineWind::constant(Vec2::ZERO, big_domain(), DEFAULT_MARGIN)
            .unwrap()
            .into();
        assert!(
            (unit_initial_velocity(&zero, Vec2::ZERO, 0.0).unwrap() - Vec2::new(1.0, 0.0)).norm()
                < 1e-15
        );

        let down: WindField =
            AffineWind::constant(Vec2::new(0.5, 0.0), big_domain(), DEFAULT_MARGIN)
                .unwrap()
                .into();
        let y0 = unit_initial_velocity(&down, Vec2::ZERO, 0.0).unwrap();
        assert!((y0 - Vec2::new(1.5, 0.0)).norm() < 1e-15);
        let f = metric_value(down.eval(Vec2::ZERO).unwrap(), y0).unwrap();
        assert!((f - 1.0).abs() < 1e-14);

        let up: WindField = AffineWind::constant(Vec2::new(0.0, 0.5), big_domain(), DEFAULT_MARGIN)
            .unwrap()
            .into();
        let y0 = unit_initial_velocity(&up, Vec2::ZERO, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((y0 - Vec2::new(0.0, 1.5)).norm() < 1e-15);
    }

    #[test]
    fn rhs_is_straight_for_uniform_drift() {
        let field: WindField =
            AffineWind::constant(Vec2::new(0.3, 0.0), big_domain(), DEFAULT_MARGIN)
                .unwrap()
                .into();
        let state = GeodesicState {
            x: Vec2::new(1.0, 2.0),
            y: Vec2::new(1.3, 0.0),
        };
        let (dx, dy) = geodesic_rhs(&field, &state).unwrap();
        assert_eq!(dx, state.y);
        assert!(dy.norm() < 1e-15);
    }

    #[test]
    fn zero_wind_reaches_expected_endpoint() {
        let field: WindField = AffineWind::constant(Vec2::ZERO, big_domain(), DEFAULT_MARGIN)
            .unwrap()
            .into();
        let traj = integrate_geodesic(&field, Vec2::ZERO, 0.0, 2.0, &IntegrationOptions::default())
            .unwrap();
        assert_eq!(traj.terminal_reason, TerminalReason::TimeLimit);
        assert!((traj.endpoint().state.x - Vec2::new(2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn constant_wind_drifts_downstream() {
        let field: WindField =
            AffineWind::constant(Vec2::new(0.3, 0.0), big_domain(), DEFAULT_MARGIN)
                .unwrap()
                .into();
        let traj = integrate_geodesic(&field, Vec2::ZERO, 0.0, 1.0, &IntegrationOptions::default())
            .unwrap();
        assert!((traj.endpoint().state.x - Vec2::new(1.3, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn rotation_field_conserves_metric_to_long_times() {
        // Gentle enough that t = 10 paths stay inside the weak region: a
        // rotation drift is strong past r = 1/omega, and unit-speed paths
        // from r = 1 reach r ~ 11.
        let field: WindField = AffineWind::new(
            Vec2::ZERO,
            Mat2::new(0.0, 0.02, -0.02, 0.0),
            Domain::new(-22.0, 22.0, -22.0, 22.0).unwrap(),
            DEFAULT_MARGIN,
        )
        .unwrap()
        .into();
        for theta in [0.0, 1.1, -2.4] {
            let traj = integrate_geodesic(
                &field,
                Vec2::new(1.0, 0.0),
                theta,
                10.0,
                &IntegrationOptions::default(),
            )
            .unwrap();
            assert_eq!(traj.terminal_reason, TerminalReason::TimeLimit);
            assert!(
                traj.max_f_deviation() <= 1e-8,
                "F drift {:e}",
                traj.max_f_deviation()
            );
            // The navigation identity |y - w| = 1 is the same statement.
            for s in &traj.samples {
                let w = field.eval(s.state.x).unwrap();
                assert!(((s.state.y - w).norm() - 1.0).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn domain_exit_truncates_on_boundary() {
        let field: WindField = AffineWind::constant(
            Vec2::ZERO,
            Domain::new(0.0, 1.0, -1.0, 1.0).unwrap(),
            DEFAULT_MARGIN,
        )
        .unwrap()
        .into();
        let traj = integrate_geodesic(
            &field,
            Vec2::new(0.5, 0.0),
            0.0,
            5.0,
            &IntegrationOptions::default(),
        )
        .unwrap();
        assert_eq!(traj.terminal_reason, TerminalReason::DomainExit);
        let end = traj.endpoint();
        assert!((end.state.x.x - 1.0).abs() < 1e-9);
        assert!((end.t - 0.5).abs() < 1e-9);
    }

    #[test]
    fn goal_event_stops_at_the_circle() {
        let field: WindField = AffineWind::constant(Vec2::ZERO, big_domain(), DEFAULT_MARGIN)
            .unwrap()
            .into();
        let opts = IntegrationOptions {
            goal: Some(GoalSpec {
                center: Vec2::new(1.0, 0.0),
                radius: 1e-9,
            }),
            ..IntegrationOptions::default()
        };
        let traj = integrate_geodesic(&field, Vec2::ZERO, 0.0, 5.0, &opts).unwrap();
        assert_eq!(traj.terminal_reason, TerminalReason::GoalEvent);
        assert!((traj.duration() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn heading_recovery_examples() {
        let field: WindField =
            AffineWind::constant(Vec2::new(0.5, 0.0), big_domain(), DEFAULT_MARGIN)
                .unwrap()
                .into();
        let state = GeodesicState {
            x: Vec2::ZERO,
            y: Vec2::new(1.5, 0.0),
        };
        assert!(recover_heading(&field, &state).unwrap().abs() < 1e-15);

        let state = GeodesicState {
            x: Vec2::ZERO,
            y: Vec2::new(0.5, 1.0),
        };
        assert!(
            (recover_heading(&field, &state).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15
        );

        let bad = GeodesicState {
            x: Vec2::ZERO,
            y: Vec2::new(2.0, 0.0),
        };
        assert!(matches!(
            recover_heading(&field, &bad),
            Err(Error::NotOnIndicatrix { .. })
        ));
    }

    #[test]
    fn stored_headings_match_recovery_and_are_continuous() {
        let field: WindField = AffineWind::new(
            Vec2::ZERO,
            Mat2::new(0.0, 0.1, -0.1, 0.0),
            Domain::new(-6.9, 6.9, -6.9, 6.9).unwrap(),
            DEFAULT_MARGIN,
        )
        .unwrap()
        .into();
        let traj = integrate_geodesic(
            &field,
            Vec2::new(1.0, 0.0),
            2.0,
            5.0,
            &IntegrationOptions::default(),
        )
        .unwrap();
        let mut prev: Option<f64> = None;
        for s in &traj.samples {
            let recovered = recover_heading(&field, &s.state).unwrap();
            let diff = (s.theta - recovered) / std::f64::consts::TAU;
            assert!((diff - diff.round()).abs() < 1e-8);
            if let Some(p) = prev {
                assert!((s.theta - p).abs() < 1.0, "heading jumped");
            }
            prev = Some(s.theta);
        }
    }

    #[test]
    fn straight_paths_have_zero_triangle_area() {
        let field: WindField =
            AffineWind::constant(Vec2::new(0.2, 0.1), big_domain(), DEFAULT_MARGIN)
                .unwrap()
                .into();
        let traj = integrate_geodesic(&field, Vec2::ZERO, 0.7, 3.0, &IntegrationOptions::default())
            .unwrap();
        let pts: Vec<Vec2> = traj.samples.iter().map(|s| s.state.x).collect();
        for w in pts.windows(3) {
            let area = 0.5 * ((w[1] - w[0]).perp().dot(w[2] - w[0])).abs();
            assert!(area <= 1e-10);
        }
    }

    #[test]
    fn sample_times_increase_strictly_from_zero() {
        let field: WindField =
            AffineWind::constant(Vec2::new(0.2, -0.1), big_domain(), DEFAULT_MARGIN)
                .unwrap()
                .into();
        let traj = integrate_geodesic(&field, Vec2::ZERO, 1.2, 1.7, &IntegrationOptions::default())
            .unwrap();
        assert_eq!(traj.samples[0].t, 0.0);
        for w in traj.samples.windows(2) {
            assert!(w[1].t > w[0].t);
        }
    }

    #[test]
    fn rhs_matches_both_spray_routes_on_rotation() {
        let field: WindField = AffineWind::new(
            Vec2::ZERO,
            Mat2::new(0.0, 0.1, -0.1, 0.0),
            Domain::new(-6.9, 6.9, -6.9, 6.9).unwrap(),
            DEFAULT_MARGIN,
        )
        .unwrap()
        .into();
        let state = GeodesicState {
            x: Vec2::new(1.0, 0.0),
            y: Vec2::new(1.0, 0.0),
        };
        let (_, dy) = geodesic_rhs(&field, &state).unwrap();
        let WindField::Affine(wind) = &field else {
            unreachable!()
        };
        let closed = crate::affine_spray::affine_spray_eval(wind, state.x, state.y).unwrap();
        assert!((dy + closed * 2.0).norm() < 1e-15);
        let oracle = crate::randers::hessian_spray(&field, state.x, state.y).unwrap();
        assert!((dy + oracle * 2.0).norm() <= 1e-6 * dy.norm().max(1.0));
    }

    #[test]
    fn csv_export_shape() {
        let field: WindField = AffineWind::constant(Vec2::ZERO, big_domain(), DEFAULT_MARGIN)
            .unwrap()
            .into();
        let traj = integrate_geodesic(&field, Vec2::ZERO, 0.0, 0.2, &IntegrationOptions::default())
            .unwrap();
        let csv = traj.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,x1,x2,y1,y2,F,theta");
        let first = lines.next().unwrap();
        assert_eq!(first.split(',').count(), 7);
        // 15 significant digits in scientific notation.
        assert!(first.split(',').next().unwrap().contains("e"));
    }

    #[test]
    fn tightening_tolerances_barely_moves_endpoint() {
        let field: WindField = AffineWind::new(
            Vec2::ZERO,
            Mat2::new(0.0, 0.1, -0.1, 0.0),
            Domain::new(-6.9, 6.9, -6.9, 6.9).unwrap(),
            DEFAULT_MARGIN,
        )
        .unwrap()
        .into();
        let run = |tol: f64| {
            let opts = IntegrationOptions {
                ode: OdeOptions {
                    abs_tol: tol,
                    rel_tol: tol,
                    ..OdeOptions::default()
                },
                ..IntegrationOptions::default()
            };
            integrate_geodesic(&field, Vec2::new(1.0, 0.0), 0.5, 5.0, &opts)
                .unwrap()
                .endpoint()
                .state
                .x
        };
        assert!((run(1e-10) - run(5e-11)).norm() <= 1e-8);
    }
}
