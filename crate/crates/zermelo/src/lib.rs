//! Time-optimal navigation in planar drift fields.
//!
//! A vehicle moves with unit own speed while a weak drift `w` (|w| < 1
//! everywhere) pushes it around; the task is to steer from a start point
//! to a goal in minimum time. The drift turns travel time into a
//! direction-dependent norm on displacements — a Randers metric — and the
//! minimum-time paths are its geodesics. This crate builds that metric,
//! evaluates its geodesic spray (both the general tensor form and a
//! closed-form fast path for affine drifts), integrates the geodesic ODE,
//! and solves the start-to-goal problem by shooting over the launch
//! heading. A raw control-simulation oracle cross-validates the whole
//! chain without touching any of the metric machinery.
//!
//! Module map:
//!
//! * [`wind`] — drift fields: affine, gridded, analytic; weakness
//!   validation; affine fitting; the JSON spec format.
//! * [`randers`] — the metric, its Riemannian split, the drift tensors,
//!   the spray, and the finite-difference oracle.
//! * [`affine_spray`] — constants ledger and polynomial families that
//!   collapse the spray for affine drifts.
//! * [`geodesic`] — unit-speed integration with conservation monitoring,
//!   sampling, and CSV export.
//! * [`navigator`] — the shooting solver for start-to-goal queries.
//! * [`control`] — the independent direct-control oracle.
//! * [`verify`] — the fixture-based invariant report behind
//!   `zermelo verify`.
//! * [`cli`] — the command-line surface.
//!
//! ```
//! use zermelo::{AffineWind, Domain, NavigationProblem, Vec2, WindField};
//!
//! let domain = Domain::new(-5.0, 5.0, -5.0, 5.0)?;
//! let field: WindField =
//!     AffineWind::constant(Vec2::new(0.0, 0.5), domain, 0.99)?.into();
//! let problem = NavigationProblem::new(&field, Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0))?;
//! let solution = zermelo::solve_navigation(&problem)?;
//! // Crabbing against a half-strength crosswind costs 2/sqrt(3) time units.
//! assert!((solution.time - 2.0 / 3.0_f64.sqrt()).abs() < 1e-5);
//! # Ok::<(), zermelo::Error>(())
//! ```

pub mod affine_spray;
pub mod cli;
pub mod control;
pub mod error;
pub mod fixtures;
pub mod geodesic;
pub mod navigator;
pub mod ode;
pub mod randers;
pub mod rng;
pub mod vec2;
pub mod verify;
pub mod wind;

pub use affine_spray::{
    affine_constants, affine_polynomials, affine_spray_eval, AffineConstants, AffinePolynomials,
};
pub use control::{optimize_headings, simulate_control, HeadingSchedule};
pub use error::{Error, Result};
pub use geodesic::{
    integrate_geodesic, recover_heading, unit_initial_velocity, GeodesicState, IntegrationOptions,
    TerminalReason, Trajectory, TrajectorySample,
};
pub use navigator::{miss_distance, solve_navigation, NavigationProblem, NavigationSolution};
pub use randers::{
    contract, hessian_spray, metric_value, navigation_tensors, randers_data, zeta_spray,
    NavigationTensors, RandersData,
};
pub use vec2::{Mat2, Vec2};
pub use wind::{
    affine_fit, load_wind_spec, load_wind_spec_str, to_spec_json, AffineWind, AnalyticWind, Domain,
    GridWind, WeaknessReport, WindField, DEFAULT_MARGIN,
};
