//! Error type shared across the crate.

use crate::vec2::Vec2;
use std::fmt;

/// Everything that can go wrong while building fields, evaluating metrics,
/// integrating geodesics, or solving navigation problems.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A query point lies outside the field's rectangular domain.
    PointOutsideDomain { point: Vec2 },
    /// The drift field reaches or exceeds the weakness margin somewhere.
    FieldNotWeak {
        location: Vec2,
        norm: f64,
        margin: f64,
    },
    /// A wind spec document (or stored trajectory) could not be parsed.
    ParseError(String),
    /// The drift at a single evaluation point has norm >= 1, so the metric
    /// is undefined there.
    StrongWind { norm: f64 },
    /// The metric was asked for the zero tangent vector.
    ZeroVector,
    /// A finite-difference stencil would leave the field domain.
    StencilOutsideDomain { point: Vec2 },
    /// The adaptive integrator could not take a step of acceptable size.
    StepSizeUnderflow { t: f64 },
    /// `recover_heading` was given a velocity that is not unit speed
    /// relative to the drift.
    NotOnIndicatrix { norm: f64 },
    /// An iterative solver hit its iteration cap without meeting tolerance.
    NoConvergence { detail: String },
    /// Every candidate shot left the domain before approaching the goal.
    GoalUnreachable,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::PointOutsideDomain { point } => {
                write!(
                    f,
                    "point ({}, {}) is outside the field domain",
                    point.x, point.y
                )
            }
            Error::FieldNotWeak {
                location,
                norm,
                margin,
            } => write!(
                f,
                "field is not weak: |w| = {} at ({}, {}) exceeds margin {}",
                norm, location.x, location.y, margin
            ),
            Error::ParseError(msg) => write!(f, "parse error: {}", msg),
            Error::StrongWind { norm } => {
                write!(f, "drift norm {} >= 1; the metric is undefined", norm)
            }
            Error::ZeroVector => write!(f, "the metric is undefined on the zero vector"),
            Error::StencilOutsideDomain { point } => write!(
                f,
                "finite-difference stencil around ({}, {}) leaves the domain",
                point.x, point.y
            ),
            Error::StepSizeUnderflow { t } => {
                write!(f, "integrator step size underflow at t = {}", t)
            }
            Error::NotOnIndicatrix { norm } => write!(
                f,
                "velocity is not on the unit indicatrix: |y - w| = {}",
                norm
            ),
            Error::NoConvergence { detail } => write!(f, "no convergence: {}", detail),
            Error::GoalUnreachable => {
                write!(f, "every shot exits the domain before nearing the goal")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
