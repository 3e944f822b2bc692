//! Drift fields on rectangular planar domains.
//!
//! A drift field `w` pushes the vehicle around while it steers with unit own
//! speed. Everything downstream (the metric, the sprays, the solvers)
//! requires the field to be *weak*, `|w| < 1`, so that headway can be made
//! in every direction. Three representations are supported:
//!
//! * [`AffineWind`]: `w(x) = c + A x`, exact evaluation and derivatives.
//! * [`GridWind`]: sampled components with bilinear interpolation.
//! * [`AnalyticWind`]: closures, for tests and custom models.
//!
//! For an affine field `x -> |c + A x|` is convex, so its maximum over a
//! rectangle sits at one of the four corners; weakness is validated exactly
//! there. Bilinear interpolation takes convex combinations of corner
//! samples, so grids that are weak at every sample are weak everywhere.

use crate::error::{Error, Result};
use crate::vec2::{Mat2, Vec2};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Axis-aligned rectangle `[x1_min, x1_max] x [x2_min, x2_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    pub x1_min: f64,
    pub x1_max: f64,
    pub x2_min: f64,
    pub x2_max: f64,
}

impl Domain {
    pub fn new(x1_min: f64, x1_max: f64, x2_min: f64, x2_max: f64) -> Result<Domain> {
        if !(x1_min < x1_max && x2_min < x2_max)
            || ![x1_min, x1_max, x2_min, x2_max]
                .iter()
                .all(|v| v.is_finite())
        {
            return Err(Error::ParseError(format!(
                "invalid domain rectangle [{}, {}] x [{}, {}]",
                x1_min, x1_max, x2_min, x2_max
            )));
        }
        Ok(Domain {
            x1_min,
            x1_max,
            x2_min,
            x2_max,
        })
    }

    /// Boundary points count as inside.
    pub fn contains(&self, x: Vec2) -> bool {
        x.x >= self.x1_min && x.x <= self.x1_max && x.y >= self.x2_min && x.y <= self.x2_max
    }

    /// True if the whole of `other` lies inside `self`.
    pub fn contains_rect(&self, other: &Domain) -> bool {
        other.x1_min >= self.x1_min
            && other.x1_max <= self.x1_max
            && other.x2_min >= self.x2_min
            && other.x2_max <= self.x2_max
    }

    pub fn corners(&self) -> [Vec2; 4] {
        [
            Vec2::new(self.x1_min, self.x2_min),
            Vec2::new(self.x1_max, self.x2_min),
            Vec2::new(self.x1_min, self.x2_max),
            Vec2::new(self.x1_max, self.x2_max),
        ]
    }

    pub fn center(&self) -> Vec2 {
        Vec2::new(
            0.5 * (self.x1_min + self.x1_max),
            0.5 * (self.x2_min + self.x2_max),
        )
    }

    pub fn clamp(&self, x: Vec2) -> Vec2 {
        Vec2::new(
            x.x.clamp(self.x1_min, self.x1_max),
            x.y.clamp(self.x2_min, self.x2_max),
        )
    }
}

/// Default weakness margin. Kept below 1 so that `rho = 1 - |w|^2`, which
/// appears squared in denominators, stays well conditioned.
pub const DEFAULT_MARGIN: f64 = 0.99;

/// Result of a weakness scan: the largest drift norm found and where.
#[derive(Clone, Copy, Debug)]
pub struct WeaknessReport {
    pub max_norm: f64,
    pub location: Vec2,
    pub margin: f64,
}

/// Drift `w(x) = c + A x` on a rectangle.
///
/// Rows of `a` hold the linear coefficients of each component: the first
/// component is `c.x + a.m[0][0] * x1 + a.m[0][1] * x2`, and likewise for
/// the second.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineWind {
    c: Vec2,
    a: Mat2,
    domain: Domain,
    margin: f64,
}

impl AffineWind {
    /// Validates weakness at the four domain corners (the maximum of the
    /// convex map `x -> |c + A x|` over a rectangle is attained there).
    pub fn new(c: Vec2, a: Mat2, domain: Domain, margin: f64) -> Result<AffineWind> {
        check_margin(margin)?;
        let field = AffineWind {
            c,
            a,
            domain,
            margin,
        };
        let report = field.weakness_report();
        if report.max_norm > margin {
            return Err(Error::FieldNotWeak {
                location: report.location,
                norm: report.max_norm,
                margin,
            });
        }
        Ok(field)
    }

    pub fn constant(c: Vec2, domain: Domain, margin: f64) -> Result<AffineWind> {
        AffineWind::new(c, Mat2::ZERO, domain, margin)
    }

    pub fn c(&self) -> Vec2 {
        self.c
    }

    pub fn a(&self) -> Mat2 {
        self.a
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// The affine formula extends to the whole plane.
    pub fn value_unchecked(&self, x: Vec2) -> Vec2 {
        self.c + self.a.mul_vec(x)
    }

    pub fn weakness_report(&self) -> WeaknessReport {
        let mut best = WeaknessReport {
            max_norm: f64::NEG_INFINITY,
            location: self.domain.center(),
            margin: self.margin,
        };
        for corner in self.domain.corners() {
            let n = self.value_unchecked(corner).norm();
            if n > best.max_norm {
                best.max_norm = n;
                best.location = corner;
            }
        }
        best
    }
}

/// Sampled drift on a uniform grid, bilinearly interpolated.
///
/// `u` and `v` hold the two drift components in row-major order: row index
/// runs along `x2`, column index along `x1`, so `u[row][col]` is the first
/// component at `origin + (col * spacing.x, row * spacing.y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridWind {
    origin: Vec2,
    spacing: Vec2,
    ncols: usize,
    nrows: usize,
    u: Vec<f64>,
    v: Vec<f64>,
    domain: Domain,
    margin: f64,
}

impl GridWind {
    pub fn new(
        origin: Vec2,
        spacing: Vec2,
        u: Vec<Vec<f64>>,
        v: Vec<Vec<f64>>,
        margin: f64,
    ) -> Result<GridWind> {
        check_margin(margin)?;
        if !(spacing.x > 0.0 && spacing.y > 0.0) {
            return Err(Error::ParseError(format!(
                "grid spacing must be positive, got ({}, {})",
                spacing.x, spacing.y
            )));
        }
        let nrows = u.len();
        if nrows < 2 || v.len() != nrows {
            return Err(Error::ParseError(
                "grid needs at least 2 rows and matching u/v shapes".into(),
            ));
        }
        let ncols = u[0].len();
        if ncols < 2 {
            return Err(Error::ParseError("grid needs at least 2 columns".into()));
        }
        for row in u.iter().chain(v.iter()) {
            if row.len() != ncols {
                return Err(Error::ParseError("ragged grid rows".into()));
            }
            if row.iter().any(|s| !s.is_finite()) {
                return Err(Error::ParseError("non-finite grid sample".into()));
            }
        }
        let domain = Domain::new(
            origin.x,
            origin.x + spacing.x * (ncols - 1) as f64,
            origin.y,
            origin.y + spacing.y * (nrows - 1) as f64,
        )?;
        let field = GridWind {
            origin,
            spacing,
            ncols,
            nrows,
            u: u.into_iter().flatten().collect(),
            v: v.into_iter().flatten().collect(),
            domain,
            margin,
        };
        let report = field.weakness_report();
        if report.max_norm > margin {
            return Err(Error::FieldNotWeak {
                location: report.location,
                norm: report.max_norm,
                margin,
            });
        }
        Ok(field)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    pub fn spacing(&self) -> Vec2 {
        self.spacing
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    fn sample(&self, row: usize, col: usize) -> Vec2 {
        let i = row * self.ncols + col;
        Vec2::new(self.u[i], self.v[i])
    }

    pub fn samples(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        (0..self.nrows).flat_map(move |row| {
            (0..self.ncols).map(move |col| {
                let p = Vec2::new(
                    self.origin.x + self.spacing.x * col as f64,
                    self.origin.y + self.spacing.y * row as f64,
                );
                (p, self.sample(row, col))
            })
        })
    }

    /// Containing cell index and local coordinates. Queries exactly on an
    /// interior grid line use the cell to the lower left, so each point
    /// belongs to exactly one cell; outside the grid the nearest boundary
    /// cell extends linearly (local coordinates leave [0, 1]).
    fn cell_and_local(&self, x: Vec2) -> (usize, usize, f64, f64) {
        let fx = (x.x - self.origin.x) / self.spacing.x;
        let fy = (x.y - self.origin.y) / self.spacing.y;
        let pick = |f: f64, cells: usize| -> (usize, f64) {
            let mut i = f.floor();
            if i == f && i > 0.0 {
                i -= 1.0; // lower-left rule on interior edges
            }
            let i = (i.max(0.0) as usize).min(cells - 1);
            (i, f - i as f64)
        };
        let (col, s) = pick(fx, self.ncols - 1);
        let (row, t) = pick(fy, self.nrows - 1);
        (row, col, s, t)
    }

    /// Bilinear interpolation; extrapolates linearly outside the grid.
    pub fn value_unchecked(&self, x: Vec2) -> Vec2 {
        let (row, col, s, t) = self.cell_and_local(x);
        let f00 = self.sample(row, col);
        let f10 = self.sample(row, col + 1);
        let f01 = self.sample(row + 1, col);
        let f11 = self.sample(row + 1, col + 1);
        f00 * ((1.0 - s) * (1.0 - t))
            + f10 * (s * (1.0 - t))
            + f01 * ((1.0 - s) * t)
            + f11 * (s * t)
    }

    /// Exact derivative of the bilinear interpolant in the containing cell.
    pub fn jacobian_unchecked(&self, x: Vec2) -> Mat2 {
        let (row, col, s, t) = self.cell_and_local(x);
        let f00 = self.sample(row, col);
        let f10 = self.sample(row, col + 1);
        let f01 = self.sample(row + 1, col);
        let f11 = self.sample(row + 1, col + 1);
        let dx = ((f10 - f00) * (1.0 - t) + (f11 - f01) * t) / self.spacing.x;
        let dy = ((f01 - f00) * (1.0 - s) + (f11 - f10) * s) / self.spacing.y;
        Mat2::new(dx.x, dy.x, dx.y, dy.y)
    }

    pub fn weakness_report(&self) -> WeaknessReport {
        let mut best = WeaknessReport {
            max_norm: f64::NEG_INFINITY,
            location: self.origin,
            margin: self.margin,
        };
        for (p, w) in self.samples() {
            let n = w.norm();
            if n > best.max_norm {
                best.max_norm = n;
                best.location = p;
            }
        }
        best
    }
}

type ValueFn = dyn Fn(Vec2) -> Vec2 + Send + Sync;
type JacobianFn = dyn Fn(Vec2) -> Mat2 + Send + Sync;

/// Closure-backed drift for tests and custom models. Weakness can only be
/// checked by sampling, so construction scans a dense grid rather than
/// certifying the supremum.
#[derive(Clone)]
pub struct AnalyticWind {
    value: Arc<ValueFn>,
    jacobian: Option<Arc<JacobianFn>>,
    domain: Domain,
    margin: f64,
}

/// Sampling resolution used to screen analytic fields for weakness.
const ANALYTIC_SCAN: usize = 33;

impl AnalyticWind {
    pub fn new<F>(value: F, domain: Domain, margin: f64) -> Result<AnalyticWind>
    where
        F: Fn(Vec2) -> Vec2 + Send + Sync + 'static,
    {
        check_margin(margin)?;
        let field = AnalyticWind {
            value: Arc::new(value),
            jacobian: None,
            domain,
            margin,
        };
        let report = field.weakness_report();
        if report.max_norm > margin {
            return Err(Error::FieldNotWeak {
                location: report.location,
                norm: report.max_norm,
                margin,
            });
        }
        Ok(field)
    }

    /// Attach an exact Jacobian; otherwise central differences are used.
    pub fn with_jacobian<J>(mut self, jacobian: J) -> AnalyticWind
    where
        J: Fn(Vec2) -> Mat2 + Send + Sync + 'static,
    {
        self.jacobian = Some(Arc::new(jacobian));
        self
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn value_unchecked(&self, x: Vec2) -> Vec2 {
        (self.value)(x)
    }

    pub fn jacobian_unchecked(&self, x: Vec2) -> Mat2 {
        if let Some(jac) = &self.jacobian {
            return jac(x);
        }
        let h = 1e-6 * x.norm().max(1.0);
        let dx = (self.value_unchecked(x + Vec2::new(h, 0.0))
            - self.value_unchecked(x - Vec2::new(h, 0.0)))
            / (2.0 * h);
        let dy = (self.value_unchecked(x + Vec2::new(0.0, h))
            - self.value_unchecked(x - Vec2::new(0.0, h)))
            / (2.0 * h);
        Mat2::new(dx.x, dy.x, dx.y, dy.y)
    }

    pub fn weakness_report(&self) -> WeaknessReport {
        let mut best = WeaknessReport {
            max_norm: f64::NEG_INFINITY,
            location: self.domain.center(),
            margin: self.margin,
        };
        let d = self.domain;
        for i in 0..ANALYTIC_SCAN {
            for j in 0..ANALYTIC_SCAN {
                let p = Vec2::new(
                    d.x1_min + (d.x1_max - d.x1_min) * i as f64 / (ANALYTIC_SCAN - 1) as f64,
                    d.x2_min + (d.x2_max - d.x2_min) * j as f64 / (ANALYTIC_SCAN - 1) as f64,
                );
                let n = self.value_unchecked(p).norm();
                if n > best.max_norm {
                    best.max_norm = n;
                    best.location = p;
                }
            }
        }
        best
    }
}

impl fmt::Debug for AnalyticWind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticWind")
            .field("domain", &self.domain)
            .field("margin", &self.margin)
            .field("has_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

/// A drift field of any representation.
#[derive(Clone, Debug)]
pub enum WindField {
    Affine(AffineWind),
    Grid(GridWind),
    Analytic(AnalyticWind),
}

impl From<AffineWind> for WindField {
    fn from(w: AffineWind) -> Self {
        WindField::Affine(w)
    }
}

impl From<GridWind> for WindField {
    fn from(w: GridWind) -> Self {
        WindField::Grid(w)
    }
}

impl From<AnalyticWind> for WindField {
    fn from(w: AnalyticWind) -> Self {
        WindField::Analytic(w)
    }
}

impl WindField {
    pub fn domain(&self) -> Domain {
        match self {
            WindField::Affine(f) => f.domain(),
            WindField::Grid(f) => f.domain(),
            WindField::Analytic(f) => f.domain(),
        }
    }

    pub fn margin(&self) -> f64 {
        match self {
            WindField::Affine(f) => f.margin(),
            WindField::Grid(f) => f.margin(),
            WindField::Analytic(f) => f.margin(),
        }
    }

    /// Drift vector at `x`.
    pub fn eval(&self, x: Vec2) -> Result<Vec2> {
        if !self.domain().contains(x) {
            return Err(Error::PointOutsideDomain { point: x });
        }
        Ok(self.eval_extended(x))
    }

    /// Drift Jacobian `d w^i / d x_j` at `x`. Affine fields return their
    /// coefficient matrix exactly; grid fields return the derivative of the
    /// bilinear interpolant of the containing cell (lower-left rule on
    /// interior edges).
    pub fn jacobian(&self, x: Vec2) -> Result<Mat2> {
        if !self.domain().contains(x) {
            return Err(Error::PointOutsideDomain { point: x });
        }
        Ok(self.jacobian_extended(x))
    }

    /// Evaluate without the domain check; affine formulas extend to the
    /// plane, grids extrapolate their boundary cells, closures are trusted.
    /// Integrator stages use this so that trial points slightly past the
    /// boundary do not abort a step that will be truncated anyway.
    pub(crate) fn eval_extended(&self, x: Vec2) -> Vec2 {
        match self {
            WindField::Affine(f) => f.value_unchecked(x),
            WindField::Grid(f) => f.value_unchecked(x),
            WindField::Analytic(f) => f.value_unchecked(x),
        }
    }

    pub(crate) fn jacobian_extended(&self, x: Vec2) -> Mat2 {
        match self {
            WindField::Affine(f) => f.a(),
            WindField::Grid(f) => f.jacobian_unchecked(x),
            WindField::Analytic(f) => f.jacobian_unchecked(x),
        }
    }

    /// Largest drift norm over the domain: corner maximum for affine
    /// fields, sample maximum for grids, dense scan for closures.
    pub fn weakness_report(&self) -> WeaknessReport {
        match self {
            WindField::Affine(f) => f.weakness_report(),
            WindField::Grid(f) => f.weakness_report(),
            WindField::Analytic(f) => f.weakness_report(),
        }
    }

    /// Passes iff the supremum of `|w|` over the domain is at most `margin`.
    pub fn validate_weak(&self, margin: f64) -> Result<WeaknessReport> {
        check_margin(margin)?;
        let mut report = self.weakness_report();
        report.margin = margin;
        if report.max_norm > margin {
            return Err(Error::FieldNotWeak {
                location: report.location,
                norm: report.max_norm,
                margin,
            });
        }
        Ok(report)
    }

    /// The field `-w`, on the same domain. Reversing the drift swaps the
    /// roles of start and goal in the navigation problem.
    pub fn negated(&self) -> WindField {
        match self {
            WindField::Affine(f) => WindField::Affine(AffineWind {
                c: -f.c,
                a: -f.a,
                domain: f.domain,
                margin: f.margin,
            }),
            WindField::Grid(f) => {
                let mut g = f.clone();
                for s in g.u.iter_mut().chain(g.v.iter_mut()) {
                    *s = -*s;
                }
                WindField::Grid(g)
            }
            WindField::Analytic(f) => {
                let inner = f.value.clone();
                let jac = f.jacobian.clone();
                let mut out = AnalyticWind {
                    value: Arc::new(move |x| -(inner)(x)),
                    jacobian: None,
                    domain: f.domain,
                    margin: f.margin,
                };
                if let Some(j) = jac {
                    out.jacobian = Some(Arc::new(move |x| -(j)(x)));
                }
                WindField::Analytic(out)
            }
        }
    }
}

fn check_margin(margin: f64) -> Result<()> {
    if !(margin > 0.0 && margin <= 1.0) {
        return Err(Error::ParseError(format!(
            "weakness margin must lie in (0, 1], got {}",
            margin
        )));
    }
    Ok(())
}

/// Least-squares affine fit of `field` over a uniform sample grid on
/// `rect`. Returns the fitted field and the largest fit error at the
/// sample points. The fit is re-validated for weakness on `rect` with the
/// source field's margin.
pub fn affine_fit(
    field: &WindField,
    rect: Domain,
    samples_per_axis: usize,
) -> Result<(AffineWind, f64)> {
    assert!(samples_per_axis >= 2, "need at least 2 samples per axis");
    if !field.domain().contains_rect(&rect) {
        return Err(Error::PointOutsideDomain {
            point: Vec2::new(rect.x1_min, rect.x2_min),
        });
    }

    // Fit in rectangle-centered coordinates for conditioning, then map the
    // coefficients back.
    let mid = rect.center();
    let half = Vec2::new(
        0.5 * (rect.x1_max - rect.x1_min),
        0.5 * (rect.x2_max - rect.x2_min),
    );

    let n = samples_per_axis;
    let mut gram = [[0.0f64; 3]; 3];
    let mut rhs_u = [0.0f64; 3];
    let mut rhs_v = [0.0f64; 3];
    let mut points = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let p = Vec2::new(
                rect.x1_min + (rect.x1_max - rect.x1_min) * i as f64 / (n - 1) as f64,
                rect.x2_min + (rect.x2_max - rect.x2_min) * j as f64 / (n - 1) as f64,
            );
            let w = field.eval(p)?;
            let basis = [1.0, (p.x - mid.x) / half.x, (p.y - mid.y) / half.y];
            for r in 0..3 {
                for c in 0..3 {
                    gram[r][c] += basis[r] * basis[c];
                }
                rhs_u[r] += basis[r] * w.x;
                rhs_v[r] += basis[r] * w.y;
            }
            points.push((p, w));
        }
    }

    let bu = solve3(gram, rhs_u).ok_or_else(|| Error::NoConvergence {
        detail: "singular normal equations in affine fit".into(),
    })?;
    let bv = solve3(gram, rhs_v).ok_or_else(|| Error::NoConvergence {
        detail: "singular normal equations in affine fit".into(),
    })?;

    let a = Mat2::new(
        bu[1] / half.x,
        bu[2] / half.y,
        bv[1] / half.x,
        bv[2] / half.y,
    );
    let c = Vec2::new(
        bu[0] - bu[1] * mid.x / half.x - bu[2] * mid.y / half.y,
        bv[0] - bv[1] * mid.x / half.x - bv[2] * mid.y / half.y,
    );

    let fitted = AffineWind::new(c, a, rect, field.margin())?;
    let mut residual = 0.0f64;
    for (p, w) in points {
        residual = residual.max((fitted.value_unchecked(p) - w).norm());
    }
    Ok((fitted, residual))
}

/// Gaussian elimination with partial pivoting on a 3x3 system.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            let (top, bottom) = a.split_at_mut(row);
            for (dst, src) in bottom[0].iter_mut().zip(top[col].iter()).skip(col) {
                *dst -= f * src;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut s = b[row];
        for k in row + 1..3 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

fn default_margin() -> f64 {
    DEFAULT_MARGIN
}

/// On-disk wind description: a small JSON document.
#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum WindSpec {
    Affine {
        c: [f64; 2],
        #[serde(rename = "A")]
        a: [[f64; 2]; 2],
        domain: [f64; 4],
        #[serde(default = "default_margin")]
        margin: f64,
    },
    Grid {
        origin: [f64; 2],
        spacing: [f64; 2],
        u: Vec<Vec<f64>>,
        v: Vec<Vec<f64>>,
        #[serde(default = "default_margin")]
        margin: f64,
    },
}

/// Parse a wind spec document and validate weakness at its margin.
pub fn load_wind_spec_str(text: &str) -> Result<WindField> {
    let spec: WindSpec =
        serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))?;
    match spec {
        WindSpec::Affine {
            c,
            a,
            domain,
            margin,
        } => {
            let domain = Domain::new(domain[0], domain[1], domain[2], domain[3])?;
            let a = Mat2::new(a[0][0], a[0][1], a[1][0], a[1][1]);
            Ok(WindField::Affine(AffineWind::new(
                Vec2::new(c[0], c[1]),
                a,
                domain,
                margin,
            )?))
        }
        WindSpec::Grid {
            origin,
            spacing,
            u,
            v,
            margin,
        } => Ok(WindField::Grid(GridWind::new(
            Vec2::new(origin[0], origin[1]),
            Vec2::new(spacing[0], spacing[1]),
            u,
            v,
            margin,
        )?)),
    }
}

/// Read a wind spec document from a file.
pub fn load_wind_spec(path: &std::path::Path) -> Result<WindField> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ParseError(format!("cannot read {}: {}", path.display(), e)))?;
    load_wind_spec_str(&text)
}

/// Serialize an affine or grid field back into the spec document format.
/// Analytic fields have no document form.
pub fn to_spec_json(field: &WindField) -> Result<String> {
    let spec = match field {
        WindField::Affine(f) => WindSpec::Affine {
            c: [f.c.x, f.c.y],
            a: [[f.a.m[0][0], f.a.m[0][1]], [f.a.m[1][0], f.a.m[1][1]]],
            domain: [
                f.domain.x1_min,
                f.domain.x1_max,
                f.domain.x2_min,
                f.domain.x2_max,
            ],
            margin: f.margin,
        },
        WindField::Grid(f) => WindSpec::Grid {
            origin: [f.origin.x, f.origin.y],
            spacing: [f.spacing.x, f.spacing.y],
            u: (0..f.nrows)
                .map(|r| f.u[r * f.ncols..(r + 1) * f.ncols].to_vec())
                .collect(),
            v: (0..f.nrows)
                .map(|r| f.v[r * f.ncols..(r + 1) * f.ncols].to_vec())
                .collect(),
            margin: f.margin,
        },
        WindField::Analytic(_) => {
            return Err(Error::ParseError(
                "analytic fields have no spec document form".into(),
            ))
        }
    };
    serde_json::to_string_pretty(&spec).map_err(|e| Error::ParseError(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Domain {
        Domain::new(0.0, 1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn constant_field_evaluates_everywhere_in_domain() {
        let d = Domain::new(0.0, 10.0, 0.0, 10.0).unwrap();
        let f: WindField = AffineWind::constant(Vec2::new(0.1, 0.0), d, DEFAULT_MARGIN)
            .unwrap()
            .into();
        assert_eq!(f.eval(Vec2::new(5.0, 5.0)).unwrap(), Vec2::new(0.1, 0.0));
    }

    #[test]
    fn affine_evaluation_is_exact() {
        let d = Domain::new(-3.0, 3.0, -3.0, 3.0).unwrap();
        let a = Mat2::new(0.0, 0.1, -0.1, 0.0);
        let f: WindField = AffineWind::new(Vec2::ZERO, a, d, DEFAULT_MARGIN)
            .unwrap()
            .into();
        let w = f.eval(Vec2::new(1.0, 2.0)).unwrap();
        assert_eq!(w, Vec2::new(0.2, -0.1));
        assert_eq!(f.jacobian(Vec2::new(1.0, 2.0)).unwrap(), a);
    }

    #[test]
    fn fields_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<WindField>();
    }

    #[test]
    fn zero_wind_has_zero_jacobian() {
        let f: WindField = AffineWind::constant(Vec2::ZERO, unit_square(), DEFAULT_MARGIN)
            .unwrap()
            .into();
        assert_eq!(f.jacobian(Vec2::new(0.3, 0.4)).unwrap(), Mat2::ZERO);
    }

    #[test]
    fn outside_domain_is_an_error() {
        let f: WindField = AffineWind::constant(Vec2::ZERO, unit_square(), DEFAULT_MARGIN)
            .unwrap()
            .into();
        let err = f.eval(Vec2::new(2.0, 0.5)).unwrap_err();
        assert!(matches!(err, Error::PointOutsideDomain { .. }));
    }

    #[test]
    fn grid_bilinear_center_value() {
        // 2x2 grid whose u-samples are 0 on the left column, 1 on the
        // right; margin 1.0 admits the unit samples.
        let g = GridWind::new(
            Vec2::ZERO,
            Vec2::new(1.0, 1.0),
            vec![vec![0.0, 1.0], vec![0.0, 1.0]],
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            1.0,
        )
        .unwrap();
        let f = WindField::Grid(g);
        let w = f.eval(Vec2::new(0.5, 0.5)).unwrap();
        assert!((w.x - 0.5).abs() < 1e-15);
        assert_eq!(w.y, 0.0);
    }

    #[test]
    fn grid_jacobian_matches_finite_differences() {
        let g = GridWind::new(
            Vec2::ZERO,
            Vec2::new(0.5, 0.5),
            vec![
                vec![0.0, 0.1, 0.2],
                vec![0.05, 0.2, 0.1],
                vec![0.0, 0.15, 0.3],
            ],
            vec![
                vec![0.1, 0.0, -0.1],
                vec![0.0, -0.2, 0.1],
                vec![0.2, 0.05, 0.0],
            ],
            DEFAULT_MARGIN,
        )
        .unwrap();
        let f = WindField::Grid(g);
        let x = Vec2::new(0.3, 0.7); // strictly inside a cell
        let jac = f.jacobian(x).unwrap();
        let h = 1e-6;
        let fd_x = (f.eval(x + Vec2::new(h, 0.0)).unwrap()
            - f.eval(x - Vec2::new(h, 0.0)).unwrap())
            / (2.0 * h);
        let fd_y = (f.eval(x + Vec2::new(0.0, h)).unwrap()
            - f.eval(x - Vec2::new(0.0, h)).unwrap())
            / (2.0 * h);
        assert!((jac.m[0][0] - fd_x.x).abs() < 1e-8);
        assert!((jac.m[1][0] - fd_x.y).abs() < 1e-8);
        assert!((jac.m[0][1] - fd_y.x).abs() < 1e-8);
        assert!((jac.m[1][1] - fd_y.y).abs() < 1e-8);
    }

    #[test]
    fn interior_edge_uses_lower_left_cell() {
        // Jacobian is discontinuous across grid lines; the convention picks
        // the lower-left cell so edge queries are deterministic.
        let g = GridWind::new(
            Vec2::ZERO,
            Vec2::new(1.0, 1.0),
            vec![
                vec![0.0, 0.2, 0.2],
                vec![0.0, 0.2, 0.2],
                vec![0.0, 0.2, 0.2],
            ],
            vec![vec![0.0; 3]; 3],
            DEFAULT_MARGIN,
        )
        .unwrap();
        let f = WindField::Grid(g);
        // du/dx is 0.2 in the left cells and 0.0 in the right cells.
        let on_edge = f.jacobian(Vec2::new(1.0, 0.5)).unwrap();
        assert!((on_edge.m[0][0] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn weakness_passes_constant_half() {
        let d = Domain::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let f: WindField = AffineWind::constant(Vec2::new(0.5, 0.0), d, DEFAULT_MARGIN)
            .unwrap()
            .into();
        let report = f.validate_weak(0.99).unwrap();
        assert!((report.max_norm - 0.5).abs() < 1e-15);
    }

    #[test]
    fn weakness_fails_at_corner() {
        // w1 = x1 on [0,2] x [0,1]: the corner maximum is 2.
        let d = Domain::new(0.0, 2.0, 0.0, 1.0).unwrap();
        let err = AffineWind::new(Vec2::ZERO, Mat2::new(1.0, 0.0, 0.0, 0.0), d, 0.99).unwrap_err();
        match err {
            Error::FieldNotWeak { location, norm, .. } => {
                assert!((norm - 2.0).abs() < 1e-15);
                assert_eq!(location.x, 2.0);
            }
            other => panic!("expected FieldNotWeak, got {other:?}"),
        }
    }

    #[test]
    fn weakness_rotation_corner_value() {
        let d = Domain::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let f: WindField = AffineWind::new(
            Vec2::ZERO,
            Mat2::new(0.0, 0.1, -0.1, 0.0),
            d,
            DEFAULT_MARGIN,
        )
        .unwrap()
        .into();
        let report = f.validate_weak(0.99).unwrap();
        assert!((report.max_norm - 0.1 * 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn affine_fit_recovers_affine_exactly() {
        let d = Domain::new(-1.0, 2.0, 0.5, 3.0).unwrap();
        let a = Mat2::new(0.05, -0.02, 0.03, 0.01);
        let c = Vec2::new(0.1, -0.2);
        let f: WindField = AffineWind::new(c, a, d, DEFAULT_MARGIN).unwrap().into();
        let (fit, residual) = affine_fit(&f, d, 5).unwrap();
        assert!(residual <= 1e-12);
        assert!((fit.c() - c).norm() < 1e-12);
        assert!((fit.a() - a).max_abs() < 1e-12);
    }

    #[test]
    fn affine_fit_of_constant_has_zero_linear_part() {
        let d = unit_square();
        let f: WindField = AffineWind::constant(Vec2::new(0.2, -0.1), d, DEFAULT_MARGIN)
            .unwrap()
            .into();
        let (fit, _) = affine_fit(&f, d, 4).unwrap();
        assert!((fit.c() - Vec2::new(0.2, -0.1)).norm() < 1e-13);
        assert!(fit.a().max_abs() < 1e-13);
    }

    #[test]
    fn affine_fit_of_sine_near_zero() {
        let d = Domain::new(-0.1, 0.1, -0.1, 0.1).unwrap();
        let f: WindField =
            AnalyticWind::new(|x: Vec2| Vec2::new(x.x.sin(), 0.0), d, DEFAULT_MARGIN)
                .unwrap()
                .into();
        let (fit, residual) = affine_fit(&f, d, 5).unwrap();
        assert!((fit.a().m[0][0] - 1.0).abs() < 1e-2);
        assert!(residual <= 1e-4);
    }

    #[test]
    fn spec_round_trip_preserves_coefficients() {
        let text = r#"{"type":"affine","c":[0.1,-0.05],"A":[[0.1,0.05],[-0.02,0.03]],
                       "domain":[0.0,1.0,0.0,1.0],"margin":0.99}"#;
        let field = load_wind_spec_str(text).unwrap();
        let json = to_spec_json(&field).unwrap();
        let again = load_wind_spec_str(&json).unwrap();
        match (&field, &again) {
            (WindField::Affine(a), WindField::Affine(b)) => {
                assert_eq!(a.c(), b.c());
                assert_eq!(a.a(), b.a());
                assert_eq!(a.domain(), b.domain());
            }
            _ => panic!("expected affine fields"),
        }
    }

    #[test]
    fn strong_spec_is_rejected() {
        let text = r#"{"type":"affine","c":[1.2,0.0],"A":[[0.0,0.0],[0.0,0.0]],
                       "domain":[0.0,1.0,0.0,1.0]}"#;
        assert!(matches!(
            load_wind_spec_str(text),
            Err(Error::FieldNotWeak { .. })
        ));
    }

    #[test]
    fn malformed_spec_is_a_parse_error() {
        assert!(matches!(
            load_wind_spec_str("{\"type\":\"affine\""),
            Err(Error::ParseError(_))
        ));
        assert!(matches!(
            load_wind_spec_str("{\"type\":\"vortex\"}"),
            Err(Error::ParseError(_))
        ));
    }

    #[test]
    fn grid_spec_round_trip() {
        let text = r#"{"type":"grid","origin":[0.0,0.0],"spacing":[0.5,0.5],
                       "u":[[0.0,0.1],[0.2,0.3]],"v":[[0.0,0.0],[-0.1,0.1]],"margin":0.9}"#;
        let field = load_wind_spec_str(text).unwrap();
        let again = load_wind_spec_str(&to_spec_json(&field).unwrap()).unwrap();
        match (&field, &again) {
            (WindField::Grid(a), WindField::Grid(b)) => assert_eq!(a, b),
            _ => panic!("expected grid fields"),
        }
    }

    #[test]
    fn negated_field_flips_values() {
        let d = unit_square();
        let f: WindField = AffineWind::new(
            Vec2::new(0.1, -0.05),
            Mat2::new(0.1, 0.05, -0.02, 0.03),
            d,
            DEFAULT_MARGIN,
        )
        .unwrap()
        .into();
        let g = f.negated();
        let x = Vec2::new(0.3, 0.6);
        assert_eq!(g.eval(x).unwrap(), -f.eval(x).unwrap());
    }
}
