//! Fixture-based invariant report.
//!
//! Runs the crate's analytic identities and conservation checks against
//! the bundled fixtures (zero wind, two constant winds, the rigid
//! rotation, a generic affine field) plus seeded random draws, and
//! reports the worst error seen per property. The CLI `verify`
//! subcommand prints one line per check; the acceptance test suite
//! asserts the same identities independently at full scale.

use crate::affine_spray::affine_spray_eval;
use crate::control;
use crate::error::Result;
use crate::fixtures;
use crate::geodesic::{integrate_geodesic, IntegrationOptions};
use crate::navigator::{solve_navigation, NavigationProblem};
use crate::randers::{
    contract, hessian_spray, metric_value, navigation_tensors, randers_data, zeta_spray,
};
use crate::rng::SplitMix64;
use crate::vec2::Vec2;
use crate::wind::WindField;

/// Outcome of one invariant check.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub max_err: f64,
    pub tol: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.max_err.is_finite() && self.max_err <= self.tol
    }
}

fn rel_gap(a: Vec2, b: Vec2) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

/// Run every check with the given seed. Deterministic for a fixed seed.
pub fn run_all(seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::new();
    let square = fixtures::square(1.0);

    // Pointwise metric identities over random weak affine fields.
    let mut indicatrix = 0.0f64;
    let mut split = 0.0f64;
    let mut b_norm = 0.0f64;
    let mut homogeneity = 0.0f64;
    for _ in 0..40 {
        let field = fixtures::random_affine(&mut rng, square, 0.2, 0.8);
        for _ in 0..12 {
            let x = fixtures::random_point(&mut rng, square, 0.0);
            let w = field.eval(x)?;
            let u = Vec2::from_angle(rng.angle());
            indicatrix = indicatrix.max((metric_value(w, w + u)? - 1.0).abs());

            let y = Vec2::from_angle(rng.angle()) * rng.range(0.3, 2.5);
            let f = metric_value(w, y)?;
            let data = randers_data(w)?;
            split = split.max((data.randers_norm(y) - f).abs());
            b_norm = b_norm.max((data.b_norm_sq() - w.norm_sq()).abs());

            let lambda = rng.range(0.1, 5.0);
            homogeneity = homogeneity.max((metric_value(w, y * lambda)? - lambda * f).abs() / f);
        }
    }
    out.push(CheckResult {
        name: "indicatrix-identity",
        max_err: indicatrix,
        tol: 1e-12,
    });
    out.push(CheckResult {
        name: "randers-split",
        max_err: split,
        tol: 1e-12,
    });
    out.push(CheckResult {
        name: "one-form-norm",
        max_err: b_norm,
        tol: 1e-12,
    });
    out.push(CheckResult {
        name: "metric-homogeneity",
        max_err: homogeneity,
        tol: 1e-12,
    });

    // Drift-tensor gradient identity on affine fields (exact gradient is
    // 2 A^T w).
    let mut grad_gap = 0.0f64;
    for _ in 0..20 {
        let field = fixtures::random_affine(&mut rng, square, 0.2, 0.8);
        for _ in 0..10 {
            let x = fixtures::random_point(&mut rng, square, 0.0);
            let w = field.eval(x)?;
            let jac = field.jacobian(x)?;
            let tensors = navigation_tensors(w, jac);
            let grad = jac.transpose().mul_vec(w) * 2.0;
            grad_gap = grad_gap.max((tensors.s + tensors.t - grad).norm());
        }
    }
    out.push(CheckResult {
        name: "drift-energy-gradient",
        max_err: grad_gap,
        tol: 1e-12,
    });

    // Spray equivalences.
    let mut affine_vs_zeta = 0.0f64;
    let mut zeta_vs_hessian = 0.0f64;
    let mut spray_homog = 0.0f64;
    for _ in 0..8 {
        let field = fixtures::random_affine(&mut rng, square, 0.2, 0.7);
        let wind = match &field {
            WindField::Affine(w) => w.clone(),
            _ => unreachable!(),
        };
        for _ in 0..30 {
            let x = fixtures::random_point(&mut rng, square, 0.2);
            let y = Vec2::from_angle(rng.angle()) * rng.range(0.5, 2.0);
            let a = affine_spray_eval(&wind, x, y)?;
            let z = zeta_spray(&field, x, y)?;
            affine_vs_zeta = affine_vs_zeta.max(rel_gap(a, z));
            let h = hessian_spray(&field, x, y)?;
            zeta_vs_hessian = zeta_vs_hessian.max(rel_gap(z, h));
            let z2 = zeta_spray(&field, x, y * 2.0)?;
            spray_homog = spray_homog.max(rel_gap(z2, z * 4.0));
        }
    }
    out.push(CheckResult {
        name: "affine-vs-general-spray",
        max_err: affine_vs_zeta,
        tol: 1e-9,
    });
    out.push(CheckResult {
        name: "general-vs-hessian-spray",
        max_err: zeta_vs_hessian,
        tol: 1e-6,
    });
    out.push(CheckResult {
        name: "spray-homogeneity",
        max_err: spray_homog,
        tol: 1e-9,
    });

    // Conservation to t = 10 under a rotation drift gentle enough that
    // the paths stay inside the weak region the whole way.
    let wide = fixtures::square(20.0);
    let gentle = fixtures::rotation_wind(0.02, fixtures::square(22.0));
    let mut f_drift = 0.0f64;
    let mut nav_identity = 0.0f64;
    for theta in [0.3, 2.0] {
        let traj = integrate_geodesic(
            &gentle,
            Vec2::new(1.0, 0.0),
            theta,
            10.0,
            &IntegrationOptions::default(),
        )?;
        f_drift = f_drift.max(traj.max_f_deviation());
        for s in &traj.samples {
            let w = gentle.eval(s.state.x)?;
            nav_identity = nav_identity.max(((s.state.y - w).norm() - 1.0).abs());
        }
    }
    out.push(CheckResult {
        name: "metric-conservation",
        max_err: f_drift,
        tol: 1e-8,
    });
    out.push(CheckResult {
        name: "navigation-identity",
        max_err: nav_identity,
        tol: 1e-8,
    });

    // Straight paths under zero and constant drift.
    let mut straightness = 0.0f64;
    for field in [
        fixtures::zero_wind(wide),
        fixtures::constant_wind(Vec2::new(0.3, 0.0), wide),
        fixtures::constant_wind(Vec2::new(0.0, 0.5), wide),
    ] {
        let traj =
            integrate_geodesic(&field, Vec2::ZERO, 0.7, 3.0, &IntegrationOptions::default())?;
        let pts: Vec<Vec2> = traj.samples.iter().map(|s| s.state.x).collect();
        for w in pts.windows(3) {
            let area = 0.5 * ((w[1] - w[0]).perp().dot(w[2] - w[0])).abs();
            straightness = straightness.max(area);
        }
    }
    out.push(CheckResult {
        name: "straight-line-degeneracy",
        max_err: straightness,
        tol: 1e-10,
    });

    // Analytic constant-wind arrival times.
    let mut analytic = 0.0f64;
    let cases: [(Vec2, Vec2, f64); 3] = [
        (Vec2::new(0.3, 0.0), Vec2::new(1.0, 0.0), 1.0 / 1.3),
        (Vec2::new(0.3, 0.0), Vec2::new(-1.0, 0.0), 1.0 / 0.7),
        (
            Vec2::new(0.0, 0.5),
            Vec2::new(1.0, 0.0),
            2.0 / 3.0f64.sqrt(),
        ),
    ];
    for (c, goal, expected) in cases {
        let field = fixtures::constant_wind(c, wide);
        let p = NavigationProblem::new(&field, Vec2::ZERO, goal)?.with_goal_radius(1e-9);
        let sol = solve_navigation(&p)?;
        analytic = analytic.max((sol.time - expected).abs());
    }
    out.push(CheckResult {
        name: "analytic-crosswind-times",
        max_err: analytic,
        tol: 1e-6,
    });

    // Constant winds: arrival time equals the metric of the displacement.
    let mut minkowski = 0.0f64;
    for _ in 0..6 {
        let field = fixtures::random_constant(&mut rng, wide, 0.1, 0.7);
        let goal = Vec2::from_angle(rng.angle()) * rng.range(0.5, 2.0);
        let w = field.eval(Vec2::ZERO)?;
        let expected = metric_value(w, goal)?;
        let p = NavigationProblem::new(&field, Vec2::ZERO, goal)?.with_goal_radius(1e-9);
        let sol = solve_navigation(&p)?;
        minkowski = minkowski.max((sol.time - expected).abs());
    }
    out.push(CheckResult {
        name: "constant-wind-metric-time",
        max_err: minkowski,
        tol: 1e-6,
    });

    // Zero wind: time is Euclidean distance.
    let zero = fixtures::zero_wind(wide);
    let p = NavigationProblem::new(&zero, Vec2::ZERO, Vec2::new(3.0, 4.0))?.with_goal_radius(1e-10);
    let sol = solve_navigation(&p)?;
    out.push(CheckResult {
        name: "zero-wind-distance",
        max_err: (sol.time - 5.0).abs(),
        tol: 1e-8,
    });

    // Reversal duality on the generic affine fixture.
    let generic = fixtures::generic_affine(fixtures::square(2.0));
    let start = Vec2::new(-0.5, -0.3);
    let goal = Vec2::new(0.8, 0.6);
    let forward = {
        let p = NavigationProblem::new(&generic, start, goal)?.with_goal_radius(1e-9);
        solve_navigation(&p)?.time
    };
    let reversed = generic.negated();
    let backward = {
        let p = NavigationProblem::new(&reversed, goal, start)?.with_goal_radius(1e-9);
        solve_navigation(&p)?.time
    };
    out.push(CheckResult {
        name: "reversal-duality",
        max_err: (forward - backward).abs(),
        tol: 1e-6,
    });

    // Control-oracle cross-validation, scaled down for speed.
    let mut cross = 0.0f64;
    let mut dominance = 0.0f64;
    for _ in 0..2 {
        let field = fixtures::random_affine(&mut rng, fixtures::square(1.0), 0.2, 0.5);
        let start = Vec2::new(-0.6, -0.5);
        let goal = Vec2::new(0.6, 0.4);
        let geo_time = {
            let p = NavigationProblem::new(&field, start, goal)?.with_goal_radius(1e-9);
            solve_navigation(&p)?.time
        };
        let (_, oracle_time) = control::optimize_headings(&field, start, goal, 16, 1e-8)?;
        cross = cross.max((oracle_time - geo_time).abs() / geo_time);
        dominance = dominance.max(geo_time - oracle_time);
    }
    out.push(CheckResult {
        name: "control-cross-validation",
        max_err: cross,
        tol: 0.01,
    });
    out.push(CheckResult {
        name: "oracle-dominance",
        max_err: dominance,
        tol: 1e-6,
    });

    // Tensor contraction spot values on the rotation fixture.
    let rotation = fixtures::rotation_wind(0.1, fixtures::square(6.0));
    let jac = rotation.jacobian(Vec2::new(1.0, 0.0))?;
    let w = rotation.eval(Vec2::new(1.0, 0.0))?;
    let tensors = navigation_tensors(w, jac);
    let k = contract(&tensors, w, Vec2::new(3.0, 0.0));
    let mut tensor_err = (tensors.c.m[0][1] - 0.2).abs();
    tensor_err = tensor_err.max(tensors.l.max_abs());
    tensor_err = tensor_err.max((k.c0 - Vec2::new(0.0, -0.6)).norm());
    out.push(CheckResult {
        name: "rotation-tensor-components",
        max_err: tensor_err,
        tol: 1e-12,
    });

    Ok(out)
}
