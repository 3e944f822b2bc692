//! Acceptance suite: one test per criterion, each printing a pass line
//! with the worst error observed (visible with `--nocapture`).
//!
//! Criteria are analytic identities and cross-validations at fixed
//! tolerances; nothing here is calibrated against the implementation.

use zermelo::affine_spray::affine_spray_eval;
use zermelo::control::{optimize_headings_with, OptimizeOptions};
use zermelo::fixtures;
use zermelo::geodesic::{integrate_geodesic, IntegrationOptions, TerminalReason};
use zermelo::navigator::{solve_navigation, NavigationProblem};
use zermelo::randers::{hessian_spray, metric_value, navigation_tensors, randers_data, zeta_spray};
use zermelo::rng::SplitMix64;
use zermelo::vec2::{Mat2, Vec2};
use zermelo::wind::{AffineWind, Domain, WindField, DEFAULT_MARGIN};

fn rel_gap(a: Vec2, b: Vec2) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

fn report(criterion: &str, max_err: f64, tol: f64) {
    let status = if max_err <= tol { "PASS" } else { "FAIL" };
    println!("acceptance {criterion}: {status} (max err {max_err:.3e}, tol {tol:.1e})");
    assert!(max_err <= tol, "{criterion}: {max_err:e} > {tol:e}");
}

/// 1. The unit indicatrix is the Euclidean unit circle translated by the
///    drift: F(x, w(x) + u) = 1 for every unit u.
#[test]
fn criterion_01_indicatrix_identity() {
    let mut rng = SplitMix64::new(101);
    let square = fixtures::square(1.0);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let field = fixtures::random_affine(&mut rng, square, 0.1, 0.85);
        for _ in 0..20 {
            let x = fixtures::random_point(&mut rng, square, 0.0);
            let w = field.eval(x).unwrap();
            let u = Vec2::from_angle(rng.angle());
            worst = worst.max((metric_value(w, w + u).unwrap() - 1.0).abs());
        }
    }
    report("01 indicatrix-identity", worst, 1e-12);
}

/// 2. Randers decomposition: sqrt(a(y,y)) + b(y) reproduces the metric,
///    and the a-norm of the one-form equals the drift norm.
#[test]
fn criterion_02_randers_decomposition() {
    let mut rng = SplitMix64::new(202);
    let square = fixtures::square(1.0);
    let mut worst_split = 0.0f64;
    let mut worst_bnorm = 0.0f64;
    for _ in 0..50 {
        let field = fixtures::random_affine(&mut rng, square, 0.1, 0.85);
        for _ in 0..20 {
            let x = fixtures::random_point(&mut rng, square, 0.0);
            let w = field.eval(x).unwrap();
            let y = Vec2::from_angle(rng.angle()) * rng.range(0.2, 3.0);
            let f = metric_value(w, y).unwrap();
            let data = randers_data(w).unwrap();
            worst_split = worst_split.max((data.randers_norm(y) - f).abs() / f.max(1.0));
            worst_bnorm = worst_bnorm.max((data.b_norm_sq() - w.norm_sq()).abs());
        }
    }
    report("02a randers-split", worst_split, 1e-12);
    report("02b one-form-norm", worst_bnorm, 1e-12);
}

/// 3. Spray triple equivalence: the closed-form affine spray equals the
///    general tensor spray to 1e-9 (both exact chains), and the tensor
///    spray equals the finite-difference oracle to 1e-6, over 1000 phase
///    points on 20 random affine fields.
#[test]
fn criterion_03_spray_triple_equivalence() {
    let mut rng = SplitMix64::new(303);
    let square = fixtures::square(1.0);
    let mut worst_exact = 0.0f64;
    let mut worst_oracle = 0.0f64;
    for _ in 0..20 {
        let field = fixtures::random_affine(&mut rng, square, 0.15, 0.7);
        let WindField::Affine(wind) = &field else {
            unreachable!()
        };
        for _ in 0..50 {
            let x = fixtures::random_point(&mut rng, square, 0.05);
            let y = Vec2::from_angle(rng.angle()) * rng.range(0.4, 2.5);
            let a = affine_spray_eval(wind, x, y).unwrap();
            let z = zeta_spray(&field, x, y).unwrap();
            let h = hessian_spray(&field, x, y).unwrap();
            worst_exact = worst_exact.max(rel_gap(a, z));
            worst_oracle = worst_oracle.max(rel_gap(z, h));
        }
    }
    report("03a affine-vs-general-spray", worst_exact, 1e-9);
    report("03b general-vs-hessian-spray", worst_oracle, 1e-6);
}

/// 4. The drift contractions of strain and spin sum to the gradient of
///    the drift energy: (s + t)_i = d|w|^2/dx_i, exact on affine fields.
#[test]
fn criterion_04_energy_gradient_identity() {
    let mut rng = SplitMix64::new(404);
    let square = fixtures::square(1.0);
    let mut worst = 0.0f64;
    for _ in 0..40 {
        let field = fixtures::random_affine(&mut rng, square, 0.1, 0.85);
        for _ in 0..25 {
            let x = fixtures::random_point(&mut rng, square, 0.0);
            let w = field.eval(x).unwrap();
            let jac = field.jacobian(x).unwrap();
            let tensors = navigation_tensors(w, jac);
            let grad = jac.transpose().mul_vec(w) * 2.0;
            worst = worst.max((tensors.s + tensors.t - grad).norm());
        }
    }
    report("04 energy-gradient", worst, 1e-12);
}

/// 5. First-integral conservation: |F - 1| <= 1e-8 along unit-speed
///    geodesics integrated to t = 10 at tolerances 1e-10, equivalently
///    |velocity - drift| = 1 to 1e-8.
#[test]
fn criterion_05_first_integral_conservation() {
    let wide = Domain::new(-22.0, 22.0, -22.0, 22.0).unwrap();
    let fields: Vec<WindField> = vec![
        fixtures::rotation_wind(0.02, wide),
        AffineWind::new(
            Vec2::new(0.02, -0.01),
            Mat2::new(0.012, 0.008, -0.006, 0.01),
            wide,
            DEFAULT_MARGIN,
        )
        .unwrap()
        .into(),
    ];
    let mut worst_f = 0.0f64;
    let mut worst_nav = 0.0f64;
    for field in &fields {
        for theta in [0.0, 1.1, -2.4] {
            let traj = integrate_geodesic(
                field,
                Vec2::new(1.0, 0.0),
                theta,
                10.0,
                &IntegrationOptions::default(),
            )
            .unwrap();
            assert_eq!(
                traj.terminal_reason,
                TerminalReason::TimeLimit,
                "path must survive to t = 10 inside the weak region"
            );
            worst_f = worst_f.max(traj.max_f_deviation());
            for s in &traj.samples {
                let w = field.eval(s.state.x).unwrap();
                worst_nav = worst_nav.max(((s.state.y - w).norm() - 1.0).abs());
            }
        }
    }
    report("05a metric-conservation", worst_f, 1e-8);
    report("05b navigation-identity", worst_nav, 1e-8);
}

/// 6. Analytic constant-wind times (downwind, upwind, crosswind), and
///    arrival time = F(goal - start) for 100 random constant winds.
#[test]
fn criterion_06_constant_wind_times() {
    let wide = fixtures::square(20.0);
    let mut worst_analytic = 0.0f64;
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
        let p = NavigationProblem::new(&field, Vec2::ZERO, goal)
            .unwrap()
            .with_goal_radius(1e-9);
        let sol = solve_navigation(&p).unwrap();
        worst_analytic = worst_analytic.max((sol.time - expected).abs());
    }
    report("06a analytic-times", worst_analytic, 1e-6);

    let mut rng = SplitMix64::new(606);
    let mut worst_random = 0.0f64;
    for _ in 0..100 {
        let field = fixtures::random_constant(&mut rng, wide, 0.05, 0.7);
        let goal = Vec2::from_angle(rng.angle()) * rng.range(0.5, 2.0);
        let w = field.eval(Vec2::ZERO).unwrap();
        let expected = metric_value(w, goal).unwrap();
        let p = NavigationProblem::new(&field, Vec2::ZERO, goal)
            .unwrap()
            .with_goal_radius(1e-9);
        let sol = solve_navigation(&p).unwrap();
        worst_random = worst_random.max((sol.time - expected).abs());
    }
    report("06b minkowski-times", worst_random, 1e-6);
}

/// 7. Zero-wind degeneracy: arrival time is Euclidean distance, and the
///    trajectory is straight.
#[test]
fn criterion_07_zero_wind_degeneracy() {
    let field = fixtures::zero_wind(fixtures::square(20.0));
    let p = NavigationProblem::new(&field, Vec2::ZERO, Vec2::new(3.0, 4.0))
        .unwrap()
        .with_goal_radius(1e-10);
    let sol = solve_navigation(&p).unwrap();
    report("07a zero-wind-time", (sol.time - 5.0).abs(), 1e-8);

    let mut worst_area = 0.0f64;
    let pts: Vec<Vec2> = sol.trajectory.samples.iter().map(|s| s.state.x).collect();
    for w in pts.windows(3) {
        worst_area = worst_area.max(0.5 * ((w[1] - w[0]).perp().dot(w[2] - w[0])).abs());
    }
    report("07b straightness", worst_area, 1e-10);
}

/// 8. Geodesic/control cross-validation on 20 random weak affine fields
///    over the unit square: a 32-segment directly-optimized control comes
///    within 1% of the geodesic time and never beats it by more than 1e-6.
#[test]
fn criterion_08_control_cross_validation() {
    let mut rng = SplitMix64::new(808);
    // Fields live on a padded rectangle so shots near the edge of the
    // unit square are not truncated prematurely.
    let padded = Domain::new(-0.5, 1.5, -0.5, 1.5).unwrap();
    let start = Vec2::new(0.1, 0.15);
    let goal = Vec2::new(0.85, 0.8);
    let opts = OptimizeOptions {
        line_search_evals: 20,
        ..OptimizeOptions::default()
    };
    let mut worst_gap = 0.0f64;
    let mut worst_undercut = 0.0f64;
    for _ in 0..20 {
        let field = fixtures::random_affine(&mut rng, padded, 0.15, 0.5);
        let geo_time = {
            let p = NavigationProblem::new(&field, start, goal)
                .unwrap()
                .with_goal_radius(1e-9);
            solve_navigation(&p).unwrap().time
        };
        let (_, oracle_time) =
            optimize_headings_with(&field, start, goal, 32, 1e-6, &opts).unwrap();
        worst_gap = worst_gap.max((oracle_time - geo_time).abs() / geo_time);
        worst_undercut = worst_undercut.max(geo_time - oracle_time);
    }
    report("08a cross-validation-gap", worst_gap, 0.01);
    report("08b oracle-dominance", worst_undercut, 1e-6);
}

/// 9. Positive homogeneity: F is degree 1; every spray route is degree 2.
#[test]
fn criterion_09_homogeneity() {
    let mut rng = SplitMix64::new(909);
    let square = fixtures::square(1.0);
    let mut worst_f = 0.0f64;
    let mut worst_exact = 0.0f64;
    let mut worst_oracle = 0.0f64;
    for _ in 0..20 {
        let field = fixtures::random_affine(&mut rng, square, 0.15, 0.7);
        let WindField::Affine(wind) = &field else {
            unreachable!()
        };
        for _ in 0..10 {
            let x = fixtures::random_point(&mut rng, square, 0.05);
            let y = Vec2::from_angle(rng.angle()) * rng.range(0.4, 1.5);
            let lambda = rng.range(0.2, 4.0);
            let w = field.eval(x).unwrap();
            let f = metric_value(w, y).unwrap();
            worst_f = worst_f
                .max((metric_value(w, y * lambda).unwrap() - lambda * f).abs() / (lambda * f));

            let a1 = affine_spray_eval(wind, x, y).unwrap();
            let a2 = affine_spray_eval(wind, x, y * lambda).unwrap();
            worst_exact = worst_exact.max(rel_gap(a2, a1 * (lambda * lambda)));
            let z1 = zeta_spray(&field, x, y).unwrap();
            let z2 = zeta_spray(&field, x, y * lambda).unwrap();
            worst_exact = worst_exact.max(rel_gap(z2, z1 * (lambda * lambda)));

            let h1 = hessian_spray(&field, x, y).unwrap();
            let h2 = hessian_spray(&field, x, y * 2.0).unwrap();
            worst_oracle = worst_oracle.max(rel_gap(h2, h1 * 4.0));
        }
    }
    report("09a metric-homogeneity", worst_f, 1e-12);
    report("09b spray-homogeneity-exact", worst_exact, 1e-9);
    report("09c spray-homogeneity-oracle", worst_oracle, 1e-6);
}

/// 10. Reversal duality: travel time start -> goal under w equals travel
///     time goal -> start under -w, across the fixture set.
#[test]
fn criterion_10_reversal_duality() {
    let wide = fixtures::square(20.0);
    let fixtures_set: Vec<WindField> = vec![
        fixtures::zero_wind(wide),
        fixtures::constant_wind(Vec2::new(0.3, 0.0), wide),
        fixtures::constant_wind(Vec2::new(0.0, 0.5), wide),
        fixtures::rotation_wind(0.1, fixtures::square(6.0)),
        fixtures::generic_affine(fixtures::square(2.0)),
    ];
    let start = Vec2::new(-0.5, -0.3);
    let goal = Vec2::new(0.8, 0.6);
    let mut worst = 0.0f64;
    for field in &fixtures_set {
        let forward = {
            let p = NavigationProblem::new(field, start, goal)
                .unwrap()
                .with_goal_radius(1e-9);
            solve_navigation(&p).unwrap().time
        };
        let reversed = field.negated();
        let backward = {
            let p = NavigationProblem::new(&reversed, goal, start)
                .unwrap()
                .with_goal_radius(1e-9);
            solve_navigation(&p).unwrap().time
        };
        worst = worst.max((forward - backward).abs());
    }
    report("10 reversal-duality", worst, 1e-6);
}
