//! Named drift fields used by the verification report and the test
//! suites, plus seeded random field generators.

use crate::rng::SplitMix64;
use crate::vec2::{Mat2, Vec2};
use crate::wind::{AffineWind, Domain, WindField, DEFAULT_MARGIN};

pub fn square(half: f64) -> Domain {
    Domain::new(-half, half, -half, half).expect("valid square")
}

pub fn zero_wind(domain: Domain) -> WindField {
    AffineWind::constant(Vec2::ZERO, domain, DEFAULT_MARGIN)
        .expect("zero wind is weak")
        .into()
}

pub fn constant_wind(c: Vec2, domain: Domain) -> WindField {
    AffineWind::constant(c, domain, DEFAULT_MARGIN)
        .expect("constant fixture must be weak")
        .into()
}

/// Rigid rotation `w = (omega x2, -omega x1)`.
pub fn rotation_wind(omega: f64, domain: Domain) -> WindField {
    AffineWind::new(
        Vec2::ZERO,
        Mat2::new(0.0, omega, -omega, 0.0),
        domain,
        DEFAULT_MARGIN,
    )
    .expect("rotation fixture must be weak")
    .into()
}

/// A fixed affine field exercising every constant in the spray ledger.
pub fn generic_affine(domain: Domain) -> WindField {
    AffineWind::new(
        Vec2::new(0.1, -0.05),
        Mat2::new(0.1, 0.05, -0.02, 0.03),
        domain,
        DEFAULT_MARGIN,
    )
    .expect("generic fixture must be weak")
    .into()
}

/// Random affine field on `domain` whose corner maximum norm lands in
/// `[lo, hi]`. Draws raw coefficients, then rescales the whole field —
/// `w` is linear in `(c, A)`, so scaling scales the corner maximum.
pub fn random_affine(rng: &mut SplitMix64, domain: Domain, lo: f64, hi: f64) -> WindField {
    debug_assert!(0.0 < lo && lo <= hi && hi < 1.0);
    loop {
        let c = Vec2::new(rng.range(-0.5, 0.5), rng.range(-0.5, 0.5));
        let a = Mat2::new(
            rng.range(-0.3, 0.3),
            rng.range(-0.3, 0.3),
            rng.range(-0.3, 0.3),
            rng.range(-0.3, 0.3),
        );
        // The constructor's corner scan reports the maximum either way:
        // from the field if the draw is already weak, from the error if
        // not. Rescale to the target in both cases.
        let max = match AffineWind::new(c, a, domain, 1.0) {
            Ok(w) => w.weakness_report().max_norm,
            Err(crate::error::Error::FieldNotWeak { norm, .. }) => norm,
            Err(_) => continue,
        };
        if max < 1e-9 {
            continue;
        }
        let target = rng.range(lo, hi);
        let s = target / max;
        if let Ok(w) = AffineWind::new(c * s, a * s, domain, DEFAULT_MARGIN) {
            return w.into();
        }
    }
}

/// Random weak constant field with norm in `[lo, hi]`.
pub fn random_constant(rng: &mut SplitMix64, domain: Domain, lo: f64, hi: f64) -> WindField {
    let c = Vec2::from_angle(rng.angle()) * rng.range(lo, hi);
    constant_wind(c, domain)
}

/// Random point strictly inside `domain`, at least `inset` from the edge
/// (as a fraction of each side).
pub fn random_point(rng: &mut SplitMix64, domain: Domain, inset: f64) -> Vec2 {
    let fx = rng.range(inset, 1.0 - inset);
    let fy = rng.range(inset, 1.0 - inset);
    Vec2::new(
        domain.x1_min + (domain.x1_max - domain.x1_min) * fx,
        domain.x2_min + (domain.x2_max - domain.x2_min) * fy,
    )
}
