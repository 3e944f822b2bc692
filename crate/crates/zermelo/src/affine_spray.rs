//! Closed-form spray coefficients for affine drifts.
//!
//! When the drift is affine, `w = c + A x`, every tensor contraction in the
//! general spray is a polynomial in position, and the whole coefficient
//! `G^i` collapses to a short fixed expression: a constants ledger derived
//! once from the six coefficients, a family of low-degree polynomials
//! evaluated per point, and a final assembly mixing them with powers of
//! the metric value `F`. This is the production path for affine fields:
//! it needs no derivatives at run time and costs a handful of
//! multiplications.
//!
//! The module is certified against [`crate::randers::zeta_spray`]: both
//! are exact arithmetic chains, so they must agree to near machine
//! precision for every affine field. That equivalence is enforced by the
//! test suite and is the authority whenever a hand-expanded coefficient
//! is in doubt.

use crate::error::Result;
use crate::randers::metric_value;
use crate::vec2::{Mat2, Vec2};
use crate::wind::AffineWind;
use serde::Serialize;

/// Constants derived from the affine coefficients
/// `w^1 = c1 + a1 x1 + b1 x2`, `w^2 = c2 + a2 x1 + b2 x2`.
///
/// The first two triples are the raw coefficients; `(a3, b3, c3)` and
/// `(a4, b4, c4)` generate the gradient of `|w|^2`; `(a5, b5, c5)` and
/// `(a6, b6, c6)` generate the drift-strain contraction; `e, j, k` are
/// the strain quadratic form; the six `m`'s expand the double drift
/// contraction of the strain; `n` is the (constant) spin.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct AffineConstants {
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
    pub a2: f64,
    pub b2: f64,
    pub c2: f64,
    pub a3: f64,
    pub b3: f64,
    pub c3: f64,
    pub a4: f64,
    pub b4: f64,
    pub c4: f64,
    pub a5: f64,
    pub b5: f64,
    pub c5: f64,
    pub a6: f64,
    pub b6: f64,
    pub c6: f64,
    pub e: f64,
    pub j: f64,
    pub k: f64,
    pub n: f64,
    pub m00: f64,
    pub m10: f64,
    pub m01: f64,
    pub m20: f64,
    pub m11: f64,
    pub m02: f64,
}

impl AffineConstants {
    /// Build the ledger from the constant part `c` and coefficient rows
    /// `(a1, b1)`, `(a2, b2)` of an affine drift.
    pub fn from_coefficients(c: Vec2, a: Mat2) -> AffineConstants {
        let (c1, c2) = (c.x, c.y);
        let (a1, b1) = (a.m[0][0], a.m[0][1]);
        let (a2, b2) = (a.m[1][0], a.m[1][1]);
        AffineConstants {
            a1,
            b1,
            c1,
            a2,
            b2,
            c2,
            a3: 2.0 * (a1 * a1 + a2 * a2),
            b3: 2.0 * (a1 * b1 + a2 * b2),
            c3: 2.0 * (a1 * c1 + a2 * c2),
            a4: 2.0 * (a1 * b1 + a2 * b2),
            b4: 2.0 * (b1 * b1 + b2 * b2),
            c4: 2.0 * (b1 * c1 + b2 * c2),
            a5: a2 * a2 + b1 * a2 + 2.0 * a1 * a1,
            b5: a2 * b2 + b1 * b2 + 2.0 * a1 * b1,
            c5: 2.0 * c1 * a1 + c2 * a2 + c2 * b1,
            a6: 2.0 * a2 * b2 + a1 * b1 + a1 * a2,
            b6: 2.0 * b2 * b2 + b1 * b1 + b1 * a2,
            c6: c1 * a2 + c1 * b1 + 2.0 * c2 * b2,
            e: 2.0 * a1,
            j: 2.0 * (a2 + b1),
            k: 2.0 * b2,
            n: b1 - a2,
            m00: 2.0 * (c1 * c1 * a1 + c1 * c2 * b1 + c1 * c2 * a2 + b2 * c2 * c2),
            m10: 2.0
                * (2.0 * c1 * a1 * a1
                    + c1 * a2 * b1
                    + a1 * c2 * b1
                    + c1 * a2 * a2
                    + a1 * a2 * c2
                    + 2.0 * c2 * a2 * b2),
            m01: 2.0
                * (2.0 * c1 * a1 * b1
                    + c1 * b2 * b1
                    + b1 * b1 * c2
                    + c1 * a2 * b2
                    + b1 * c2 * a2
                    + 2.0 * c2 * b2 * b2),
            m20: 2.0 * (a1 * a1 * a1 + a1 * b1 * a2 + a1 * a2 * a2 + a2 * a2 * b2),
            m11: 2.0
                * (2.0 * a1 * a1 * b1
                    + a1 * b1 * b2
                    + a1 * a2 * b2
                    + b1 * b1 * a2
                    + b1 * a2 * a2
                    + 2.0 * a2 * b2 * b2),
            m02: 2.0 * (b1 * b1 * a1 + b1 * b1 * b2 + a2 * b1 * b2 + b2 * b2 * b2),
        }
    }

    /// Drift value reconstructed from the ledger.
    pub fn drift(&self, x: Vec2) -> Vec2 {
        Vec2::new(
            self.c1 + self.a1 * x.x + self.b1 * x.y,
            self.c2 + self.a2 * x.x + self.b2 * x.y,
        )
    }

    /// The quadratic drift contraction of the strain,
    /// `sum_{l+k<=2} m_lk x1^l x2^k`.
    pub fn lambda(&self, x: Vec2) -> f64 {
        self.m00
            + self.m10 * x.x
            + self.m01 * x.y
            + self.m20 * x.x * x.x
            + self.m11 * x.x * x.y
            + self.m02 * x.y * x.y
    }
}

/// Derive the constants ledger of an affine drift field.
pub fn affine_constants(wind: &AffineWind) -> AffineConstants {
    AffineConstants::from_coefficients(wind.c(), wind.a())
}

/// Values of the spray polynomial families at a point.
///
/// `p*` are degree 2 in position, `l*` and `q*` degree 1, `r*` degree 3,
/// and the cubic-slot coefficients `a0*`, `b0*`, `d0*` are constants. The
/// first family assembles `G^1`, the second (mirrored) family `G^2`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AffinePolynomials {
    pub p11: f64,
    pub p12: f64,
    pub p21: f64,
    pub p22: f64,
    pub l11: f64,
    pub l12: f64,
    pub l21: f64,
    pub l22: f64,
    pub q01: f64,
    pub q02: f64,
    pub r01: f64,
    pub r02: f64,
    pub a01: f64,
    pub b01: f64,
    pub d01: f64,
    pub a02: f64,
    pub b02: f64,
    pub d02: f64,
}

/// Evaluate every spray polynomial at `x`.
///
/// The second family is produced by the symmetric construction: swap the
/// roles of the two drift components, swap the `(a5, b5, c5)` triple with
/// `(a6, b6, c6)` and `(a3, b3, c3)` with `(a4, b4, c4)`, exchange `e`
/// and `k` in the leading cubic slot, and negate the spin contribution.
pub fn affine_polynomials(k: &AffineConstants, x: Vec2) -> AffinePolynomials {
    let w = k.drift(x);
    let sigma1 = k.a5 * x.x + k.b5 * x.y + k.c5;
    let sigma2 = k.a6 * x.x + k.b6 * x.y + k.c6;
    let st1 = k.a3 * x.x + k.b3 * x.y + k.c3;
    let st2 = k.a4 * x.x + k.b4 * x.y + k.c4;
    let lambda = k.lambda(x);

    AffinePolynomials {
        p11: -0.5 * w.x * sigma1 - 0.25 * lambda,
        p12: -0.5 * (w.x * sigma2 + k.n),
        p21: -0.5 * (w.y * sigma1 - k.n),
        p22: -0.5 * w.y * sigma2 - 0.25 * lambda,
        l11: 0.5 * sigma1 + 0.25 * k.e * w.x,
        l12: 0.25 * k.k * w.x,
        l21: 0.25 * k.e * w.y,
        l22: 0.5 * sigma2 + 0.25 * k.k * w.y,
        q01: 0.5 * sigma2 + 0.25 * k.j * w.x,
        q02: 0.5 * sigma1 + 0.25 * k.j * w.y,
        r01: 0.25 * (w.x * lambda - st1),
        r02: 0.25 * (w.y * lambda - st2),
        a01: -k.e / 4.0,
        b01: -k.j / 4.0,
        d01: -k.k / 4.0,
        a02: -k.k / 4.0,
        b02: -k.j / 4.0,
        d02: -k.e / 4.0,
    }
}

/// Assemble the spray from a precomputed ledger, the drift value at `x`,
/// and the tangent vector. This is the hot path used by the geodesic
/// integrator, which looks the drift up once per stage.
pub fn spray_with_constants(k: &AffineConstants, x: Vec2, w: Vec2, y: Vec2) -> Result<Vec2> {
    let f = metric_value(w, y)?;
    let p = affine_polynomials(k, x);
    let (y1, y2) = (y.x, y.y);
    let g1 = f * (p.p11 * y1 + p.p12 * y2)
        + p.l11 * y1 * y1
        + p.l12 * y2 * y2
        + p.q01 * y1 * y2
        + (p.a01 * y1 * y1 * y1 + p.b01 * y1 * y1 * y2 + p.d01 * y1 * y2 * y2) / f
        + f * f * p.r01;
    let g2 = f * (p.p21 * y1 + p.p22 * y2)
        + p.l21 * y1 * y1
        + p.l22 * y2 * y2
        + p.q02 * y1 * y2
        + (p.a02 * y2 * y2 * y2 + p.b02 * y2 * y2 * y1 + p.d02 * y2 * y1 * y1) / f
        + f * f * p.r02;
    Ok(Vec2::new(g1, g2))
}

/// Spray coefficients of an affine drift field at the phase point
/// `(x, y)`. Equals [`crate::randers::zeta_spray`] on affine fields.
pub fn affine_spray_eval(wind: &AffineWind, x: Vec2, y: Vec2) -> Result<Vec2> {
    if !wind.domain().contains(x) {
        return Err(crate::error::Error::PointOutsideDomain { point: x });
    }
    let k = affine_constants(wind);
    spray_with_constants(&k, x, wind.value_unchecked(x), y)
}
