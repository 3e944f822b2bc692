//! The Randers metric induced by a weak drift field, and its geodesic
//! spray.
//!
//! A vehicle with unit own speed inside a drift `w` needs time `F(y)` to
//! realize a displacement `y`, where
//!
//! ```text
//! F(y) = [ sqrt(<y,w>^2 + rho |y|^2) - <y,w> ] / rho,    rho = 1 - |w|^2.
//! ```
//!
//! `F` is a Randers norm: it splits as `sqrt(a(y,y)) + b(y)` with
//!
//! ```text
//! a_ij = (rho d_ij + w_i w_j) / rho^2,    b_i = -w_i / rho,
//! ```
//!
//! and its unit ball (the indicatrix) is the Euclidean unit circle
//! translated by `w`. Minimum-time paths are the geodesics of `F`; their
//! second-order ODE is `x'' + 2 G(x, x') = 0` in unit-speed
//! parameterization. Because the background metric is Euclidean the
//! Riemannian part of the spray vanishes and `G` reduces to a combination
//! of first derivatives of the drift, assembled here from four tensors:
//! the symmetrized gradient `L`, the antisymmetric part `C`, and their
//! drift contractions `S` and `T`.
//!
//! [`zeta_spray`] is the production path (exact arithmetic, first
//! derivatives of `w` only). [`hessian_spray`] evaluates the
//! definition of the spray coefficients by central finite differences
//! of `F^2`; it is slower and noisier but shares nothing with the tensor
//! path, which makes it the cross-check of record for everything built on
//! top.

use crate::error::{Error, Result};
use crate::vec2::{Mat2, Vec2};
use crate::wind::WindField;

/// Drift norms are rejected this close to 1; `rho` appears squared in
/// denominators and loses all precision as it vanishes.
const RHO_FLOOR: f64 = 1e-12;

/// Time needed per unit of parameter to realize velocity `y` under drift
/// `w`. Strictly positive for weak drifts and nonzero `y`.
pub fn metric_value(w: Vec2, y: Vec2) -> Result<f64> {
    let w2 = w.norm_sq();
    let rho = 1.0 - w2;
    if rho <= RHO_FLOOR {
        return Err(Error::StrongWind { norm: w2.sqrt() });
    }
    if y == Vec2::ZERO {
        return Err(Error::ZeroVector);
    }
    let yw = y.dot(w);
    let disc = (yw * yw + rho * y.norm_sq()).sqrt();
    // The two branches are algebraically equal; picking by the sign of
    // <y,w> avoids cancellation in the numerator.
    if yw > 0.0 {
        Ok(y.norm_sq() / (disc + yw))
    } else {
        Ok((disc - yw) / rho)
    }
}

/// The Riemannian part and one-form of the Randers split, together with
/// `rho = 1 - |w|^2`.
#[derive(Clone, Copy, Debug)]
pub struct RandersData {
    pub rho: f64,
    /// Symmetric positive definite matrix of the Riemannian part.
    pub a: Mat2,
    /// Covector of the linear part; `|b|_a < 1` for weak drifts.
    pub b: Vec2,
}

impl RandersData {
    /// `sqrt(a(y,y)) + b(y)`; equals [`metric_value`] for the same drift.
    pub fn randers_norm(&self, y: Vec2) -> f64 {
        self.a.quadratic_form(y, y).sqrt() + self.b.dot(y)
    }

    /// `a(y, y)`.
    pub fn a_form(&self, y: Vec2) -> f64 {
        self.a.quadratic_form(y, y)
    }

    /// Norm of the one-form measured in `a`: `a^{ij} b_i b_j`. Equals
    /// `|w|^2` exactly.
    pub fn b_norm_sq(&self) -> f64 {
        let inv = self
            .a
            .inverse()
            .expect("Randers matrix is positive definite");
        inv.quadratic_form(self.b, self.b)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a.m[0][0] > 0.0 && self.a.det() > 0.0
    }
}

/// Pointwise Randers data of the drift `w`.
pub fn randers_data(w: Vec2) -> Result<RandersData> {
    let w2 = w.norm_sq();
    let rho = 1.0 - w2;
    if rho <= RHO_FLOOR {
        return Err(Error::StrongWind { norm: w2.sqrt() });
    }
    let rho2 = rho * rho;
    let a = Mat2::new(
        (rho + w.x * w.x) / rho2,
        w.x * w.y / rho2,
        w.x * w.y / rho2,
        (rho + w.y * w.y) / rho2,
    );
    Ok(RandersData {
        rho,
        a,
        b: -w / rho,
    })
}

/// First-derivative tensors of the drift at a point.
///
/// With `J_ij = d w^i / d x_j` (indices raised and lowered with the
/// Euclidean metric, so position does not matter):
///
/// * `l = J + J^T` (symmetric),
/// * `c = J - J^T` (antisymmetric),
/// * `s_i = w^k l_ki`, `t_i = w^k c_ki`.
///
/// Componentwise `s + t` is the gradient of `|w|^2`.
#[derive(Clone, Copy, Debug)]
pub struct NavigationTensors {
    pub l: Mat2,
    pub c: Mat2,
    pub s: Vec2,
    pub t: Vec2,
}

pub fn navigation_tensors(w: Vec2, jac: Mat2) -> NavigationTensors {
    let l = jac + jac.transpose();
    let c = jac - jac.transpose();
    NavigationTensors {
        l,
        c,
        s: l.transpose().mul_vec(w),
        t: c.transpose().mul_vec(w),
    }
}

/// Contractions of the navigation tensors with the drift and a tangent
/// vector: `s0 = s_i y^i`, `l00 = l_ij y^i y^j`, `lww = l_ij w^i w^j`,
/// `c0^i = c_ik y^k`.
#[derive(Clone, Copy, Debug)]
pub struct Contractions {
    pub s0: f64,
    pub l00: f64,
    pub lww: f64,
    pub c0: Vec2,
}

pub fn contract(tensors: &NavigationTensors, w: Vec2, y: Vec2) -> Contractions {
    Contractions {
        s0: tensors.s.dot(y),
        l00: tensors.l.quadratic_form(y, y),
        lww: tensors.l.quadratic_form(w, w),
        c0: tensors.c.mul_vec(y),
    }
}

/// Spray coefficients from pointwise data: drift value, drift Jacobian,
/// and tangent vector. This is the exact arithmetic chain used along
/// integrations; [`zeta_spray`] wraps it with a field lookup.
pub fn zeta_spray_parts(w: Vec2, jac: Mat2, y: Vec2) -> Result<Vec2> {
    let f = metric_value(w, y)?;
    let tensors = navigation_tensors(w, jac);
    let k = contract(&tensors, w, y);
    let bracket = 2.0 * f * k.s0 - k.l00 - f * f * k.lww;
    let lead = y / f - w;
    Ok(lead * (0.25 * bracket) - (tensors.s + tensors.t) * (0.25 * f * f) - k.c0 * (0.5 * f))
}

/// Geodesic spray coefficients `G = (G^1, G^2)` of the Randers metric at
/// the phase point `(x, y)`, valid for any weak drift field. Geodesics
/// satisfy `x'' + 2 G(x, x') = 0`.
pub fn zeta_spray(field: &WindField, x: Vec2, y: Vec2) -> Result<Vec2> {
    let w = field.eval(x)?;
    let jac = field.jacobian(x)?;
    zeta_spray_parts(w, jac, y)
}

/// Relative step for first-order differences in the oracle. Balances
/// truncation against roundoff for the 1e-6 agreement target with
/// [`zeta_spray`].
const FD_STEP: f64 = 1e-5;

/// Relative step for the second-order stencils (pure and mixed). Double
/// differences divide the roundoff by h^2, so they need the classic
/// eps^(1/4) scale: at 1e-5 the noise floor alone is ~2e-6, measured
/// 8e-6 end to end, while 3e-4 keeps both error sources near 1e-7.
const FD_STEP2: f64 = 3e-4;

/// Spray coefficients evaluated from the definition
/// `G^i = 1/4 g^{il} ( [F^2]_{x^k y^l} y^k - [F^2]_{x^l} )` with the
/// fundamental tensor `g_lj = 1/2 d^2 F^2 / dy^l dy^j`, all derivatives
/// taken by central finite differences of `F^2` in `x` and `y`.
///
/// This is a test oracle: it never touches the tensor machinery above, so
/// agreement with [`zeta_spray`] checks the whole chain. The `x` stencil
/// must stay inside the field domain.
pub fn hessian_spray(field: &WindField, x: Vec2, y: Vec2) -> Result<Vec2> {
    if y == Vec2::ZERO {
        return Err(Error::ZeroVector);
    }
    let hx = FD_STEP * x.norm().max(1.0);
    let hx2 = FD_STEP2 * x.norm().max(1.0);
    let hy2 = FD_STEP2 * y.norm().max(1.0);

    let domain = field.domain();
    for offset in [
        Vec2::new(hx2, 0.0),
        Vec2::new(-hx2, 0.0),
        Vec2::new(0.0, hx2),
        Vec2::new(0.0, -hx2),
    ] {
        if !domain.contains(x + offset) {
            return Err(Error::StencilOutsideDomain { point: x + offset });
        }
    }

    // phi(x, y) = F(w(x), y)^2
    let phi = |px: Vec2, py: Vec2| -> Result<f64> {
        let f = metric_value(field.eval(px)?, py)?;
        Ok(f * f)
    };

    let e1 = Vec2::new(1.0, 0.0);
    let e2 = Vec2::new(0.0, 1.0);

    // Fundamental tensor by second differences in y.
    let phi0 = phi(x, y)?;
    let mut g = [[0.0f64; 2]; 2];
    for (l, el) in [e1, e2].into_iter().enumerate() {
        let plus = phi(x, y + el * hy2)?;
        let minus = phi(x, y - el * hy2)?;
        g[l][l] = 0.5 * (plus - 2.0 * phi0 + minus) / (hy2 * hy2);
    }
    let pp = phi(x, y + e1 * hy2 + e2 * hy2)?;
    let pm = phi(x, y + e1 * hy2 - e2 * hy2)?;
    let mp = phi(x, y - e1 * hy2 + e2 * hy2)?;
    let mm = phi(x, y - e1 * hy2 - e2 * hy2)?;
    let gxy = 0.5 * (pp - pm - mp + mm) / (4.0 * hy2 * hy2);
    g[0][1] = gxy;
    g[1][0] = gxy;

    // First derivatives of F^2 in x.
    let mut phi_x = [0.0f64; 2];
    for (l, el) in [e1, e2].into_iter().enumerate() {
        phi_x[l] = (phi(x + el * hx, y)? - phi(x - el * hx, y)?) / (2.0 * hx);
    }

    // Mixed derivatives [F^2]_{x^k y^l}.
    let mut phi_xy = [[0.0f64; 2]; 2]; // phi_xy[k][l]
    for (k, ek) in [e1, e2].into_iter().enumerate() {
        for (l, el) in [e1, e2].into_iter().enumerate() {
            let pp = phi(x + ek * hx2, y + el * hy2)?;
            let pm = phi(x + ek * hx2, y - el * hy2)?;
            let mp = phi(x - ek * hx2, y + el * hy2)?;
            let mm = phi(x - ek * hx2, y - el * hy2)?;
            phi_xy[k][l] = (pp - pm - mp + mm) / (4.0 * hx2 * hy2);
        }
    }

    let g_mat = Mat2::new(g[0][0], g[0][1], g[1][0], g[1][1]);
    let g_inv = g_mat.inverse().ok_or(Error::NoConvergence {
        detail: "fundamental tensor is numerically singular".into(),
    })?;
    let rhs = Vec2::new(
        phi_xy[0][0] * y.x + phi_xy[1][0] * y.y - phi_x[0],
        phi_xy[0][1] * y.x + phi_xy[1][1] * y.y - phi_x[1],
    );
    Ok(g_inv.mul_vec(rhs) * 0.25)
}
