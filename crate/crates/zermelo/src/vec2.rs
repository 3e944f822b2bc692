//! Plane vectors and 2x2 matrices.
//!
//! Everything in this crate lives in the flat plane, so a pair of `f64`s and
//! a row-major 2x2 matrix cover all the linear algebra we need.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// A point or vector in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector at the given angle from the positive x-axis.
    pub fn from_angle(theta: f64) -> Self {
        Vec2::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    /// Counterclockwise perpendicular: (x, y) -> (-y, x).
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    /// Angle from the positive x-axis, in (-pi, pi].
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        *self = *self + rhs;
    }
}

impl SubAssign for Vec2 {
    fn sub_assign(&mut self, rhs: Vec2) {
        *self = *self - rhs;
    }
}

/// Row-major 2x2 matrix; `m[i][j]` is the entry in row `i`, column `j`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2 { m: [[0.0; 2]; 2] };
    pub const IDENTITY: Mat2 = Mat2 {
        m: [[1.0, 0.0], [0.0, 1.0]],
    };

    pub const fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Mat2 {
            m: [[m11, m12], [m21, m22]],
        }
    }

    pub fn from_rows(r0: Vec2, r1: Vec2) -> Self {
        Mat2::new(r0.x, r0.y, r1.x, r1.y)
    }

    pub fn row(self, i: usize) -> Vec2 {
        Vec2::new(self.m[i][0], self.m[i][1])
    }

    pub fn mul_vec(self, v: Vec2) -> Vec2 {
        Vec2::new(self.row(0).dot(v), self.row(1).dot(v))
    }

    pub fn transpose(self) -> Mat2 {
        Mat2::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn det(self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn inverse(self) -> Option<Mat2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Mat2::new(
            self.m[1][1] / d,
            -self.m[0][1] / d,
            -self.m[1][0] / d,
            self.m[0][0] / d,
        ))
    }

    /// u^T M v.
    pub fn quadratic_form(self, u: Vec2, v: Vec2) -> f64 {
        u.dot(self.mul_vec(v))
    }

    pub fn is_symmetric(self, tol: f64) -> bool {
        (self.m[0][1] - self.m[1][0]).abs() <= tol
    }

    pub fn is_antisymmetric(self, tol: f64) -> bool {
        self.m[0][0].abs() <= tol
            && self.m[1][1].abs() <= tol
            && (self.m[0][1] + self.m[1][0]).abs() <= tol
    }

    /// Largest absolute entry; convenient for tolerance checks.
    pub fn max_abs(self) -> f64 {
        self.m
            .iter()
            .flatten()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] + rhs.m[0][0],
            self.m[0][1] + rhs.m[0][1],
            self.m[1][0] + rhs.m[1][0],
            self.m[1][1] + rhs.m[1][1],
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] - rhs.m[0][0],
            self.m[0][1] - rhs.m[0][1],
            self.m[1][0] - rhs.m[1][0],
            self.m[1][1] - rhs.m[1][1],
        )
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        Mat2::new(
            self.m[0][0] * s,
            self.m[0][1] * s,
            self.m[1][0] * s,
            self.m[1][1] * s,
        )
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self * -1.0
    }
}
