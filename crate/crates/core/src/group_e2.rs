//! The Euclidean group E(2) and its Lie algebra e(2).
//!
//! Points of the plane are row vectors and the group acts from the right:
//! `p ↦ p·B + b`. In homogeneous form a point is `(x1, x2, 1)` and a group
//! element is the 3×3 block matrix
//!
//! ```text
//! ⎡ cosΘ   sinΘ  0 ⎤
//! ⎢ −sinΘ  cosΘ  0 ⎥
//! ⎣  b1     b2   1 ⎦
//! ```
//!
//! so that acting by `g1` and then by `g2` is acting by the matrix product
//! `M(g1)·M(g2)`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix2, Matrix3};

/// Below this value of `|t·λ0|` the exponential uses a Taylor series for the
/// translation part instead of the closed form.
const EXP_SERIES_THRESHOLD: f64 = 1e-8;

/// Tolerance used by [`GroupElement::approx_eq`] callers that have no better idea.
pub const DEFAULT_GROUP_TOLERANCE: f64 = 1e-9;

/// Rotation block `B(Θ) = [[cosΘ, sinΘ], [−sinΘ, cosΘ]]` acting on row vectors.
pub fn rotation_block(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, s, -s, c)
}

/// Reduces an angle to the interval `(−π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// An element of E(2): rotation angle `theta` (kept unwrapped) and translation `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub theta: f64,
    pub b: [f64; 2],
}

impl Default for GroupElement {
    fn default() -> Self {
        Self::identity()
    }
}

impl GroupElement {
    pub const fn new(theta: f64, b: [f64; 2]) -> Self {
        Self { theta, b }
    }

    pub const fn identity() -> Self {
        Self::new(0.0, [0.0, 0.0])
    }

    pub const fn rotation(theta: f64) -> Self {
        Self::new(theta, [0.0, 0.0])
    }

    pub const fn translation(b1: f64, b2: f64) -> Self {
        Self::new(0.0, [b1, b2])
    }

    pub fn rotation_block(&self) -> Matrix2<f64> {
        rotation_block(self.theta)
    }

    /// The homogeneous 3×3 representative.
    pub fn matrix(&self) -> Matrix3<f64> {
        let (s, c) = self.theta.sin_cos();
        Matrix3::new(c, s, 0.0, -s, c, 0.0, self.b[0], self.b[1], 1.0)
    }

    /// Recovers `(Θ, b)` from a homogeneous matrix. `Θ` lands in `(−π, π]`.
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        Self::new(m[(0, 1)].atan2(m[(0, 0)]), [m[(2, 0)], m[(2, 1)]])
    }

    /// `p·B + b`.
    pub fn act_on_point(&self, p: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.theta.sin_cos();
        [
            p[0] * c - p[1] * s + self.b[0],
            p[0] * s + p[1] * c + self.b[1],
        ]
    }

    /// The element whose action is "first `self`, then `other`".
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let moved = other.act_on_point(self.b);
        GroupElement::new(self.theta + other.theta, moved)
    }

    pub fn inverse(&self) -> GroupElement {
        let inv = GroupElement::rotation(-self.theta);
        let b = inv.act_on_point(self.b);
        GroupElement::new(-self.theta, [-b[0], -b[1]])
    }

    /// Compares rotation angles modulo 2π and translations componentwise.
    pub fn approx_eq(&self, other: &GroupElement, tol: f64) -> bool {
        wrap_angle(self.theta - other.theta).abs() <= tol
            && (self.b[0] - other.b[0]).abs() <= tol
            && (self.b[1] - other.b[1]).abs() <= tol
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: GroupElement) -> GroupElement {
        self.compose(&rhs)
    }
}

/// An element `λ0·e0 + λ1·e1 + λ2·e2` of e(2).
///
/// `e0` generates rotations, `e1` and `e2` translations along the two axes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AlgebraElement {
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl AlgebraElement {
    pub const E0: AlgebraElement = AlgebraElement::new(1.0, 0.0, 0.0);
    pub const E1: AlgebraElement = AlgebraElement::new(0.0, 1.0, 0.0);
    pub const E2: AlgebraElement = AlgebraElement::new(0.0, 0.0, 1.0);
    pub const ZERO: AlgebraElement = AlgebraElement::new(0.0, 0.0, 0.0);

    pub const fn new(lambda0: f64, lambda1: f64, lambda2: f64) -> Self {
        Self {
            lambda0,
            lambda1,
            lambda2,
        }
    }

    pub const fn basis(index: usize) -> Self {
        match index {
            0 => Self::E0,
            1 => Self::E1,
            _ => Self::E2,
        }
    }

    pub fn from_array(c: [f64; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.lambda0, self.lambda1, self.lambda2]
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(
            0.0,
            self.lambda0,
            0.0,
            -self.lambda0,
            0.0,
            0.0,
            self.lambda1,
            self.lambda2,
            0.0,
        )
    }

    /// Reads the coefficients off a matrix of e(2) shape; the other entries are ignored.
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        Self::new(m[(0, 1)], m[(2, 0)], m[(2, 1)])
    }

    pub fn max_abs(&self) -> f64 {
        self.lambda0
            .abs()
            .max(self.lambda1.abs())
            .max(self.lambda2.abs())
    }

    /// Lie bracket as the matrix commutator `C1·C2 − C2·C1`.
    pub fn bracket(&self, other: &AlgebraElement) -> AlgebraElement {
        let a = self.matrix();
        let b = other.matrix();
        AlgebraElement::from_matrix(&(a * b - b * a))
    }

    /// Lie bracket through the structure constants, `λᵃ = cᵃ_bc λ1ᵇ λ2ᶜ`.
    pub fn bracket_by_structure_constants(&self, other: &AlgebraElement) -> AlgebraElement {
        let x = self.to_array();
        let y = other.to_array();
        let mut out = [0.0; 3];
        for (a, slot) in out.iter_mut().enumerate() {
            for (b, xb) in x.iter().enumerate() {
                for (c, yc) in y.iter().enumerate() {
                    let k = structure_constant(a, b, c);
                    if k != 0.0 {
                        *slot += k * xb * yc;
                    }
                }
            }
        }
        AlgebraElement::from_array(out)
    }

    /// The one-parameter subgroup element `exp(t·C)`.
    pub fn exp(&self, t: f64) -> GroupElement {
        let theta = t * self.lambda0;
        // b = (λ1, λ2)·∫₀ᵗ B(sλ0) ds = (λ1·S − λ2·K, λ1·K + λ2·S)
        let (s_int, k_int) = if theta.abs() < EXP_SERIES_THRESHOLD {
            let th2 = theta * theta;
            let s = t * (1.0 - th2 / 6.0 + th2 * th2 / 120.0 - th2 * th2 * th2 / 5040.0);
            let k = t * theta * (0.5 - th2 / 24.0 + th2 * th2 / 720.0 - th2 * th2 * th2 / 40320.0);
            (s, k)
        } else {
            let half = (0.5 * theta).sin();
            (theta.sin() / self.lambda0, 2.0 * half * half / self.lambda0)
        };
        GroupElement::new(
            theta,
            [
                self.lambda1 * s_int - self.lambda2 * k_int,
                self.lambda1 * k_int + self.lambda2 * s_int,
            ],
        )
    }
}

/// Structure constants `cᵃ_bc` defined by `[e_b, e_c] = cᵃ_bc e_a`.
///
/// The non-zero ones are `c²₁₀ = −c²₀₁ = c¹₀₂ = −c¹₂₀ = 1`.
pub fn structure_constant(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (2, 1, 0) | (1, 0, 2) => 1.0,
        (2, 0, 1) | (1, 2, 0) => -1.0,
        _ => 0.0,
    }
}

impl Add for AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.lambda0 + rhs.lambda0,
            self.lambda1 + rhs.lambda1,
            self.lambda2 + rhs.lambda2,
        )
    }
}

impl Sub for AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> Self {
        Self::new(-self.lambda0, -self.lambda1, -self.lambda2)
    }
}

impl Mul<AlgebraElement> for f64 {
    type Output = AlgebraElement;
    fn mul(self, rhs: AlgebraElement) -> AlgebraElement {
        AlgebraElement::new(self * rhs.lambda0, self * rhs.lambda1, self * rhs.lambda2)
    }
}
