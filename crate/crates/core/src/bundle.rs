//! Configuration space of the car, `P = M × 𝓔`.
//!
//! The base `M` holds the shape `(α, β)`: the accumulated rotation of the
//! front wheel and the steering angle. The fiber `𝓔` holds the pose
//! `(x, y, φ)` of the tie rod, with `(x, y)` the centre of the front axle.
//! E(2) acts on the pose only, so the action never changes the shape.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::group_e2::{wrap_angle, AlgebraElement, GroupElement};

/// Wheel radius `R` and tie-rod length `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarParams {
    wheel_radius: f64,
    rod_length: f64,
}

impl CarParams {
    pub fn new(wheel_radius: f64, rod_length: f64) -> Result<Self> {
        if !(wheel_radius.is_finite() && wheel_radius > 0.0) {
            return Err(Error::InvalidParameter {
                name: "R",
                value: wheel_radius,
            });
        }
        if !(rod_length.is_finite() && rod_length > 0.0) {
            return Err(Error::InvalidParameter {
                name: "l",
                value: rod_length,
            });
        }
        Ok(Self {
            wheel_radius,
            rod_length,
        })
    }

    #[inline]
    pub fn wheel_radius(&self) -> f64 {
        self.wheel_radius
    }

    #[inline]
    pub fn rod_length(&self) -> f64 {
        self.rod_length
    }

    /// `R / l`, the rate of heading change per unit wheel rotation at full lock.
    #[inline]
    pub fn ratio(&self) -> f64 {
        self.wheel_radius / self.rod_length
    }
}

/// A point of the base: front-wheel rotation `alpha` and steering angle `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Shape {
    pub alpha: f64,
    pub beta: f64,
}

impl Shape {
    pub const fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }
}

/// A point of the fiber: front-axle centre and tie-rod heading (unwrapped).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub phi: f64,
}

impl Pose {
    pub const fn new(x: f64, y: f64, phi: f64) -> Self {
        Self { x, y, phi }
    }

    /// Largest componentwise difference, with the heading difference wrapped to `(−π, π]`.
    pub fn distance_max(&self, other: &Pose) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max(wrap_angle(self.phi - other.phi).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Configuration {
    pub shape: Shape,
    pub pose: Pose,
}

impl Configuration {
    pub const fn new(alpha: f64, beta: f64, x: f64, y: f64, phi: f64) -> Self {
        Self {
            shape: Shape::new(alpha, beta),
            pose: Pose::new(x, y, phi),
        }
    }

    pub const fn from_parts(shape: Shape, pose: Pose) -> Self {
        Self { shape, pose }
    }

    /// `[α, β, x, y, φ]`
    pub fn to_array(&self) -> [f64; 5] {
        [
            self.shape.alpha,
            self.shape.beta,
            self.pose.x,
            self.pose.y,
            self.pose.phi,
        ]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Componentwise difference `self − other` as a tangent (no angle wrapping).
    pub fn displacement_from(&self, other: &Configuration) -> ConfigTangent {
        let a = self.to_array();
        let b = other.to_array();
        ConfigTangent::from_array(std::array::from_fn(|i| a[i] - b[i]))
    }

    /// Moves along a tangent by `t` in coordinates (a straight step, not a flow).
    pub fn offset(&self, v: &ConfigTangent, t: f64) -> Configuration {
        let a = self.to_array();
        let d = v.to_array();
        Configuration::from_array(std::array::from_fn(|i| a[i] + t * d[i]))
    }

    /// Largest componentwise difference; heading compared modulo 2π.
    pub fn distance_max(&self, other: &Configuration) -> f64 {
        (self.shape.alpha - other.shape.alpha)
            .abs()
            .max((self.shape.beta - other.shape.beta).abs())
            .max(self.pose.distance_max(&other.pose))
    }
}

/// Tangent vector on `P` in the coordinate basis `∂α, ∂β, ∂x, ∂y, ∂φ`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConfigTangent {
    pub d_alpha: f64,
    pub d_beta: f64,
    pub d_x: f64,
    pub d_y: f64,
    pub d_phi: f64,
}

impl ConfigTangent {
    pub const ZERO: ConfigTangent = ConfigTangent::new(0.0, 0.0, 0.0, 0.0, 0.0);
    pub const D_ALPHA: ConfigTangent = ConfigTangent::new(1.0, 0.0, 0.0, 0.0, 0.0);
    pub const D_BETA: ConfigTangent = ConfigTangent::new(0.0, 1.0, 0.0, 0.0, 0.0);
    pub const D_X: ConfigTangent = ConfigTangent::new(0.0, 0.0, 1.0, 0.0, 0.0);
    pub const D_Y: ConfigTangent = ConfigTangent::new(0.0, 0.0, 0.0, 1.0, 0.0);
    pub const D_PHI: ConfigTangent = ConfigTangent::new(0.0, 0.0, 0.0, 0.0, 1.0);

    pub const fn new(d_alpha: f64, d_beta: f64, d_x: f64, d_y: f64, d_phi: f64) -> Self {
        Self {
            d_alpha,
            d_beta,
            d_x,
            d_y,
            d_phi,
        }
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.d_alpha, self.d_beta, self.d_x, self.d_y, self.d_phi]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub fn shape_part(&self) -> ShapeTangent {
        ShapeTangent::new(self.d_alpha, self.d_beta)
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Add for ConfigTangent {
    type Output = ConfigTangent;
    fn add(self, rhs: Self) -> Self {
        let a = self.to_array();
        let b = rhs.to_array();
        Self::from_array(std::array::from_fn(|i| a[i] + b[i]))
    }
}

impl Sub for ConfigTangent {
    type Output = ConfigTangent;
    fn sub(self, rhs: Self) -> Self {
        self + (-1.0 * rhs)
    }
}

impl Mul<ConfigTangent> for f64 {
    type Output = ConfigTangent;
    fn mul(self, rhs: ConfigTangent) -> ConfigTangent {
        ConfigTangent::from_array(rhs.to_array().map(|v| self * v))
    }
}

/// Tangent vector on the base `M`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ShapeTangent {
    pub d_alpha: f64,
    pub d_beta: f64,
}

impl ShapeTangent {
    pub const fn new(d_alpha: f64, d_beta: f64) -> Self {
        Self { d_alpha, d_beta }
    }

    /// The pushforward through the section, `(dα, dβ, 0, 0, 0)`.
    pub fn through_section(&self) -> ConfigTangent {
        ConfigTangent::new(self.d_alpha, self.d_beta, 0.0, 0.0, 0.0)
    }
}

/// `π : (α, β, x, y, φ) ↦ (α, β)`.
pub fn project(p: &Configuration) -> Shape {
    p.shape
}

/// The global section `σ(α, β) = (α, β, 0, 0, 0)`.
pub fn section(m: Shape) -> Configuration {
    Configuration::from_parts(m, Pose::default())
}

/// `(x cosΘ − y sinΘ + b1, x sinΘ + y cosΘ + b2, φ + Θ)`.
pub fn act_on_pose(g: &GroupElement, e: &Pose) -> Pose {
    let [x, y] = g.act_on_point([e.x, e.y]);
    Pose::new(x, y, e.phi + g.theta)
}

pub fn act_on_configuration(g: &GroupElement, p: &Configuration) -> Configuration {
    Configuration::from_parts(p.shape, act_on_pose(g, &p.pose))
}

/// The unique group element carrying the origin pose `(0, 0, 0)` to `e`.
pub fn pose_to_group(e: &Pose) -> GroupElement {
    GroupElement::new(e.phi, [e.x, e.y])
}

/// Generator of `λ ↦ act_on_configuration(exp(λC), p)` at `λ = 0`.
///
/// `ξ₀ = −y∂x + x∂y + ∂φ`, `ξ₁ = ∂x`, `ξ₂ = ∂y`, extended linearly.
pub fn fundamental_field(c: &AlgebraElement, p: &Configuration) -> ConfigTangent {
    let (x, y) = (p.pose.x, p.pose.y);
    ConfigTangent::new(
        0.0,
        0.0,
        -c.lambda0 * y + c.lambda1,
        c.lambda0 * x + c.lambda2,
        c.lambda0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn params_reject_nonpositive() {
        assert!(CarParams::new(1.0, 2.0).is_ok());
        assert!(matches!(
            CarParams::new(0.0, 2.0),
            Err(Error::InvalidParameter { name: "R", .. })
        ));
        assert!(matches!(
            CarParams::new(1.0, -1.0),
            Err(Error::InvalidParameter { name: "l", .. })
        ));
        assert!(CarParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn projection_and_section() {
        assert_eq!(
            project(&Configuration::new(1.0, 2.0, 3.0, 4.0, 5.0)),
            Shape::new(1.0, 2.0)
        );
        let m = Shape::new(0.3, -0.7);
        assert_eq!(project(&section(m)), m);
        assert_eq!(
            section(Shape::new(0.0, 0.0)),
            Configuration::new(0.0, 0.0, 0.0, 0.0, 0.0)
        );
        assert_eq!(
            section(Shape::new(1.2, -0.4)),
            Configuration::new(1.2, -0.4, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn pose_action_examples() {
        let e = Pose::new(1.0, 0.0, 0.0);
        assert_eq!(act_on_pose(&GroupElement::identity(), &e), e);

        let moved = act_on_pose(&GroupElement::rotation(FRAC_PI_2), &e);
        assert!(moved.distance_max(&Pose::new(0.0, 1.0, FRAC_PI_2)) < 1e-15);

        let g = GroupElement::new(0.9, [2.0, -1.0]);
        let moved = act_on_pose(&g, &Pose::default());
        assert!(moved.distance_max(&Pose::new(2.0, -1.0, 0.9)) < 1e-15);
    }

    #[test]
    fn configuration_action_example() {
        let g = GroupElement::new(PI, [1.0, 1.0]);
        let p = Configuration::new(0.4, -0.2, 1.0, 0.0, 0.0);
        let q = act_on_configuration(&g, &p);
        assert_eq!(q.shape, p.shape);
        assert!(q.distance_max(&Configuration::new(0.4, -0.2, 0.0, 1.0, PI)) < 1e-15);
    }

    #[test]
    fn pose_to_group_examples() {
        assert!(pose_to_group(&Pose::default()).approx_eq(&GroupElement::identity(), 0.0));
        let g = pose_to_group(&Pose::new(3.0, 4.0, FRAC_PI_2));
        assert!(g.approx_eq(&GroupElement::new(FRAC_PI_2, [3.0, 4.0]), 0.0));
    }

    #[test]
    fn fundamental_field_basis() {
        let p = Configuration::new(0.2, 0.1, 1.0, 0.0, 0.3);
        assert_eq!(
            fundamental_field(&AlgebraElement::E1, &p),
            ConfigTangent::D_X
        );
        assert_eq!(
            fundamental_field(&AlgebraElement::E0, &p),
            ConfigTangent::new(0.0, 0.0, 0.0, 1.0, 1.0)
        );
        assert_eq!(
            fundamental_field(&AlgebraElement::E2, &p),
            ConfigTangent::D_Y
        );
    }

    #[test]
    fn fundamental_field_matches_flow_derivative() {
        let h = 1e-5;
        let p = Configuration::new(0.5, -0.3, 1.7, -0.8, 2.1);
        let c = AlgebraElement::new(0.6, -1.1, 0.4);
        let fwd = act_on_configuration(&c.exp(h), &p);
        let bwd = act_on_configuration(&c.exp(-h), &p);
        let fd = (1.0 / (2.0 * h)) * fwd.displacement_from(&bwd);
        let field = fundamental_field(&c, &p);
        assert_abs_diff_eq!((fd - field).max_abs(), 0.0, epsilon = 1e-8);
    }
}
