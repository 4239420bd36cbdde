//! The no-slip connection on `P` and everything derived from it.
//!
//! The connection form `ω = ω⁰e0 + ω¹e1 + ω²e2` vanishes exactly on the
//! velocities that respect the rolling constraints:
//!
//! ```text
//! ω⁰ = dφ − (R/l) sinβ dα
//! ω¹ = dx + y ω⁰ − R cos(β+φ) dα
//! ω² = dy − x ω⁰ − R sin(β+φ) dα
//! ```
//!
//! Each analytic formula here has a second, independent route
//! ([`connection_via_gauge_transform`], [`curvature_via_structure_equation`])
//! so the two can be checked against each other.

use nalgebra::Matrix3;

use crate::bundle::{
    pose_to_group, section, CarParams, ConfigTangent, Configuration, Shape, ShapeTangent,
};
use crate::group_e2::AlgebraElement;

/// Value of `ω` on one tangent vector.
pub type ConnectionValue = AlgebraElement;

/// Value of `Ω` on a pair of tangent vectors.
pub type CurvatureValue = AlgebraElement;

/// Central-difference step used for the exterior derivative in
/// [`curvature_via_structure_equation`].
pub const EXTERIOR_DERIVATIVE_STEP: f64 = 1e-5;

pub fn connection_form(p: &Configuration, v: &ConfigTangent, k: &CarParams) -> ConnectionValue {
    let r = k.wheel_radius();
    let Configuration { shape, pose } = *p;
    let w0 = v.d_phi - k.ratio() * shape.beta.sin() * v.d_alpha;
    let heading = shape.beta + pose.phi;
    let w1 = v.d_x + pose.y * w0 - r * heading.cos() * v.d_alpha;
    let w2 = v.d_y - pose.x * w0 - r * heading.sin() * v.d_alpha;
    AlgebraElement::new(w0, w1, w2)
}

/// Pullback of `ω` through the section: `𝒜 = −(R/l)·[sinβ e0 + l cosβ e1 + l sinβ e2] dα`.
pub fn gauge_potential(m: &Shape, w: &ShapeTangent, k: &CarParams) -> ConnectionValue {
    let r = k.wheel_radius();
    let (s, c) = m.beta.sin_cos();
    AlgebraElement::new(
        -k.ratio() * s * w.d_alpha,
        -r * c * w.d_alpha,
        -r * s * w.d_alpha,
    )
}

/// `ω = 𝓑⁻¹ 𝒜 𝓑 + 𝓑⁻¹ d𝓑`, with `𝓑` the group element of the pose.
///
/// Everything is done with 3×3 matrices; `d𝓑(v)` is differentiated by hand.
pub fn connection_via_gauge_transform(
    p: &Configuration,
    v: &ConfigTangent,
    k: &CarParams,
) -> ConnectionValue {
    let frame = pose_to_group(&p.pose);
    let b = frame.matrix();
    let b_inv = frame.inverse().matrix();
    let potential = gauge_potential(&p.shape, &v.shape_part(), k).matrix();

    let (s, c) = p.pose.phi.sin_cos();
    let d_frame = Matrix3::new(
        -s * v.d_phi,
        c * v.d_phi,
        0.0,
        -c * v.d_phi,
        -s * v.d_phi,
        0.0,
        v.d_x,
        v.d_y,
        0.0,
    );

    AlgebraElement::from_matrix(&(b_inv * potential * b + b_inv * d_frame))
}

/// `H_α = ∂α + R cos(β+φ) ∂x + R sin(β+φ) ∂y + (R/l) sinβ ∂φ`.
pub fn horizontal_alpha(p: &Configuration, k: &CarParams) -> ConfigTangent {
    let r = k.wheel_radius();
    let heading = p.shape.beta + p.pose.phi;
    ConfigTangent::new(
        1.0,
        0.0,
        r * heading.cos(),
        r * heading.sin(),
        k.ratio() * p.shape.beta.sin(),
    )
}

/// `H_β = ∂β`: steering alone does not move the rod.
pub fn horizontal_beta() -> ConfigTangent {
    ConfigTangent::D_BETA
}

pub fn horizontal_lift(p: &Configuration, w: &ShapeTangent, k: &CarParams) -> ConfigTangent {
    w.d_alpha * horizontal_alpha(p, k) + w.d_beta * horizontal_beta()
}

/// Coefficients of `Ω` on `dα∧dβ` at `p`.
pub fn curvature_coefficients(p: &Configuration, k: &CarParams) -> CurvatureValue {
    let r = k.wheel_radius();
    let cos_beta = p.shape.beta.cos();
    let heading = p.shape.beta + p.pose.phi;
    let omega0 = k.ratio() * cos_beta;
    AlgebraElement::new(
        omega0,
        -r * heading.sin() + omega0 * p.pose.y,
        r * heading.cos() - omega0 * p.pose.x,
    )
}

pub fn curvature(
    p: &Configuration,
    v1: &ConfigTangent,
    v2: &ConfigTangent,
    k: &CarParams,
) -> CurvatureValue {
    let area = v1.d_alpha * v2.d_beta - v1.d_beta * v2.d_alpha;
    area * curvature_coefficients(p, k)
}

/// `Ωᵃ = dωᵃ + ½ cᵃ_bc ωᵇ∧ωᶜ`, with `dω` from central differences.
pub fn curvature_via_structure_equation(
    p: &Configuration,
    v1: &ConfigTangent,
    v2: &ConfigTangent,
    k: &CarParams,
) -> CurvatureValue {
    curvature_via_structure_equation_with_step(p, v1, v2, k, EXTERIOR_DERIVATIVE_STEP)
}

pub fn curvature_via_structure_equation_with_step(
    p: &Configuration,
    v1: &ConfigTangent,
    v2: &ConfigTangent,
    k: &CarParams,
    h: f64,
) -> CurvatureValue {
    // Constant-coefficient extensions of v1, v2 commute, so
    // dω(v1, v2) = v1[ω(v2)] − v2[ω(v1)].
    let directional = |along: &ConfigTangent, of: &ConfigTangent| {
        let fwd = connection_form(&p.offset(along, h), of, k);
        let bwd = connection_form(&p.offset(along, -h), of, k);
        (0.5 / h) * (fwd - bwd)
    };
    let d_omega = directional(v1, v2) - directional(v2, v1);

    // ½ cᵃ_bc (ωᵇ∧ωᶜ)(v1, v2) = cᵃ_bc ωᵇ(v1) ωᶜ(v2)
    let wedge =
        connection_form(p, v1, k).bracket_by_structure_constants(&connection_form(p, v2, k));
    d_omega + wedge
}

/// `ℱ = σ*Ω`: the `dα∧dβ` coefficients of the curvature at `σ(m)`.
pub fn field_strength(m: &Shape, k: &CarParams) -> CurvatureValue {
    curvature_coefficients(&section(*m), k)
}
