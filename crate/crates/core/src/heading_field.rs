//! The unit vector along the tie rod as an equivariant function on `P`.
//!
//! `ψ(p) = (cosφ, sinφ)` transforms under the group as
//! `ψ(R_g p) = ρ(g⁻¹) ψ(p)` with `ρ(g)` the 2×2 matrix
//! `[[cosΘ, sinΘ], [−sinΘ, cosΘ]]` acting on column vectors.

use nalgebra::{Matrix2, Vector2};

use crate::bundle::{act_on_configuration, CarParams, Configuration, Shape};
use crate::group_e2::{rotation_block, GroupElement};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadingVector {
    pub v1: f64,
    pub v2: f64,
}

impl HeadingVector {
    pub fn from_angle(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self { v1: c, v2: s }
    }

    pub fn norm(&self) -> f64 {
        self.v1.hypot(self.v2)
    }

    fn as_vector(&self) -> Vector2<f64> {
        Vector2::new(self.v1, self.v2)
    }
}

/// Orthogonal 2×2 matrix with unit determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepMatrix(pub Matrix2<f64>);

impl RepMatrix {
    pub fn apply(&self, v: &HeadingVector) -> HeadingVector {
        let w = self.0 * v.as_vector();
        HeadingVector { v1: w[0], v2: w[1] }
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.0
    }
}

pub fn psi(p: &Configuration) -> HeadingVector {
    HeadingVector::from_angle(p.pose.phi)
}

/// Depends on the rotation angle only.
pub fn rho(g: &GroupElement) -> RepMatrix {
    RepMatrix(rotation_block(g.theta))
}

/// Max-norm of `ψ(R_g p) − ρ(g⁻¹) ψ(p)`.
pub fn equivariance_defect(g: &GroupElement, p: &Configuration) -> f64 {
    let moved = psi(&act_on_configuration(g, p));
    let expected = rho(&g.inverse()).apply(&psi(p));
    (moved.v1 - expected.v1)
        .abs()
        .max((moved.v2 - expected.v2).abs())
}

/// Heading turned while the wheel rotates by `δα` at steering `β`: `δα (R/l) sinβ`.
pub fn heading_rotation_angle(delta_alpha: f64, beta: f64, k: &CarParams) -> f64 {
    delta_alpha * k.ratio() * beta.sin()
}

/// Change of `σ*ψ = (1, 0)` under parallel transport along `δα` at shape `m`:
/// `(0, δα (R/l) sinβ)`, i.e. a rotation towards `e⃗₂`.
pub fn covariant_change(m: &Shape, delta_alpha: f64, k: &CarParams) -> [f64; 2] {
    [0.0, heading_rotation_angle(delta_alpha, m.beta, k)]
}
