//! Kinematics of a car as a connection on the principal E(2)-bundle of its
//! configurations.
//!
//! A configuration is `(α, β, x, y, φ)`: front-wheel rotation, steering
//! angle, front-axle position and tie-rod heading. The no-slip rolling
//! constraints form a connection whose horizontal lifts are the admissible
//! motions; its curvature is what makes parking cycles work.
//!
//! * [`group_e2`]: E(2), e(2), exponential map and brackets.
//! * [`bundle`]: configuration space, projection, section, group action.
//! * [`connection`]: connection form, gauge potential, lifts, curvature.
//! * [`transport`]: driver programs and their horizontal lifts.
//! * [`maneuvers`]: cycles, brackets of lifted fields, parking planner.
//! * [`heading_field`]: the equivariant rod-direction field.

pub mod bundle;
pub mod connection;
pub mod convergence;
pub mod error;
pub mod group_e2;
pub mod heading_field;
pub mod maneuvers;
pub mod transport;

pub use bundle::{
    act_on_configuration, act_on_pose, fundamental_field, pose_to_group, project, section,
    CarParams, ConfigTangent, Configuration, Pose, Shape, ShapeTangent,
};
pub use connection::{ConnectionValue, CurvatureValue};
pub use error::{Error, Result};
pub use group_e2::{AlgebraElement, GroupElement};
pub use maneuvers::{CycleKind, CycleReport, ParkingOutcome};
pub use transport::{DriverProgram, Sample, Segment, Trajectory};
