//! Command-line front end for `carbundle`: scenario files, trajectory CSV and
//! SVG output, the parking planner and the identity checks.

pub mod app;
pub mod scenario;
pub mod svg;
pub mod trajectory_csv;
pub mod verify;

pub use app::{run, Exit};
