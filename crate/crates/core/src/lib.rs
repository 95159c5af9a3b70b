//! Exact convex-hull representations for quadratic optimization over points
//! `0 ≤ x ≤ y` with binary switching variables `y`, for one and two
//! switching variables.

pub mod cones;
pub mod error;
pub mod experiments;
pub mod hull1;
pub mod hull2;
pub mod oracle;
pub mod par;
pub mod pointfile;
pub mod repair;
pub mod report;
pub mod sample;
pub mod selftest;
pub mod solver;
pub mod smat;

pub use error::{Error, Result};
pub use report::{Report, Slack};
pub use smat::{SymMat, TolerancePolicy};
