//! Planning in the discrete acceleration ("racetrack") model.
//!
//! A vehicle state is a [`Configuration`]: an integer position and the last
//! integer move vector. Between two steps every component of the move vector
//! may change by at most one unit. This crate provides
//!
//! * exact feasible-length sets for branching two configurations
//!   ([`branching_cost`]), computed per dimension in constant time and
//!   intersected across dimensions,
//! * constant-size control sequences realizing any feasible length
//!   ([`branching_trajectory`]),
//! * a dynamic program visiting an ordered list of cities ([`multipoint`]),
//! * brute-force configuration-graph searches used as ground truth
//!   ([`oracle`]), and instance generators plus closed-form cost bounds for
//!   the slope family ([`instances`]).

pub mod branching_cost;
pub mod branching_trajectory;
mod error;
pub mod instances;
pub mod interval;
pub mod kinematics;
pub mod multipoint;
pub mod oracle;

pub use error::{Error, Result};
pub use interval::MultiInterval;
pub use kinematics::{
    Action, CompactTrajectory, Config1d, Configuration, ControlSegment, Trajectory,
};
