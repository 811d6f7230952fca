//! Simulation toolkit for Gage's area-preserving flow and the curve
//! shortening flow on closed plane curves, with conservation-law and
//! a-priori-bound diagnostics.
//!
//! The polar backend evolves the radial function of a star-shaped curve
//! on a uniform periodic θ-grid; the marker backend front-tracks a
//! polyline and handles immersed curves. See the `examples/` directory
//! for runnable entry points per capability, and the `curveflow` binary
//! for scenario files.

pub mod diagnostics;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod integrate;
pub mod ops;
pub mod scenario;
pub mod verify;

pub use error::{Error, Result};
pub use flow::FlowLaw;
pub use geometry::{MarkerCurve, PolarCurve, Vec2};
pub use integrate::{evolve, FlowState, StepperConfig};
pub use ops::Scheme;
