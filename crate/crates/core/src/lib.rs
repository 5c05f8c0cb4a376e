//! Numerical verification of positive-definiteness criteria for radial and
//! norm-dependent functions on ℝⁿ.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the verdict engines use.

pub mod bodies;
pub mod criteria;
pub mod grammar;
pub mod numerics;
pub mod profiles;
mod report;
mod scalar;
pub mod seeds;
pub mod transforms;

pub use report::{Evidence, HypothesisReport, Tri};
pub use scalar::Real;

pub type Profile = profiles::RadialProfile<f64>;
pub type Body = bodies::NormBody<f64>;
pub type Test = transforms::TestFunction<f64>;
