//! Information-theoretic and PAC-Bayesian generalization bounds, the information measures
//! they consume, plug-in estimators for supersample constructions, and testbeds with exact
//! oracles.
//!
//! Measures and bounds are generic over the scalar (`f32` or `f64`); the aliases below fix
//! the common choices. Estimators and testbeds work in `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod estimators;
pub mod info;
pub mod scalar;
pub mod testbeds;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Dist = info::DiscreteDist<f64>;
pub type Dist32 = info::DiscreteDist<f32>;
pub type Joint = info::JointDist<f64>;
pub type Joint32 = info::JointDist<f32>;
pub type Query = bounds::BoundQuery<f64>;
pub type Query32 = bounds::BoundQuery<f32>;
pub type Bound = bounds::BoundValue<f64>;
pub type Bound32 = bounds::BoundValue<f32>;
