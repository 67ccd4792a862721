//! Index (UCB) policies over general score functionals.
//!
//! The core is generic over the scalar type; `f64` aliases are provided for
//! the common case.

// `!(a < b)` is the NaN-rejecting form of `a >= b`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coverage;
pub mod engine;
pub mod error;
pub mod interval;
pub mod model;
pub mod normal;
pub mod oracles;
pub mod pareto;
pub mod scalar;
pub mod specfun;

pub use error::{Error, Result};
pub use model::BanditModel;
pub use scalar::Real;

pub use coverage::{CoverageModel, PartitionSchedule, SupportSet};
pub use engine::{run_horizon, simulate, PolicyState, Trace};
pub use interval::{IntervalModel, IntervalParams, MonotoneScore2D};
pub use normal::{NormalMeanModel, NormalParams, NormalThresholdModel, NormalVarianceModel, ThresholdSpec};
pub use pareto::{ParetoModel, ParetoParams, SeparableScore};

pub type Pareto = ParetoModel<f64>;
pub type ParetoArm = ParetoParams<f64>;
pub type Interval = IntervalModel<f64>;
pub type IntervalArm = IntervalParams<f64>;
pub type Support = SupportSet<f64>;
pub type NormalArm = NormalParams<f64>;
pub type NormalThreshold = NormalThresholdModel<f64>;
