pub mod affine;
pub mod error;
pub mod interval;
pub mod scalar;
pub mod seq;
pub mod step;

pub use affine::PiecewiseAffine;
pub use error::{Error, Result};
pub use interval::{Bound, Interval, IntervalSet};
pub use scalar::{Mode, Scalar};
pub use seq::Seq;
pub use step::StepFn;
pub mod kfunc;
pub mod majorization;
pub mod operators;
pub mod gen;
pub mod procp;
pub mod spaces;
pub mod harness;
