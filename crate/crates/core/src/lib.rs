//! Isoperimetric profiles of products of flat tori with Euclidean space.
//!
//! Everything is generic over the floating point type through [`Scalar`];
//! the aliases below fix it to `f64`.

// negated comparisons below are how NaN inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod criticals;
pub mod error;
pub mod mensuration;
pub mod oracle;
pub mod profiles;
pub mod roots;
pub mod scalar;

pub use error::{Error, Guard, Result};
pub use scalar::Scalar;

pub type Spec = mensuration::TorusProductSpec<f64>;
pub type Region = mensuration::CandidateRegion<f64>;
pub type Profile = profiles::PiecewiseProfile<f64>;
pub type Request = roots::RootRequest<f64>;
pub type Root = roots::RootResult<f64>;
pub type TwoTorusReport = criticals::T2Criticals<f64>;
pub type ThreeTorusReport = criticals::T3Criticals<f64>;
pub type ThresholdReport = criticals::Report<f64>;
pub type Curve = bounds::TabulatedCurve<f64>;
pub type Band = bounds::BoundBand<f64>;
