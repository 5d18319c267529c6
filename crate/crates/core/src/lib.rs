//! Generalized Hirsch-type bundles.
//!
//! A decreasing rank-frequency function `f` is transformed by an operator `T`
//! (identity, running integral, or running average) and intersected with a
//! threshold family `A(x, θ)`. The abscissa `m_θ(f)` of the unique crossing
//! `T(f)(x) = A(x, θ)` is the bundle value at `θ`; the h-index, the g-index
//! and the Kosmulski indices are all special cases.
//!
//! The numeric core ([`funcspace`], [`operators`], [`thresholds`],
//! [`solver`]) is generic over the scalar type through [`Scalar`]. The
//! property suites in [`verify`] and the batch front end in [`cli`] work in
//! `f64`; the aliases below name the concrete instantiations.

// `!(x > 0)` style guards are kept on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod funcspace;
pub mod operators;
pub mod report;
pub mod scalar;
pub mod solver;
pub mod thresholds;
pub mod verify;

pub use error::{Error, Result};
pub use funcspace::{
    CitationIngest, FunctionOrdering, PerturbMode, RandomFunctionParams, RankFrequencyFunction,
};
pub use operators::{Certification, Monotonicity, OperatorKind, OperatorSpec, TransformedFunction};
pub use report::{Counterexample, Verdict, VerificationReport};
pub use scalar::Scalar;
pub use solver::{BundleEntry, BundlePoint, BundleSample, SolveConfig, SolveStatus, Window};
pub use thresholds::{AdmissibleRange, ThresholdFamily};

/// Rank-frequency function over `f64`.
pub type RankFrequency = RankFrequencyFunction<f64>;
/// Rank-frequency function over `f32`.
pub type RankFrequency32 = RankFrequencyFunction<f32>;
/// Transformed function over `f64`.
pub type Transformed = TransformedFunction<f64>;
/// Threshold family over `f64`.
pub type Threshold = ThresholdFamily<f64>;
/// Operator over `f64`.
pub type Operator = OperatorSpec<f64>;
/// Solver configuration over `f64`.
pub type Config = SolveConfig<f64>;
/// Sampled bundle over `f64`.
pub type Bundle = BundleSample<f64>;
/// Admissible θ range over `f64`.
pub type Admissible = AdmissibleRange<f64>;
