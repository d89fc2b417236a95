//! Okamoto's one-parameter family of self-affine functions `F_a`, `a ∈ (0, 1)`.
//!
//! The crate builds the iterations `f_i` exactly or in floating point,
//! evaluates `F_a` through its ternary digit series with a certified error,
//! classifies where `F_a` is differentiable, and measures the length, box
//! counts, dimension and natural mass of the graph.
//!
//! ```
//! use okamoto::{construct_iteration, Parameter};
//! use num::BigRational;
//!
//! let a: Parameter = "2/3".parse().unwrap();
//! let f2 = construct_iteration::<BigRational>(&a, 2).unwrap();
//! assert_eq!(f2.vertices()[1], BigRational::new(4.into(), 9.into()));
//! ```
//!
//! Runnable tours of each capability live in `examples/`.

pub mod cli;
pub mod differentiability;
pub mod error;
pub mod export;
pub mod function;
pub mod geometry;
pub mod ifs;
pub mod param;
pub mod rng;
pub mod ternary;

pub use differentiability::{
    classify_limit, derivative_trace, digit_frequency_experiment, find_a0, nondiff_points,
    region_classify, DerivativeTrace, LimitClass, Region, RegionClass,
};
pub use error::{Error, Result};
pub use function::{
    construct_iteration, eval_digit_series, evaluate, refine, sample_graph, Evaluation,
    IterationGraph,
};
pub use geometry::{
    arc_length_profile, chaos_game, cover_profile, dimension_estimate, mass_bound_check,
    ChaosGame, CoverProfile, DimensionEstimate, LengthProfile, MassSample,
};
pub use ifs::{ifs_maps, AffineMap2D};
pub use param::{Mode, Parameter, Scalar};
pub use ternary::{digit_stats, ternary_rational, to_ternary, DigitStats, TernaryExpansion};
