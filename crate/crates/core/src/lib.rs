//! Dimension theory of infinitely generated attractors.
//!
//! Pressure brackets for similarity and continued-fraction systems,
//! intermediate-dimension curves, cover-based estimators and Monte Carlo
//! checks for random-translation attractors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bracket;
pub mod cf;
pub mod cli;
pub mod cover;
pub mod curves;
pub mod digits;
pub mod emit;
pub mod error;
pub mod generic;
pub mod ifs;
pub mod pressure;

pub use bracket::{DimBracket, Witness};
pub use digits::{DigitSet, Gaussian};
pub use error::{Error, Result};
pub use ifs::{
    compose_word, evaluate_point, fixed_point, word_norm_bounds, Composite, CylinderBounds,
    MapSpec, Similarity, SystemSpec, Word,
};
pub use pressure::{
    finiteness_parameter, hausdorff_bracket, phi_level, pressure_estimate, similarity_h, PhiSums,
    PressureEstimate, RatioFamily, SimilarityDim,
};
