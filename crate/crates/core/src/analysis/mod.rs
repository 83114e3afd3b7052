//! Thickness, gap-lemma classification, dimension estimates and arithmetic
//! differences of regular Cantor sets.

pub mod difference;
pub mod dimension;
pub mod gap_lemma;
pub mod thickness;

pub use difference::{
    arithmetic_difference, difference_measure_upper, lambda_grid, marstrand_scan,
    tangency_parameter_density, DensityResult, DifferenceCover, MarstrandRow, MarstrandScan,
};
pub use dimension::{
    affine_transfer_matrix, cover_sum_root, hausdorff_dimension, hausdorff_measure_estimate,
    DimensionBracket, LogWeightMatrix,
};
pub use gap_lemma::{gap_lemma_classify, linked, GapLemmaOutcome};
pub use thickness::{thickness, ThicknessBracket};
