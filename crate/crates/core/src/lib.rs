//! Measures of departure from symmetry for square contingency tables.
//!
//! The central quantity is `Φ`, a weighted average over cell pairs of the
//! Fisher-Rao arc between each pair's conditional probabilities
//! `(p_ij, p_ji)/(p_ij + p_ji)` and the symmetric point `(1/2, 1/2)`, scaled
//! to `[0, 1]`. Around it sit:
//!
//! - [`table`]: CSV parsing, validation and normalization of count tables.
//! - [`geometry`]: Euclidean, Hellinger, Fisher-Rao and power-divergence
//!   comparisons of discrete distributions.
//! - [`measures`]: `Φ`, its weight schemes, and the power-divergence measure
//!   `Φ^(λ)`.
//! - [`inference`]: delta-method standard errors and intervals, Bowker's test.
//! - [`simulate`]: conditional-symmetry models, multinomial sampling, coverage
//!   and bootstrap experiments.
//! - [`special`]: incomplete gamma, normal quantiles and the chi-square tail.
//!
//! ```
//! use asymm_core::{parse_table, phi, to_probabilities, Normalization, WeightScheme, ZeroPairPolicy};
//!
//! let table = parse_table("288,147,27\n90,95,33\n13,17,14").unwrap();
//! let probs = to_probabilities(&table, Normalization::OffDiagonal).unwrap();
//! let v = phi(&probs, &WeightScheme::Uniform, ZeroPairPolicy::Error).unwrap();
//! assert!((v.value - 0.197).abs() < 5e-4);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod inference;
pub mod measures;
pub mod simulate;
pub mod special;
pub mod table;

pub use error::{AsymmError, Result};
pub use inference::{
    bowker, phi_gradient, phi_interval, phi_variance, EstimateOptions, MeasureReport, SymmetryTestResult,
};
pub use measures::{
    phi, phi_cs_closed, phi_power, realize_weights, AsymmetryValue, MeasureKind, WeightKind, WeightMap, WeightScheme,
    ZeroPairPolicy,
};
pub use simulate::{coverage_experiment, cs_table, sample_multinomial, sweep_cs, CoverageConfig, CsSpec, SweepRow};
pub use table::{conditional_pair, parse_table, to_probabilities, CountTable, Normalization, PairPoint, ProbTable};
