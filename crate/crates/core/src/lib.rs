//! AMR similarity tooling: a Penman reader/writer and typed graph model,
//! motif extraction, the motif-overlap similarity metric alongside label
//! and alignment baselines, constrained edge-rewiring benchmark generation,
//! and evaluation harnesses for rank correlation and runtime scaling.

pub mod amr;
pub mod eval;
pub mod metrics;
pub mod motifs;
pub mod numeric;
pub mod rare;
pub mod synth;

/// Exact score value: set-overlap and triple-match scores are small-count
/// ratios, kept exact until rendering.
pub type Rational = num_rational::Ratio<u64>;

/// Default floating-point scalar used by the evaluation layer and the CLI.
/// The functions in [`numeric`] and [`eval`] are generic over
/// [`numeric::Scalar`]; this alias is the concrete choice.
pub type Real = f64;

pub use amr::{AmrGraph, Constant, ConstantKind};
pub use metrics::{MetricId, SimilarityScore};
