//! Equivalence classes of preference triads.
//!
//! A preference triad is a triangle whose nodes each hold a strict ranking
//! of the same `n` alternatives. Triads are equivalent when they differ only
//! by a permutation of the nodes and a common relabeling of the alternatives.
//! The crate canonicalizes and classifies triads ([`triad`]), counts classes
//! in closed form for any `n` ([`count`]), and runs a class census of a
//! social network against degree-preserving null models ([`analysis`]).

pub mod analysis;
pub mod count;
pub mod dataset;
pub mod graph;
pub mod perm;
pub mod plot;
pub mod rng;
pub mod triad;

pub use analysis::{
    census, compare, null_ensemble, run_experiment, ClassHistogram, ExperimentConfig, NullMode,
};
pub use count::{class_count, orbit_case_counts, order3_count, BigCount};
pub use graph::Graph;
pub use perm::{AlternativeAlphabet, Permutation};
pub use triad::{
    canonicalize, classify3, describe_class, enumerate_classes, ClassTable, PreferenceTriad,
};
