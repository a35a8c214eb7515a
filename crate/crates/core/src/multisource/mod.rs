//! Learning from several aligned sources: aggregation, bottom clauses built
//! from interleaved monosource rules, and bias synthesis.

pub mod aggregate;
pub mod bias;
pub mod bottom;
pub mod pipeline;

pub use aggregate::{aggregate, Aggregation, DropReason, AGGREGATED_SOURCE};
pub use bias::{bottom_block, naive_bias, synthesize_bias};
pub use bottom::{
    filter_constraints, interleavings, make_bottom_clause, parse_constraints, write_constraints, BottomClause,
    Hypothesis, InterleavingConstraint, Level, Merge,
};
pub use pipeline::{biased_multisource_learn, class_bottoms, MultisourceRun};
