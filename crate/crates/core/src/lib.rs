//! Relational rule learning from multisource temporal event data.
//!
//! Rules are learned per source under a declarative (DLAB) bias, then
//! combined into a compact bias for learning on the aggregated sources.

pub mod data;
pub mod dlab;
pub mod error;
pub mod eval;
pub mod learner;
pub mod logic;
pub mod multisource;
pub mod symbol;
pub mod synth;
pub mod syntax;

pub use error::{Error, Result};
pub use symbol::Symbol;
