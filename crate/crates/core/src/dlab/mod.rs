//! Declarative bias: grammars of `Min-Max:[...]` lists over literal templates.

pub mod grammar;
pub mod space;

pub use grammar::{parse_dlab_node, ArgNode, Bound, DlabNode, LiteralTemplate};
pub use space::{count_space, enumerate, member, parse_dlab, refine, DlabTemplate, Selection, SpaceSize};
