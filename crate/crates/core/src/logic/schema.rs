use std::collections::{BTreeMap, BTreeSet};

use crate::logic::clause::{Literal, PredKey};
use crate::symbol::Symbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    /// Describes an occurrence on one source (`p`, `qrs`, `dias`, `sys`).
    Event,
    /// Relates events of one source (`rr1`, `pr1`, `cycle_abp`, ...).
    Relational,
    /// Relates events of any source (`suc`, `suci`).
    GlobalRelational,
    /// Raw timestamped records and other non-learnable facts.
    Attribute,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArgKind {
    Event,
    Time,
    Number,
    Value(BTreeSet<Symbol>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateInfo {
    pub role: Role,
    /// `None` for predicates shared by every source.
    pub source: Option<Symbol>,
    pub args: Vec<ArgKind>,
}

impl PredicateInfo {
    pub fn event_positions(&self) -> Vec<usize> {
        self.args
            .iter()
            .enumerate()
            .filter(|(_, a)| **a == ArgKind::Event)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Role, source and argument domains of every predicate of a problem.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PredicateSchema {
    preds: BTreeMap<PredKey, PredicateInfo>,
}

pub const SUC: &str = "suc";
pub const SUCI: &str = "suci";

impl PredicateSchema {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a predicate, merging value domains if it is already known.
    pub fn declare(&mut self, key: PredKey, info: PredicateInfo) {
        match self.preds.get_mut(&key) {
            None => {
                self.preds.insert(key, info);
            }
            Some(existing) => {
                if existing.source != info.source {
                    existing.source = None;
                }
                for (have, add) in existing.args.iter_mut().zip(info.args) {
                    if let (ArgKind::Value(a), ArgKind::Value(b)) = (have, add) {
                        a.extend(b);
                    }
                }
            }
        }
    }

    pub fn get(&self, key: PredKey) -> Option<&PredicateInfo> {
        self.preds.get(&key)
    }

    pub fn role(&self, key: PredKey) -> Option<Role> {
        self.preds.get(&key).map(|i| i.role)
    }

    pub fn is_event(&self, lit: &Literal) -> bool {
        self.role(lit.key()) == Some(Role::Event)
    }

    pub fn iter(&self) -> impl Iterator<Item = (PredKey, &PredicateInfo)> {
        self.preds.iter().map(|(k, v)| (*k, v))
    }

    pub fn with_role(&self, role: Role) -> impl Iterator<Item = (PredKey, &PredicateInfo)> {
        self.iter().filter(move |(_, i)| i.role == role)
    }

    pub fn sources(&self) -> BTreeSet<Symbol> {
        self.preds.values().filter_map(|i| i.source).collect()
    }

    /// Schema restricted to one source's predicates plus the shared ones.
    pub fn restricted_to(&self, source: Symbol) -> PredicateSchema {
        PredicateSchema {
            preds: self
                .preds
                .iter()
                .filter(|(_, i)| i.source.is_none() || i.source == Some(source))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    pub fn merge(&mut self, other: &PredicateSchema) {
        for (k, v) in other.iter() {
            self.declare(k, v.clone());
        }
    }

    /// Declares `suc/2` and `suci/2` as shared global relations.
    pub fn with_global_relations(mut self) -> Self {
        for name in [SUC, SUCI] {
            self.declare(
                PredKey::new(name, 2),
                PredicateInfo {
                    role: Role::GlobalRelational,
                    source: None,
                    args: vec![ArgKind::Event, ArgKind::Event],
                },
            );
        }
        self
    }
}
