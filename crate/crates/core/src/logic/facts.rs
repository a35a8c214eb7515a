use std::collections::{HashMap, HashSet};

use crate::logic::clause::{Literal, PredKey};
use crate::symbol::Symbol;

/// Ground fact database with per-predicate and per-argument indexes.
/// Insertion order is preserved; duplicates are ignored.
#[derive(Clone, Default)]
pub struct FactSet {
    facts: Vec<Literal>,
    members: HashSet<Literal>,
    by_pred: HashMap<PredKey, Vec<u32>>,
    by_arg: HashMap<(PredKey, u8, Symbol), Vec<u32>>,
}

impl FactSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a ground fact; returns false if it was already present.
    ///
    /// Terms are indexed by symbol, so a non-ground literal is stored with its
    /// variables frozen as opaque constants (used by the subsumption test).
    pub fn insert(&mut self, fact: Literal) -> bool {
        if self.members.contains(&fact) {
            return false;
        }
        let id = self.facts.len() as u32;
        let key = fact.key();
        self.by_pred.entry(key).or_default().push(id);
        for (pos, arg) in fact.args.iter().enumerate() {
            self.by_arg
                .entry((key, pos as u8, arg.symbol()))
                .or_default()
                .push(id);
        }
        self.members.insert(fact.clone());
        self.facts.push(fact);
        true
    }

    pub fn contains(&self, fact: &Literal) -> bool {
        self.members.contains(fact)
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Literal> {
        self.facts.iter()
    }

    pub fn get(&self, id: u32) -> &Literal {
        &self.facts[id as usize]
    }

    pub fn with_pred(&self, key: PredKey) -> &[u32] {
        self.by_pred.get(&key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn with_arg(&self, key: PredKey, pos: usize, value: Symbol) -> &[u32] {
        self.by_arg
            .get(&(key, pos as u8, value))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn predicates(&self) -> impl Iterator<Item = PredKey> + '_ {
        self.by_pred.keys().copied()
    }
}

impl PartialEq for FactSet {
    fn eq(&self, other: &Self) -> bool {
        self.facts == other.facts
    }
}

impl Eq for FactSet {}

impl std::fmt::Debug for FactSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.facts.iter()).finish()
    }
}

impl FromIterator<Literal> for FactSet {
    fn from_iter<I: IntoIterator<Item = Literal>>(iter: I) -> Self {
        let mut set = FactSet::new();
        for f in iter {
            set.insert(f);
        }
        set
    }
}

impl Extend<Literal> for FactSet {
    fn extend<I: IntoIterator<Item = Literal>>(&mut self, iter: I) {
        for f in iter {
            self.insert(f);
        }
    }
}
