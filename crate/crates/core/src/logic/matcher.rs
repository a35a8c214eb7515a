//! Conjunctive query evaluation: find a substitution mapping every literal of
//! a query into a fact set. Shared by coverage and θ-subsumption.
//!
//! Literals are matched left to right with backtracking. Each literal looks up
//! its candidates through the most selective bound argument.

use std::collections::HashMap;

use crate::logic::clause::{Clause, Literal, PredKey};
use crate::logic::facts::FactSet;
use crate::logic::term::{Substitution, Term};
use crate::symbol::Symbol;

#[derive(Clone, Copy, Debug)]
enum Slot {
    Fixed(Symbol),
    Var(usize),
}

#[derive(Clone, Debug)]
struct QueryLiteral {
    key: PredKey,
    args: Vec<Slot>,
}

/// A conjunction of literals compiled for repeated evaluation.
#[derive(Clone, Debug)]
pub struct Query {
    literals: Vec<QueryLiteral>,
    vars: Vec<Symbol>,
}

impl Query {
    pub fn new<'a>(literals: impl IntoIterator<Item = &'a Literal>) -> Self {
        let mut slots: HashMap<Symbol, usize> = HashMap::new();
        let mut vars = Vec::new();
        let literals = literals
            .into_iter()
            .map(|lit| QueryLiteral {
                key: lit.key(),
                args: lit
                    .args
                    .iter()
                    .map(|&a| match a {
                        Term::Const(c) => Slot::Fixed(c),
                        Term::Var(v) => Slot::Var(*slots.entry(v).or_insert_with(|| {
                            vars.push(v);
                            vars.len() - 1
                        })),
                    })
                    .collect(),
            })
            .collect();
        Query { literals, vars }
    }

    pub fn body(clause: &Clause) -> Self {
        Query::new(clause.body.iter())
    }

    pub fn is_satisfied(&self, facts: &FactSet) -> bool {
        let mut bindings = vec![None; self.vars.len()];
        self.search(0, facts, &mut bindings)
    }

    /// First witness substitution (in left-to-right search order), if any.
    pub fn witness(&self, facts: &FactSet) -> Option<Substitution> {
        let mut bindings = vec![None; self.vars.len()];
        if self.search(0, facts, &mut bindings) {
            Some(
                self.vars
                    .iter()
                    .zip(bindings)
                    .filter_map(|(&v, b)| b.map(|s| (v, Term::Const(s))))
                    .collect(),
            )
        } else {
            None
        }
    }

    fn search(&self, depth: usize, facts: &FactSet, bindings: &mut Vec<Option<Symbol>>) -> bool {
        let Some(lit) = self.literals.get(depth) else {
            return true;
        };
        let mut candidates = facts.with_pred(lit.key);
        if candidates.is_empty() {
            return false;
        }
        for (pos, slot) in lit.args.iter().enumerate() {
            let value = match *slot {
                Slot::Fixed(s) => Some(s),
                Slot::Var(i) => bindings[i],
            };
            if let Some(v) = value {
                let narrowed = facts.with_arg(lit.key, pos, v);
                if narrowed.len() < candidates.len() {
                    candidates = narrowed;
                    if candidates.is_empty() {
                        return false;
                    }
                }
            }
        }
        let mut newly_bound: Vec<usize> = Vec::with_capacity(lit.args.len());
        for &id in candidates {
            let fact = facts.get(id);
            newly_bound.clear();
            let mut ok = true;
            for (slot, arg) in lit.args.iter().zip(&fact.args) {
                let value = arg.symbol();
                match *slot {
                    Slot::Fixed(s) => {
                        if s != value {
                            ok = false;
                            break;
                        }
                    }
                    Slot::Var(i) => match bindings[i] {
                        Some(b) if b != value => {
                            ok = false;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            bindings[i] = Some(value);
                            newly_bound.push(i);
                        }
                    },
                }
            }
            if ok && self.search(depth + 1, facts, bindings) {
                return true;
            }
            for &i in &newly_bound {
                bindings[i] = None;
            }
        }
        false
    }
}
