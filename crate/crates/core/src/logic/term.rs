use std::collections::BTreeMap;
use std::fmt;

use crate::symbol::Symbol;

/// A variable or a constant. Variables start with an uppercase letter or `_`,
/// constants with a lowercase letter or a digit.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Symbol),
    Const(Symbol),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Symbol::intern(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(Symbol::intern(name))
    }

    /// Builds a term from its textual form using the case convention.
    pub fn parse_name(name: &str) -> Term {
        if is_variable_name(name) {
            Term::var(name)
        } else {
            Term::constant(name)
        }
    }

    pub fn is_var(self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn symbol(self) -> Symbol {
        match self {
            Term::Var(s) | Term::Const(s) => s,
        }
    }

    /// Integer value of a numeric constant.
    pub fn as_int(self) -> Option<i64> {
        match self {
            Term::Const(s) => s.as_str().parse().ok(),
            Term::Var(_) => None,
        }
    }
}

pub fn is_variable_name(name: &str) -> bool {
    name.chars()
        .next()
        .map(|c| c.is_uppercase() || c == '_')
        .unwrap_or(false)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol().as_str())
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Finite map from variables to terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: BTreeMap<Symbol, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, var: Symbol, term: Term) {
        self.bindings.insert(var, term);
    }

    pub fn get(&self, var: Symbol) -> Option<Term> {
        self.bindings.get(&var).copied()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Symbol, Term)> + '_ {
        self.bindings.iter().map(|(k, v)| (*k, *v))
    }

    /// Applies the substitution once to a term.
    pub fn apply_term(&self, term: Term) -> Term {
        match term {
            Term::Var(v) => self.get(v).unwrap_or(term),
            Term::Const(_) => term,
        }
    }

    /// Resolves binding chains so that no bound variable maps to another bound
    /// variable. Cyclic chains are cut at the first repeated variable.
    pub fn normalized(&self) -> Substitution {
        let mut out = Substitution::new();
        for (&var, &start) in &self.bindings {
            let mut term = start;
            let mut seen = vec![var];
            while let Term::Var(next) = term {
                if seen.contains(&next) {
                    break;
                }
                match self.get(next) {
                    Some(t) => {
                        seen.push(next);
                        term = t;
                    }
                    None => break,
                }
            }
            if term != Term::Var(var) {
                out.bind(var, term);
            }
        }
        out
    }
}

impl FromIterator<(Symbol, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Symbol, Term)>>(iter: I) -> Self {
        Substitution {
            bindings: iter.into_iter().collect(),
        }
    }
}
