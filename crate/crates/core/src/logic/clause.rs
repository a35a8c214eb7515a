use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::Result;
use crate::logic::term::{Substitution, Term};
use crate::symbol::Symbol;
use crate::syntax::{tokenize, Cursor, Tok};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub pred: Symbol,
    pub args: Vec<Term>,
}

impl Literal {
    pub fn new(pred: &str, args: Vec<Term>) -> Self {
        Literal {
            pred: Symbol::intern(pred),
            args,
        }
    }

    /// Parses `pred(arg, ...)` text; `_` is kept as a plain variable name.
    pub fn parse(text: &str) -> Result<Literal> {
        let tokens = tokenize(text)?;
        let mut cursor = Cursor::new(&tokens);
        let mut anon = 0;
        let lit = parse_literal(&mut cursor, &mut anon)?;
        if !cursor.at_end() {
            return Err(cursor.error("trailing input after literal"));
        }
        Ok(lit)
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn key(&self) -> PredKey {
        PredKey {
            name: self.pred,
            arity: self.args.len(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|a| !a.is_var())
    }

    pub fn vars(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.args.iter().filter_map(|a| match a {
            Term::Var(v) => Some(*v),
            Term::Const(_) => None,
        })
    }

    pub fn apply(&self, subst: &Substitution) -> Literal {
        Literal {
            pred: self.pred,
            args: self.args.iter().map(|&a| subst.apply_term(a)).collect(),
        }
    }

    pub fn rename(&self, f: &impl Fn(Symbol) -> Symbol) -> Literal {
        Literal {
            pred: self.pred,
            args: self
                .args
                .iter()
                .map(|&a| match a {
                    Term::Var(v) => Term::Var(f(v)),
                    c => c,
                })
                .collect(),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Predicate name together with its arity; `p/2` and `p/3` are different predicates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PredKey {
    pub name: Symbol,
    pub arity: usize,
}

impl PredKey {
    pub fn new(name: &str, arity: usize) -> Self {
        PredKey {
            name: Symbol::intern(name),
            arity,
        }
    }
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// A definite clause `head :- body`. Body order is kept for reporting only.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub head: Literal,
    pub body: Vec<Literal>,
}

/// Head literal `class(label)`.
pub fn class_head(label: Symbol) -> Literal {
    Literal {
        pred: Symbol::intern("class"),
        args: vec![Term::Const(label)],
    }
}

impl Clause {
    pub fn new(head: Literal, body: Vec<Literal>) -> Self {
        Clause { head, body }
    }

    pub fn for_class(label: &str, body: Vec<Literal>) -> Self {
        Clause::new(class_head(Symbol::intern(label)), body)
    }

    /// Class label of a `class(c)` head.
    pub fn label(&self) -> Option<Symbol> {
        match self.head.args.as_slice() {
            [Term::Const(c)] => Some(*c),
            _ => None,
        }
    }

    /// Parses `head :- l1, ..., ln.` (or a bare `head.`); every `_` becomes a
    /// fresh variable.
    pub fn parse(text: &str) -> Result<Clause> {
        let tokens = tokenize(text)?;
        let mut cursor = Cursor::new(&tokens);
        let clause = parse_clause(&mut cursor)?;
        if !cursor.at_end() {
            return Err(cursor.error("trailing input after clause"));
        }
        Ok(clause)
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        std::iter::once(&self.head).chain(self.body.iter())
    }

    /// Variables in first-occurrence order (head first).
    pub fn vars(&self) -> Vec<Symbol> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for lit in self.literals() {
            for v in lit.vars() {
                if seen.insert(v) {
                    out.push(v);
                }
            }
        }
        out
    }

    pub fn apply(&self, subst: &Substitution) -> Clause {
        Clause {
            head: self.head.apply(subst),
            body: self.body.iter().map(|l| l.apply(subst)).collect(),
        }
    }

    pub fn rename(&self, f: &impl Fn(Symbol) -> Symbol) -> Clause {
        Clause {
            head: self.head.rename(f),
            body: self.body.iter().map(|l| l.rename(f)).collect(),
        }
    }

    /// Order-independent text of the body, used for deduplication and tie-breaking.
    pub fn canonical_body(&self) -> String {
        canonical_body(&self.body)
    }
}

pub fn canonical_body(body: &[Literal]) -> String {
    let mut parts: Vec<String> = body.iter().map(|l| l.to_string()).collect();
    parts.sort();
    parts.join(",")
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            for (i, l) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{l}")?;
            }
        }
        f.write_str(".")
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub(crate) fn parse_literal(cursor: &mut Cursor<'_>, anon: &mut usize) -> Result<Literal> {
    let name = match cursor.bump() {
        Some(Tok::Name(n)) => n.clone(),
        Some(t) => return Err(cursor.error(format!("expected predicate name, found {t:?}"))),
        None => return Err(cursor.error("expected predicate name, found end of input")),
    };
    let mut args = Vec::new();
    if cursor.eat(&Tok::LParen) {
        loop {
            let term = match cursor.bump() {
                Some(Tok::Name(n)) => Term::constant(n),
                Some(Tok::Var(v)) if v == "_" => {
                    *anon += 1;
                    Term::var(&format!("_G{anon}"))
                }
                Some(Tok::Var(v)) => Term::var(v),
                Some(t) => return Err(cursor.error(format!("expected term, found {t:?}"))),
                None => return Err(cursor.error("expected term, found end of input")),
            };
            args.push(term);
            if cursor.eat(&Tok::Comma) {
                continue;
            }
            cursor.expect(&Tok::RParen)?;
            break;
        }
    }
    Ok(Literal::new(&name, args))
}

pub(crate) fn parse_clause(cursor: &mut Cursor<'_>) -> Result<Clause> {
    let mut anon = 0;
    let head = parse_literal(cursor, &mut anon)?;
    let mut body = Vec::new();
    if cursor.eat(&Tok::Neck) {
        loop {
            body.push(parse_literal(cursor, &mut anon)?);
            if !cursor.eat(&Tok::Comma) {
                break;
            }
        }
    }
    cursor.expect(&Tok::Dot)?;
    Ok(Clause { head, body })
}

/// Parses a sequence of clauses, each terminated by `.`.
pub fn parse_clauses(text: &str) -> Result<Vec<Clause>> {
    let tokens = tokenize(text)?;
    let mut cursor = Cursor::new(&tokens);
    let mut out = Vec::new();
    while !cursor.at_end() {
        out.push(parse_clause(&mut cursor)?);
    }
    Ok(out)
}

/// Renames apart two clauses: variables of `c2` that also occur in `c1` get a
/// `_2` suffix (plus an ordinal if that name is taken too). `c1` is unchanged.
pub fn standardize_apart(c1: &Clause, c2: &Clause) -> (Clause, Clause) {
    let left: BTreeSet<Symbol> = c1.vars().into_iter().collect();
    let right = c2.vars();
    let mut taken: HashSet<Symbol> = left.iter().copied().chain(right.iter().copied()).collect();
    let mut renames = std::collections::HashMap::new();
    for v in right {
        if !left.contains(&v) {
            continue;
        }
        let mut candidate = Symbol::intern(&format!("{}_2", v));
        let mut ordinal = 1;
        while taken.contains(&candidate) {
            ordinal += 1;
            candidate = Symbol::intern(&format!("{}_2_{}", v, ordinal));
        }
        taken.insert(candidate);
        renames.insert(v, candidate);
    }
    let renamed = c2.rename(&|v| renames.get(&v).copied().unwrap_or(v));
    (c1.clone(), renamed)
}
