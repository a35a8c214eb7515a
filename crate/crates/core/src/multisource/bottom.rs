use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::logic::schema::{SUC, SUCI};
use crate::logic::{Clause, Literal, PredicateSchema, Term};
use crate::symbol::Symbol;

/// A monosource rule with its events in temporal order.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypothesis {
    pub clause: Clause,
    pub source: Symbol,
    /// Event variables, earliest first.
    pub events: Vec<Symbol>,
    /// Event literal of each entry of `events`.
    pub event_literals: Vec<Literal>,
}

fn is_succession(lit: &Literal) -> bool {
    let name = lit.pred.as_str();
    (name == SUC || name == SUCI) && lit.args.len() == 2
}

impl Hypothesis {
    /// Reads the event order from the rule's `suc`/`suci` literals; events are
    /// the first arguments of event literals. The order must be total.
    pub fn new(clause: Clause, source: Symbol, schema: &PredicateSchema) -> Result<Hypothesis> {
        let mut literal_of: BTreeMap<Symbol, Literal> = BTreeMap::new();
        let mut first_seen = Vec::new();
        for lit in &clause.body {
            if !schema.is_event(lit) {
                continue;
            }
            if let Some(Term::Var(v)) = lit.args.first() {
                if !literal_of.contains_key(v) {
                    literal_of.insert(*v, lit.clone());
                    first_seen.push(*v);
                }
            }
        }
        let mut before: BTreeMap<Symbol, BTreeSet<Symbol>> = first_seen.iter().map(|v| (*v, BTreeSet::new())).collect();
        for lit in clause.body.iter().filter(|l| is_succession(l)) {
            if let (Term::Var(later), Term::Var(earlier)) = (lit.args[0], lit.args[1]) {
                if literal_of.contains_key(&later) && literal_of.contains_key(&earlier) {
                    before.get_mut(&later).unwrap().insert(earlier);
                }
            }
        }
        let mut events = Vec::new();
        let mut placed = BTreeSet::new();
        while events.len() < first_seen.len() {
            let ready: Vec<Symbol> = first_seen
                .iter()
                .copied()
                .filter(|v| !placed.contains(v) && before[v].iter().all(|p| placed.contains(p)))
                .collect();
            if ready.len() != 1 {
                return Err(Error::usage(format!(
                    "events of hypothesis `{clause}` are not totally ordered by suc/suci"
                )));
            }
            placed.insert(ready[0]);
            events.push(ready[0]);
        }
        let event_literals = events.iter().map(|v| literal_of[v].clone()).collect();
        Ok(Hypothesis {
            clause,
            source,
            events,
            event_literals,
        })
    }

    /// The hypothesis with no literal at all.
    pub fn empty(label: Symbol, source: Symbol) -> Hypothesis {
        Hypothesis {
            clause: Clause::new(crate::logic::class_head(label), Vec::new()),
            source,
            events: Vec::new(),
            event_literals: Vec::new(),
        }
    }

    fn event_pred(&self, i: usize) -> Symbol {
        self.event_literals[i].pred
    }
}

/// One way to interleave the events of two hypotheses; `slots` holds
/// `(side, index)` with side 0 for the first hypothesis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Merge {
    pub slots: Vec<(u8, usize)>,
}

impl Merge {
    pub fn describe(&self, h: [&Hypothesis; 2]) -> String {
        self.slots
            .iter()
            .map(|&(s, i)| h[s as usize].events[i].as_str())
            .collect::<Vec<_>>()
            .join("-")
    }
}

/// All order-preserving merges of the two event sequences, first-hypothesis
/// events placed first when there is a choice.
pub fn interleavings(h1: &Hypothesis, h2: &Hypothesis) -> Vec<Merge> {
    fn go(n: usize, p: usize, i: usize, j: usize, cur: &mut Vec<(u8, usize)>, out: &mut Vec<Merge>) {
        if i == n && j == p {
            out.push(Merge { slots: cur.clone() });
            return;
        }
        if i < n {
            cur.push((0, i));
            go(n, p, i + 1, j, cur, out);
            cur.pop();
        }
        if j < p {
            cur.push((1, j));
            go(n, p, i, j + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(h1.events.len(), h2.events.len(), 0, 0, &mut Vec::new(), &mut out);
    out
}

/// On hypotheses of `source`, no event of another source may fall between
/// consecutive events whose predicates are `before` then `after`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct InterleavingConstraint {
    pub source: Symbol,
    pub before: Symbol,
    pub after: Symbol,
}

impl fmt::Display for InterleavingConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "forbid_between {} {} {}", self.source, self.before, self.after)
    }
}

/// One `forbid_between <source> <before> <after>` per line; `%` starts a comment.
pub fn parse_constraints(text: &str) -> Result<Vec<InterleavingConstraint>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('%').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["forbid_between", source, before, after] => out.push(InterleavingConstraint {
                source: Symbol::intern(source),
                before: Symbol::intern(before),
                after: Symbol::intern(after),
            }),
            _ => {
                return Err(Error::Format {
                    line: n + 1,
                    message: format!("expected `forbid_between <source> <before> <after>`, found {line:?}"),
                })
            }
        }
    }
    Ok(out)
}

pub fn write_constraints(constraints: &[InterleavingConstraint]) -> String {
    constraints.iter().map(|c| format!("{c}\n")).collect()
}

fn violates(m: &Merge, h: [&Hypothesis; 2], c: &InterleavingConstraint) -> bool {
    for side in 0..2u8 {
        let hyp = h[side as usize];
        if hyp.source != c.source {
            continue;
        }
        for i in 1..hyp.events.len() {
            if hyp.event_pred(i - 1) != c.before || hyp.event_pred(i) != c.after {
                continue;
            }
            let a = m.slots.iter().position(|&s| s == (side, i - 1)).unwrap();
            let b = m.slots.iter().position(|&s| s == (side, i)).unwrap();
            if m.slots[a + 1..b].iter().any(|&(s, _)| s != side) {
                return true;
            }
        }
    }
    false
}

/// Keeps the merges that violate no constraint.
pub fn filter_constraints(
    merges: Vec<Merge>,
    h: [&Hypothesis; 2],
    constraints: &[InterleavingConstraint],
) -> Vec<Merge> {
    merges
        .into_iter()
        .filter(|m| !constraints.iter().any(|c| violates(m, h, c)))
        .collect()
}

/// One event of a bottom clause with the literals that enter with it.
#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub event: Literal,
    /// `suc`/`suci` tying the event to an earlier one; absent for the first event.
    pub connector: Option<Literal>,
    /// Other literals whose latest event is this one.
    pub extras: Vec<Literal>,
    pub side: u8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BottomClause {
    pub clause: Clause,
    pub merge: Merge,
    /// Events in merge order.
    pub levels: Vec<Level>,
    /// Literals mentioning no event.
    pub free: Vec<Literal>,
}

fn event_vars<'a>(lit: &'a Literal, position: &'a BTreeMap<Symbol, usize>) -> impl Iterator<Item = usize> + 'a {
    lit.args.iter().filter_map(|a| match a {
        Term::Var(v) => position.get(v).copied(),
        Term::Const(_) => None,
    })
}

/// Both rules' literals plus `suci(X,Y)` for every merge-adjacent pair `Y, X`
/// coming from different hypotheses. Assumes the two rules are standardized apart.
pub fn make_bottom_clause(h1: &Hypothesis, h2: &Hypothesis, m: &Merge) -> BottomClause {
    let h = [h1, h2];
    let vars: Vec<Symbol> = m.slots.iter().map(|&(s, i)| h[s as usize].events[i]).collect();
    let position: BTreeMap<Symbol, usize> = vars.iter().enumerate().map(|(k, v)| (*v, k)).collect();
    let suci = Symbol::intern(SUCI);
    let mut levels: Vec<Level> = m
        .slots
        .iter()
        .enumerate()
        .map(|(k, &(s, i))| {
            let connector = (k > 0 && m.slots[k - 1].0 != s).then(|| Literal {
                pred: suci,
                args: vec![Term::Var(vars[k]), Term::Var(vars[k - 1])],
            });
            Level {
                event: h[s as usize].event_literals[i].clone(),
                connector,
                extras: Vec::new(),
                side: s,
            }
        })
        .collect();
    let mut free = Vec::new();
    for hyp in h {
        for lit in &hyp.clause.body {
            if hyp.event_literals.contains(lit) {
                continue;
            }
            match event_vars(lit, &position).max() {
                None => free.push(lit.clone()),
                Some(k) => levels[k].extras.push(lit.clone()),
            }
        }
    }
    // Without a new suci, the connector is the rule's own link to the most
    // recent earlier event.
    for (k, level) in levels.iter_mut().enumerate().skip(1) {
        if level.connector.is_some() {
            continue;
        }
        let back = |l: &Literal| match (l.args.first(), l.args.get(1)) {
            (Some(&a), Some(Term::Var(v))) if is_succession(l) && a == Term::Var(vars[k]) => {
                position.get(v).copied().filter(|&e| e < k)
            }
            _ => None,
        };
        let pick = level
            .extras
            .iter()
            .enumerate()
            .filter_map(|(x, l)| back(l).map(|e| (e, std::cmp::Reverse(x))))
            .max()
            .map(|(_, std::cmp::Reverse(x))| x);
        if let Some(x) = pick {
            level.connector = Some(level.extras.remove(x));
        }
    }
    let mut body = Vec::new();
    for (k, level) in levels.iter().enumerate() {
        body.push(level.event.clone());
        if k == 0 {
            body.extend(free.iter().cloned());
        }
        body.extend(level.connector.iter().cloned());
        body.extend(level.extras.iter().cloned());
    }
    if levels.is_empty() {
        body.extend(free.iter().cloned());
    }
    BottomClause {
        clause: Clause::new(h1.clause.head.clone(), body),
        merge: m.clone(),
        levels,
        free,
    }
}
