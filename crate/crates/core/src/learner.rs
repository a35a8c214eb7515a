//! Top-down beam search for class rules under a DLAB bias.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Interpretation;
use crate::dlab::{DlabTemplate, Selection};
use crate::error::{Error, Result};
use crate::logic::{canonical_body, Clause, FactSet, Literal, Query};
use crate::symbol::Symbol;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnerParams {
    pub beam_width: usize,
    pub max_clauses_per_class: usize,
    pub min_positive_coverage: usize,
    /// Largest tolerated fraction of covered negatives for an accepted clause.
    pub noise: f64,
}

impl Default for LearnerParams {
    fn default() -> Self {
        LearnerParams {
            beam_width: 10,
            max_clauses_per_class: 5,
            min_positive_coverage: 1,
            noise: 0.0,
        }
    }
}

impl LearnerParams {
    pub fn validate(&self) -> Result<()> {
        if self.beam_width == 0 {
            return Err(Error::usage("beam width must be at least 1"));
        }
        if self.max_clauses_per_class == 0 {
            return Err(Error::usage("max clauses per class must be at least 1"));
        }
        if self.min_positive_coverage == 0 {
            return Err(Error::usage("minimum positive coverage must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(Error::usage("noise must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Selections produced by the refinement operator.
    pub nodes: u64,
    pub time_ms: u64,
}

impl SearchStats {
    pub fn add(&mut self, other: SearchStats) {
        self.nodes += other.nodes;
        self.time_ms += other.time_ms;
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClassTheory {
    pub clauses: Vec<Clause>,
    pub stats: SearchStats,
    /// Some positives were left uncovered because no acceptable clause exists.
    pub incomplete: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Theory {
    pub classes: BTreeMap<Symbol, ClassTheory>,
}

impl Theory {
    pub fn clauses(&self, label: Symbol) -> &[Clause] {
        self.classes.get(&label).map_or(&[], |c| c.clauses.as_slice())
    }

    pub fn stats(&self) -> SearchStats {
        let mut total = SearchStats::default();
        for c in self.classes.values() {
            total.add(c.stats);
        }
        total
    }

    /// Rule text, one clause per line, each class preceded by a comment with its stats.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (label, ct) in &self.classes {
            write!(
                f,
                "% {label}: {} clause(s), nodes={}, time_ms={}",
                ct.clauses.len(),
                ct.stats.nodes,
                ct.stats.time_ms
            )?;
            if ct.incomplete {
                f.write_str(", incomplete")?;
            }
            writeln!(f)?;
            for c in &ct.clauses {
                writeln!(f, "{c}")?;
            }
        }
        Ok(())
    }
}

/// A labelled fact set as seen by the learner.
#[derive(Clone, Copy, Debug)]
pub struct Example<'a> {
    pub label: Symbol,
    pub facts: &'a FactSet,
}

impl<'a> From<&'a Interpretation> for Example<'a> {
    fn from(i: &'a Interpretation) -> Self {
        Example {
            label: i.label,
            facts: &i.facts,
        }
    }
}

pub fn examples<'a>(interpretations: impl IntoIterator<Item = &'a Interpretation>) -> Vec<Example<'a>> {
    interpretations.into_iter().map(Example::from).collect()
}

/// `(tp + tn) / (tp + tn + fp + fn)`.
pub fn accuracy(tp: usize, tn: usize, fp: usize, fn_: usize) -> Result<f64> {
    let total = tp + tn + fp + fn_;
    if total == 0 {
        return Err(Error::usage("accuracy of an empty confusion matrix"));
    }
    Ok((tp + tn) as f64 / total as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Score {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
    pub accuracy: f64,
}

pub fn score_clause(clause: &Clause, pos: &[&FactSet], neg: &[&FactSet]) -> Result<Score> {
    let q = Query::body(clause);
    let tp = pos.iter().filter(|f| q.is_satisfied(f)).count();
    let fp = neg.iter().filter(|f| q.is_satisfied(f)).count();
    let (tn, fn_) = (neg.len() - fp, pos.len() - tp);
    Ok(Score {
        tp,
        tn,
        fp,
        fn_,
        accuracy: accuracy(tp, tn, fp, fn_)?,
    })
}

struct Node {
    sel: Selection,
    key: String,
    body: Vec<Literal>,
    pos: Vec<usize>,
    neg: Vec<usize>,
    accuracy: f64,
}

struct Search<'a> {
    label: Symbol,
    bias: &'a DlabTemplate,
    params: &'a LearnerParams,
    pos: Vec<&'a FactSet>,
    neg: Vec<&'a FactSet>,
    nodes: u64,
}

fn better(a: &Node, b: &Node) -> std::cmp::Ordering {
    b.accuracy
        .total_cmp(&a.accuracy)
        .then_with(|| a.key.cmp(&b.key))
}

impl Search<'_> {
    fn allowed_fp(&self) -> usize {
        (self.params.noise * self.neg.len() as f64).floor() as usize
    }

    /// One beam search over the positives still uncovered. Returns the most
    /// accurate acceptable clause from the first round that produces one.
    fn run(&mut self, remaining: &[usize]) -> Option<Node> {
        let total = remaining.len() + self.neg.len();
        let root = Node {
            sel: self.bias.root_selection(),
            key: String::new(),
            body: Vec::new(),
            pos: remaining.to_vec(),
            neg: (0..self.neg.len()).collect(),
            accuracy: remaining.len() as f64 / total as f64,
        };
        let mut beam = vec![root];
        let mut seen: HashSet<String> = HashSet::new();
        loop {
            let mut pending: Vec<(usize, Selection, Vec<Literal>, String)> = Vec::new();
            for (parent, node) in beam.iter().enumerate() {
                for sel in self.bias.refine(&node.sel) {
                    self.nodes += 1;
                    let body = self.bias.body(&sel);
                    let key = canonical_body(&body);
                    if seen.insert(key.clone()) {
                        pending.push((parent, sel, body, key));
                    }
                }
            }
            if pending.is_empty() {
                return None;
            }
            let (pos, neg) = (&self.pos, &self.neg);
            let mut scored: Vec<Node> = pending
                .into_par_iter()
                .map(|(parent, sel, body, key)| {
                    let q = Query::new(&body);
                    let p = &beam[parent];
                    let pc: Vec<usize> = p.pos.iter().copied().filter(|&i| q.is_satisfied(pos[i])).collect();
                    let nc: Vec<usize> = p.neg.iter().copied().filter(|&i| q.is_satisfied(neg[i])).collect();
                    let correct = pc.len() + (neg.len() - nc.len());
                    Node {
                        sel,
                        key,
                        body,
                        pos: pc,
                        neg: nc,
                        accuracy: correct as f64 / total as f64,
                    }
                })
                .collect();
            let min_pos = self.params.min_positive_coverage;
            scored.retain(|n| n.pos.len() >= min_pos);
            scored.sort_by(better);
            let allowed = self.allowed_fp();
            if let Some(i) = scored.iter().position(|n| n.neg.len() <= allowed) {
                return Some(scored.swap_remove(i));
            }
            scored.truncate(self.params.beam_width);
            if scored.is_empty() {
                return None;
            }
            beam = scored;
        }
    }
}

/// Covering loop: repeatedly searches for an acceptable clause and removes
/// the positives it covers.
pub fn learn_class(
    label: Symbol,
    examples: &[Example<'_>],
    bias: &DlabTemplate,
    params: &LearnerParams,
) -> Result<ClassTheory> {
    params.validate()?;
    let start = Instant::now();
    let pos: Vec<&FactSet> = examples.iter().filter(|e| e.label == label).map(|e| e.facts).collect();
    let neg: Vec<&FactSet> = examples.iter().filter(|e| e.label != label).map(|e| e.facts).collect();
    if pos.is_empty() {
        return Err(Error::usage(format!("class {label} has no positive examples")));
    }
    let mut search = Search {
        label,
        bias,
        params,
        pos,
        neg,
        nodes: 0,
    };
    let mut remaining: Vec<usize> = (0..search.pos.len()).collect();
    let mut theory = ClassTheory::default();
    while !remaining.is_empty() && theory.clauses.len() < params.max_clauses_per_class {
        match search.run(&remaining) {
            Some(found) => {
                let covered: HashSet<usize> = found.pos.iter().copied().collect();
                remaining.retain(|i| !covered.contains(i));
                theory.clauses.push(Clause::new(
                    crate::logic::class_head(search.label),
                    found.body,
                ));
            }
            None => {
                theory.incomplete = true;
                break;
            }
        }
    }
    theory.stats = SearchStats {
        nodes: search.nodes,
        time_ms: start.elapsed().as_millis() as u64,
    };
    Ok(theory)
}

/// Which bias each class is learned under.
#[derive(Clone, Copy, Debug)]
pub enum BiasChoice<'a> {
    Shared(&'a DlabTemplate),
    PerClass(&'a BTreeMap<Symbol, DlabTemplate>),
}

/// Learns every class present in `examples`. Classes without a bias in a
/// per-class map are skipped.
pub fn learn_theory(examples: &[Example<'_>], bias: BiasChoice<'_>, params: &LearnerParams) -> Result<Theory> {
    let classes: std::collections::BTreeSet<Symbol> = examples.iter().map(|e| e.label).collect();
    if classes.len() < 2 {
        return Err(Error::usage(
            "learning needs at least two classes so that negatives exist",
        ));
    }
    let mut theory = Theory::default();
    for label in classes {
        let template = match bias {
            BiasChoice::Shared(t) => t,
            BiasChoice::PerClass(map) => match map.get(&label) {
                Some(t) => t,
                None => continue,
            },
        };
        theory
            .classes
            .insert(label, learn_class(label, examples, template, params)?);
    }
    Ok(theory)
}

/// Training or test accuracy of a class theory: positives count as correct
/// when some clause covers them, negatives when none does.
pub fn theory_accuracy(label: Symbol, clauses: &[Clause], examples: &[Example<'_>]) -> Result<f64> {
    let queries: Vec<Query> = clauses.iter().map(Query::body).collect();
    let (mut tp, mut tn, mut fp, mut fn_) = (0, 0, 0, 0);
    for e in examples {
        let covered = queries.iter().any(|q| q.is_satisfied(e.facts));
        match (e.label == label, covered) {
            (true, true) => tp += 1,
            (true, false) => fn_ += 1,
            (false, true) => fp += 1,
            (false, false) => tn += 1,
        }
    }
    accuracy(tp, tn, fp, fn_)
}
