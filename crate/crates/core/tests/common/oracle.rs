//! Exhaustive reference implementations used to check the real ones.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use relic::dlab::{ArgNode, DlabNode};
use relic::logic::{Clause, FactSet, Literal, Term};
use relic::Symbol;

fn subsets<T, I: Clone>(children: &[T], lo: usize, hi: usize, expand: &dyn Fn(&T) -> Vec<Vec<I>>) -> Vec<Vec<I>> {
    let n = children.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let k = mask.count_ones() as usize;
        if k < lo || k > hi {
            continue;
        }
        let mut acc: Vec<Vec<I>> = vec![vec![]];
        for (i, c) in children.iter().enumerate() {
            if mask & (1 << i) != 0 {
                let opts = expand(c);
                acc = acc
                    .iter()
                    .flat_map(|p| opts.iter().map(move |o| [p.clone(), o.clone()].concat()))
                    .collect();
            }
        }
        out.extend(acc);
    }
    out
}

/// Every argument sequence an argument node can produce.
pub fn brute_args(arg: &ArgNode) -> Vec<Vec<Term>> {
    match arg {
        ArgNode::Term(t) => vec![vec![*t]],
        ArgNode::Choice { min, max, children } => {
            let n = children.len();
            subsets(children, min.resolve(n), max.resolve(n), &brute_args)
        }
    }
}

/// Every body a grammar node can produce, by powerset filtering.
pub fn brute_dlab(node: &DlabNode) -> Vec<Vec<Literal>> {
    match node {
        DlabNode::Terminal(t) => {
            let mut acc: Vec<Vec<Term>> = vec![vec![]];
            for a in &t.args {
                let opts = brute_args(a);
                acc = acc
                    .iter()
                    .flat_map(|p| opts.iter().map(move |o| [p.clone(), o.clone()].concat()))
                    .collect();
            }
            acc.into_iter()
                .map(|args| vec![Literal { pred: t.pred, args }])
                .collect()
        }
        DlabNode::Choice { min, max, children } => {
            let n = children.len();
            subsets(children, min.resolve(n), max.resolve(n), &brute_dlab)
        }
    }
}

pub fn sorted(body: &[Literal]) -> Vec<String> {
    let mut v: Vec<String> = body.iter().map(|l| l.to_string()).collect();
    v.sort();
    v
}

fn vars_of<'a>(lits: impl IntoIterator<Item = &'a Literal>) -> Vec<Symbol> {
    let set: BTreeSet<Symbol> = lits.into_iter().flat_map(|l| l.vars()).collect();
    set.into_iter().collect()
}

fn ground(lit: &Literal, map: &BTreeMap<Symbol, Term>) -> Literal {
    Literal {
        pred: lit.pred,
        args: lit
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => map[v],
                c => *c,
            })
            .collect(),
    }
}

/// Tries every assignment of the variables of `lits` to `universe`.
fn exists_assignment(lits: &[Literal], universe: &[Term], target: &BTreeSet<Literal>) -> bool {
    let vars = vars_of(lits);
    if universe.is_empty() {
        return vars.is_empty() && lits.iter().all(|l| target.contains(l));
    }
    let mut idx = vec![0usize; vars.len()];
    loop {
        let map: BTreeMap<Symbol, Term> = vars.iter().zip(&idx).map(|(v, &i)| (*v, universe[i])).collect();
        if lits.iter().all(|l| target.contains(&ground(l, &map))) {
            return true;
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return false;
            }
            idx[k] += 1;
            if idx[k] < universe.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Coverage by enumerating every substitution over the constants of the facts.
pub fn brute_covers(body: &[Literal], facts: &FactSet) -> bool {
    let universe: BTreeSet<Term> = facts.iter().flat_map(|f| f.args.iter().copied()).collect();
    let universe: Vec<Term> = universe.into_iter().collect();
    let target: BTreeSet<Literal> = facts.iter().cloned().collect();
    exists_assignment(body, &universe, &target)
}

/// θ-subsumption by enumerating every mapping of the general clause's
/// variables onto the terms of the specific clause.
pub fn brute_subsumes(general: &Clause, specific: &Clause) -> bool {
    let target: BTreeSet<Literal> = specific.literals().cloned().collect();
    let universe: BTreeSet<Term> = target.iter().flat_map(|l| l.args.iter().copied()).collect();
    let universe: Vec<Term> = universe.into_iter().collect();
    let lits: Vec<Literal> = general.literals().cloned().collect();
    exists_assignment(&lits, &universe, &target)
}

const PREDS: [(&str, usize); 4] = [("a", 1), ("b", 2), ("c", 2), ("d", 3)];

fn random_term(rng: &mut impl Rng, vars: &[&str], consts: &[&str], p_var: f64) -> Term {
    if rng.gen_bool(p_var) {
        Term::var(vars.choose(rng).unwrap())
    } else {
        Term::constant(consts.choose(rng).unwrap())
    }
}

pub fn random_literal(rng: &mut impl Rng, vars: &[&str], consts: &[&str], p_var: f64) -> Literal {
    let (pred, arity) = *PREDS.choose(rng).unwrap();
    let args = (0..arity).map(|_| random_term(rng, vars, consts, p_var)).collect();
    Literal::new(pred, args)
}

pub fn random_facts(rng: &mut impl Rng, max: usize) -> FactSet {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| random_literal(rng, &[], &["k", "m", "n"], 0.0)).collect()
}

pub fn random_body(rng: &mut impl Rng, max: usize) -> Vec<Literal> {
    let n = rng.gen_range(0..=max);
    (0..n)
        .map(|_| random_literal(rng, &["X", "Y", "Z"], &["k", "m", "n"], 0.7))
        .collect()
}

pub fn random_clause(rng: &mut impl Rng, max_body: usize) -> Clause {
    Clause::for_class("x", random_body(rng, max_body))
}

fn random_arg_text(rng: &mut impl Rng) -> String {
    ["X", "Y", "k", "1-1:[u,v]", "0-len:[u,v]", "1-2:[u,v,w]"]
        .choose(rng)
        .unwrap()
        .to_string()
}

fn random_literal_text(rng: &mut impl Rng) -> String {
    let pred = ["a", "b", "c"].choose(rng).unwrap();
    let n = rng.gen_range(0..3);
    if n == 0 {
        return pred.to_string();
    }
    let args: Vec<String> = (0..n).map(|_| random_arg_text(rng)).collect();
    format!("{pred}({})", args.join(","))
}

/// Random DLAB grammar text of bounded depth.
pub fn random_grammar(rng: &mut impl Rng, depth: usize) -> String {
    if depth == 0 || rng.gen_bool(0.3) {
        return random_literal_text(rng);
    }
    let n = rng.gen_range(1..=3);
    let children: Vec<String> = (0..n).map(|_| random_grammar(rng, depth - 1)).collect();
    let min = rng.gen_range(0..=n);
    let max = if rng.gen_bool(0.3) {
        "len".to_string()
    } else {
        rng.gen_range(min..=n).to_string()
    };
    let min = if max == "len" && rng.gen_bool(0.2) { "len".to_string() } else { min.to_string() };
    format!("{min}-{max}:[{}]", children.join(","))
}
