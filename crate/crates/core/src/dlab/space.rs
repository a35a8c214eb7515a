use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::dlab::grammar::{parse_dlab_node, ArgNode, DlabNode, LiteralTemplate};
use crate::error::{Error, Result};
use crate::logic::{canonical_body, Clause, Literal, PredKey, Term};

const MAX_TERMINAL_INSTANCES: usize = 1_000_000;

/// Exact size of a search space; `saturated` means the true value exceeds `u128::MAX`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SpaceSize {
    pub value: u128,
    pub saturated: bool,
}

impl SpaceSize {
    fn exact(value: u128) -> Self {
        SpaceSize {
            value,
            saturated: false,
        }
    }

    fn saturated() -> Self {
        SpaceSize {
            value: u128::MAX,
            saturated: true,
        }
    }

    fn add(self, other: SpaceSize) -> SpaceSize {
        match self.value.checked_add(other.value) {
            Some(v) if !self.saturated && !other.saturated => SpaceSize::exact(v),
            _ => SpaceSize::saturated(),
        }
    }

    fn mul(self, other: SpaceSize) -> SpaceSize {
        if self.value == 0 || other.value == 0 {
            return SpaceSize::exact(0);
        }
        match self.value.checked_mul(other.value) {
            Some(v) if !self.saturated && !other.saturated => SpaceSize::exact(v),
            _ => SpaceSize::saturated(),
        }
    }
}

impl fmt::Display for SpaceSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.saturated {
            write!(f, ">{}", u128::MAX)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

/// Choices made in a template: a terminal picks one of its instances, a list
/// picks an ordered subset of its children, each with its own selection.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Selection {
    Terminal(u32),
    Choice(Vec<(u32, Selection)>),
}

impl Selection {
    /// Number of chosen nodes, used only to order refinement depth.
    fn size(&self) -> usize {
        match self {
            Selection::Terminal(_) => 1,
            Selection::Choice(c) => 1 + c.iter().map(|(_, s)| s.size()).sum::<usize>(),
        }
    }
}

#[derive(Clone, Debug)]
enum Node {
    Terminal {
        instances: Vec<Literal>,
        lookup: HashSet<Literal>,
        count: SpaceSize,
    },
    Choice {
        min: usize,
        max: usize,
        children: Vec<usize>,
    },
}

#[derive(Clone, Debug)]
struct NodeInfo {
    preds: BTreeSet<PredKey>,
    min_literals: usize,
}

/// A parsed DLAB grammar compiled for counting, enumeration, membership and refinement.
#[derive(Clone, Debug)]
pub struct DlabTemplate {
    root: DlabNode,
    nodes: Vec<Node>,
    info: Vec<NodeInfo>,
}

pub fn parse_dlab(text: &str) -> Result<DlabTemplate> {
    DlabTemplate::parse(text)
}

pub fn count_space(t: &DlabTemplate) -> SpaceSize {
    t.count_space()
}

pub fn enumerate(t: &DlabTemplate, limit: u128) -> Result<Vec<Vec<Literal>>> {
    t.enumerate(limit)
}

pub fn member(c: &Clause, t: &DlabTemplate) -> bool {
    t.member(&c.body)
}

pub fn refine(s: &Selection, t: &DlabTemplate) -> Vec<Selection> {
    t.refine(s)
}

/// Σ_{k=lo..hi} e_k(counts): subsets of size k weighted by the product of their counts.
fn subset_count(counts: &[SpaceSize], lo: usize, hi: usize) -> SpaceSize {
    let hi = hi.min(counts.len());
    let mut e = vec![SpaceSize::exact(0); hi + 1];
    e[0] = SpaceSize::exact(1);
    for &c in counts {
        for k in (1..=hi).rev() {
            e[k] = e[k].add(e[k - 1].mul(c));
        }
    }
    (lo..=hi).fold(SpaceSize::exact(0), |acc, k| acc.add(e[k]))
}

/// All index subsets of `0..n` with size in `lo..=hi`, by size then lexicographically.
fn subsets(n: usize, lo: usize, hi: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for k in lo..=hi.min(n) {
        let mut comb: Vec<usize> = (0..k).collect();
        loop {
            out.push(comb.clone());
            let mut i = k;
            while i > 0 && comb[i - 1] == n - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            comb[i - 1] += 1;
            for j in i..k {
                comb[j] = comb[j - 1] + 1;
            }
        }
    }
    out
}

fn product<T: Clone>(parts: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for part in parts {
        let mut next = Vec::with_capacity(out.len() * part.len());
        for prefix in &out {
            for item in part {
                let mut v = prefix.clone();
                v.push(item.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Argument sequences an inline argument node can expand to.
fn arg_expansions(arg: &ArgNode) -> Vec<Vec<Term>> {
    match arg {
        ArgNode::Term(t) => vec![vec![*t]],
        ArgNode::Choice { min, max, children } => {
            let n = children.len();
            let options: Vec<Vec<Vec<Term>>> = children.iter().map(arg_expansions).collect();
            let mut out = Vec::new();
            for subset in subsets(n, min.resolve(n), max.resolve(n)) {
                let parts: Vec<Vec<Vec<Term>>> = subset.iter().map(|&i| options[i].clone()).collect();
                for combo in product(&parts) {
                    out.push(combo.concat());
                }
            }
            out
        }
    }
}

fn arg_count(arg: &ArgNode) -> SpaceSize {
    match arg {
        ArgNode::Term(_) => SpaceSize::exact(1),
        ArgNode::Choice { min, max, children } => {
            let counts: Vec<SpaceSize> = children.iter().map(arg_count).collect();
            subset_count(&counts, min.resolve(children.len()), max.resolve(children.len()))
        }
    }
}

fn instantiate(t: &LiteralTemplate) -> Result<(Vec<Literal>, SpaceSize)> {
    let count = t
        .args
        .iter()
        .fold(SpaceSize::exact(1), |acc, a| acc.mul(arg_count(a)));
    if count.saturated || count.value > MAX_TERMINAL_INSTANCES as u128 {
        return Err(Error::Bias(format!(
            "literal template {t} expands to {count} instances"
        )));
    }
    let parts: Vec<Vec<Vec<Term>>> = t.args.iter().map(arg_expansions).collect();
    let instances = product(&parts)
        .into_iter()
        .map(|args| Literal {
            pred: t.pred,
            args: args.concat(),
        })
        .collect();
    Ok((instances, count))
}

enum Pending {
    Node(usize),
    Choice { id: usize, next: usize, chosen: usize },
}

struct Matcher<'a> {
    t: &'a DlabTemplate,
    body: Vec<Literal>,
    remaining: Vec<usize>,
    pred_left: HashMap<PredKey, usize>,
    left: usize,
}

impl Matcher<'_> {
    fn feasible(&self, id: usize) -> bool {
        let info = &self.t.info[id];
        info.min_literals <= self.left
            && (info.min_literals == 0
                || info.preds.iter().any(|p| self.pred_left.get(p).copied().unwrap_or(0) > 0))
    }

    fn take(&mut self, b: usize, delta: isize) {
        let key = self.body[b].key();
        let apply = |v: &mut usize| *v = (*v as isize - delta) as usize;
        apply(&mut self.remaining[b]);
        apply(self.pred_left.get_mut(&key).unwrap());
        apply(&mut self.left);
    }

    fn solve(&mut self, pending: &mut Vec<Pending>) -> bool {
        let Some(item) = pending.pop() else {
            return self.left == 0;
        };
        let found = match item {
            Pending::Node(id) => match &self.t.nodes[id] {
                Node::Terminal { lookup, .. } => {
                    let mut ok = false;
                    for b in 0..self.body.len() {
                        if self.remaining[b] > 0 && lookup.contains(&self.body[b]) {
                            self.take(b, 1);
                            ok = self.solve(pending);
                            self.take(b, -1);
                            if ok {
                                break;
                            }
                        }
                    }
                    ok
                }
                Node::Choice { .. } => {
                    pending.push(Pending::Choice {
                        id,
                        next: 0,
                        chosen: 0,
                    });
                    let ok = self.solve(pending);
                    pending.pop();
                    ok
                }
            },
            Pending::Choice { id, next, chosen } => {
                let Node::Choice { min, max, children } = &self.t.nodes[id] else {
                    unreachable!()
                };
                if next == children.len() {
                    chosen >= *min && self.solve(pending)
                } else {
                    let child = children[next];
                    let mut ok = false;
                    if chosen < *max && self.feasible(child) {
                        pending.push(Pending::Choice {
                            id,
                            next: next + 1,
                            chosen: chosen + 1,
                        });
                        pending.push(Pending::Node(child));
                        ok = self.solve(pending);
                        pending.pop();
                        pending.pop();
                    }
                    if !ok && chosen + (children.len() - next - 1) >= *min {
                        pending.push(Pending::Choice {
                            id,
                            next: next + 1,
                            chosen,
                        });
                        ok = self.solve(pending);
                        pending.pop();
                    }
                    ok
                }
            }
        };
        pending.push(item);
        found
    }
}

impl DlabTemplate {
    pub fn parse(text: &str) -> Result<DlabTemplate> {
        DlabTemplate::from_node(parse_dlab_node(text)?)
    }

    /// Compiles an AST; a bare literal root is wrapped in `len-len:[...]`.
    pub fn from_node(root: DlabNode) -> Result<DlabTemplate> {
        let root = match root {
            DlabNode::Terminal(_) => DlabNode::all(vec![root]),
            other => other,
        };
        let mut t = DlabTemplate {
            root: root.clone(),
            nodes: Vec::new(),
            info: Vec::new(),
        };
        t.compile(&root)?;
        Ok(t)
    }

    fn compile(&mut self, node: &DlabNode) -> Result<usize> {
        let id = self.nodes.len();
        self.nodes.push(Node::Choice {
            min: 0,
            max: 0,
            children: Vec::new(),
        });
        self.info.push(NodeInfo {
            preds: BTreeSet::new(),
            min_literals: 0,
        });
        match node {
            DlabNode::Terminal(lt) => {
                let (instances, count) = instantiate(lt)?;
                let preds = instances.iter().map(Literal::key).collect();
                let lookup = instances.iter().cloned().collect();
                self.info[id] = NodeInfo {
                    preds,
                    min_literals: 1,
                };
                self.nodes[id] = Node::Terminal {
                    instances,
                    lookup,
                    count,
                };
            }
            DlabNode::Choice { min, max, children } => {
                let n = children.len();
                let (lo, hi) = (min.resolve(n), max.resolve(n).min(n));
                if lo > hi {
                    return Err(Error::Bias(format!("list {min}-{max} over {n} items is unsatisfiable")));
                }
                let ids = children
                    .iter()
                    .map(|c| self.compile(c))
                    .collect::<Result<Vec<_>>>()?;
                let mut mins: Vec<usize> = ids.iter().map(|&c| self.info[c].min_literals).collect();
                mins.sort_unstable();
                let preds = ids.iter().flat_map(|&c| self.info[c].preds.iter().copied()).collect();
                self.info[id] = NodeInfo {
                    preds,
                    min_literals: mins[..lo].iter().sum(),
                };
                self.nodes[id] = Node::Choice {
                    min: lo,
                    max: hi,
                    children: ids,
                };
            }
        }
        Ok(id)
    }

    pub fn root(&self) -> &DlabNode {
        &self.root
    }

    /// Predicates that can occur in some clause of the space.
    pub fn predicates(&self) -> &BTreeSet<PredKey> {
        &self.info[0].preds
    }

    /// Smallest body length of any clause in the space.
    pub fn min_literals(&self) -> usize {
        self.info[0].min_literals
    }

    pub fn count_space(&self) -> SpaceSize {
        self.count_node(0)
    }

    fn count_node(&self, id: usize) -> SpaceSize {
        match &self.nodes[id] {
            Node::Terminal { count, .. } => *count,
            Node::Choice { min, max, children } => {
                let counts: Vec<SpaceSize> = children.iter().map(|&c| self.count_node(c)).collect();
                subset_count(&counts, *min, *max)
            }
        }
    }

    /// Every valid selection, ordered by children order and subset rank.
    pub fn enumerate_selections(&self, limit: u128) -> Result<Vec<Selection>> {
        let count = self.count_space();
        if count.saturated || count.value > limit {
            return Err(Error::usage(format!(
                "search space has {count} clauses, above the enumeration limit {limit}"
            )));
        }
        Ok(self.enumerate_node(0))
    }

    /// Clause bodies of [`Self::enumerate_selections`].
    pub fn enumerate(&self, limit: u128) -> Result<Vec<Vec<Literal>>> {
        Ok(self
            .enumerate_selections(limit)?
            .iter()
            .map(|s| self.body(s))
            .collect())
    }

    fn enumerate_node(&self, id: usize) -> Vec<Selection> {
        match &self.nodes[id] {
            Node::Terminal { instances, .. } => {
                (0..instances.len() as u32).map(Selection::Terminal).collect()
            }
            Node::Choice { min, max, children } => {
                let options: Vec<Vec<Selection>> =
                    children.iter().map(|&c| self.enumerate_node(c)).collect();
                let mut out = Vec::new();
                for subset in subsets(children.len(), *min, *max) {
                    let parts: Vec<Vec<(u32, Selection)>> = subset
                        .iter()
                        .map(|&i| options[i].iter().map(|s| (i as u32, s.clone())).collect())
                        .collect();
                    out.extend(product(&parts).into_iter().map(Selection::Choice));
                }
                out
            }
        }
    }

    /// True iff some valid selection induces exactly this body (as a multiset).
    pub fn member(&self, body: &[Literal]) -> bool {
        let mut distinct: Vec<Literal> = Vec::new();
        let mut remaining = Vec::new();
        for lit in body {
            match distinct.iter().position(|d| d == lit) {
                Some(i) => remaining[i] += 1,
                None => {
                    distinct.push(lit.clone());
                    remaining.push(1);
                }
            }
        }
        let mut pred_left = HashMap::new();
        for lit in body {
            *pred_left.entry(lit.key()).or_insert(0) += 1;
        }
        if body.iter().any(|l| !self.info[0].preds.contains(&l.key())) {
            return false;
        }
        let mut m = Matcher {
            t: self,
            body: distinct,
            remaining,
            pred_left,
            left: body.len(),
        };
        m.solve(&mut vec![Pending::Node(0)])
    }

    /// The selection with nothing chosen; valid only if the root list has minimum 0.
    pub fn root_selection(&self) -> Selection {
        Selection::Choice(Vec::new())
    }

    pub fn is_valid(&self, sel: &Selection) -> bool {
        self.valid_at(0, sel)
    }

    fn valid_at(&self, id: usize, sel: &Selection) -> bool {
        match (&self.nodes[id], sel) {
            (Node::Terminal { instances, .. }, Selection::Terminal(i)) => (*i as usize) < instances.len(),
            (Node::Choice { min, max, children }, Selection::Choice(chosen)) => {
                (*min..=*max).contains(&chosen.len())
                    && chosen.windows(2).all(|w| w[0].0 < w[1].0)
                    && chosen.iter().all(|(i, s)| {
                        children
                            .get(*i as usize)
                            .is_some_and(|&c| self.valid_at(c, s))
                    })
            }
            _ => false,
        }
    }

    /// Clause body in template order.
    pub fn body(&self, sel: &Selection) -> Vec<Literal> {
        let mut out = Vec::new();
        self.collect_body(0, sel, &mut out);
        out
    }

    fn collect_body(&self, id: usize, sel: &Selection, out: &mut Vec<Literal>) {
        match (&self.nodes[id], sel) {
            (Node::Terminal { instances, .. }, Selection::Terminal(i)) => {
                out.push(instances[*i as usize].clone())
            }
            (Node::Choice { children, .. }, Selection::Choice(chosen)) => {
                for (i, s) in chosen {
                    self.collect_body(children[*i as usize], s, out);
                }
            }
            _ => panic!("selection does not match template shape"),
        }
    }

    pub fn clause(&self, label: &str, sel: &Selection) -> Clause {
        Clause::for_class(label, self.body(sel))
    }

    fn literal_count(&self, sel: &Selection) -> usize {
        match sel {
            Selection::Terminal(_) => 1,
            Selection::Choice(c) => c.iter().map(|(_, s)| self.literal_count(s)).sum(),
        }
    }

    /// Minimal valid selections of a node with nothing chosen.
    fn fresh(&self, id: usize) -> Vec<Selection> {
        match &self.nodes[id] {
            Node::Terminal { instances, .. } => {
                (0..instances.len() as u32).map(Selection::Terminal).collect()
            }
            Node::Choice { .. } => self.completions(id, &[]),
        }
    }

    /// Minimal valid selections of a list extending the chosen children `chosen`.
    fn completions(&self, id: usize, chosen: &[(u32, Selection)]) -> Vec<Selection> {
        let Node::Choice { min, children, .. } = &self.nodes[id] else {
            unreachable!()
        };
        let missing = min.saturating_sub(chosen.len());
        let free: Vec<usize> = (0..children.len())
            .filter(|i| !chosen.iter().any(|(c, _)| *c as usize == *i))
            .collect();
        let mut out = Vec::new();
        for subset in subsets(free.len(), missing, missing) {
            let parts: Vec<Vec<(u32, Selection)>> = subset
                .iter()
                .map(|&k| {
                    let i = free[k];
                    self.fresh(children[i])
                        .into_iter()
                        .map(|s| (i as u32, s))
                        .collect()
                })
                .collect();
            for added in product(&parts) {
                let mut all: Vec<(u32, Selection)> = chosen.to_vec();
                all.extend(added);
                all.sort_by_key(|(i, _)| *i);
                out.push(Selection::Choice(all));
            }
        }
        out
    }

    fn refine_at(&self, id: usize, sel: &Selection) -> Vec<Selection> {
        let (Node::Choice { min, max, children }, Selection::Choice(chosen)) = (&self.nodes[id], sel) else {
            return Vec::new();
        };
        if chosen.len() < *min {
            return self.completions(id, chosen);
        }
        let mut out = Vec::new();
        for (pos, (i, s)) in chosen.iter().enumerate() {
            for r in self.refine_at(children[*i as usize], s) {
                let mut next = chosen.clone();
                next[pos] = (*i, r);
                out.push(Selection::Choice(next));
            }
        }
        if chosen.len() < *max {
            let start = chosen.last().map_or(0, |(i, _)| *i as usize + 1);
            for (i, &child) in children.iter().enumerate().skip(start) {
                for s in self.fresh(child) {
                    let mut next = chosen.clone();
                    next.push((i as u32, s));
                    out.push(Selection::Choice(next));
                }
            }
        }
        out
    }

    /// Successors of a selection: one more chosen child somewhere (new children
    /// are added after the already chosen ones, in template order), completed
    /// minimally. Successors that add no literal are refined further, so every
    /// result has a strictly longer body. Ordered by canonical body text.
    pub fn refine(&self, sel: &Selection) -> Vec<Selection> {
        let base = if self.is_valid(sel) {
            Some(self.literal_count(sel))
        } else {
            None
        };
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut stack = self.refine_at(0, sel);
        stack.reverse();
        while let Some(s) = stack.pop() {
            if !seen.insert(s.clone()) {
                continue;
            }
            if Some(self.literal_count(&s)) == base {
                debug_assert!(s.size() > sel.size());
                let mut more = self.refine_at(0, &s);
                more.reverse();
                stack.extend(more);
            } else {
                out.push(s);
            }
        }
        let mut keyed: Vec<(String, Selection)> = out
            .into_iter()
            .map(|s| (canonical_body(&self.body(&s)), s))
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.into_iter().map(|(_, s)| s).collect()
    }
}

impl fmt::Display for DlabTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body(text: &str) -> Vec<Literal> {
        if text.is_empty() {
            return Vec::new();
        }
        Clause::parse(&format!("class(x) :- {text}."))
            .unwrap()
            .body
    }

    fn show(t: &DlabTemplate, sels: &[Selection]) -> Vec<String> {
        sels.iter().map(|s| canonical_body(&t.body(s))).collect()
    }

    #[test]
    fn inline_argument_choice_counts_subsets() {
        let t = parse_dlab("p(2-len:[el1,el2,el3])").unwrap();
        assert_eq!(t.count_space(), SpaceSize::exact(4));
        assert_eq!(
            show(&t, &t.enumerate_selections(10).unwrap()),
            vec!["p(el1,el2)", "p(el1,el3)", "p(el2,el3)", "p(el1,el2,el3)"]
        );
    }

    #[test]
    fn small_counts() {
        assert_eq!(parse_dlab("1-1:[a,b]").unwrap().count_space().value, 2);
        assert_eq!(parse_dlab("0-len:[a,b]").unwrap().count_space().value, 4);
        let t = parse_dlab("0-0:[a]").unwrap();
        assert_eq!(t.enumerate(10).unwrap(), vec![Vec::<Literal>::new()]);
    }

    #[test]
    fn enumerate_order_and_limit() {
        let t = parse_dlab("1-1:[a,b]").unwrap();
        assert_eq!(t.enumerate(10).unwrap(), vec![body("a"), body("b")]);
        assert!(t.enumerate(1).is_err());
    }

    #[test]
    fn saturated_count() {
        let items: Vec<String> = (0..100).map(|i| format!("a{i}")).collect();
        let text = format!("0-len:[{}]", items.join(","));
        let inner = parse_dlab(&text).unwrap().count_space();
        assert!(!inner.saturated);
        let nested = format!("len-len:[{text},{text}]");
        assert!(parse_dlab(&nested).unwrap().count_space().saturated);
    }

    #[test]
    fn membership() {
        let t = parse_dlab("len-len:[p(X,1-1:[normal,abnormal]), 0-1:[q(X)]]").unwrap();
        assert!(t.member(&body("p(X,normal)")));
        assert!(t.member(&body("q(X), p(X,abnormal)")));
        assert!(!t.member(&body("p(X,weird)")));
        assert!(!t.member(&body("")));
        assert!(!t.member(&body("p(X,normal), p(X,normal)")));
    }

    #[test]
    fn refine_adds_optional_literal() {
        let t = parse_dlab("1-1:[len-len:[a, 0-1:[b]]]").unwrap();
        let roots = t.refine(&t.root_selection());
        assert_eq!(show(&t, &roots), vec!["a"]);
        let next = t.refine(&roots[0]);
        assert_eq!(show(&t, &next), vec!["a,b"]);
        assert!(t.refine(&next[0]).is_empty());
    }

    #[test]
    fn refine_from_root() {
        let t = parse_dlab("1-1:[a,b]").unwrap();
        assert_eq!(show(&t, &t.refine(&t.root_selection())), vec!["a", "b"]);
    }

    #[test]
    fn refine_skips_empty_steps() {
        let t = parse_dlab("0-len:[0-1:[a], b]").unwrap();
        // Two selections reach `b`: with and without the empty inner list.
        let out = show(&t, &t.refine(&t.root_selection()));
        assert_eq!(out, vec!["a", "b", "b"]);
    }
}
