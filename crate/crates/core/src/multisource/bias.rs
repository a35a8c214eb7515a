use std::collections::BTreeSet;

use crate::dlab::{ArgNode, Bound, DlabNode, DlabTemplate, LiteralTemplate};
use crate::error::{Error, Result};
use crate::logic::schema::{SUC, SUCI};
use crate::logic::{ArgKind, Literal, PredicateSchema, Role, Term};
use crate::multisource::bottom::{BottomClause, Level};

fn fixed(lit: &Literal) -> DlabNode {
    DlabNode::Terminal(LiteralTemplate {
        pred: lit.pred,
        args: lit.args.iter().map(|&t| ArgNode::Term(t)).collect(),
    })
}

fn optional_each(lits: &[Literal]) -> impl Iterator<Item = DlabNode> + '_ {
    lits.iter().map(|l| DlabNode::optional(vec![fixed(l)]))
}

/// Event `k` and everything after it: the event with its connector is
/// mandatory, its other literals optional, the next event nested optionally.
fn nested_level(levels: &[Level], k: usize) -> DlabNode {
    let level = &levels[k];
    let mut head = vec![fixed(&level.event)];
    head.extend(level.connector.iter().map(fixed));
    let mut items = vec![DlabNode::all(head)];
    items.extend(optional_each(&level.extras));
    if k + 1 < levels.len() {
        items.push(DlabNode::optional(vec![nested_level(levels, k + 1)]));
    }
    DlabNode::all(items)
}

/// The space of generalizations of one bottom clause. The first event, and
/// the second when it comes from the same rule, are mandatory.
pub fn bottom_block(b: &BottomClause) -> DlabNode {
    let levels = &b.levels;
    if levels.is_empty() {
        return DlabNode::all(optional_each(&b.free).collect());
    }
    let lead = if levels.len() >= 2 && levels[0].side == levels[1].side { 2 } else { 1 };
    let mut items = Vec::new();
    for level in &levels[..lead] {
        items.push(fixed(&level.event));
        items.extend(level.connector.iter().map(fixed));
    }
    items.extend(optional_each(&b.free));
    for level in &levels[..lead] {
        items.extend(optional_each(&level.extras));
    }
    if lead < levels.len() {
        items.push(DlabNode::optional(vec![nested_level(levels, lead)]));
    }
    DlabNode::all(items)
}

/// `1-1:[block_1, ..., block_B]` over the distinct bottom clauses. Bottom
/// clauses with an empty body are ignored.
pub fn synthesize_bias(bottoms: &[BottomClause]) -> Result<DlabTemplate> {
    let mut seen = BTreeSet::new();
    let mut blocks = Vec::new();
    for b in bottoms.iter().filter(|b| !b.clause.body.is_empty()) {
        let block = bottom_block(b);
        if seen.insert(block.to_string()) {
            blocks.push(block);
        }
    }
    if blocks.is_empty() {
        return Err(Error::usage("bias synthesis needs at least one nonempty bottom clause"));
    }
    DlabTemplate::from_node(DlabNode::one_of(blocks))
}

fn value_arg(kind: &ArgKind, fallback: &str) -> ArgNode {
    match kind {
        ArgKind::Value(dom) if !dom.is_empty() => ArgNode::Choice {
            min: Bound::Count(1),
            max: Bound::Count(1),
            children: dom.iter().map(|s| ArgNode::Term(Term::Const(*s))).collect(),
        },
        _ => ArgNode::Term(Term::var(fallback)),
    }
}

fn event_var(i: usize) -> Term {
    Term::var(&format!("E{i}"))
}

/// `pred(E_i, v1, ...)` with every value argument a choice over its domain.
fn event_templates(schema: &PredicateSchema, i: usize) -> Vec<DlabNode> {
    schema
        .with_role(Role::Event)
        .map(|(key, info)| {
            let args = info
                .args
                .iter()
                .enumerate()
                .map(|(a, kind)| match (a, kind) {
                    (0, _) | (_, ArgKind::Event) => ArgNode::Term(event_var(i)),
                    _ => value_arg(kind, &format!("V{i}_{a}")),
                })
                .collect();
            DlabNode::Terminal(LiteralTemplate { pred: key.name, args })
        })
        .collect()
}

/// Relational literals between an earlier event `j` and event `i`, event
/// arguments filled earlier-first.
fn relational_templates(schema: &PredicateSchema, j: usize, i: usize) -> Vec<DlabNode> {
    schema
        .with_role(Role::Relational)
        .filter(|(_, info)| info.event_positions().len() == 2)
        .map(|(key, info)| {
            let mut seen = 0;
            let args = info
                .args
                .iter()
                .enumerate()
                .map(|(a, kind)| match kind {
                    ArgKind::Event => {
                        seen += 1;
                        ArgNode::Term(event_var(if seen == 1 { j } else { i }))
                    }
                    _ => value_arg(kind, &format!("V{j}_{i}_{a}")),
                })
                .collect();
            DlabNode::Terminal(LiteralTemplate { pred: key.name, args })
        })
        .collect()
}

fn naive_level(schema: &PredicateSchema, i: usize, max_events: usize) -> DlabNode {
    let link = |pred: &str| DlabNode::literal(pred, vec![ArgNode::Term(event_var(i)), ArgNode::Term(event_var(i - 1))]);
    let mut items = vec![
        DlabNode::one_of(event_templates(schema, i)),
        DlabNode::one_of(vec![link(SUC), link(SUCI)]),
    ];
    for j in 0..i {
        items.extend(
            relational_templates(schema, j, i)
                .into_iter()
                .map(|t| DlabNode::optional(vec![t])),
        );
    }
    if i + 1 < max_events {
        items.push(DlabNode::optional(vec![naive_level(schema, i + 1, max_events)]));
    }
    DlabNode::all(items)
}

/// Minimally restrictive bias: any sequence of up to `max_events` events of
/// any event predicate, each tied to the previous one by `suc` or `suci`, with
/// every relational predicate optionally relating any earlier event to it.
pub fn naive_bias(schema: &PredicateSchema, max_events: usize) -> Result<DlabTemplate> {
    if max_events == 0 {
        return Err(Error::usage("naive bias needs at least one event"));
    }
    let first = event_templates(schema, 0);
    if first.is_empty() {
        return Err(Error::usage("schema declares no event predicate"));
    }
    let mut items = vec![DlabNode::one_of(first)];
    if max_events > 1 {
        items.push(DlabNode::optional(vec![naive_level(schema, 1, max_events)]));
    }
    DlabTemplate::from_node(DlabNode::all(items))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dlab::parse_dlab;
    use crate::logic::{PredKey, PredicateInfo};
    use crate::multisource::bottom::tests::ecg_abp_pair;
    use crate::multisource::bottom::{interleavings, make_bottom_clause};
    use crate::symbol::Symbol;

    #[test]
    fn bottom_block_shape() {
        let (h1, h2) = ecg_abp_pair();
        let m = &interleavings(&h1, &h2)[0];
        let b = make_bottom_clause(&h1, &h2, m);
        let expected = parse_dlab(
            "len-len:[p(P0,normal), qrs(R0,normal), suc(R0,P0), 0-1:[pr1(P0,R0,normal)],
               0-1:[len-len:[len-len:[diastole(D0,normal), suci(D0,R0)],
                 0-1:[len-len:[len-len:[systole(S0,normal), suc(S0,D0)]]]]]]",
        )
        .unwrap();
        assert_eq!(&bottom_block(&b), expected.root());
        let t = synthesize_bias(&[b.clone(), b.clone()]).unwrap();
        assert_eq!(t.count_space().value, 6);
        assert!(t.member(&b.clause.body));
        assert!(t.member(&h1.clause.body));
    }

    #[test]
    fn empty_input() {
        assert!(synthesize_bias(&[]).unwrap_err().is_usage());
    }

    fn one_event_schema() -> PredicateSchema {
        let mut schema = PredicateSchema::new().with_global_relations();
        schema.declare(
            PredKey::new("qrs", 2),
            PredicateInfo {
                role: Role::Event,
                source: Some(Symbol::intern("I")),
                args: vec![
                    ArgKind::Event,
                    ArgKind::Value(["normal", "abnormal"].iter().map(|s| Symbol::intern(s)).collect()),
                ],
            },
        );
        schema
    }

    #[test]
    fn naive_single_event() {
        let t = naive_bias(&one_event_schema(), 1).unwrap();
        assert_eq!(t.count_space().value, 2);
        assert!(naive_bias(&one_event_schema(), 0).unwrap_err().is_usage());
    }

    #[test]
    fn naive_two_events() {
        // 2 + 2 * (2 * 2)
        let t = naive_bias(&one_event_schema(), 2).unwrap();
        assert_eq!(t.count_space().value, 10);
        let body = crate::logic::Clause::parse("c(x) :- qrs(E0,normal), qrs(E1,abnormal), suci(E1,E0).")
            .unwrap()
            .body;
        assert!(t.member(&body));
    }
}
