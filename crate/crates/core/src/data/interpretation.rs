use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::logic::{ArgKind, FactSet, Literal, PredKey, PredicateInfo, PredicateSchema, Role, Term};
use crate::symbol::Symbol;

/// One timestamped occurrence on a source, as read from `pred(id, time, attrs...)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub id: Symbol,
    pub pred: Symbol,
    pub time: i64,
    pub attrs: Vec<Term>,
}

impl Event {
    pub fn new(id: &str, pred: &str, time: i64, attrs: &[&str]) -> Self {
        Event {
            id: Symbol::intern(id),
            pred: Symbol::intern(pred),
            time,
            attrs: attrs.iter().map(|a| Term::constant(a)).collect(),
        }
    }

    /// The stored fact `pred(id, time, attrs...)`.
    pub fn record(&self) -> Literal {
        let mut args = vec![Term::Const(self.id), Term::constant(&self.time.to_string())];
        args.extend(self.attrs.iter().copied());
        Literal {
            pred: self.pred,
            args,
        }
    }

    /// Reads an event record; any fact whose second argument is an integer
    /// and whose first is a non-numeric identifier qualifies.
    pub fn from_record(fact: &Literal) -> Option<Event> {
        let name = fact.pred.as_str();
        if name == crate::logic::schema::SUC || name == crate::logic::schema::SUCI {
            return None;
        }
        match fact.args.as_slice() {
            [Term::Const(id), time, attrs @ ..] if id.as_str().parse::<i64>().is_err() => {
                Some(Event {
                    id: *id,
                    pred: fact.pred,
                    time: time.as_int()?,
                    attrs: attrs.to_vec(),
                })
            }
            _ => None,
        }
    }
}

/// A labelled example: the ground facts describing one situation on one source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation {
    pub situation: u32,
    pub source: Symbol,
    pub label: Symbol,
    pub facts: FactSet,
    /// Sorted by timestamp, ties broken by event id.
    pub events: Vec<Event>,
}

impl Interpretation {
    /// Builds an interpretation whose facts are the event records.
    pub fn from_events(situation: u32, source: &str, label: &str, mut events: Vec<Event>) -> Self {
        sort_events(&mut events);
        let facts = events.iter().map(Event::record).collect();
        Interpretation {
            situation,
            source: Symbol::intern(source),
            label: Symbol::intern(label),
            facts,
            events,
        }
    }

    pub fn identifier(&self) -> String {
        format!("{}_{}_{}", self.label, self.situation, self.source)
    }

    pub fn event_ids(&self) -> BTreeSet<Symbol> {
        self.events.iter().map(|e| e.id).collect()
    }
}

pub(crate) fn sort_events(events: &mut [Event]) {
    events.sort_by(|a, b| a.time.cmp(&b.time).then_with(|| a.id.cmp(&b.id)));
}

/// Labels of two views of the same situation agree.
pub fn check_consistency(a: &Interpretation, b: &Interpretation) -> Result<bool> {
    if a.situation != b.situation {
        return Err(Error::usage(format!(
            "cannot compare situations {} and {}",
            a.situation, b.situation
        )));
    }
    Ok(a.label == b.label)
}

/// Derives the predicate schema from saturated interpretations: event records
/// become attributes, facts about a single event with the event's predicate
/// name become event literals, `suc`/`suci` are global, and any other fact
/// mentioning an event is relational.
pub fn infer_schema<'a>(interpretations: impl IntoIterator<Item = &'a Interpretation>) -> PredicateSchema {
    let mut schema = PredicateSchema::new().with_global_relations();
    for interp in interpretations {
        let ids = interp.event_ids();
        let event_preds: BTreeSet<Symbol> = interp.events.iter().map(|e| e.pred).collect();
        let records: BTreeSet<Literal> = interp.events.iter().map(Event::record).collect();
        let mut local: BTreeMap<PredKey, PredicateInfo> = BTreeMap::new();
        for fact in interp.facts.iter() {
            let key = fact.key();
            let name = fact.pred.as_str();
            if name == crate::logic::schema::SUC || name == crate::logic::schema::SUCI {
                continue;
            }
            let is_record = records.contains(fact);
            let mentions_event = fact.args.iter().any(|a| ids.contains(&a.symbol()));
            let role = if is_record || !mentions_event {
                Role::Attribute
            } else if event_preds.contains(&fact.pred) && ids.contains(&fact.args[0].symbol()) {
                Role::Event
            } else {
                Role::Relational
            };
            let args = fact
                .args
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    if ids.contains(&a.symbol()) {
                        ArgKind::Event
                    } else if is_record && i == 1 {
                        ArgKind::Time
                    } else if a.as_int().is_some() {
                        ArgKind::Number
                    } else {
                        ArgKind::Value([a.symbol()].into_iter().collect())
                    }
                })
                .collect();
            let info = PredicateInfo {
                role,
                source: Some(interp.source),
                args,
            };
            match local.get_mut(&key) {
                Some(existing) => {
                    for (have, add) in existing.args.iter_mut().zip(info.args) {
                        if let (ArgKind::Value(a), ArgKind::Value(b)) = (have, add) {
                            a.extend(b);
                        }
                    }
                }
                None => {
                    local.insert(key, info);
                }
            }
        }
        for (k, v) in local {
            schema.declare(k, v);
        }
    }
    schema
}
