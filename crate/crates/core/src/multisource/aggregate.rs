use std::collections::BTreeSet;
use std::fmt;

use crate::data::interpretation::sort_events;
use crate::data::{succession_facts, Dataset, Interpretation};
use crate::error::{Error, Result};
use crate::logic::FactSet;
use crate::symbol::Symbol;

/// Source tag carried by aggregated examples.
pub const AGGREGATED_SOURCE: &str = "agg";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DropReason {
    /// Labels disagree across sources.
    Inconsistent(Vec<(Symbol, Symbol)>),
    /// Some source has no view of the situation.
    Incomplete(Vec<Symbol>),
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DropReason::Inconsistent(labels) => {
                f.write_str("inconsistent labels:")?;
                for (src, label) in labels {
                    write!(f, " {src}={label}")?;
                }
                Ok(())
            }
            DropReason::Incomplete(missing) => {
                f.write_str("incomplete, missing:")?;
                for src in missing {
                    write!(f, " {src}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Aggregation {
    /// Aggregated examples, one per surviving situation, in situation order.
    pub dataset: Dataset,
    pub dropped: Vec<(u32, DropReason)>,
}

impl Aggregation {
    pub fn situations(&self) -> BTreeSet<u32> {
        self.dataset.interpretations.iter().map(|i| i.situation).collect()
    }

    pub fn report(&self) -> String {
        let mut out = format!(
            "aggregated {} situation(s), dropped {}\n",
            self.dataset.interpretations.len(),
            self.dropped.len()
        );
        for (k, reason) in &self.dropped {
            out.push_str(&format!("situation {k}: {reason}\n"));
        }
        out
    }
}

/// Merges the views of each situation: union of the saturated per-source
/// facts plus `suc`/`suci` over the merged timeline. Situations missing on a
/// source or labelled differently across sources are dropped.
pub fn aggregate(dataset: &Dataset, suc_window: usize) -> Result<Aggregation> {
    let sources = dataset.sources();
    if sources.len() < 2 {
        return Err(Error::usage(format!(
            "aggregation needs at least two sources, found {}",
            sources.len()
        )));
    }
    let mut out = Vec::new();
    let mut dropped = Vec::new();
    for (situation, views) in dataset.by_situation() {
        let missing: Vec<Symbol> = sources.iter().copied().filter(|s| !views.contains_key(s)).collect();
        if !missing.is_empty() {
            dropped.push((situation, DropReason::Incomplete(missing)));
            continue;
        }
        let labels: BTreeSet<Symbol> = views.values().map(|i| i.label).collect();
        if labels.len() > 1 {
            let detail = views.iter().map(|(s, i)| (*s, i.label)).collect();
            dropped.push((situation, DropReason::Inconsistent(detail)));
            continue;
        }
        let mut facts = FactSet::new();
        let mut events = Vec::new();
        for view in views.values() {
            facts.extend(view.facts.iter().cloned());
            events.extend(view.events.iter().cloned());
        }
        sort_events(&mut events);
        facts.extend(succession_facts(&events, suc_window));
        out.push(Interpretation {
            situation,
            source: Symbol::intern(AGGREGATED_SOURCE),
            label: *labels.iter().next().unwrap(),
            facts,
            events,
        });
    }
    if out.is_empty() {
        return Err(Error::usage("no consistent situation survives aggregation"));
    }
    Ok(Aggregation {
        dataset: Dataset {
            interpretations: out,
            schema: dataset.schema.clone(),
            classes: dataset.classes.clone(),
        },
        dropped,
    })
}
