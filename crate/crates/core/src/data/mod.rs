//! Examples, fact files, background saturation and dataset assembly.

pub mod interpretation;
pub mod model_file;
pub mod saturate;

use std::collections::{BTreeMap, BTreeSet};

pub use interpretation::{check_consistency, infer_schema, Event, Interpretation};
pub use model_file::{parse_model_file, write_model_file};
pub use saturate::{saturate, succession_facts, CycleRule, SymbolizationConfig, Thresholds, TimingRule};

use crate::error::{Error, Result};
use crate::logic::PredicateSchema;
use crate::symbol::Symbol;

/// Interpretations of one or more sources, with their schema and class set.
#[derive(Clone, Debug, Default)]
pub struct Dataset {
    pub interpretations: Vec<Interpretation>,
    pub schema: PredicateSchema,
    pub classes: BTreeSet<Symbol>,
}

impl Dataset {
    /// Saturates every interpretation and infers the schema.
    pub fn build(interpretations: Vec<Interpretation>, cfg: &SymbolizationConfig) -> Result<Dataset> {
        cfg.validate()?;
        let saturated = interpretations
            .iter()
            .map(|i| saturate(i, cfg))
            .collect::<Result<Vec<_>>>()?;
        Dataset::from_saturated(saturated)
    }

    pub fn from_saturated(interpretations: Vec<Interpretation>) -> Result<Dataset> {
        let mut seen = BTreeSet::new();
        for i in &interpretations {
            if !seen.insert((i.source, i.situation)) {
                return Err(Error::usage(format!(
                    "situation {} appears twice on source {}",
                    i.situation, i.source
                )));
            }
        }
        let schema = infer_schema(&interpretations);
        let classes = interpretations.iter().map(|i| i.label).collect();
        Ok(Dataset {
            interpretations,
            schema,
            classes,
        })
    }

    pub fn sources(&self) -> BTreeSet<Symbol> {
        self.interpretations.iter().map(|i| i.source).collect()
    }

    /// Interpretations of one source, ordered by situation.
    pub fn source(&self, source: Symbol) -> Vec<&Interpretation> {
        let mut out: Vec<&Interpretation> = self
            .interpretations
            .iter()
            .filter(|i| i.source == source)
            .collect();
        out.sort_by_key(|i| i.situation);
        out
    }

    /// Situation id → interpretation per source.
    pub fn by_situation(&self) -> BTreeMap<u32, BTreeMap<Symbol, &Interpretation>> {
        let mut out: BTreeMap<u32, BTreeMap<Symbol, &Interpretation>> = BTreeMap::new();
        for i in &self.interpretations {
            out.entry(i.situation).or_default().insert(i.source, i);
        }
        out
    }

    /// Sub-dataset keeping only the given situations.
    pub fn restrict(&self, keep: &BTreeSet<u32>) -> Dataset {
        Dataset {
            interpretations: self
                .interpretations
                .iter()
                .filter(|i| keep.contains(&i.situation))
                .cloned()
                .collect(),
            schema: self.schema.clone(),
            classes: self.classes.clone(),
        }
    }
}
