use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::data::Dataset;
use crate::dlab::DlabTemplate;
use crate::error::{Error, Result};
use crate::learner::{examples, learn_theory, BiasChoice, LearnerParams, SearchStats, Theory};
use crate::logic::{standardize_apart, Clause, PredicateSchema};
use crate::multisource::aggregate::{aggregate, Aggregation};
use crate::multisource::bias::synthesize_bias;
use crate::multisource::bottom::{
    filter_constraints, interleavings, make_bottom_clause, BottomClause, Hypothesis, InterleavingConstraint,
};
use crate::symbol::Symbol;

/// Everything produced by a biased multisource run.
#[derive(Clone, Debug)]
pub struct MultisourceRun {
    pub sources: [Symbol; 2],
    pub aggregation: Aggregation,
    pub mono: BTreeMap<Symbol, Theory>,
    pub bottoms: BTreeMap<Symbol, Vec<BottomClause>>,
    pub biases: BTreeMap<Symbol, DlabTemplate>,
    pub theory: Theory,
    pub warnings: Vec<String>,
}

impl MultisourceRun {
    /// Search effort of the final learning step only.
    pub fn stats(&self) -> SearchStats {
        self.theory.stats()
    }

    pub fn mono_stats(&self) -> SearchStats {
        let mut total = SearchStats::default();
        for t in self.mono.values() {
            total.add(t.stats());
        }
        total
    }

    /// Writes the monosource theories, bottom clauses, synthesized biases,
    /// final theory and aggregation report as text files.
    pub fn write_artifacts(&self, dir: &Path) -> Result<()> {
        let io = |e: std::io::Error| Error::internal(format!("writing artifacts to {}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        fs::write(dir.join("aggregation.txt"), self.aggregation.report()).map_err(io)?;
        for (src, t) in &self.mono {
            fs::write(dir.join(format!("mono_{src}.theory")), t.to_text()).map_err(io)?;
        }
        for (label, bottoms) in &self.bottoms {
            let text: String = bottoms.iter().map(|b| format!("{}\n", b.clause)).collect();
            fs::write(dir.join(format!("bottoms_{label}.pl")), text).map_err(io)?;
        }
        for (label, bias) in &self.biases {
            fs::write(dir.join(format!("bias_{label}.dlab")), format!("{bias}\n")).map_err(io)?;
        }
        fs::write(dir.join("theory.txt"), self.theory.to_text()).map_err(io)?;
        let warnings: String = self.warnings.iter().map(|w| format!("{w}\n")).collect();
        fs::write(dir.join("warnings.txt"), warnings).map_err(io)?;
        Ok(())
    }
}

fn hypotheses(clauses: &[Clause], source: Symbol, schema: &PredicateSchema) -> Result<Vec<Hypothesis>> {
    clauses
        .iter()
        .map(|c| Hypothesis::new(c.clone(), source, schema))
        .collect()
}

/// Bottom clauses of one class from every pair of monosource rules. A side
/// without rules is paired as the empty hypothesis.
pub fn class_bottoms(
    label: Symbol,
    rules: [&[Clause]; 2],
    sources: [Symbol; 2],
    schema: &PredicateSchema,
    constraints: &[InterleavingConstraint],
    warnings: &mut Vec<String>,
) -> Result<Vec<BottomClause>> {
    let mut left = hypotheses(rules[0], sources[0], schema)?;
    if left.is_empty() {
        left.push(Hypothesis::empty(label, sources[0]));
    }
    let mut out = Vec::new();
    for h1 in &left {
        let mut right = Vec::new();
        for c in rules[1] {
            let (_, c2) = standardize_apart(&h1.clause, c);
            right.push(Hypothesis::new(c2, sources[1], schema)?);
        }
        if right.is_empty() {
            right.push(Hypothesis::empty(label, sources[1]));
        }
        for h2 in &right {
            let merges = interleavings(h1, h2);
            let total = merges.len();
            let kept = filter_constraints(merges, [h1, h2], constraints);
            if kept.is_empty() {
                warnings.push(format!(
                    "class {label}: all {total} interleavings of `{}` and `{}` violate the constraints",
                    h1.clause, h2.clause
                ));
            }
            out.extend(kept.iter().map(|m| make_bottom_clause(h1, h2, m)));
        }
    }
    Ok(out)
}

/// Learns each source separately, aggregates, builds one bias per class from
/// the bottom clauses of all monosource rule pairs and learns on the
/// aggregated examples under it.
pub fn biased_multisource_learn(
    dataset: &Dataset,
    mono_biases: &BTreeMap<Symbol, DlabTemplate>,
    constraints: &[InterleavingConstraint],
    params: &LearnerParams,
    suc_window: usize,
) -> Result<MultisourceRun> {
    let sources: Vec<Symbol> = dataset.sources().into_iter().collect();
    let [s1, s2] = sources[..] else {
        return Err(Error::usage(format!(
            "biased multisource learning needs exactly two sources, found {}",
            sources.len()
        )));
    };
    let aggregation = aggregate(dataset, suc_window)?;
    let consistent = dataset.restrict(&aggregation.situations());
    let mut mono = BTreeMap::new();
    for src in [s1, s2] {
        let bias = mono_biases
            .get(&src)
            .ok_or_else(|| Error::usage(format!("no bias given for source {src}")))?;
        let exs = examples(consistent.source(src));
        mono.insert(src, learn_theory(&exs, BiasChoice::Shared(bias), params)?);
    }
    let mut warnings = Vec::new();
    let mut bottoms = BTreeMap::new();
    let mut biases = BTreeMap::new();
    for &label in &aggregation.dataset.classes {
        let rules = [mono[&s1].clauses(label), mono[&s2].clauses(label)];
        if rules.iter().all(|r| r.is_empty()) {
            warnings.push(format!("class {label}: no monosource rule on any source, skipped"));
            continue;
        }
        let mut bt = class_bottoms(label, rules, [s1, s2], &dataset.schema, constraints, &mut warnings)?;
        if bt.is_empty() {
            warnings.push(format!("class {label}: no valid bottom clause, falling back to the monosource rules"));
            for side in 0..2 {
                if rules[side].is_empty() {
                    continue;
                }
                let mut alone: [&[Clause]; 2] = [&[], &[]];
                alone[side] = rules[side];
                bt.extend(class_bottoms(label, alone, [s1, s2], &dataset.schema, &[], &mut warnings)?);
            }
        }
        biases.insert(label, synthesize_bias(&bt)?);
        bottoms.insert(label, bt);
    }
    let agg_examples = examples(&aggregation.dataset.interpretations);
    let theory = learn_theory(&agg_examples, BiasChoice::PerClass(&biases), params)?;
    Ok(MultisourceRun {
        sources: [s1, s2],
        aggregation,
        mono,
        bottoms,
        biases,
        theory,
        warnings,
    })
}
