//! Cross-validation with folds aligned across sources, per-class metrics and
//! report rendering.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::dlab::DlabTemplate;
use crate::error::{Error, Result};
use crate::learner::{examples, learn_theory, theory_accuracy, BiasChoice, Example, LearnerParams, Theory};
use crate::logic::{Clause, PredicateSchema};
use crate::multisource::{aggregate, biased_multisource_learn, naive_bias, InterleavingConstraint};
use crate::symbol::Symbol;

/// Ordered test sets partitioning the situations. Every source and the
/// aggregated set lose the same situations at fold `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub folds: Vec<BTreeSet<u32>>,
}

impl FoldPlan {
    /// Contiguous blocks in situation order. When `p` does not divide the
    /// count, the first folds get one extra situation each.
    pub fn new(situations: &BTreeSet<u32>, p: usize) -> Result<FoldPlan> {
        let n = situations.len();
        if p < 2 || p > n {
            return Err(Error::usage(format!(
                "fold count must be between 2 and the number of situations ({n}), got {p}"
            )));
        }
        let (base, extra) = (n / p, n % p);
        let mut it = situations.iter().copied();
        let folds = (0..p)
            .map(|j| it.by_ref().take(base + usize::from(j < extra)).collect())
            .collect();
        Ok(FoldPlan { folds })
    }

    pub fn leave_one_out(situations: &BTreeSet<u32>) -> Result<FoldPlan> {
        FoldPlan::new(situations, situations.len())
    }

    pub fn p(&self) -> usize {
        self.folds.len()
    }

    pub fn situations(&self) -> BTreeSet<u32> {
        self.folds.iter().flatten().copied().collect()
    }

    pub fn train(&self, j: usize) -> BTreeSet<u32> {
        self.situations().difference(&self.folds[j]).copied().collect()
    }
}

/// Number of folds: an explicit count or one fold per situation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Folds {
    Count(usize),
    LeaveOneOut,
}

impl FromStr for Folds {
    type Err = Error;

    fn from_str(s: &str) -> Result<Folds> {
        if s == "loo" {
            return Ok(Folds::LeaveOneOut);
        }
        s.parse()
            .map(Folds::Count)
            .map_err(|_| Error::usage(format!("folds must be a number or `loo`, got {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LearnerMode {
    /// One source under the bias given for it.
    Mono { source: String },
    /// Aggregated data under the naive bias.
    Naive { max_events: usize, suc_window: usize },
    /// Aggregated data under biases synthesized from monosource rules.
    Biased { suc_window: usize },
}

impl fmt::Display for LearnerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LearnerMode::Mono { source } => write!(f, "monosource({source})"),
            LearnerMode::Naive { max_events, .. } => write!(f, "naive(max_events={max_events})"),
            LearnerMode::Biased { .. } => f.write_str("biased"),
        }
    }
}

/// Situations removed at one fold, as seen by each view of the data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub test: BTreeSet<u32>,
    pub removed_per_source: BTreeMap<String, BTreeSet<u32>>,
    pub removed_aggregated: BTreeSet<u32>,
    /// Classes without training positives in this fold.
    pub skipped: Vec<String>,
}

impl FoldRecord {
    pub fn aligned(&self) -> bool {
        self.removed_per_source
            .values()
            .all(|s| *s == self.test)
            && (self.removed_aggregated.is_empty() || self.removed_aggregated == self.test)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassRow {
    pub class: String,
    pub nodes: u64,
    pub time_ms: u64,
    pub tr_acc: f64,
    pub acc: f64,
    pub comp: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub mode: String,
    pub seed: Option<u64>,
    pub params: LearnerParams,
    pub folds: usize,
    pub rows: Vec<ClassRow>,
    pub fold_records: Vec<FoldRecord>,
}

impl EvaluationReport {
    pub fn row(&self, class: &str) -> Option<&ClassRow> {
        self.rows.iter().find(|r| r.class == class)
    }

    pub fn aligned(&self) -> bool {
        self.fold_records.iter().all(FoldRecord::aligned)
    }
}

/// Per-clause count of event literals, slash-separated; `"0"` without clauses.
pub fn comp_metric(clauses: &[Clause], schema: &PredicateSchema) -> String {
    if clauses.is_empty() {
        return "0".into();
    }
    clauses
        .iter()
        .map(|c| c.body.iter().filter(|l| schema.is_event(l)).count().to_string())
        .collect::<Vec<_>>()
        .join("/")
}

struct Prepared {
    data: Dataset,
    schema: PredicateSchema,
    situations: BTreeSet<u32>,
}

fn prepare(dataset: &Dataset, mode: &LearnerMode) -> Result<Prepared> {
    match mode {
        LearnerMode::Mono { source } => {
            let src = Symbol::intern(source);
            let interpretations: Vec<_> = dataset.source(src).into_iter().cloned().collect();
            if interpretations.is_empty() {
                return Err(Error::usage(format!("no example on source {source}")));
            }
            let data = Dataset::from_saturated(interpretations)?;
            Ok(Prepared {
                situations: data.interpretations.iter().map(|i| i.situation).collect(),
                schema: data.schema.clone(),
                data,
            })
        }
        LearnerMode::Naive { suc_window, .. } | LearnerMode::Biased { suc_window } => {
            let agg = aggregate(dataset, *suc_window)?;
            Ok(Prepared {
                situations: agg.situations(),
                schema: dataset.schema.clone(),
                data: agg.dataset,
            })
        }
    }
}

/// Learns on `train` (the raw multisource dataset restricted to the training
/// situations, or the prepared single view) and returns the theory.
fn learn(
    raw: &Dataset,
    prepared: &Dataset,
    train: &BTreeSet<u32>,
    mode: &LearnerMode,
    biases: &BTreeMap<Symbol, DlabTemplate>,
    constraints: &[InterleavingConstraint],
    params: &LearnerParams,
) -> Result<Theory> {
    match mode {
        LearnerMode::Mono { source } => {
            let bias = biases
                .get(&Symbol::intern(source))
                .ok_or_else(|| Error::usage(format!("no bias given for source {source}")))?;
            let view = prepared.restrict(train);
            learn_theory(&examples(&view.interpretations), BiasChoice::Shared(bias), params)
        }
        LearnerMode::Naive { max_events, .. } => {
            let bias = naive_bias(&prepared.schema, *max_events)?;
            let view = prepared.restrict(train);
            learn_theory(&examples(&view.interpretations), BiasChoice::Shared(&bias), params)
        }
        LearnerMode::Biased { suc_window } => {
            let run = biased_multisource_learn(&raw.restrict(train), biases, constraints, params, *suc_window)?;
            Ok(run.theory)
        }
    }
}

fn accuracies(theory: &Theory, label: Symbol, exs: &[Example<'_>]) -> Result<f64> {
    theory_accuracy(label, theory.clauses(label), exs)
}

struct FoldResult {
    record: FoldRecord,
    train_acc: BTreeMap<Symbol, f64>,
    test_acc: BTreeMap<Symbol, f64>,
}

/// Cross-validation of one learner. TrAcc and Acc are means over the folds
/// in which the class had training positives; Nodes, TimeMs and Comp
/// describe a run on all situations.
#[allow(clippy::too_many_arguments)]
pub fn cross_validate(
    dataset: &Dataset,
    mode: &LearnerMode,
    biases: &BTreeMap<Symbol, DlabTemplate>,
    constraints: &[InterleavingConstraint],
    params: &LearnerParams,
    folds: Folds,
    seed: Option<u64>,
) -> Result<EvaluationReport> {
    params.validate()?;
    let prepared = prepare(dataset, mode)?;
    let plan = match folds {
        Folds::Count(p) => FoldPlan::new(&prepared.situations, p)?,
        Folds::LeaveOneOut => FoldPlan::leave_one_out(&prepared.situations)?,
    };
    let classes: BTreeSet<Symbol> = prepared.data.interpretations.iter().map(|i| i.label).collect();

    let results: Vec<FoldResult> = (0..plan.p())
        .into_par_iter()
        .map(|j| {
            let train = plan.train(j);
            let test = &plan.folds[j];
            let train_view = prepared.data.restrict(&train);
            let test_view = prepared.data.restrict(test);
            let present: BTreeSet<Symbol> = train_view.interpretations.iter().map(|i| i.label).collect();
            let mut record = FoldRecord {
                test: test.clone(),
                removed_per_source: BTreeMap::new(),
                removed_aggregated: BTreeSet::new(),
                skipped: classes.difference(&present).map(|c| c.to_string()).collect(),
            };
            let removed = |view: &Dataset, all: &BTreeSet<u32>| -> BTreeSet<u32> {
                let kept: BTreeSet<u32> = view.interpretations.iter().map(|i| i.situation).collect();
                all.difference(&kept).copied().collect()
            };
            match mode {
                LearnerMode::Mono { source } => {
                    record.removed_per_source.insert(source.clone(), removed(&train_view, &plan.situations()));
                }
                _ => {
                    let raw_train = dataset.restrict(&train);
                    for src in dataset.sources() {
                        let kept = Dataset {
                            interpretations: raw_train.source(src).into_iter().cloned().collect(),
                            ..Dataset::default()
                        };
                        record.removed_per_source.insert(src.to_string(), removed(&kept, &plan.situations()));
                    }
                    record.removed_aggregated = removed(&train_view, &plan.situations());
                }
            }
            let theory = learn(dataset, &prepared.data, &train, mode, biases, constraints, params)?;
            let train_exs = examples(&train_view.interpretations);
            let test_exs = examples(&test_view.interpretations);
            let mut train_acc = BTreeMap::new();
            let mut test_acc = BTreeMap::new();
            for &label in &present {
                train_acc.insert(label, accuracies(&theory, label, &train_exs)?);
                test_acc.insert(label, accuracies(&theory, label, &test_exs)?);
            }
            Ok(FoldResult {
                record,
                train_acc,
                test_acc,
            })
        })
        .collect::<Result<_>>()?;

    let all = plan.situations();
    let full = learn(dataset, &prepared.data, &all, mode, biases, constraints, params)?;
    let mean = |values: Vec<f64>| {
        if values.is_empty() {
            0.0
        } else {
            values.iter().sum::<f64>() / values.len() as f64
        }
    };
    let rows = classes
        .iter()
        .map(|&label| {
            let entry = full.classes.get(&label);
            let stats = entry.map(|c| c.stats).unwrap_or_default();
            ClassRow {
                class: label.to_string(),
                nodes: stats.nodes,
                time_ms: stats.time_ms,
                tr_acc: mean(results.iter().filter_map(|r| r.train_acc.get(&label).copied()).collect()),
                acc: mean(results.iter().filter_map(|r| r.test_acc.get(&label).copied()).collect()),
                comp: comp_metric(full.clauses(label), &prepared.schema),
            }
        })
        .collect();
    Ok(EvaluationReport {
        mode: mode.to_string(),
        seed,
        params: params.clone(),
        folds: plan.p(),
        rows,
        fold_records: results.into_iter().map(|r| r.record).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<ReportFormat> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::usage(format!("unknown report format {other:?}"))),
        }
    }
}

const COLUMNS: [&str; 6] = ["Class", "Nodes", "TimeMs", "TrAcc", "Acc", "Comp"];

/// One row per class in report order. Rates have three decimals.
pub fn emit_report(report: &EvaluationReport, format: ReportFormat) -> String {
    let cells = |r: &ClassRow| {
        vec![
            r.class.clone(),
            r.nodes.to_string(),
            r.time_ms.to_string(),
            format!("{:.3}", r.tr_acc),
            format!("{:.3}", r.acc),
            r.comp.clone(),
        ]
    };
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            out.push_str(&COLUMNS.join(","));
            out.push('\n');
            for r in &report.rows {
                out.push_str(&cells(r).join(","));
                out.push('\n');
            }
        }
        ReportFormat::Markdown => {
            let line = |v: Vec<String>| format!("| {} |\n", v.join(" | "));
            out.push_str(&line(COLUMNS.iter().map(|c| c.to_string()).collect()));
            out.push_str(&line(COLUMNS.iter().map(|_| "---".to_string()).collect()));
            for r in &report.rows {
                out.push_str(&line(cells(r)));
            }
        }
    }
    out
}
