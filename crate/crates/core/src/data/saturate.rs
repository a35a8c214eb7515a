//! Background knowledge: derives event literals, succession relations, timing
//! and amplitude categories from the timestamped event records.

use serde::{Deserialize, Serialize};

use crate::data::interpretation::{sort_events, Event, Interpretation};
use crate::error::{Error, Result};
use crate::logic::schema::{SUC, SUCI};
use crate::logic::{Literal, Term};
use crate::symbol::Symbol;

/// Three-way split of an integer scale: `< low_below`, `[low_below, high_above]`, `> high_above`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    pub low_below: i64,
    pub high_above: i64,
}

impl Thresholds {
    pub const fn new(low_below: i64, high_above: i64) -> Self {
        Thresholds {
            low_below,
            high_above,
        }
    }

    pub fn bucket(&self, value: i64) -> usize {
        if value < self.low_below {
            0
        } else if value > self.high_above {
            2
        } else {
            1
        }
    }
}

pub const DELAY_CATEGORIES: [&str; 3] = ["short", "normal", "long"];
pub const LEVEL_CATEGORIES: [&str; 3] = ["low", "normal", "high"];
pub const NO_PREVIOUS: &str = "none";

/// `pred(A, B, category)` for an event `A` of kind `from` and the next event `B` of kind `to`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimingRule {
    pub pred: String,
    pub from: String,
    pub to: String,
    pub thresholds: Thresholds,
}

/// `pred(D, before, S, after)` for a diastole `D` immediately followed by a systole `S`.
/// `before` is the pressure drop from the previous systole to `D`, `after` the rise from `D` to `S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleRule {
    pub pred: String,
    pub dias: String,
    pub sys: String,
    pub variation: Thresholds,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolizationConfig {
    pub timing: Vec<TimingRule>,
    /// Event predicates whose numeric attributes are amplitudes.
    pub amplitude_preds: Vec<String>,
    pub amplitude: Thresholds,
    pub cycle: Option<CycleRule>,
    /// `suc` facts are only derived between events at most this many positions apart.
    pub suc_window: usize,
}

impl Default for SymbolizationConfig {
    fn default() -> Self {
        let beat = Thresholds::new(600, 1000);
        let conduction = Thresholds::new(120, 200);
        let rule = |pred: &str, from: &str, to: &str, thresholds| TimingRule {
            pred: pred.into(),
            from: from.into(),
            to: to.into(),
            thresholds,
        };
        SymbolizationConfig {
            timing: vec![
                rule("rr1", "qrs", "qrs", beat),
                rule("pp1", "p", "p", beat),
                rule("pr1", "p", "qrs", conduction),
                rule("ss1", "sys", "sys", beat),
                rule("ds1", "dias", "sys", conduction),
            ],
            amplitude_preds: vec!["dias".into(), "sys".into()],
            amplitude: Thresholds::new(70, 110),
            cycle: Some(CycleRule {
                pred: "cycle_abp".into(),
                dias: "dias".into(),
                sys: "sys".into(),
                variation: Thresholds::new(30, 60),
            }),
            suc_window: 8,
        }
    }
}

impl SymbolizationConfig {
    pub fn validate(&self) -> Result<()> {
        let mut all = vec![self.amplitude];
        all.extend(self.timing.iter().map(|t| t.thresholds));
        all.extend(self.cycle.iter().map(|c| c.variation));
        if all.iter().any(|t| t.low_below > t.high_above) {
            return Err(Error::usage("threshold boundaries must be increasing"));
        }
        if self.suc_window == 0 {
            return Err(Error::usage("suc window must be at least 1"));
        }
        Ok(())
    }

    /// Renames every predicate the rules refer to.
    pub fn renamed(&self, rename: impl Fn(&str) -> String) -> SymbolizationConfig {
        SymbolizationConfig {
            timing: self
                .timing
                .iter()
                .map(|t| TimingRule {
                    pred: rename(&t.pred),
                    from: rename(&t.from),
                    to: rename(&t.to),
                    thresholds: t.thresholds,
                })
                .collect(),
            amplitude_preds: self.amplitude_preds.iter().map(|p| rename(p)).collect(),
            amplitude: self.amplitude,
            cycle: self.cycle.as_ref().map(|c| CycleRule {
                pred: rename(&c.pred),
                dias: rename(&c.dias),
                sys: rename(&c.sys),
                variation: c.variation,
            }),
            suc_window: self.suc_window,
        }
    }
}

fn lit(pred: Symbol, args: Vec<Term>) -> Literal {
    Literal { pred, args }
}

/// `suc(X,Y)` for every `X` at most `window` positions after `Y`, and
/// `suci(X,Y)` for every `X` immediately after `Y`, over a sorted timeline.
pub fn succession_facts(timeline: &[Event], window: usize) -> Vec<Literal> {
    let suc = Symbol::intern(SUC);
    let suci = Symbol::intern(SUCI);
    let mut out = Vec::new();
    for (i, later) in timeline.iter().enumerate() {
        for earlier in timeline[i.saturating_sub(window)..i].iter().rev() {
            out.push(lit(suc, vec![Term::Const(later.id), Term::Const(earlier.id)]));
        }
        if i > 0 {
            out.push(lit(
                suci,
                vec![Term::Const(later.id), Term::Const(timeline[i - 1].id)],
            ));
        }
    }
    out
}

fn event_literal(e: &Event, cfg: &SymbolizationConfig) -> Literal {
    let amplitude = cfg.amplitude_preds.iter().any(|p| p == e.pred.as_str());
    let mut args = vec![Term::Const(e.id)];
    args.extend(e.attrs.iter().map(|&a| match a.as_int() {
        Some(v) if amplitude => Term::constant(LEVEL_CATEGORIES[cfg.amplitude.bucket(v)]),
        _ => a,
    }));
    lit(e.pred, args)
}

fn amplitude(e: &Event) -> Option<i64> {
    e.attrs.iter().find_map(|a| a.as_int())
}

fn timing_facts(timeline: &[Event], rule: &TimingRule) -> Vec<Literal> {
    let pred = Symbol::intern(&rule.pred);
    let from = Symbol::intern(&rule.from);
    let to = Symbol::intern(&rule.to);
    let mut out = Vec::new();
    for (i, a) in timeline.iter().enumerate() {
        if a.pred != from {
            continue;
        }
        let next = timeline[i + 1..]
            .iter()
            .find(|e| e.pred == to || e.pred == from);
        if let Some(b) = next.filter(|b| b.pred == to) {
            let category = DELAY_CATEGORIES[rule.thresholds.bucket(b.time - a.time)];
            out.push(lit(
                pred,
                vec![Term::Const(a.id), Term::Const(b.id), Term::constant(category)],
            ));
        }
    }
    out
}

fn cycle_facts(timeline: &[Event], rule: &CycleRule) -> Vec<Literal> {
    let pred = Symbol::intern(&rule.pred);
    let dias = Symbol::intern(&rule.dias);
    let sys = Symbol::intern(&rule.sys);
    let mut out = Vec::new();
    for (i, d) in timeline.iter().enumerate() {
        if d.pred != dias {
            continue;
        }
        let Some(s) = timeline.get(i + 1).filter(|s| s.pred == sys) else {
            continue;
        };
        let (Some(d_amp), Some(s_amp)) = (amplitude(d), amplitude(s)) else {
            continue;
        };
        let before = timeline[..i]
            .iter()
            .rev()
            .find(|e| e.pred == sys)
            .and_then(amplitude)
            .map(|prev| LEVEL_CATEGORIES[rule.variation.bucket(prev - d_amp)])
            .unwrap_or(NO_PREVIOUS);
        let after = LEVEL_CATEGORIES[rule.variation.bucket(s_amp - d_amp)];
        out.push(lit(
            pred,
            vec![
                Term::Const(d.id),
                Term::constant(before),
                Term::Const(s.id),
                Term::constant(after),
            ],
        ));
    }
    out
}

/// Extends the interpretation's facts with everything derivable from its events.
pub fn saturate(interp: &Interpretation, cfg: &SymbolizationConfig) -> Result<Interpretation> {
    let mut out = interp.clone();
    sort_events(&mut out.events);
    if out.events.windows(2).any(|w| w[0].time > w[1].time) {
        return Err(Error::internal("event timeline is not monotone after sorting"));
    }
    let timeline = &out.events;
    let mut derived: Vec<Literal> = timeline.iter().map(|e| event_literal(e, cfg)).collect();
    derived.extend(succession_facts(timeline, cfg.suc_window));
    for rule in &cfg.timing {
        derived.extend(timing_facts(timeline, rule));
    }
    if let Some(rule) = &cfg.cycle {
        derived.extend(cycle_facts(timeline, rule));
    }
    out.facts.extend(derived);
    Ok(out)
}
