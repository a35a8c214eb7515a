//! Seeded generator of aligned ECG/ABP event streams for seven rhythm classes.
//!
//! Every class has a fixed beat pattern. Intervals and amplitudes are drawn
//! with small integer jitter that never crosses a symbolization threshold, so
//! the target rules of [`target_rules`] separate every generated dataset.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Event, Interpretation, SymbolizationConfig};
use crate::error::{Error, Result};
use crate::learner::{ClassTheory, Theory};
use crate::logic::Clause;
use crate::symbol::Symbol;

pub const CLASSES: [&str; 7] = ["sr", "ves", "bige", "doublet", "vt", "svt", "af"];

pub const ECG: &str = "ECG";
pub const ABP: &str = "ABP";
pub const P_ONLY: &str = "P";
pub const QRS_ONLY: &str = "QRS";
pub const ECG_COPY: &str = "ECG2";
const COPY_SUFFIX: &str = "_b";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// ECG (p, qrs) and ABP (dias, sys).
    #[default]
    Full,
    /// No p waves, no qrs shape, no diastoles.
    Reduced,
    /// A P-wave-only source and a QRS-only source without shape.
    Split,
    /// ECG and a copy of it with renamed predicates.
    Redundant,
}

impl Mode {
    pub fn sources(self) -> [&'static str; 2] {
        match self {
            Mode::Full | Mode::Reduced => [ECG, ABP],
            Mode::Split => [P_ONLY, QRS_ONLY],
            Mode::Redundant => [ECG, ECG_COPY],
        }
    }

    /// Background rules matching the predicates the mode produces.
    pub fn symbolization(self) -> SymbolizationConfig {
        let base = SymbolizationConfig::default();
        match self {
            Mode::Redundant => {
                let copy = base.renamed(|p| format!("{p}{COPY_SUFFIX}"));
                let mut cfg = base;
                let ecg_rules: Vec<_> = copy
                    .timing
                    .into_iter()
                    .filter(|t| ["p", "qrs"].iter().any(|e| t.from == format!("{e}{COPY_SUFFIX}")))
                    .collect();
                cfg.timing.extend(ecg_rules);
                cfg
            }
            _ => base,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::Reduced => "reduced",
            Mode::Split => "split",
            Mode::Redundant => "redundant",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "full" => Ok(Mode::Full),
            "reduced" => Ok(Mode::Reduced),
            "split" => Ok(Mode::Split),
            "redundant" => Ok(Mode::Redundant),
            other => Err(Error::usage(format!(
                "unknown mode {other:?}; expected full, reduced, split or redundant"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub per_class: usize,
    pub mode: Mode,
    /// Half-width of the uniform jitter on beat intervals, in ms.
    pub interval_jitter: i64,
    /// Half-width of the uniform jitter on amplitudes, in mmHg.
    pub amplitude_jitter: i64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 1,
            per_class: 10,
            mode: Mode::Full,
            interval_jitter: 20,
            amplitude_jitter: 4,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0..=20).contains(&self.interval_jitter) || !(0..=4).contains(&self.amplitude_jitter) {
            return Err(Error::usage(
                "jitter would cross symbolization thresholds (max 20 ms and 4 mmHg)",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    /// Sinus beat: normal P wave then normal QRS.
    Sinus,
    /// Ventricular beat: abnormal QRS, optionally followed by a retrograde P wave.
    Ventricular { retrograde: Option<i64> },
    /// Normal QRS without a P wave.
    Fibrillation,
}

#[derive(Clone, Copy, Debug)]
struct Beat {
    /// Interval from the previous QRS; ignored for the first beat.
    rr: i64,
    kind: Kind,
    sys: i64,
    dias: i64,
}

const SYS_HIGH: i64 = 125;
const SYS_NORMAL: i64 = 95;
const SYS_LOW: i64 = 60;
const DIAS_NORMAL: i64 = 80;
const DIAS_LOW: i64 = 50;
const PR: i64 = 160;
const DIAS_DELAY: i64 = 60;
const SYS_DELAY: i64 = 220;

fn beat(rr: i64, kind: Kind, sys: i64) -> Beat {
    Beat {
        rr,
        kind,
        sys,
        dias: DIAS_NORMAL,
    }
}

fn template(label: &str, variant: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Beat>> {
    use Kind::*;
    let v = |retro| Ventricular { retrograde: retro };
    Ok(match label {
        "sr" => vec![beat(800, Sinus, SYS_HIGH); 4],
        "svt" => vec![beat(450, Sinus, SYS_NORMAL); 5],
        "af" => {
            let mut long = rng.gen_bool(0.5);
            (0..5)
                .map(|_| {
                    long = !long;
                    if long {
                        beat(1200, Fibrillation, SYS_LOW)
                    } else {
                        beat(800, Fibrillation, SYS_NORMAL)
                    }
                })
                .collect()
        }
        "vt" => vec![
            Beat {
                rr: 450,
                kind: v(None),
                sys: SYS_LOW + 5,
                dias: DIAS_LOW,
            };
            5
        ],
        "ves" => vec![
            beat(0, Sinus, SYS_HIGH),
            beat(450, v(Some(120)), SYS_NORMAL),
            beat(1150, Sinus, SYS_HIGH),
        ],
        "bige" => vec![
            beat(0, Sinus, SYS_HIGH),
            beat(450, v(Some(120)), SYS_LOW),
            beat(950, Sinus, SYS_HIGH),
            beat(450, v(Some(120)), SYS_LOW),
            beat(950, Sinus, SYS_HIGH),
        ],
        "doublet" => {
            let retro = if variant.is_multiple_of(2) { 100 } else { 520 };
            vec![
                beat(0, Sinus, SYS_HIGH),
                beat(450, v(Some(retro)), SYS_LOW),
                beat(1050, v(None), SYS_LOW),
                beat(550, Sinus, SYS_HIGH),
            ]
        }
        other => return Err(Error::usage(format!("unknown class {other:?}"))),
    })
}

fn jitter(rng: &mut ChaCha8Rng, width: i64) -> i64 {
    if width == 0 {
        0
    } else {
        rng.gen_range(-width..=width)
    }
}

fn situation_rng(seed: u64, situation: u32) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (u64::from(situation)).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Raw ECG and ABP streams of one situation, before any mode transform.
fn full_streams(label: &str, situation: u32, variant: usize, cfg: &GeneratorConfig) -> Result<(Vec<Event>, Vec<Event>)> {
    let mut rng = situation_rng(cfg.seed, situation);
    let beats = template(label, variant, &mut rng)?;
    let (ij, aj) = (cfg.interval_jitter, cfg.amplitude_jitter);
    let small = ij / 2;
    let mut ecg = Vec::new();
    let mut abp = Vec::new();
    let mut t: i64 = rng.gen_range(1000..4000);
    for (k, b) in beats.iter().enumerate() {
        let n = k + 1;
        if k > 0 {
            t += b.rr + jitter(&mut rng, ij);
        }
        let amp = |rng: &mut ChaCha8Rng, v: i64| (v + jitter(rng, aj)).to_string();
        match b.kind {
            Kind::Sinus => {
                ecg.push(Event::new(&format!("p{n}"), "p", t - PR - jitter(&mut rng, small), &["normal"]));
                ecg.push(Event::new(&format!("r{n}"), "qrs", t, &["normal"]));
            }
            Kind::Ventricular { retrograde } => {
                ecg.push(Event::new(&format!("r{n}"), "qrs", t, &["abnormal"]));
                if let Some(delay) = retrograde {
                    let at = t + delay + jitter(&mut rng, small);
                    ecg.push(Event::new(&format!("pa{n}"), "p", at, &["abnormal"]));
                }
            }
            Kind::Fibrillation => ecg.push(Event::new(&format!("r{n}"), "qrs", t, &["normal"])),
        }
        let d_at = t + DIAS_DELAY + jitter(&mut rng, 5);
        let s_at = t + SYS_DELAY + jitter(&mut rng, 5);
        let dias = amp(&mut rng, b.dias);
        let sys = amp(&mut rng, b.sys);
        abp.push(Event::new(&format!("d{n}"), "dias", d_at, &[&dias]));
        abp.push(Event::new(&format!("s{n}"), "sys", s_at, &[&sys]));
    }
    Ok((ecg, abp))
}

fn strip_attrs(events: Vec<Event>) -> Vec<Event> {
    events
        .into_iter()
        .map(|mut e| {
            e.attrs.clear();
            e
        })
        .collect()
}

fn renamed_copy(events: &[Event]) -> Vec<Event> {
    events
        .iter()
        .map(|e| Event {
            id: Symbol::intern(&format!("{}{COPY_SUFFIX}", e.id)),
            pred: Symbol::intern(&format!("{}{COPY_SUFFIX}", e.pred)),
            time: e.time,
            attrs: e.attrs.clone(),
        })
        .collect()
}

fn class_and_variant(situation: u32) -> (usize, usize) {
    let idx = situation as usize - 1;
    (idx % CLASSES.len(), idx / CLASSES.len())
}

/// The two raw (unsaturated) views of one situation, in the order of
/// [`Mode::sources`]. `variant` selects between alternative beat patterns
/// of classes that have more than one.
pub fn generate_example(
    label: &str,
    situation: u32,
    variant: usize,
    cfg: &GeneratorConfig,
) -> Result<(Interpretation, Interpretation)> {
    cfg.validate()?;
    let (ecg, abp) = full_streams(label, situation, variant, cfg)?;
    fn is(pred: &'static str) -> impl Fn(&Event) -> bool {
        move |e| e.pred.as_str() == pred
    }
    let (a, b) = match cfg.mode {
        Mode::Full => (ecg, abp),
        Mode::Reduced => (
            strip_attrs(ecg.into_iter().filter(|e| is("qrs")(e)).collect()),
            abp.into_iter().filter(|e| is("sys")(e)).collect(),
        ),
        Mode::Split => (
            ecg.iter().filter(|e| is("p")(e)).cloned().collect(),
            strip_attrs(ecg.into_iter().filter(|e| is("qrs")(e)).collect()),
        ),
        Mode::Redundant => {
            let copy = renamed_copy(&ecg);
            (ecg, copy)
        }
    };
    let [sa, sb] = cfg.mode.sources();
    Ok((
        Interpretation::from_events(situation, sa, label, a),
        Interpretation::from_events(situation, sb, label, b),
    ))
}

/// All raw interpretations: situations `1..=7*per_class`, classes cycling in
/// the order of [`CLASSES`].
pub fn generate_raw(cfg: &GeneratorConfig) -> Result<Vec<Interpretation>> {
    cfg.validate()?;
    let mut out = Vec::new();
    for situation in 1..=(cfg.per_class * CLASSES.len()) as u32 {
        let (class, variant) = class_and_variant(situation);
        let (a, b) = generate_example(CLASSES[class], situation, variant, cfg)?;
        out.push(a);
        out.push(b);
    }
    Ok(out)
}

/// Generated and saturated dataset.
pub fn generate_dataset(cfg: &GeneratorConfig) -> Result<Dataset> {
    Dataset::build(generate_raw(cfg)?, &cfg.mode.symbolization())
}

fn rules(spec: &[(&str, &str)]) -> Theory {
    let mut theory = Theory::default();
    for (label, body) in spec {
        let clause = Clause::parse(&format!("class({label}) :- {body}.")).expect("valid target rule");
        theory
            .classes
            .insert(Symbol::intern(label), ClassTheory {
                clauses: vec![clause],
                ..ClassTheory::default()
            });
    }
    theory
}

fn pair(a: &str, b: &str, first: &str, second: &str, rel: &str, cat: &str) -> String {
    format!("{a}(A,{first}), {b}(B,{second}), suc(B,A), {rel}(A,B,{cat})")
}

/// Hand-written rules the full-mode generator is built to satisfy, per source.
pub fn target_rules() -> BTreeMap<Symbol, Theory> {
    let ecg: Vec<(&str, String)> = vec![
        ("sr", pair("p", "p", "normal", "normal", "pp1", "normal")),
        ("svt", pair("p", "p", "normal", "normal", "pp1", "short")),
        ("af", pair("qrs", "qrs", "normal", "normal", "rr1", "long")),
        ("vt", pair("qrs", "qrs", "abnormal", "abnormal", "rr1", "short")),
        ("ves", pair("qrs", "qrs", "abnormal", "normal", "rr1", "long")),
        ("bige", pair("qrs", "qrs", "abnormal", "normal", "rr1", "normal")),
        ("doublet", pair("qrs", "qrs", "abnormal", "abnormal", "rr1", "long")),
    ];
    let abp: Vec<(&str, String)> = vec![
        ("sr", pair("sys", "sys", "high", "high", "ss1", "normal")),
        ("svt", pair("sys", "sys", "normal", "normal", "ss1", "short")),
        ("af", pair("sys", "sys", "normal", "low", "ss1", "long")),
        ("vt", pair("sys", "sys", "low", "low", "ss1", "short")),
        ("ves", pair("sys", "sys", "high", "normal", "ss1", "short")),
        ("bige", pair("sys", "sys", "low", "high", "ss1", "normal")),
        ("doublet", pair("sys", "sys", "low", "low", "ss1", "long")),
    ];
    let to_refs = |v: &[(&str, String)]| rules(&v.iter().map(|(l, b)| (*l, b.as_str())).collect::<Vec<_>>());
    BTreeMap::from([(Symbol::intern(ECG), to_refs(&ecg)), (Symbol::intern(ABP), to_refs(&abp))])
}
