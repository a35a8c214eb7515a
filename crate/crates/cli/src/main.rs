use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use relic::data::{parse_model_file, write_model_file, Dataset, SymbolizationConfig};
use relic::dlab::{parse_dlab, DlabTemplate};
use relic::error::{Error, Result};
use relic::eval::{cross_validate, emit_report, EvaluationReport, Folds, LearnerMode, ReportFormat};
use relic::learner::{examples, learn_theory, BiasChoice, LearnerParams};
use relic::multisource::{biased_multisource_learn, naive_bias, parse_constraints, InterleavingConstraint};
use relic::symbol::Symbol;
use relic::synth::{generate_raw, GeneratorConfig, Mode};

#[derive(Parser)]
#[command(name = "relic", version, about = "Relational rule learning from multisource event data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic ECG/ABP dataset, one fact file per source.
    Synth(SynthArgs),
    /// Learn a theory from one source.
    Learn(LearnArgs),
    /// Learn from aggregated examples under the naive bias.
    LearnNaive(NaiveArgs),
    /// Learn from aggregated examples under biases built from monosource rules.
    LearnBiased(BiasedArgs),
    /// Cross-validate a learner and print the per-class report.
    Crossval(CrossvalArgs),
    /// Size of the hypothesis space of a DLAB grammar.
    CountSpace {
        #[arg(long)]
        bias: PathBuf,
    },
    /// Render a JSON report written by `crossval --json`.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "markdown")]
        format: String,
    },
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    per_class: usize,
    /// full, reduced, split or redundant
    #[arg(long, default_value = "full")]
    mode: String,
    #[arg(long, default_value = "data")]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Fact files, or directories whose `.pl` files are all read.
    #[arg(long, required = true, num_args = 1..)]
    data: Vec<PathBuf>,
    #[arg(long, default_value_t = SymbolizationConfig::default().suc_window)]
    suc_window: usize,
}

#[derive(Args, Clone)]
struct ParamArgs {
    #[arg(long, default_value_t = LearnerParams::default().beam_width)]
    beam_width: usize,
    #[arg(long, default_value_t = LearnerParams::default().max_clauses_per_class)]
    max_clauses: usize,
    #[arg(long, default_value_t = LearnerParams::default().min_positive_coverage)]
    min_pos: usize,
    #[arg(long, default_value_t = LearnerParams::default().noise)]
    noise: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<LearnerParams> {
        let p = LearnerParams {
            beam_width: self.beam_width,
            max_clauses_per_class: self.max_clauses,
            min_positive_coverage: self.min_pos,
            noise: self.noise,
        };
        p.validate()?;
        Ok(p)
    }
}

/// Monosource biases: `SOURCE=FILE` entries, the naive bias for the rest.
#[derive(Args, Clone)]
struct MonoBiasArgs {
    #[arg(long = "bias", value_name = "SOURCE=FILE")]
    biases: Vec<String>,
    /// Event depth of the naive monosource bias used when no file is given.
    #[arg(long, default_value_t = 3)]
    mono_max_events: usize,
}

#[derive(Args)]
struct LearnArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    source: String,
    /// DLAB grammar; the naive bias of the source when omitted.
    #[arg(long)]
    bias: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    max_events: usize,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct NaiveArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 4)]
    max_events: usize,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct BiasedArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    constraints: Option<PathBuf>,
    #[command(flatten)]
    mono: MonoBiasArgs,
    /// Directory receiving monosource theories, bottom clauses and biases.
    #[arg(long)]
    artifacts: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct CrossvalArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Fold count or `loo`.
    #[arg(long, default_value = "loo")]
    folds: String,
    /// mono, naive or biased
    #[arg(long)]
    mode: String,
    /// Source learned in mono mode.
    #[arg(long)]
    source: Option<String>,
    /// Event depth of the naive bias in naive mode.
    #[arg(long, default_value_t = 4)]
    max_events: usize,
    #[arg(long)]
    constraints: Option<PathBuf>,
    #[command(flatten)]
    mono: MonoBiasArgs,
    #[arg(long, default_value = "markdown")]
    format: String,
    /// Also write the full report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Seed recorded in the report metadata.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    params: ParamArgs,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::internal(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| Error::internal(format!("cannot write {}: {e}", path.display())))
}

fn fact_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let entries = fs::read_dir(p).map_err(|e| Error::usage(format!("cannot list {}: {e}", p.display())))?;
            let mut files: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "pl"))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    if out.is_empty() {
        return Err(Error::usage("no fact file found"));
    }
    Ok(out)
}

fn load(args: &DataArgs) -> Result<Dataset> {
    let mut interpretations = Vec::new();
    for f in fact_files(&args.data)? {
        let parsed = parse_model_file(&read(&f)?).map_err(|e| Error::usage(format!("{}: {e}", f.display())))?;
        interpretations.extend(parsed);
    }
    Dataset::from_saturated(interpretations)
}

fn load_bias(path: &Path) -> Result<DlabTemplate> {
    parse_dlab(&read(path)?)
}

fn load_constraints(path: Option<&PathBuf>) -> Result<Vec<InterleavingConstraint>> {
    match path {
        Some(p) => parse_constraints(&read(p)?),
        None => Ok(Vec::new()),
    }
}

fn mono_biases(ds: &Dataset, args: &MonoBiasArgs) -> Result<BTreeMap<Symbol, DlabTemplate>> {
    let mut given = BTreeMap::new();
    for entry in &args.biases {
        let (src, file) = entry
            .split_once('=')
            .ok_or_else(|| Error::usage(format!("--bias expects SOURCE=FILE, got {entry:?}")))?;
        given.insert(Symbol::intern(src), load_bias(Path::new(file))?);
    }
    let mut out = BTreeMap::new();
    for src in ds.sources() {
        let bias = match given.remove(&src) {
            Some(b) => b,
            None => naive_bias(&ds.schema.restricted_to(src), args.mono_max_events)?,
        };
        out.insert(src, bias);
    }
    if let Some(src) = given.keys().next() {
        return Err(Error::usage(format!("bias given for unknown source {src}")));
    }
    Ok(out)
}

fn synth(args: &SynthArgs) -> Result<()> {
    let mode: Mode = args.mode.parse()?;
    let cfg = GeneratorConfig {
        seed: args.seed,
        per_class: args.per_class,
        mode,
        ..GeneratorConfig::default()
    };
    let ds = Dataset::build(generate_raw(&cfg)?, &mode.symbolization())?;
    for src in ds.sources() {
        let path = args.out.join(format!("{src}.pl"));
        write(&path, &write_model_file(ds.source(src)))?;
        println!("{}: {} examples", path.display(), ds.source(src).len());
    }
    Ok(())
}

fn learn(args: &LearnArgs) -> Result<()> {
    let ds = load(&args.data)?;
    let src = Symbol::intern(&args.source);
    let view = ds.source(src);
    if view.is_empty() {
        return Err(Error::usage(format!("no example on source {src}")));
    }
    let bias = match &args.bias {
        Some(p) => load_bias(p)?,
        None => naive_bias(&ds.schema.restricted_to(src), args.max_events)?,
    };
    let theory = learn_theory(&examples(view), BiasChoice::Shared(&bias), &args.params.params()?)?;
    print!("{theory}");
    Ok(())
}

fn learn_naive(args: &NaiveArgs) -> Result<()> {
    let ds = load(&args.data)?;
    let agg = relic::multisource::aggregate(&ds, args.data.suc_window)?;
    for (k, reason) in &agg.dropped {
        eprintln!("situation {k} dropped: {reason}");
    }
    let bias = naive_bias(&agg.dataset.schema, args.max_events)?;
    let theory = learn_theory(
        &examples(&agg.dataset.interpretations),
        BiasChoice::Shared(&bias),
        &args.params.params()?,
    )?;
    print!("{theory}");
    Ok(())
}

fn learn_biased(args: &BiasedArgs) -> Result<()> {
    let ds = load(&args.data)?;
    let biases = mono_biases(&ds, &args.mono)?;
    let constraints = load_constraints(args.constraints.as_ref())?;
    let run = biased_multisource_learn(&ds, &biases, &constraints, &args.params.params()?, args.data.suc_window)?;
    for w in &run.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(dir) = &args.artifacts {
        run.write_artifacts(dir)?;
    }
    print!("{}", run.theory);
    Ok(())
}

fn crossval(args: &CrossvalArgs) -> Result<()> {
    let ds = load(&args.data)?;
    let folds: Folds = args.folds.parse()?;
    let format: ReportFormat = args.format.parse()?;
    let window = args.data.suc_window;
    let mode = match args.mode.as_str() {
        "mono" => LearnerMode::Mono {
            source: args
                .source
                .clone()
                .ok_or_else(|| Error::usage("mono mode needs --source"))?,
        },
        "naive" => LearnerMode::Naive {
            max_events: args.max_events,
            suc_window: window,
        },
        "biased" => LearnerMode::Biased { suc_window: window },
        other => return Err(Error::usage(format!("unknown mode {other:?}; expected mono, naive or biased"))),
    };
    let biases = mono_biases(&ds, &args.mono)?;
    let constraints = load_constraints(args.constraints.as_ref())?;
    let report = cross_validate(&ds, &mode, &biases, &constraints, &args.params.params()?, folds, args.seed)?;
    if let Some(path) = &args.json {
        let json = serde_json::to_string_pretty(&report).map_err(|e| Error::internal(e.to_string()))?;
        write(path, &json)?;
    }
    print!("{}", emit_report(&report, format));
    Ok(())
}

fn report(input: &Path, format: &str) -> Result<()> {
    let format: ReportFormat = format.parse()?;
    let report: EvaluationReport = serde_json::from_str(&read(input)?)
        .map_err(|e| Error::usage(format!("{}: not a report: {e}", input.display())))?;
    print!("{}", emit_report(&report, format));
    Ok(())
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("RELIC_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::usage(format!("RELIC_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::internal(e.to_string()))
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Synth(a) => synth(&a),
        Command::Learn(a) => learn(&a),
        Command::LearnNaive(a) => learn_naive(&a),
        Command::LearnBiased(a) => learn_biased(&a),
        Command::Crossval(a) => crossval(&a),
        Command::CountSpace { bias } => {
            let size = load_bias(&bias)?.count_space();
            if size.saturated {
                println!(">= {}", size.value);
            } else {
                println!("{}", size.value);
            }
            Ok(())
        }
        Command::Report { input, format } => report(&input, &format),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Internal(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
