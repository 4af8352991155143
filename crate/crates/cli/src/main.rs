//! `bowclf` command-line front end.
//!
//! Exit codes: 0 on success, 1 on runtime or data errors, 2 on usage errors.

mod config;

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bowclf::corpus::synth::PRESET_NAMES;
use bowclf::corpus::{load_csv, load_jsonl, synthesize, write_csv, write_jsonl, Corpus, SynthSpec};
use bowclf::eval::{cross_validate, ClassificationReport, CvOptions, FeatureSpec};
use bowclf::features::{class_frequency_report, NgramRange, TokenRule, Vocabulary};
use bowclf::models::{
    Classifier, LogisticParams, ModelConfig, ModelKind, NbParams, RidgeParams, SvmParams,
    TrainedModel, TreeParams,
};
use clap::{ArgAction, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "bowclf",
    version,
    about = "Bag-of-words text classification toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic labeled corpus and report its Bayes-optimal accuracy
    Synth(SynthArgs),
    /// Train one model and save it with its vocabulary
    Train(TrainArgs),
    /// Cross-validate models and write the classification report and ROC curves
    Eval(EvalArgs),
    /// Score a corpus with a saved model
    Score(ScoreArgs),
    /// Write per-class n-gram frequencies ranked by depressed/control ratio
    Freq(FreqArgs),
}

#[derive(Args, Debug)]
struct ConfigArg {
    /// Flat key=value file whose entries act as flags given before the command line ones
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    /// `.csv` extension means CSV, anything else JSONL
    Auto,
    Jsonl,
    Csv,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Corpus file (JSONL or CSV with id, text, label)
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Corpus file format
    #[arg(long, value_enum, default_value = "auto")]
    format: Format,
}

#[derive(Args, Debug)]
struct Hyper {
    /// Naive Bayes additive smoothing
    #[arg(long, default_value_t = NbParams::default().alpha)]
    alpha: f64,
    /// L2 penalty for logreg and ridge
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// SVM hinge-loss weight
    #[arg(long = "c", default_value_t = SvmParams::default().c)]
    c: f64,
    /// Iteration cap [default: 500 for logreg, 100 epochs per offset for svm, 10000 for ridge]
    #[arg(long, value_name = "N")]
    max_iter: Option<usize>,
    /// Convergence tolerance [default: 1e-6 for logreg, 1e-3 for svm, 1e-8 for ridge]
    #[arg(long, value_name = "TOL")]
    tol: Option<f64>,
    /// Logistic regression probability threshold for the positive class
    #[arg(long, default_value_t = LogisticParams::default().threshold)]
    threshold: f64,
    /// Tree depth limit
    #[arg(long, default_value_t = TreeParams::default().max_depth)]
    max_depth: usize,
    /// Tree nodes smaller than this are not split
    #[arg(long, default_value_t = TreeParams::default().min_node_size)]
    min_node_size: usize,
    /// Highest-variance features searched per tree node, 0 for all
    #[arg(long, default_value_t = TreeParams::default().feature_cap.unwrap_or(0))]
    feature_cap: usize,
}

impl Hyper {
    fn config(&self, kind: ModelKind, seed: u64) -> ModelConfig {
        match kind {
            ModelKind::NaiveBayes => ModelConfig::NaiveBayes(NbParams { alpha: self.alpha }),
            ModelKind::Logistic => {
                let d = LogisticParams::default();
                ModelConfig::Logistic(LogisticParams {
                    lambda: self.lambda,
                    max_iter: self.max_iter.unwrap_or(d.max_iter),
                    tol: self.tol.unwrap_or(d.tol),
                    threshold: self.threshold,
                })
            }
            ModelKind::Svm => {
                let d = SvmParams::default();
                ModelConfig::Svm(SvmParams {
                    c: self.c,
                    max_epochs: self.max_iter.unwrap_or(d.max_epochs),
                    tol: self.tol.unwrap_or(d.tol),
                    seed,
                })
            }
            ModelKind::Ridge => {
                let d = RidgeParams::default();
                ModelConfig::Ridge(RidgeParams {
                    lambda: self.lambda,
                    max_iter: self.max_iter.unwrap_or(d.max_iter),
                    tol: self.tol.unwrap_or(d.tol),
                })
            }
            ModelKind::Tree => ModelConfig::Tree(TreeParams {
                max_depth: self.max_depth,
                min_node_size: self.min_node_size,
                feature_cap: (self.feature_cap > 0).then_some(self.feature_cap),
            }),
        }
    }
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[command(flatten)]
    config: ConfigArg,
    /// Built-in corpus specification
    #[arg(long, default_value = "separable", value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES), conflicts_with = "spec")]
    preset: String,
    /// Corpus specification file (key = value), instead of a preset
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
    /// RNG seed [default: the seed in the specification]
    #[arg(long)]
    seed: Option<u64>,
    /// Output corpus file
    #[arg(long, default_value = "corpus.jsonl")]
    output: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value = "auto")]
    format: Format,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[command(flatten)]
    input: InputArgs,
    /// Model kind
    #[arg(long, default_value = "nb", value_parser = parse_kind)]
    model: ModelKind,
    /// N-gram range: 1, 1-2 or 2
    #[arg(long, default_value = "1", value_parser = parse_range)]
    ngrams: NgramRange,
    /// RNG seed (SVM coordinate order)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Model file; the vocabulary is written next to it with a `.vocab` suffix
    #[arg(long, default_value = "model.bin")]
    output: PathBuf,
    #[command(flatten)]
    hyper: Hyper,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[command(flatten)]
    input: InputArgs,
    /// Comma-separated model kinds
    #[arg(long, default_value = "nb,logreg,svm,ridge,tree", value_delimiter = ',', action = ArgAction::Set, value_parser = parse_kind)]
    model: Vec<ModelKind>,
    /// Comma-separated n-gram ranges; every model is evaluated with each
    #[arg(long, default_value = "1", value_delimiter = ',', action = ArgAction::Set, value_parser = parse_range)]
    ngrams: Vec<NgramRange>,
    /// Number of cross-validation folds
    #[arg(long, default_value_t = 6)]
    folds: usize,
    /// RNG seed for fold assignment and SVM coordinate order
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Build the vocabulary on the whole corpus instead of each training portion
    #[arg(long, default_value_t = false)]
    leakage: bool,
    /// Output directory for report.tsv, report_full.tsv and roc-*.csv
    #[arg(long, default_value = "report")]
    output: PathBuf,
    #[command(flatten)]
    hyper: Hyper,
}

#[derive(Args, Debug)]
struct ScoreArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[command(flatten)]
    input: InputArgs,
    /// Saved model
    #[arg(long, value_name = "FILE")]
    model_file: PathBuf,
    /// Vocabulary file [default: <MODEL_FILE>.vocab]
    #[arg(long, value_name = "FILE")]
    vocab: Option<PathBuf>,
    /// Output CSV with columns id, score, class
    #[arg(long, default_value = "scores.csv")]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct FreqArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[command(flatten)]
    input: InputArgs,
    /// N-gram range: 1, 1-2 or 2
    #[arg(long, default_value = "1", value_parser = parse_range)]
    ngrams: NgramRange,
    /// Number of rows to write
    #[arg(long, default_value_t = 50)]
    top: usize,
    /// Output TSV
    #[arg(long, default_value = "freq.tsv")]
    output: PathBuf,
}

fn parse_kind(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = ModelKind::ALL.iter().map(|k| k.as_str()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn parse_range(s: &str) -> Result<NgramRange, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn vocab_path(model: &Path) -> PathBuf {
    let mut s = model.as_os_str().to_owned();
    s.push(".vocab");
    PathBuf::from(s)
}

fn is_csv(path: &Path, format: Format) -> bool {
    match format {
        Format::Csv => true,
        Format::Jsonl => false,
        Format::Auto => path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("csv")),
    }
}

fn load(input: &InputArgs) -> Result<Corpus> {
    let corpus = if is_csv(&input.input, input.format) {
        load_csv(&input.input)
    } else {
        load_jsonl(&input.input)
    };
    corpus.with_context(|| format!("loading corpus {}", input.input.display()))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn slug(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    out.trim_matches('-').to_string()
}

fn synth(args: &SynthArgs) -> Result<()> {
    let mut spec = match &args.spec {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            SynthSpec::from_config_str(&text)
                .with_context(|| format!("invalid specification {}", path.display()))?
        }
        None => SynthSpec::preset(&args.preset).expect("preset names are validated by the parser"),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let bayes = spec.bayes_accuracy()?;
    let corpus = synthesize(&spec)?;
    let mut out = create(&args.output)?;
    if is_csv(&args.output, args.format) {
        write_csv(&corpus, &mut out)?;
    } else {
        write_jsonl(&corpus, &mut out)?;
    }
    out.flush()?;
    print!("{}", spec.to_config_string());
    println!("documents: {}", corpus.len());
    println!("bayes_accuracy: {bayes}");
    println!("wrote {}", args.output.display());
    Ok(())
}

fn train(args: &TrainArgs) -> Result<()> {
    let corpus = load(&args.input)?;
    let vocab = Vocabulary::from_corpus(&corpus, TokenRule::default(), args.ngrams);
    let xs = vocab.vectorize_corpus(&corpus);
    let (model, info) = args
        .hyper
        .config(args.model, args.seed)
        .train(&xs, &corpus.labels())?;

    model
        .save(&args.output)
        .with_context(|| format!("writing {}", args.output.display()))?;
    let vpath = vocab_path(&args.output);
    let mut out = create(&vpath)?;
    vocab.write(&mut out)?;
    out.flush()?;

    println!("model: {}", args.model);
    println!("dimension: {}", vocab.len());
    println!("iterations: {}", info.iterations);
    println!("objective: {}", info.objective);
    println!("converged: {}", info.converged);
    println!("wrote {} and {}", args.output.display(), vpath.display());
    Ok(())
}

fn eval(args: &EvalArgs) -> Result<()> {
    let corpus = load(&args.input)?;
    let mut report = ClassificationReport::new();
    let mut curves = Vec::new();
    for &range in &args.ngrams {
        for &kind in &args.model {
            let options = CvOptions {
                k: args.folds,
                seed: args.seed,
                features: FeatureSpec {
                    rule: TokenRule::default(),
                    range,
                    leakage: args.leakage,
                },
            };
            let outcome = cross_validate(&corpus, &args.hyper.config(kind, args.seed), &options)
                .with_context(|| format!("cross-validating {kind}"))?;
            curves.push((outcome.row.classifier.clone(), outcome.roc, outcome.auc));
            report.push(outcome.row);
        }
    }

    fs::create_dir_all(&args.output)
        .with_context(|| format!("creating {}", args.output.display()))?;
    let mut out = create(&args.output.join("report.tsv"))?;
    report.write_tsv(&mut out)?;
    out.flush()?;
    let mut out = create(&args.output.join("report_full.tsv"))?;
    report.write_full_tsv(&mut out)?;
    out.flush()?;
    for (name, roc, auc) in &curves {
        let mut out = create(&args.output.join(format!("roc-{}.csv", slug(name))))?;
        roc.write_csv(&mut out, auc)?;
        out.flush()?;
    }

    let stdout = std::io::stdout();
    report.write_tsv(stdout.lock())?;
    for (name, _, auc) in &curves {
        println!(
            "AUC {name}: trapezoid={} pairwise={}",
            auc.trapezoid, auc.pairwise
        );
    }
    Ok(())
}

fn score(args: &ScoreArgs) -> Result<()> {
    let model = TrainedModel::load(&args.model_file)
        .with_context(|| format!("loading model {}", args.model_file.display()))?;
    let vpath = args
        .vocab
        .clone()
        .unwrap_or_else(|| vocab_path(&args.model_file));
    let file = fs::File::open(&vpath)
        .with_context(|| format!("vocabulary file {} not found", vpath.display()))?;
    let vocab = Vocabulary::read(BufReader::new(file))
        .with_context(|| format!("reading vocabulary {}", vpath.display()))?;
    if vocab.len() != model.dimension() {
        bail!(
            "model dimension {} is incompatible with vocabulary {} of dimension {}",
            model.dimension(),
            vpath.display(),
            vocab.len()
        );
    }
    let corpus = load(&args.input)?;
    let mut out = create(&args.output)?;
    writeln!(out, "id,score,class")?;
    for doc in &corpus {
        let x = vocab.vectorize(doc);
        let id = if doc.id.contains([',', '"', '\n', '\r']) {
            format!("\"{}\"", doc.id.replace('"', "\"\""))
        } else {
            doc.id.clone()
        };
        writeln!(out, "{id},{},{}", model.score(&x), model.classify(&x))?;
    }
    out.flush()?;
    println!(
        "scored {} documents into {}",
        corpus.len(),
        args.output.display()
    );
    Ok(())
}

fn freq(args: &FreqArgs) -> Result<()> {
    let corpus = load(&args.input)?;
    let vocab = Vocabulary::from_corpus(&corpus, TokenRule::default(), args.ngrams);
    let report = class_frequency_report(&corpus, &vocab);
    let mut out = create(&args.output)?;
    report.write_tsv(&mut out, args.top)?;
    out.flush()?;
    println!(
        "wrote {} of {} n-grams to {}",
        args.top.min(vocab.len()),
        vocab.len(),
        args.output.display()
    );
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Synth(a) => synth(a),
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Score(a) => score(a),
        Command::Freq(a) => freq(a),
    }
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(argv) => argv,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(e.exit_code());
        }
    };
    // later occurrences of a flag replace earlier ones, so the command line
    // overrides config entries
    let command = Cli::command().mut_subcommands(|s| s.args_override_self(true));
    let cli = match command
        .try_get_matches_from(argv)
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
