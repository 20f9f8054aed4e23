//! Command-line front end: `fairmax <synth|train|evaluate|compare|plot-data>`.
//!
//! Every invocation writes into a single output directory, starting with a
//! `manifest.txt` that records the command, dataset fingerprint, seed and
//! effective configuration.

pub mod error;
pub mod manifest;
pub mod plot;
pub mod source;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fairmax_core::data::{save_dataset_dir, split, synth_biased, DatasetMeta};
use fairmax_core::metrics::{evaluate, statistical_rate, threshold_scores, DECISION_THRESHOLD};
use fairmax_core::model::{predict_scores, read_adversary, read_params};
use fairmax_core::train::{pretrain_classifier, read_trace_csv, reports, save_result, train};
use fairmax_core::{Algorithm, Error as CoreError, FairnessReport, Split, TrainConfig, TrainResult};
use rayon::prelude::*;

pub use error::{CliError, Result};
use manifest::RunManifest;
use source::{fingerprint, DataArgs};

/// Environment variable consulted for the seed when no flag or config sets it.
pub const SEED_ENV: &str = "FAIRMAX_SEED";
pub const SCORES_FILE: &str = "scores.csv";
pub const REPORT_FILE: &str = "report.txt";
pub const COMPARISON_FILE: &str = "comparison.csv";

#[derive(Debug, Parser)]
#[command(name = "fairmax", version, about = "Fair classification by adversarial training and descent-ascent")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic biased dataset.
    Synth(SynthArgs),
    /// Train one algorithm and save its trace, snapshots and reports.
    Train(TrainArgs),
    /// Report accuracy and fairness of a trained run on a dataset.
    Evaluate(EvaluateArgs),
    /// Run all four algorithms over several seeds and tabulate medians.
    Compare(CompareArgs),
    /// Emit histogram and metric CSVs plus an SVG figure for a run.
    PlotData(PlotArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 5000)]
    pub n: usize,
    #[arg(long, default_value_t = 0.8)]
    pub bias: f64,
    #[arg(long, default_value_t = 8)]
    pub features: usize,
    /// Defaults to $FAIRMAX_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Training configuration: defaults, then $FAIRMAX_SEED, then the config
/// file, then flags.
#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Flat `key = value` file with `#` comments.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `logistic` or `mlp`.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub eta1: Option<f64>,
    #[arg(long)]
    pub eta2: Option<f64>,
    /// A constant or `inv_sqrt`.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Scale features by a fresh U[0,1) draw every iteration.
    #[arg(long)]
    pub noise: bool,
    /// Any config key, as `key=value`; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<TrainConfig> {
        let mut cfg = TrainConfig::default();
        if let Some(seed) = env_seed()? {
            cfg.seed = seed;
        }
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        let mut pairs: Vec<(String, String)> = Vec::new();
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                pairs.push((k.to_string(), v));
            }
        };
        push("seed", self.seed.map(|v| v.to_string()));
        push("model", self.model.clone());
        push("lambda", self.lambda.map(|v| v.to_string()));
        push("eta1", self.eta1.map(|v| v.to_string()));
        push("eta2", self.eta2.map(|v| v.to_string()));
        push("alpha", self.alpha.clone());
        push("epochs", self.epochs.map(|v| v.to_string()));
        push("batch_size", self.batch_size.map(|v| v.to_string()));
        push("noise", self.noise.then(|| "true".to_string()));
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        for (k, v) in pairs {
            cfg.set(&k, &v).map_err(|m| CliError::Usage(format!("{k}: {m}")))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Baseline,
    Adversarial,
    GdaNormal,
    GdaModified,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Baseline => Algorithm::Baseline,
            AlgoArg::Adversarial => Algorithm::Adversarial,
            AlgoArg::GdaNormal => Algorithm::GdaNormal,
            AlgoArg::GdaModified => Algorithm::GdaModified,
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_enum)]
    pub algo: AlgoArg,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Selected,
    Final,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Directory written by `fairmax train`.
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long, value_enum, default_value_t = Which::Selected)]
    pub which: Which,
    #[command(flatten)]
    pub data: DataArgs,
    /// Also write the report and a manifest here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Comma-separated seeds, e.g. `1,2,3,4,5`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub seeds: Vec<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Directory written by `fairmax train`.
    #[arg(long)]
    pub run: PathBuf,
    /// Defaults to `<run>/plots`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(a) => cmd_synth(&a),
        Command::Train(a) => cmd_train(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::PlotData(a) => cmd_plot_data(&a),
    }
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::output(path, e))
}

/// Core write failures become output errors rather than data errors.
fn on_write(e: CoreError) -> CliError {
    match e {
        CoreError::Io { path, source } => CliError::output(path, source),
        other => CliError::Core(other),
    }
}

pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let seed = match args.seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    };
    let ds = synth_biased(args.n, args.bias, args.features, seed)?;
    let mut manifest = RunManifest::new("synth", seed, &args.out);
    manifest.details = vec![
        ("n".into(), args.n.to_string()),
        ("bias".into(), args.bias.to_string()),
        ("features".into(), args.features.to_string()),
    ];
    manifest.dataset = Some(args.out.display().to_string());
    manifest.dataset_sha256 = Some(fingerprint(&ds));
    manifest.write()?;
    let meta = DatasetMeta {
        seed: Some(seed),
        provenance: format!("synth n={} bias={} features={}", args.n, args.bias, args.features),
    };
    save_dataset_dir(&ds, &meta, &args.out).map_err(on_write)?;

    let cfg = TrainConfig {
        seed,
        ..TrainConfig::default()
    };
    let clf = pretrain_classifier(&ds, &cfg)?;
    let preds = threshold_scores(&predict_scores(&clf, ds.features())?, DECISION_THRESHOLD);
    let rate = statistical_rate(&preds, ds.sensitive())?;
    println!("wrote {} rows x {} features to {}", ds.n_samples(), ds.n_features(), args.out.display());
    println!(
        "sanity: logistic fit on all rows has statistical rate {rate:.1} ({})",
        if rate >= 80.0 { "passes the 80% rule" } else { "fails the 80% rule" }
    );
    Ok(())
}

fn train_manifest(command: &str, cfg: &TrainConfig, config: &ConfigArgs, origin: &str, sha: &str, out: &Path) -> RunManifest {
    let mut m = RunManifest::new(command, cfg.seed, out);
    m.config_path = config.config.clone();
    m.dataset = Some(origin.to_string());
    m.dataset_sha256 = Some(sha.to_string());
    m.config = Some(cfg.clone());
    m
}

fn report_section(out: &mut String, name: &str, r: &FairnessReport) {
    let _ = writeln!(out, "[{name}]");
    out.push_str(&r.to_kv());
}

/// Writes trace, snapshots, reports and the test scores of the selected
/// model into `dir`.
fn write_run(result: &TrainResult, sp: &Split, dir: &Path) -> Result<(FairnessReport, FairnessReport)> {
    save_result(result, dir).map_err(on_write)?;
    let (sel_train, sel_test) = reports(&result.selected_params, &result.selected_adv, sp)?;
    let (fin_train, fin_test) = reports(&result.final_params, &result.final_adv, sp)?;
    let mut text = String::new();
    report_section(&mut text, "selected.train", &sel_train);
    report_section(&mut text, "selected.test", &sel_test);
    report_section(&mut text, "final.train", &fin_train);
    report_section(&mut text, "final.test", &fin_test);
    write_file(&dir.join(REPORT_FILE), text)?;

    let scores = predict_scores(&result.selected_params, sp.test.features())?;
    let mut csv = String::from("score,label,sensitive\n");
    for ((s, y), z) in scores.iter().zip(sp.test.labels()).zip(sp.test.sensitive()) {
        let _ = writeln!(csv, "{s},{y},{z}");
    }
    write_file(&dir.join(SCORES_FILE), csv)?;
    Ok((sel_train, sel_test))
}

fn report_row(label: &str, r: &FairnessReport) -> String {
    format!(
        "{label:<6} {:>8.4} {:>7.1} {:>9} {:>13.4}",
        r.accuracy,
        r.statistical_rate,
        if r.passes_80_rule { "pass" } else { "fail" },
        r.adversary_auc
    )
}

pub fn cmd_train(args: &TrainArgs) -> Result<()> {
    let cfg = args.config.resolve()?;
    let data = args.data.load()?;
    let algorithm = Algorithm::from(args.algo);
    let mut manifest = train_manifest("train", &cfg, &args.config, &data.origin, &data.sha256, &args.out);
    manifest.details.push(("algorithm".into(), algorithm.name().into()));
    manifest.write()?;

    let sp = split(&data.dataset, cfg.test_fraction, cfg.seed)?;
    let result = train(algorithm, &sp, &cfg)?;
    let (train_report, test_report) = write_run(&result, &sp, &args.out)?;
    println!(
        "{algorithm}: selected epoch {} of {}",
        result.selected_epoch,
        result.trace.len()
    );
    println!("{:<6} {:>8} {:>7} {:>9} {:>13}", "split", "accuracy", "p%", "80% rule", "adversary AUC");
    println!("{}", report_row("train", &train_report));
    println!("{}", report_row("test", &test_report));
    println!("run written to {}", args.out.display());
    Ok(())
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let (clf_file, adv_file) = match args.which {
        Which::Selected => ("selected.params", "selected_adversary.params"),
        Which::Final => ("final.params", "final_adversary.params"),
    };
    let clf = read_params(args.run.join(clf_file))?;
    let adv = read_adversary(args.run.join(adv_file))?;
    let data = args.data.load()?;
    if let Some(out) = &args.out {
        let mut m = RunManifest::new("evaluate", 0, out);
        m.details.push(("run".into(), args.run.display().to_string()));
        m.dataset = Some(data.origin.clone());
        m.dataset_sha256 = Some(data.sha256.clone());
        m.write()?;
    }
    let report = evaluate(&clf, &adv, &data.dataset)?;
    print!("{}", report.to_kv());
    if let Some(out) = &args.out {
        write_file(&out.join(REPORT_FILE), report.to_kv())?;
    }
    Ok(())
}

/// Median over seeds of one algorithm's selected-model test metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub algorithm: Algorithm,
    pub seeds: usize,
    pub accuracy: f64,
    /// On the training split, where the model was selected.
    pub statistical_rate_train: f64,
    pub statistical_rate: f64,
    pub adversary_auc: f64,
    /// Judged on the test split.
    pub passes_80_rule: bool,
}

pub fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len().is_multiple_of(2) {
        0.5 * (values[m - 1] + values[m])
    } else {
        values[m]
    }
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from(
        "algorithm,seeds,accuracy,statistical_rate_train,statistical_rate,adversary_auc,passes_80_rule\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.algorithm,
            r.seeds,
            r.accuracy,
            r.statistical_rate_train,
            r.statistical_rate,
            r.adversary_auc,
            r.passes_80_rule
        );
    }
    out
}

pub fn cmd_compare(args: &CompareArgs) -> Result<()> {
    if args.seeds.is_empty() {
        return Err(CliError::Usage("--seeds needs at least one seed".into()));
    }
    let base = args.config.resolve()?;
    let data = args.data.load()?;
    let mut manifest = train_manifest("compare", &base, &args.config, &data.origin, &data.sha256, &args.out);
    let seeds: Vec<String> = args.seeds.iter().map(u64::to_string).collect();
    manifest.details.push(("seeds".into(), seeds.join(",")));
    manifest.write()?;

    let cells: Vec<(Algorithm, u64)> = Algorithm::ALL
        .iter()
        .flat_map(|&a| args.seeds.iter().map(move |&s| (a, s)))
        .collect();
    let records = cells
        .par_iter()
        .map(|&(algorithm, seed)| {
            let cfg = TrainConfig { seed, ..base.clone() };
            let sp = split(&data.dataset, cfg.test_fraction, seed)?;
            let result = train(algorithm, &sp, &cfg)?;
            write_run(&result, &sp, &args.out.join(algorithm.name()).join(format!("seed-{seed}")))?;
            Ok((algorithm, *result.selected_record()))
        })
        .collect::<Result<Vec<_>>>()?;

    let rows: Vec<ComparisonRow> = Algorithm::ALL
        .iter()
        .map(|&algorithm| {
            let picked: Vec<_> = records.iter().filter(|(a, _)| *a == algorithm).map(|(_, r)| r).collect();
            let col = |f: fn(&fairmax_core::EpochRecord) -> f64| median(picked.iter().map(|r| f(r)).collect());
            let rate = col(|r| r.statistical_rate_test);
            ComparisonRow {
                algorithm,
                seeds: picked.len(),
                accuracy: col(|r| r.test_accuracy),
                statistical_rate_train: col(|r| r.statistical_rate_train),
                statistical_rate: rate,
                adversary_auc: col(|r| r.adversary_auc),
                passes_80_rule: rate >= 80.0,
            }
        })
        .collect();
    write_file(&args.out.join(COMPARISON_FILE), comparison_csv(&rows))?;

    println!(
        "median over {} seed(s) of the selected model; p% on train and test, other columns on test",
        args.seeds.len()
    );
    println!(
        "{:<13} {:>8} {:>8} {:>7} {:>13} {:>9}",
        "algorithm", "accuracy", "p% train", "p%", "adversary AUC", "80% rule"
    );
    for r in &rows {
        println!(
            "{:<13} {:>8.4} {:>8.1} {:>7.1} {:>13.4} {:>9}",
            r.algorithm.name(),
            r.accuracy,
            r.statistical_rate_train,
            r.statistical_rate,
            r.adversary_auc,
            if r.passes_80_rule { "pass" } else { "fail" }
        );
    }
    Ok(())
}

/// Scores and sensitive values from a run's `scores.csv`.
pub fn read_scores(path: &Path) -> Result<(Vec<f64>, Vec<u8>)> {
    let bad = |message: String| CliError::Run {
        path: path.to_path_buf(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
    let mut lines = text.lines();
    if lines.next() != Some("score,label,sensitive") {
        return Err(bad("unexpected header".into()));
    }
    let (mut scores, mut sensitive) = (Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        let parsed = (f.len() == 3)
            .then(|| Some((f[0].parse::<f64>().ok()?, f[2].parse::<u8>().ok()?)))
            .flatten();
        let (s, z) = parsed.ok_or_else(|| bad(format!("malformed line {}", i + 2)))?;
        scores.push(s);
        sensitive.push(z);
    }
    Ok((scores, sensitive))
}

pub fn cmd_plot_data(args: &PlotArgs) -> Result<()> {
    let scores_path = args.run.join(SCORES_FILE);
    let trace_path = args.run.join("trace.csv");
    for p in [&scores_path, &trace_path] {
        if !p.is_file() {
            return Err(CliError::Run {
                path: args.run.clone(),
                message: format!("missing {}", p.file_name().unwrap_or_default().to_string_lossy()),
            });
        }
    }
    let (scores, sensitive) = read_scores(&scores_path)?;
    let trace = read_trace_csv(&trace_path)?;
    let out = args.out.clone().unwrap_or_else(|| args.run.join("plots"));
    let mut manifest = RunManifest::new("plot-data", 0, &out);
    manifest.details.push(("run".into(), args.run.display().to_string()));
    manifest.write()?;

    let (h0, h1) = plot::group_histogram(&scores, &sensitive);
    write_file(&out.join("histogram.csv"), plot::histogram_csv(&h0, &h1))?;
    write_file(&out.join("metrics.csv"), plot::metrics_csv(&trace))?;
    let title = format!("fairmax run {}", args.run.display());
    write_file(&out.join("figure.svg"), plot::render_svg(&h0, &h1, &trace, &title))?;
    println!("plot data written to {}", out.display());
    Ok(())
}
