//! `damcap`: dataset generation, ingestion, capacity measurement and sweeps.
//!
//! Every flag can also be given in a flat `key=value` file passed with
//! `--config`; flags on the command line win.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 infeasible target.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use damcap::capacity::{find_kmax, find_kmax_linear, CapacityPolicy};
use damcap::dam::{NumericPath, TieMode, DEFAULT_FAST_MARGIN};
use damcap::experiment::{self, bucketize, emit_report, load_sweep_csv, ModelOptions, SweepConfig};
use damcap::generators::{build_dataset, DatasetPlan, GreedyMode};
use damcap::ingest::{load_idx_pool, ThresholdRule, DEFAULT_THRESHOLD};
use damcap::{dataset_file, Error};

#[derive(Parser, Debug)]
#[command(
    name = "damcap",
    version,
    about = "Dense associative memory capacity lab"
)]
struct Cli {
    /// Base seed for generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory or file, depending on the command.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Flat key=value file mirroring the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a dataset directory of subsets plus manifest.jsonl.
    Generate(GenerateArgs),
    /// Binarize IDX images into a pattern pool file.
    Ingest(IngestArgs),
    /// Measure K_max of one dataset file at one degree.
    Measure(MeasureArgs),
    /// Measure every dataset at every degree and write the report.
    Sweep(SweepArgs),
    /// Rebuild figure data and summary from an existing sweep.csv.
    Report(ReportArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Kind {
    Artificial,
    Mnist,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum GreedyRule {
    Mean,
    Min,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Pattern pool (from `ingest`) for `--kind mnist`.
    #[arg(long)]
    pool: Option<PathBuf>,
    /// Half-width of the accepted mean-HD band.
    #[arg(long, default_value_t = 2.0)]
    band: f64,
    #[arg(long, value_enum, default_value_t = GreedyRule::Mean)]
    greedy_mode: GreedyRule,
    /// Pool draws per subset (default 200 x subset size).
    #[arg(long)]
    max_trials: Option<usize>,
}

#[derive(Args, Debug)]
struct IngestArgs {
    #[arg(long)]
    images: PathBuf,
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: u8,
    /// Use `pixel > threshold` instead of `pixel >= threshold`.
    #[arg(long)]
    strict_threshold: bool,
    /// Keep only the first N images of each label (needs --labels).
    #[arg(long)]
    per_digit: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    #[arg(long, default_value = "fast")]
    numeric_path: String,
    #[arg(long, default_value = "retain")]
    tie_mode: String,
    #[arg(long, default_value_t = DEFAULT_FAST_MARGIN)]
    fast_margin: f64,
}

impl ModelArgs {
    fn options(&self) -> Result<ModelOptions, Error> {
        Ok(ModelOptions {
            numeric_path: self.numeric_path.parse::<NumericPath>()?,
            tie_mode: self.tie_mode.parse::<TieMode>()?,
            fast_margin: self.fast_margin,
        })
    }
}

#[derive(Args, Debug, Clone)]
struct PolicyArgs {
    #[arg(long, default_value_t = 50)]
    max_k: usize,
    /// Flag results with K_max above this as excluded; negative disables.
    #[arg(long, default_value_t = 49, allow_negative_numbers = true)]
    exclude_above: i64,
    /// Consecutive saturated results that end a series; 0 disables.
    #[arg(long, default_value_t = 2)]
    early_stop: usize,
}

impl PolicyArgs {
    fn policy(&self) -> CapacityPolicy {
        CapacityPolicy {
            max_k: self.max_k,
            exclude_above: usize::try_from(self.exclude_above).ok(),
            early_stop_threshold: (self.early_stop > 0).then_some(self.early_stop),
            assume_monotone: true,
        }
    }
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    degree: u32,
    /// Also run the linear-scan oracle and report monotonicity.
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    policy: PolicyArgs,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Dataset directories, manifest files or .damp files.
    #[arg(long = "dataset", required = true, value_delimiter = ',')]
    datasets: Vec<PathBuf>,
    /// Comma-separated degree grid (default 6..11, 13..37 step 2).
    #[arg(long, value_delimiter = ',')]
    degrees: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    buckets: Option<Vec<f64>>,
    #[arg(long, default_value_t = experiment::DEFAULT_LEEWAY)]
    leeway: f64,
    #[command(flatten)]
    policy: PolicyArgs,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long)]
    sweep: PathBuf,
    #[arg(long, value_delimiter = ',')]
    buckets: Option<Vec<f64>>,
    #[arg(long, default_value_t = experiment::DEFAULT_LEEWAY)]
    leeway: f64,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Usage(_) | Failure::Lib(Error::Spec(_)) => 1,
        Failure::Lib(Error::InfeasibleTarget { .. }) => 3,
        Failure::Lib(_) => 2,
    }
}

fn require_out(out: &Option<PathBuf>) -> Result<&Path, Failure> {
    out.as_deref()
        .ok_or_else(|| Failure::Usage("--out is required for this command".into()))
}

/// Turns `key=value` lines into flags, skipping keys already on the command line.
fn config_args(path: &Path, argv: &[String]) -> Result<Vec<String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let present: HashSet<&str> = argv
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a))
        .collect();
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key=value", path.display(), lineno + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" || present.contains(key.as_str()) {
            continue;
        }
        match value {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            v => out.push(format!("--{key}={v}")),
        }
    }
    Ok(out)
}

const VERBS: [&str; 5] = ["generate", "ingest", "measure", "sweep", "report"];

/// Inserts config-file flags right after the subcommand.
fn expand_argv(argv: Vec<String>) -> Result<Vec<String>, String> {
    let config = argv.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            argv.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_owned)
        }
    });
    let Some(config) = config else {
        return Ok(argv);
    };
    let extra = config_args(Path::new(&config), &argv)?;
    let Some(verb_at) = argv.iter().position(|a| VERBS.contains(&a.as_str())) else {
        return Ok(argv);
    };
    let mut out = argv[..=verb_at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[verb_at + 1..]);
    Ok(out)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .ok();

    match cli.command {
        Command::Generate(args) => {
            let out = require_out(&cli.out)?;
            let (mut plan, pool, prefix) = match args.kind {
                Kind::Artificial => (DatasetPlan::artificial(cli.seed), None, "artificial"),
                Kind::Mnist => {
                    let pool_path = args
                        .pool
                        .as_ref()
                        .ok_or_else(|| Failure::Usage("--kind mnist needs --pool".into()))?;
                    (
                        DatasetPlan::pool_selected(cli.seed),
                        Some(dataset_file::load(pool_path)?),
                        "mnist",
                    )
                }
            };
            plan.greedy.band = args.band;
            plan.greedy.max_trials = args.max_trials;
            plan.greedy.mode = match args.greedy_mode {
                GreedyRule::Mean => GreedyMode::MeanBand,
                GreedyRule::Min => GreedyMode::MinHd,
            };
            let subsets = build_dataset(&plan, pool.as_ref())?;
            let manifest = experiment::manifest::write_dataset_dir(out, prefix, &subsets)?;
            eprintln!(
                "wrote {} subsets, manifest {}",
                subsets.len(),
                manifest.display()
            );
        }
        Command::Ingest(args) => {
            let out = require_out(&cli.out)?;
            let mut pool = load_idx_pool(&args.images, args.labels.as_deref())?;
            if let Some(n) = args.per_digit {
                pool = pool.balanced(n)?;
            }
            let rule = if args.strict_threshold {
                ThresholdRule::Above
            } else {
                ThresholdRule::AtLeast
            };
            let set = pool
                .to_pattern_set(args.threshold, rule)?
                .with_seed(cli.seed);
            dataset_file::save(&set, out)?;
            eprintln!(
                "wrote {} patterns of {} neurons to {}",
                set.len(),
                set.n_neurons(),
                out.display()
            );
        }
        Command::Measure(args) => {
            let set = dataset_file::load(&args.dataset)?;
            let config = args.model.options()?.config(set.n_neurons(), args.degree)?;
            let policy = args.policy.policy();
            let result = find_kmax(&set, &config, &policy)?;
            let mut value = serde_json::to_value(&result).map_err(Error::from)?;
            if args.verify {
                let lin = find_kmax_linear(&set, &config, &policy)?;
                value["verify"] = serde_json::json!({
                    "linear_k_max": lin.result.k_max,
                    "global_k_max": lin.global_k_max,
                    "monotone": lin.monotone,
                    "agrees": lin.result.k_max == result.k_max,
                });
            }
            println!("{value}");
        }
        Command::Sweep(args) => {
            let out = require_out(&cli.out)?.to_path_buf();
            let mut config = SweepConfig::new(args.datasets, out.clone());
            if let Some(d) = args.degrees {
                config.degree_grid = d;
            }
            config.policy = args.policy.policy();
            config.model = args.model.options()?;
            config.parallelism = threads;
            config.seed = cli.seed;
            let output = experiment::run_sweep(&config)?;
            for f in &output.failures {
                eprintln!("dataset {} failed: {}", f.dataset, f.error);
            }
            let centers = args
                .buckets
                .unwrap_or_else(|| experiment::DEFAULT_CENTERS.to_vec());
            if args.leeway.is_nan() || args.leeway <= 0.0 {
                return Err(Failure::Usage("--leeway must be positive".into()));
            }
            let buckets = bucketize(&output.records, &centers, args.leeway);
            emit_report(&output.records, &buckets, &output.failures, &out)?;
            eprintln!(
                "{} records written to {}",
                output.records.len(),
                out.display()
            );
            if output.records.is_empty() && !output.failures.is_empty() {
                return Err(Failure::Lib(Error::Format(
                    "no dataset could be measured".into(),
                )));
            }
        }
        Command::Report(args) => {
            let out = require_out(&cli.out)?;
            let records = load_sweep_csv(&args.sweep)?;
            let centers = args
                .buckets
                .unwrap_or_else(|| experiment::DEFAULT_CENTERS.to_vec());
            if args.leeway.is_nan() || args.leeway <= 0.0 {
                return Err(Failure::Usage("--leeway must be positive".into()));
            }
            let buckets = bucketize(&records, &centers, args.leeway);
            emit_report(&records, &buckets, &[], out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let argv = match expand_argv(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Lib(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(exit_code(&f))
        }
    }
}
