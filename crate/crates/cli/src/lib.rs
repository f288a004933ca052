//! Batch experiment runner: parses a run configuration, loads ratings,
//! fits (or reloads) the per-fold cluster models and writes the comparison
//! report.

pub mod cache;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use log::{info, warn};

use hybridrec::evaluation::EvaluationScope;
use hybridrec::evaluation::{
    evaluate, fit_models, prepare_folds, render_csv, render_table, ReportHeader,
};
use hybridrec::{load_movielens, AveragingMode, EvalProtocol, FcmConfig, Method, MethodConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INGEST: i32 = 2;
pub const EXIT_WRITE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "hybridrec",
    version,
    about = "Fuzzy-clustered CF benchmark runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cross-validate one or more recommender configurations.
    Run(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Averaging {
    Micro,
    Macro,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scope {
    TestSet,
    TopNList,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// MovieLens u.data ratings file
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated methods: fcnhsmra, fnhsm, pearson, cosine, mw, hw, all
    #[arg(long, value_delimiter = ',', default_value = "all")]
    method: Vec<String>,
    #[arg(long, default_value_t = 3)]
    clusters: usize,
    #[arg(long, default_value_t = 50)]
    neighbors: usize,
    #[arg(long, default_value_t = 2.0)]
    fuzzifier: f64,
    #[arg(long, default_value_t = 100)]
    max_iterations: usize,
    #[arg(long, default_value_t = 1e-4)]
    tolerance: f64,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 5)]
    repetitions: usize,
    /// Comma-separated Top-N sizes
    #[arg(long, value_delimiter = ',', default_value = "5,10,15,20,30")]
    topn: Vec<usize>,
    /// Ratings at or above this value count as relevant
    #[arg(long, default_value_t = 3)]
    threshold: u8,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Clamp predictions to the rating scale
    #[arg(long, value_enum, default_value_t = Switch::On)]
    clamp: Switch,
    #[arg(long, value_enum, default_value_t = Averaging::Micro)]
    averaging: Averaging,
    /// Which test items enter the confusion matrix
    #[arg(long, value_enum, default_value_t = Scope::TestSet)]
    scope: Scope,
    /// Cluster-model cache file, reused when its header matches the run
    #[arg(long)]
    model_cache: Option<PathBuf>,
    /// Report destination (standard output when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Worker threads, 0 = one per core
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data_path: PathBuf,
    pub methods: Vec<Method>,
    pub clusters: usize,
    pub neighbors: usize,
    pub fuzzifier: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub folds: usize,
    pub repetitions: usize,
    pub top_n: Vec<usize>,
    pub threshold: u8,
    pub seed: u64,
    pub clamp: bool,
    pub averaging: AveragingMode,
    pub scope: EvaluationScope,
    pub model_cache: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub threads: usize,
}

impl RunConfig {
    pub fn protocol(&self) -> EvalProtocol {
        EvalProtocol {
            top_n_values: self.top_n.clone(),
            relevance_threshold: self.threshold,
            folds: self.folds,
            repetitions: self.repetitions,
            seed: self.seed,
            averaging: self.averaging,
            scope: self.scope,
            clustering: FcmConfig {
                cluster_count: self.clusters,
                fuzzifier: self.fuzzifier,
                max_iterations: self.max_iterations,
                tolerance: self.tolerance,
                seed: self.seed,
            },
        }
    }

    pub fn method_configs(&self) -> Vec<MethodConfig> {
        self.methods
            .iter()
            .map(|m| m.config(self.neighbors, self.clamp))
            .collect()
    }
}

fn usage(flag: &str, msg: impl std::fmt::Display) -> clap::Error {
    Cli::command().error(ErrorKind::ValueValidation, format!("--{flag}: {msg}"))
}

/// Parses `argv` (including the program name) into a validated run
/// configuration.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let Command::Run(args) = Cli::try_parse_from(argv)?.command;

    let mut methods = Vec::new();
    for name in &args.method {
        if name.eq_ignore_ascii_case("all") {
            methods.extend(Method::ALL);
        } else {
            let m: Method = name.parse().map_err(|e| usage("method", e))?;
            methods.push(m);
        }
    }
    let mut unique = Vec::new();
    for m in methods {
        if !unique.contains(&m) {
            unique.push(m);
        }
    }

    if args.clusters < 2 {
        return Err(usage("clusters", "must be at least 2"));
    }
    if args.neighbors < 1 {
        return Err(usage("neighbors", "must be at least 1"));
    }
    if !(args.fuzzifier > 1.0 && args.fuzzifier.is_finite()) {
        return Err(usage("fuzzifier", "must be greater than 1"));
    }
    if args.max_iterations < 1 {
        return Err(usage("max-iterations", "must be at least 1"));
    }
    if args.tolerance.is_nan() || args.tolerance <= 0.0 {
        return Err(usage("tolerance", "must be positive"));
    }
    if args.folds < 2 {
        return Err(usage("folds", "must be at least 2"));
    }
    if args.repetitions < 1 {
        return Err(usage("repetitions", "must be at least 1"));
    }
    if args.topn.is_empty() || args.topn[0] == 0 || args.topn.windows(2).any(|w| w[0] >= w[1]) {
        return Err(usage("topn", "must be positive and strictly increasing"));
    }
    if !(1..=5).contains(&args.threshold) {
        return Err(usage("threshold", "must lie on the 1-5 rating scale"));
    }

    Ok(RunConfig {
        data_path: args.data,
        methods: unique,
        clusters: args.clusters,
        neighbors: args.neighbors,
        fuzzifier: args.fuzzifier,
        max_iterations: args.max_iterations,
        tolerance: args.tolerance,
        folds: args.folds,
        repetitions: args.repetitions,
        top_n: args.topn,
        threshold: args.threshold,
        seed: args.seed,
        clamp: args.clamp == Switch::On,
        averaging: match args.averaging {
            Averaging::Micro => AveragingMode::Micro,
            Averaging::Macro => AveragingMode::Macro,
        },
        scope: match args.scope {
            Scope::TestSet => EvaluationScope::TestSet,
            Scope::TopNList => EvaluationScope::TopNList,
        },
        model_cache: args.model_cache,
        output: args.output,
        format: args.format,
        threads: args.threads,
    })
}

/// Executes a run and returns the process exit status.
pub fn run_cli(config: &RunConfig) -> i32 {
    if config.threads > 0 {
        // the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build_global();
    }

    let matrix = match load_movielens(&config.data_path) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {}: {e}", config.data_path.display());
            return EXIT_INGEST;
        }
    };
    info!(
        "loaded {} ratings from {} users over {} items",
        matrix.len(),
        matrix.user_count(),
        matrix.item_count()
    );

    let protocol = config.protocol();
    let folds = match prepare_folds(&matrix, &protocol) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAILURE;
        }
    };
    let checksum = cache::data_checksum(&matrix);
    let key = cache::CacheKey::new(&checksum, &protocol);

    let cached = config.model_cache.as_ref().and_then(|path| {
        if !path.exists() {
            return None;
        }
        match cache::load(path, &key, &folds) {
            Ok(models) => {
                info!("reusing cluster models from {}", path.display());
                Some(models)
            }
            Err(e) => {
                warn!("ignoring model cache {}: {e}; refitting", path.display());
                None
            }
        }
    });
    let models = match cached {
        Some(models) => models,
        None => {
            let models = match fit_models(&folds, &protocol) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_FAILURE;
                }
            };
            if let Some(path) = &config.model_cache {
                if let Err(e) = cache::store(path, &key, &models) {
                    eprintln!("error: writing model cache {}: {e}", path.display());
                    return EXIT_WRITE;
                }
            }
            models
        }
    };
    for (fold, fold_models) in models.iter().enumerate() {
        for (rep, model) in fold_models.iter().enumerate() {
            if !model.empty_clusters.is_empty() {
                warn!(
                    "fold {fold} repetition {rep}: clusters {:?} have no members",
                    model.empty_clusters
                );
            }
        }
    }

    let reports = match evaluate(&folds, &models, &protocol, &config.method_configs()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAILURE;
        }
    };

    let mut header = ReportHeader::default();
    header.push("data", config.data_path.display());
    header.push("data_sha256", &checksum);
    header.push("ratings", matrix.len());
    let names: Vec<&str> = config.methods.iter().map(|m| m.key()).collect();
    header.push("methods", names.join(","));
    header
        .entries
        .extend(ReportHeader::for_protocol(&protocol, &reports).entries);
    header.push(
        "model_cache",
        config
            .model_cache
            .as_ref()
            .map_or("none".to_string(), |p| p.display().to_string()),
    );
    header.push("threads", config.threads);
    header.push(
        "output",
        config
            .output
            .as_ref()
            .map_or("stdout".to_string(), |p| p.display().to_string()),
    );
    header.push(
        "format",
        match config.format {
            Format::Table => "table",
            Format::Csv => "csv",
        },
    );

    let text = match config.format {
        Format::Table => render_table(&header, &reports),
        Format::Csv => render_csv(&header, &reports),
    };
    let written = match &config.output {
        Some(path) => fs::write(path, text.as_bytes()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush())
        }
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: writing report: {e}");
            EXIT_WRITE
        }
    }
}
