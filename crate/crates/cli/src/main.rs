use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bcibench_cli::{
    cmd_extract, cmd_report, cmd_run, cmd_select, cmd_synth, cmd_train, configure_jobs,
    exit_code_for, load_config, Overrides, StageStatus, EXIT_CONFIG, EXIT_FAILURE, EXIT_IO,
    EXIT_OK,
};
use bcibench_core::evaluation::CellOutcome;

#[derive(Parser)]
#[command(
    name = "bcibench",
    about = "EEG feature / classifier benchmark pipeline",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Path to the run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Worker threads for parallel stages (default: logical cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Override the config's global seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Score wrapper subsets directly on the held-out third, as the
    /// original protocol did, instead of inner cross-validation.
    #[arg(long)]
    paper_faithful: bool,
    /// Override the output directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: extract, select, train, report.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Exit nonzero if any benchmark cell failed.
        #[arg(long)]
        strict: bool,
        /// Run only the listed stages (comma-separated:
        /// extract,select,train,report).
        #[arg(long, value_delimiter = ',')]
        stage: Vec<String>,
    },
    /// Load, preprocess, window, and extract features into the cache.
    Extract {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the two-stage feature selection from cached features.
    Select {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Train final models on selected subsets from cached selections.
    Train {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Merge cached results into report files.
    Report {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Generate synthetic recordings from a generator spec.
    Synth {
        /// Path to the synthetic-recording spec (JSON).
        #[arg(long)]
        spec: PathBuf,
        /// Base seed; file content is a pure function of (spec, seed).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for the generated CSV files.
        #[arg(long)]
        out: PathBuf,
        /// Number of session files to generate.
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
}

fn overrides_of(common: &CommonArgs) -> Overrides {
    Overrides {
        seed: common.seed,
        paper_faithful: common.paper_faithful,
        output_dir: common.output_dir.clone(),
    }
}

fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Run {
            common,
            strict,
            stage,
        } => {
            configure_jobs(common.jobs);
            let cfg = match load_config(&common.config, &overrides_of(&common)) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            if !stage.is_empty() {
                // partial pipeline: run the listed stages in order
                for s in &stage {
                    let result = match s.as_str() {
                        "extract" => cmd_extract(&cfg).map(|_| ()),
                        "select" => cmd_select(&cfg).map(|_| ()),
                        "train" => cmd_train(&cfg).map(|_| ()),
                        "report" => cmd_report(&cfg).map(|_| ()),
                        other => {
                            eprintln!("error: unknown stage `{other}` (expected extract, select, train, report)");
                            return EXIT_CONFIG;
                        }
                    };
                    if let Err(e) = result {
                        return fail(e);
                    }
                    println!("stage {s}: done");
                }
                return EXIT_OK;
            }
            match cmd_run(&cfg) {
                Ok((report, any_failed)) => {
                    let failed: Vec<String> = report
                        .cells
                        .iter()
                        .filter_map(|c| match &c.outcome {
                            CellOutcome::Failed { error } => Some(format!(
                                "{}/{}/{}: {error}",
                                c.dataset,
                                c.classifier,
                                c.feature_set.name()
                            )),
                            _ => None,
                        })
                        .collect();
                    println!(
                        "report written to {} ({} cells, {} failed)",
                        cfg.output_dir.join("report").display(),
                        report.cells.len(),
                        failed.len()
                    );
                    for f in &failed {
                        eprintln!("failed cell: {f}");
                    }
                    if strict && any_failed {
                        EXIT_FAILURE
                    } else {
                        EXIT_OK
                    }
                }
                Err(e) => fail(e),
            }
        }
        Command::Extract { common } => {
            configure_jobs(common.jobs);
            match load_config(&common.config, &overrides_of(&common)).and_then(|cfg| cmd_extract(&cfg))
            {
                Ok(results) => {
                    for (input, hash, status) in &results {
                        println!(
                            "extract {}: {} rows x {} features [{}] {}",
                            input.id,
                            input.matrix.n_rows,
                            input.matrix.n_cols,
                            &hash[..12],
                            status_str(*status),
                        );
                    }
                    EXIT_OK
                }
                Err(e) => fail(e),
            }
        }
        Command::Select { common } => {
            configure_jobs(common.jobs);
            match load_config(&common.config, &overrides_of(&common)).and_then(|cfg| cmd_select(&cfg))
            {
                Ok(results) => {
                    for (ds, clf, cells, status) in &results {
                        let ok = cells.iter().filter(|c| c.result.is_ok()).count();
                        println!(
                            "select {ds}/{clf}: {ok}/{} feature sets {}",
                            cells.len(),
                            status_str(*status)
                        );
                    }
                    EXIT_OK
                }
                Err(e) => fail(e),
            }
        }
        Command::Train { common } => {
            configure_jobs(common.jobs);
            match load_config(&common.config, &overrides_of(&common)).and_then(|cfg| cmd_train(&cfg))
            {
                Ok(cells) => {
                    let hits = cells
                        .iter()
                        .filter(|(_, s)| *s == StageStatus::CacheHit)
                        .count();
                    println!("train: {} cells ({hits} cached)", cells.len());
                    EXIT_OK
                }
                Err(e) => fail(e),
            }
        }
        Command::Report { common } => {
            configure_jobs(common.jobs);
            match load_config(&common.config, &overrides_of(&common)) {
                Ok(cfg) => match cmd_report(&cfg) {
                    Ok(report) => {
                        println!(
                            "report written to {} ({} classifiers x {} feature sets)",
                            cfg.output_dir.join("report").display(),
                            report.classifiers.len(),
                            report.feature_sets.len()
                        );
                        EXIT_OK
                    }
                    Err(e) => fail(e),
                },
                Err(e) => fail(e),
            }
        }
        Command::Synth {
            spec,
            seed,
            out,
            count,
        } => match cmd_synth(&spec, seed, &out, count) {
            Ok(files) => {
                for f in files {
                    println!("wrote {}", f.display());
                }
                EXIT_OK
            }
            Err(e) => {
                // invalid generator specs are config errors
                let code = match &e {
                    bcibench_core::Error::Serde(_) | bcibench_core::Error::Config { .. } => {
                        EXIT_CONFIG
                    }
                    bcibench_core::Error::Io { .. } => EXIT_IO,
                    _ => EXIT_FAILURE,
                };
                eprintln!("error: {e}");
                code
            }
        },
    }
}

fn status_str(status: StageStatus) -> &'static str {
    match status {
        StageStatus::Computed => "(computed)",
        StageStatus::CacheHit => "(cache hit)",
    }
}

fn fail(e: bcibench_core::Error) -> i32 {
    eprintln!("error: {e}");
    exit_code_for(&e)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(cli) as u8)
}
