use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use gridmatch::gen::{generate, GenConfig};
use gridmatch::io::{read_dataset, to_sets, write_dataset};
use gridmatch::persist::{AnyIndex, Kind};
use gridmatch::report::run_queries;
use gridmatch::validate::{self, Counterexample, RunConfig, Settings, Suite};
use gridmatch::Error;
use gridmatch_core::geometry::{PointSet, DEFAULT_MAX_LEVEL};
use gridmatch_core::index::{QueryMode, QueryOptions, Strategy, DEFAULT_BUDGET};
use gridmatch_core::matching::exact_bottleneck;
use gridmatch_core::pairwise::approx_bottleneck;
use serde_json::json;

const EXIT_USAGE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_COUNTEREXAMPLE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "gridmatch",
    version,
    about = "Approximate bottleneck-distance search over planar point sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum IndexArg {
    Compact,
    Multisnap,
}

impl From<IndexArg> for Kind {
    fn from(a: IndexArg) -> Kind {
        match a {
            IndexArg::Compact => Kind::Compact,
            IndexArg::Multisnap => Kind::MultiSnap,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    PerNode,
    LeafOnly,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Nearest,
    Subset,
    Superset,
}

#[derive(clap::Args)]
struct IndexOpts {
    /// Index to build when the input is a dataset.
    #[arg(long, value_enum, default_value = "compact")]
    index: IndexArg,
    /// Finest grid level.
    #[arg(long, default_value_t = DEFAULT_MAX_LEVEL)]
    dmax: u32,
    /// Multisnap cap on 4^n * dmax.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(clap::Args)]
struct PairArgs {
    /// Dataset holding both sets.
    file: PathBuf,
    /// Id of the first set (default: first record).
    #[arg(long)]
    a: Option<String>,
    /// Id of the second set (default: second record).
    #[arg(long)]
    b: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index from a dataset.
    Build {
        data: PathBuf,
        #[command(flatten)]
        opts: IndexOpts,
        /// Where to write the index.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run queries against an index file or a dataset; prints one JSON report per query.
    Query {
        /// Index file, or a dataset to index in memory.
        #[arg(value_name = "INDEX")]
        source: PathBuf,
        queries: PathBuf,
        #[command(flatten)]
        opts: IndexOpts,
        #[arg(long, value_enum, default_value = "nearest")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "auto")]
        strategy: StrategyArg,
        /// Add exact distances and sort matches by them.
        #[arg(long)]
        rescore: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Exact bottleneck distance between two sets.
    Dist {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Grid-level estimate of the bottleneck distance between two sets.
    DistApprox {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = DEFAULT_MAX_LEVEL)]
        dmax: u32,
        /// Also compute the exact distance and the realized ratio.
        #[arg(long)]
        oracle: bool,
    },
    /// Generate a random dataset and perturbed queries.
    Gen {
        #[arg(long, default_value_t = 100)]
        sets: usize,
        #[arg(long, default_value_t = 1)]
        min_size: usize,
        #[arg(long, default_value_t = 6)]
        max_size: usize,
        /// Largest coordinate shift of a query point.
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        queries: PathBuf,
    },
    /// Run the randomized validation suites.
    Validate {
        #[arg(long, value_enum, default_value = "compact")]
        index: IndexArg,
        /// Trials per suite.
        #[arg(long, default_value_t = 100)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 14)]
        dmax: u32,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Only these suites (repeatable).
        #[arg(long, value_enum)]
        suite: Vec<SuiteArg>,
        /// Directory for counterexample dumps.
        #[arg(long, default_value = ".")]
        dump: PathBuf,
        /// Re-check a dumped counterexample instead of running suites.
        #[arg(long)]
        replay: Option<PathBuf>,
        /// Match identical grid points only; the suites must catch this.
        #[arg(long)]
        inject_fault: bool,
    },
    /// Sizes of an index file or of the index built from a dataset.
    Stats {
        /// Index file, or a dataset to index in memory.
        #[arg(value_name = "INDEX")]
        source: PathBuf,
        #[command(flatten)]
        opts: IndexOpts,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Oracle,
    Windows,
    Approx,
    Strategy,
    Pairwise,
    Subset,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Oracle => Suite::Oracle,
            SuiteArg::Windows => Suite::Windows,
            SuiteArg::Approx => Suite::Approx,
            SuiteArg::Strategy => Suite::Strategy,
            SuiteArg::Pairwise => Suite::Pairwise,
            SuiteArg::Subset => Suite::Subset,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let _ = writeln!(
                std::io::stderr(),
                "{}",
                json!({"error": e.code(), "message": e.to_string()})
            );
            match e {
                Error::Usage(_) | Error::Io { .. } => ExitCode::from(EXIT_USAGE),
                Error::Invalid { .. } | Error::Core(_) => ExitCode::from(EXIT_INVALID),
            }
        }
    }
}

/// Writes one line to stdout; a closed pipe ends the output quietly.
fn emit(line: &str) -> bool {
    writeln!(std::io::stdout().lock(), "{line}").is_ok()
}

fn print_json(value: &serde_json::Value) {
    emit(&serde_json::to_string(value).expect("json values serialize"));
}

/// Loads an index file, or builds one from a dataset.
fn open_index(path: &Path, opts: &IndexOpts) -> Result<AnyIndex, Error> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"GMIX") {
        return AnyIndex::from_bytes(&bytes);
    }
    let records = read_dataset(path)?;
    AnyIndex::build(opts.index.into(), opts.dmax, opts.budget, to_sets(&records))
}

fn pick_pair(pair: &PairArgs) -> Result<(PointSet, PointSet), Error> {
    let records = read_dataset(&pair.file)?;
    let find = |id: &Option<String>, default: usize| -> Result<PointSet, Error> {
        let record = match id {
            Some(id) => records.iter().find(|r| &r.id == id),
            None => records.get(default),
        };
        let record = record.ok_or_else(|| match id {
            Some(id) => Error::Usage(format!("no record with id {id:?}")),
            None => Error::Usage("the dataset needs two records".into()),
        })?;
        Ok(record.to_set()?)
    };
    Ok((find(&pair.a, 0)?, find(&pair.b, 1)?))
}

fn stats_json(index: &AnyIndex) -> serde_json::Value {
    let tries: Vec<_> = index
        .trie_sizes()
        .into_iter()
        .map(|(k, nodes, leaves)| json!({"cardinality": k, "nodes": nodes, "leaves": leaves}))
        .collect();
    json!({
        "index": index.kind().name(),
        "max_level": index.max_level(),
        "sets": index.registry().len(),
        "nodes": index.node_count(),
        "tries": tries,
    })
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Build { data, opts, output } => {
            let records = read_dataset(&data)?;
            let start = Instant::now();
            let index = AnyIndex::build(opts.index.into(), opts.dmax, opts.budget, to_sets(&records))?;
            let mut summary = stats_json(&index);
            summary["build_ms"] = json!(start.elapsed().as_secs_f64() * 1e3);
            if let Some(out) = output {
                index.save(&out)?;
                summary["output"] = json!(out.display().to_string());
            }
            print_json(&summary);
        }
        Command::Query {
            source,
            queries,
            opts,
            mode,
            strategy,
            rescore,
            jobs,
        } => {
            let index = open_index(&source, &opts)?;
            let queries = to_sets(&read_dataset(&queries)?);
            let mode = match mode {
                ModeArg::Nearest => QueryMode::Nearest,
                ModeArg::Subset => QueryMode::Subset,
                ModeArg::Superset => QueryMode::Superset,
            };
            let strategy = match strategy {
                StrategyArg::PerNode => Strategy::PerNode,
                StrategyArg::LeafOnly => Strategy::LeafOnly,
                StrategyArg::Auto => Strategy::Auto,
            };
            let options = QueryOptions {
                strategy,
                ..Default::default()
            };
            for report in run_queries(&index, &queries, mode, &options, rescore, jobs)? {
                if !emit(&serde_json::to_string(&report).expect("reports serialize")) {
                    break;
                }
            }
        }
        Command::Dist { pair } => {
            let (a, b) = pick_pair(&pair)?;
            let d = exact_bottleneck(a.points(), b.points())?;
            print_json(&json!({"a": a.id(), "b": b.id(), "distance": d}));
        }
        Command::DistApprox { pair, dmax, oracle } => {
            let (a, b) = pick_pair(&pair)?;
            let r = approx_bottleneck(&a, &b, dmax)?;
            let mut out = json!({
                "a": a.id(),
                "b": b.id(),
                "estimate": r.estimate,
                "d_star": r.d_star,
                "lower": r.lower,
                "upper": r.upper,
                "claimed_upper": r.claimed_upper,
                "at_resolution_floor": r.at_resolution_floor,
            });
            if oracle {
                let exact = exact_bottleneck(a.points(), b.points())?;
                out["exact"] = json!(exact);
                out["ratio"] = if exact > 0.0 {
                    json!(r.estimate / exact)
                } else {
                    json!(null)
                };
            }
            print_json(&out);
        }
        Command::Gen {
            sets,
            min_size,
            max_size,
            eps,
            seed,
            data,
            queries,
        } => {
            if min_size == 0 || min_size > max_size {
                return Err(Error::Usage("need 1 <= --min-size <= --max-size".into()));
            }
            if !(0.0..=1.0).contains(&eps) {
                return Err(Error::Usage("--eps must lie in [0, 1]".into()));
            }
            let (d, q) = generate(&GenConfig {
                sets,
                min_size,
                max_size,
                eps,
                seed,
            });
            write_dataset(&data, &d)?;
            write_dataset(&queries, &q)?;
        }
        Command::Validate {
            index,
            size,
            seed,
            dmax,
            jobs,
            suite,
            dump,
            replay,
            inject_fault,
        } => {
            if let Some(path) = replay {
                return replay_file(&path);
            }
            let config = RunConfig {
                settings: Settings {
                    index: index.into(),
                    max_level: dmax,
                    fault: inject_fault,
                },
                suites: if suite.is_empty() {
                    Suite::ALL.to_vec()
                } else {
                    suite.into_iter().map(Suite::from).collect()
                },
                size,
                seed,
                jobs,
            };
            if dmax == 0 || dmax > gridmatch_core::geometry::LEVEL_LIMIT {
                return Err(Error::Usage(format!(
                    "--dmax must lie in 1..={}",
                    gridmatch_core::geometry::LEVEL_LIMIT
                )));
            }
            let summary = validate::run(&config)?;
            emit(summary.table().trim_end());
            if summary.passed() {
                emit("all hard assertions held");
                return Ok(ExitCode::SUCCESS);
            }
            fs::create_dir_all(&dump).map_err(|e| Error::io(&dump, e))?;
            let mut dumped = std::collections::HashSet::new();
            for cx in &summary.counterexamples {
                eprintln!(
                    "counterexample: {} trial {}: {}",
                    cx.suite.name(),
                    cx.trial,
                    cx.message
                );
                // One dump per suite is enough to replay.
                if dumped.insert(cx.suite.name()) {
                    let path = dump.join(format!("counterexample-{}-{}.json", cx.suite.name(), cx.trial));
                    let text = serde_json::to_string_pretty(cx).expect("counterexamples serialize");
                    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
                    eprintln!("  written to {}", path.display());
                }
            }
            return Ok(ExitCode::from(EXIT_COUNTEREXAMPLE));
        }
        Command::Stats { source, opts } => {
            let index = open_index(&source, &opts)?;
            print_json(&stats_json(&index));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn replay_file(path: &Path) -> Result<ExitCode, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let cx: Counterexample = serde_json::from_str(&text).map_err(|e| Error::Invalid {
        origin: path.display().to_string(),
        line: e.line(),
        message: e.to_string(),
    })?;
    match validate::replay(&cx)? {
        Some(message) => {
            emit(&format!("reproduced: {}: {message}", cx.suite.name()));
            Ok(ExitCode::from(EXIT_COUNTEREXAMPLE))
        }
        None => {
            emit(&format!("not reproduced: {} now passes", cx.suite.name()));
            Ok(ExitCode::SUCCESS)
        }
    }
}
