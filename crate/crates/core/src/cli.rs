//! Command-line front end. Data goes to files or stdout, messages to
//! stderr; the exit code is 0 on success, 1 when verification fails and 2
//! on usage or I/O errors.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench_harness::{
    emit_report, entry_seed, read_correctness_csv, read_timing_csv, read_width_csv, run_correctness, run_timing,
    run_width, summarize, Format, Report, ReportConfig, Rows, DEFAULT_INPUTS, DESK_TIMING_INPUTS, DESK_TIMING_REPS,
};
use crate::ccd::{fixture_suite, read_dataset, run_ccd_benchmark, write_ccd_report, LabeledQuery, DEFAULT_DELTA};
use crate::expr_engine::{builtin_corpus, eval_interval, gen_inputs, read_corpus, write_corpus, CorpusEntry};
use crate::float_kernel::decompose;
use crate::interval_core::{make_point, Strategy};
use crate::rational_oracle::{export_query, VerificationQuery};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Inputs per entry and strategy for `export-queries` unless `--inputs` is given.
const EXPORT_INPUTS: usize = 100;

#[derive(Parser, Debug)]
#[command(name = "intervalis", version, about = "Verified interval arithmetic benchmarks")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the corpus as TSV.
    Corpus(Common),
    /// Classify every interval result with the exact oracle.
    Check(Common),
    /// Histogram exact interval widths in ulps.
    Width(Common),
    /// Time interval evaluation over the corpus.
    Time(Common),
    /// Run both CCD root finders against exact ground truth.
    Ccd(CcdArgs),
    /// Write exact verification queries, one per line.
    ExportQueries(Common),
    /// Rank strategies from earlier check, width and time CSVs.
    Summarize(SummarizeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    PredSucc,
    Multiplicative,
    /// Both pred-succ and multiplicative.
    All,
    #[value(hide = true)]
    Unwidened,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct Shared {
    #[arg(long, env = "INTERVALIS_SEED", default_value_t = 42)]
    seed: u64,
    /// Widening strategy; repeatable.
    #[arg(long = "strategy", value_enum, default_values_t = [StrategyArg::All])]
    strategies: Vec<StrategyArg>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args, Debug)]
struct Common {
    #[command(flatten)]
    shared: Shared,
    /// Inputs per entry.
    #[arg(long)]
    inputs: Option<usize>,
    /// Timed passes per entry and strategy.
    #[arg(long, default_value_t = DESK_TIMING_REPS)]
    reps: usize,
    /// Inputs per entry for timing.
    #[arg(long, default_value_t = DESK_TIMING_INPUTS)]
    timing_inputs: usize,
    /// Worker threads for check and width.
    #[arg(long)]
    jobs: Option<usize>,
    /// Corpus TSV to use instead of the built-in corpus.
    #[arg(long)]
    corpus: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CcdArgs {
    #[command(flatten)]
    shared: Shared,
    /// Bisection tolerance in parameter units.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    /// Query CSV to use instead of the built-in fixtures.
    #[arg(long)]
    dataset: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SummarizeArgs {
    /// Directory holding correctness.csv, width.csv and timing.csv.
    #[arg(long, default_value = "results")]
    from: PathBuf,
    /// Corpus TSV the results were produced from.
    #[arg(long)]
    corpus: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn strategies(args: &[StrategyArg]) -> Vec<Strategy> {
    let mut out: Vec<Strategy> = Vec::new();
    let mut add = |s: Strategy| {
        if !out.contains(&s) {
            out.push(s);
        }
    };
    for a in args {
        match a {
            StrategyArg::PredSucc => add(Strategy::PredSucc),
            StrategyArg::Multiplicative => add(Strategy::multiplicative_default()),
            StrategyArg::All => {
                add(Strategy::PredSucc);
                add(Strategy::multiplicative_default());
            }
            StrategyArg::Unwidened => add(Strategy::Unwidened),
        }
    }
    out
}

fn load_corpus(path: Option<&Path>) -> Result<Vec<CorpusEntry>, Failure> {
    match path {
        None => Ok(builtin_corpus()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure(format!("{}: {e}", p.display())))?;
            read_corpus(&text).map_err(|e| Failure(format!("{}: {e}", p.display())))
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Failure(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(path, bytes).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn jobs(requested: Option<usize>) -> usize {
    requested.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1)
}

fn report_path(shared: &Shared, stem: &str) -> PathBuf {
    shared.out.join(format!("{stem}.{}", Format::from(shared.format).extension()))
}

fn run_command(cmd: Command) -> Result<i32, Failure> {
    match cmd {
        Command::Corpus(c) => {
            let corpus = load_corpus(c.corpus.as_deref())?;
            let path = c.shared.out.join("corpus.tsv");
            write_file(&path, write_corpus(&corpus).as_bytes())?;
            eprintln!("wrote {} entries to {}", corpus.len(), path.display());
            Ok(EXIT_OK)
        }
        Command::Check(c) => {
            let corpus = load_corpus(c.corpus.as_deref())?;
            let ss = strategies(&c.shared.strategies);
            let n = c.inputs.unwrap_or(DEFAULT_INPUTS);
            let rows = run_correctness(&corpus, &ss, n, c.shared.seed, jobs(c.jobs));
            let (violated, undecided) = rows.iter().fold((0, 0), |(v, u), r| (v + r.violated, u + r.undecided));
            for r in rows.iter().filter(|r| r.violated > 0 || r.undecided > 0) {
                eprintln!("{} {}: {} violated, {} undecided", r.expr_id, r.strategy, r.violated, r.undecided);
            }
            let path = report_path(&c.shared, "correctness");
            let config = ReportConfig::new(c.shared.seed, n, None, &ss);
            emit_report(&Report { config, rows: Rows::Correctness(rows) }, c.shared.format.into(), &path)?;
            eprintln!("wrote {}", path.display());
            Ok(if violated > 0 || undecided > 0 { EXIT_VERIFICATION_FAILED } else { EXIT_OK })
        }
        Command::Width(c) => {
            let corpus = load_corpus(c.corpus.as_deref())?;
            let ss = strategies(&c.shared.strategies);
            let n = c.inputs.unwrap_or(DEFAULT_INPUTS);
            let rows = run_width(&corpus, &ss, n, c.shared.seed, jobs(c.jobs));
            let path = report_path(&c.shared, "width");
            let config = ReportConfig::new(c.shared.seed, n, None, &ss);
            emit_report(&Report { config, rows: Rows::Width(rows) }, c.shared.format.into(), &path)?;
            eprintln!("wrote {}", path.display());
            Ok(EXIT_OK)
        }
        Command::Time(c) => {
            let corpus = load_corpus(c.corpus.as_deref())?;
            let ss = strategies(&c.shared.strategies);
            let rows = run_timing(&corpus, &ss, c.timing_inputs, c.reps, c.shared.seed);
            let path = report_path(&c.shared, "timing");
            let config = ReportConfig::new(c.shared.seed, c.timing_inputs, Some(c.reps), &ss);
            emit_report(&Report { config, rows: Rows::Timing(rows) }, c.shared.format.into(), &path)?;
            eprintln!("wrote {}", path.display());
            Ok(EXIT_OK)
        }
        Command::Ccd(c) => {
            if !(c.delta > 0.0 && c.delta.is_finite()) {
                return Err(Failure(format!("--delta must be positive, got {}", c.delta)));
            }
            let dataset: Vec<LabeledQuery> = match &c.dataset {
                Some(p) => {
                    let text = std::fs::read_to_string(p).map_err(|e| Failure(format!("{}: {e}", p.display())))?;
                    read_dataset(&text).map_err(|e| Failure(format!("{}: {e}", p.display())))?
                }
                None => {
                    fixture_suite().into_iter().map(|(_, query, t)| LabeledQuery { query, truth: Some(t) }).collect()
                }
            };
            let rows = run_ccd_benchmark(&dataset, &strategies(&c.shared.strategies), c.delta);
            let path = report_path(&c.shared, "ccd");
            write_file(&path, &write_ccd_report(&rows, c.shared.format.into()))?;
            eprintln!("wrote {}", path.display());
            let missed: u64 = rows.iter().map(|r| r.false_negatives).sum();
            if missed > 0 {
                eprintln!("{missed} false negatives");
                return Ok(EXIT_VERIFICATION_FAILED);
            }
            Ok(EXIT_OK)
        }
        Command::ExportQueries(c) => {
            let corpus = load_corpus(c.corpus.as_deref())?;
            let ss = strategies(&c.shared.strategies);
            let n = c.inputs.unwrap_or(EXPORT_INPUTS);
            let mut out = String::new();
            let mut skipped = 0usize;
            for entry in &corpus {
                let Ok(inputs) = gen_inputs(entry_seed(c.shared.seed, entry), &entry.expr, &entry.domains, n) else {
                    eprintln!("{}: no valid inputs", entry.id);
                    continue;
                };
                for env in &inputs {
                    let points =
                        env.iter().map(|(k, v)| Ok((k.clone(), make_point(*v)?))).collect::<Result<_, Failure>>()?;
                    let exact =
                        env.iter().map(|(k, v)| Ok((k.clone(), decompose(*v)?))).collect::<Result<_, Failure>>()?;
                    for s in &ss {
                        let query = eval_interval(&entry.expr, &points, *s)
                            .ok()
                            .and_then(|iv| VerificationQuery::from_interval(&entry.expr, &exact, iv).ok());
                        match query {
                            Some(q) => {
                                out.push_str(&export_query(&q));
                                out.push('\n');
                            }
                            None => skipped += 1,
                        }
                    }
                }
            }
            let path = c.shared.out.join("queries.txt");
            write_file(&path, out.as_bytes())?;
            eprintln!("wrote {} ({skipped} unbounded or failed results skipped)", path.display());
            Ok(EXIT_OK)
        }
        Command::Summarize(a) => {
            let corpus = load_corpus(a.corpus.as_deref())?;
            let correctness = read_correctness_csv(&a.from.join("correctness.csv"))?;
            let width = read_width_csv(&a.from.join("width.csv"))?;
            let timing = read_timing_csv(&a.from.join("timing.csv"))?;
            let summary = summarize(&corpus, &correctness, &width, &timing)?;
            std::io::stdout().write_all(summary.to_table().as_bytes())?;
            let failed = summary.rows.iter().any(|r| r.correct.values().any(|ok| !ok));
            Ok(if failed { EXIT_VERIFICATION_FAILED } else { EXIT_OK })
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run_command(cli.command) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}
