//! Correctness, width and timing runs over a corpus, and their reports.

mod report;
mod summary;

use std::collections::BTreeMap;
use std::hint::black_box;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::expr_engine::{eval_float, eval_interval, gen_inputs, CorpusEntry, Env, Program};
use crate::float_kernel::{decompose, ulp_log2};
use crate::interval_core::{make_point, Interval, Strategy};
use crate::rational_oracle::{check_containment, floor_log2, width_exact, Rational, Verdict};
use crate::rng::hash_str;

pub use report::{
    emit_report, read_correctness_csv, read_timing_csv, read_width_csv, Format, Report, ReportConfig, ReportError,
    Rows, StrategyConfig, REPORT_SCHEMA,
};
pub use summary::{summarize, Summary, SummaryError, SummaryRow};

/// Desk-scale input count for correctness and width runs.
pub const DEFAULT_INPUTS: usize = 10_000;
/// Full-scale timing configuration.
pub const FULL_TIMING_INPUTS: usize = 1_000;
pub const FULL_TIMING_REPS: usize = 10_000;
/// Desk-scale timing configuration.
pub const DESK_TIMING_INPUTS: usize = 100;
pub const DESK_TIMING_REPS: usize = 1_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectnessRow {
    pub expr_id: String,
    pub strategy: String,
    pub inputs: u64,
    pub contained: u64,
    pub violated: u64,
    pub undecided: u64,
    pub domain_errors: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WidthHistogram {
    pub expr_id: String,
    pub strategy: String,
    /// `floor(log2(width / ulp(reference)))` to count.
    pub buckets: BTreeMap<i64, u64>,
    pub exact_zero: u64,
    pub unbounded: u64,
    /// Inputs on which evaluation failed.
    pub errors: u64,
}

impl WidthHistogram {
    pub fn total(&self) -> u64 {
        self.buckets.values().sum::<u64>() + self.exact_zero + self.unbounded + self.errors
    }

    /// Median over all measured inputs, with zero widths ranked below every
    /// bucket and unbounded ones above. `None` when nothing was measured.
    pub fn median_bucket(&self) -> Option<MedianBucket> {
        let n = self.exact_zero + self.unbounded + self.buckets.values().sum::<u64>();
        if n == 0 {
            return None;
        }
        // lower median
        let target = (n - 1) / 2;
        if target < self.exact_zero {
            return Some(MedianBucket::Zero);
        }
        let mut seen = self.exact_zero;
        for (b, c) in &self.buckets {
            seen += c;
            if target < seen {
                return Some(MedianBucket::Log2Ulp(*b));
            }
        }
        Some(MedianBucket::Unbounded)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MedianBucket {
    Zero,
    Log2Ulp(i64),
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub expr_id: String,
    pub strategy: String,
    pub inputs: u64,
    pub reps: u64,
    pub total_ms: f64,
}

/// Per-entry input seed, so that adding or reordering entries leaves the
/// inputs of the others unchanged.
pub fn entry_seed(seed: u64, entry: &CorpusEntry) -> u64 {
    seed ^ hash_str(&entry.id)
}

fn entry_inputs(entry: &CorpusEntry, n: usize, seed: u64) -> Option<Vec<Env<f64>>> {
    gen_inputs(entry_seed(seed, entry), &entry.expr, &entry.domains, n).ok()
}

fn points(env: &Env<f64>) -> Env<Interval> {
    // generated inputs are finite
    env.iter().map(|(k, v)| (k.clone(), make_point(*v).expect("finite input"))).collect()
}

fn exact(env: &Env<f64>) -> Env<Rational> {
    env.iter().map(|(k, v)| (k.clone(), decompose(*v).expect("finite input"))).collect()
}

/// Applies `f` to every entry on `jobs` worker threads and returns the
/// results in corpus order.
fn shard<T: Send>(corpus: &[CorpusEntry], jobs: usize, f: impl Fn(&CorpusEntry) -> T + Sync) -> Vec<T> {
    let jobs = jobs.clamp(1, corpus.len().max(1));
    if jobs == 1 {
        return corpus.iter().map(&f).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut results: Vec<(usize, T)> = std::thread::scope(|scope| {
        let workers: Vec<_> = (0..jobs)
            .map(|_| {
                scope.spawn(|| {
                    let mut out = Vec::new();
                    loop {
                        let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        if i >= corpus.len() {
                            break out;
                        }
                        out.push((i, f(&corpus[i])));
                    }
                })
            })
            .collect();
        workers.into_iter().flat_map(|w| w.join().expect("worker panicked")).collect()
    });
    results.sort_by_key(|(i, _)| *i);
    results.into_iter().map(|(_, r)| r).collect()
}

/// Classifies every (entry, strategy, input) with the exact oracle.
///
/// Inputs are drawn once per entry and shared by all strategies. An entry
/// whose domain admits no valid inputs reports every input as a domain
/// error.
pub fn run_correctness(
    corpus: &[CorpusEntry],
    strategies: &[Strategy],
    n_inputs: usize,
    seed: u64,
    jobs: usize,
) -> Vec<CorrectnessRow> {
    shard(corpus, jobs, |entry| {
        let inputs = entry_inputs(entry, n_inputs, seed);
        strategies
            .iter()
            .map(|s| {
                let mut row = CorrectnessRow {
                    expr_id: entry.id.clone(),
                    strategy: s.name().to_string(),
                    inputs: n_inputs as u64,
                    contained: 0,
                    violated: 0,
                    undecided: 0,
                    domain_errors: 0,
                };
                let Some(inputs) = &inputs else {
                    row.domain_errors = n_inputs as u64;
                    return row;
                };
                for env in inputs {
                    let verdict = eval_interval(&entry.expr, &points(env), *s)
                        .ok()
                        .and_then(|iv| check_containment(iv, &entry.expr, &exact(env)).ok());
                    match verdict {
                        Some(Verdict::Contained) => row.contained += 1,
                        Some(Verdict::Violated) => row.violated += 1,
                        Some(Verdict::Undecided) => row.undecided += 1,
                        None => row.domain_errors += 1,
                    }
                }
                row
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Bucket of one interval relative to the round-to-nearest `reference`.
/// When the reference is not finite the interval midpoint stands in.
fn width_bucket(iv: Interval, reference: f64, hist: &mut WidthHistogram) {
    if !iv.is_bounded() {
        hist.unbounded += 1;
        return;
    }
    let w = width_exact(iv).expect("bounded");
    if w == Rational::from_integer(0.into()) {
        hist.exact_zero += 1;
        return;
    }
    let scale = if reference.is_finite() { reference } else { iv.lo() / 2.0 + iv.hi() / 2.0 };
    let bucket = floor_log2(&w) - ulp_log2(scale) as i64;
    *hist.buckets.entry(bucket).or_insert(0) += 1;
}

/// Exact interval widths in ulps of the round-to-nearest value.
pub fn run_width(
    corpus: &[CorpusEntry],
    strategies: &[Strategy],
    n_inputs: usize,
    seed: u64,
    jobs: usize,
) -> Vec<WidthHistogram> {
    shard(corpus, jobs, |entry| {
        let inputs = entry_inputs(entry, n_inputs, seed);
        strategies
            .iter()
            .map(|s| {
                let mut hist =
                    WidthHistogram { expr_id: entry.id.clone(), strategy: s.name().to_string(), ..Default::default() };
                let Some(inputs) = &inputs else {
                    hist.errors = n_inputs as u64;
                    return hist;
                };
                for env in inputs {
                    match (eval_interval(&entry.expr, &points(env), *s), eval_float(&entry.expr, env)) {
                        (Ok(iv), Ok(reference)) => width_bucket(iv, reference, &mut hist),
                        _ => hist.errors += 1,
                    }
                }
                hist
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Wall-clock time of `reps` passes over `n_inputs` inputs per entry and
/// strategy, after one untimed warmup pass.
///
/// Runs on the calling thread only. Every result is folded into an
/// accumulator passed through [`black_box`] so that no evaluation can be
/// optimised away. Evaluation errors end the pass early for that input
/// and are folded in the same way.
pub fn run_timing(
    corpus: &[CorpusEntry],
    strategies: &[Strategy],
    n_inputs: usize,
    reps: usize,
    seed: u64,
) -> Vec<TimingRow> {
    let mut rows = Vec::new();
    for entry in corpus {
        let program = Program::compile(&entry.expr).expect("corpus constants are finite");
        let slots: Vec<Vec<Interval>> = entry_inputs(entry, n_inputs, seed)
            .unwrap_or_default()
            .iter()
            .map(|env| program.slots(&points(env)).expect("inputs bind every variable"))
            .collect();
        for s in strategies {
            let mut stack = program.stack();
            let mut pass = |acc: &mut f64| {
                for input in &slots {
                    match program.run(black_box(input), *s, &mut stack) {
                        Ok(iv) => *acc += iv.lo() + iv.hi(),
                        Err(_) => *acc += 1.0,
                    }
                }
            };
            let mut acc = 0.0;
            pass(&mut acc);
            let start = Instant::now();
            for _ in 0..reps {
                pass(&mut acc);
                acc = black_box(acc);
            }
            let elapsed = start.elapsed();
            black_box(acc);
            rows.push(TimingRow {
                expr_id: entry.id.clone(),
                strategy: s.name().to_string(),
                inputs: slots.len() as u64,
                reps: reps as u64,
                total_ms: elapsed.as_secs_f64() * 1e3,
            });
        }
    }
    rows
}
