use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use super::{CorrectnessRow, MedianBucket, TimingRow, WidthHistogram};
use crate::expr_engine::{CorpusEntry, ExprClass};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SummaryError {
    #[error("no {0} rows")]
    IncompleteData(&'static str),
    #[error("strategy `{strategy}` has no {section} rows")]
    MissingStrategy { strategy: String, section: &'static str },
    #[error("expression `{0}` is not in the corpus")]
    UnknownEntry(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub strategy: String,
    /// Per class: no violated and no undecided verdicts.
    pub correct: BTreeMap<ExprClass, bool>,
    /// 1 is the tightest.
    pub width_rank: usize,
    /// 1 is the fastest.
    pub speed_rank: usize,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub classes: Vec<ExprClass>,
    pub rows: Vec<SummaryRow>,
}

/// Assigns ranks 1..n by ascending score; ties go to the earlier strategy.
fn ranks(strategies: &[String], score: impl Fn(&str) -> f64) -> BTreeMap<String, usize> {
    let mut order: Vec<(f64, usize)> = strategies.iter().enumerate().map(|(i, s)| (score(s), i)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    order.into_iter().enumerate().map(|(rank, (_, i))| (strategies[i].clone(), rank + 1)).collect()
}

/// Per-strategy correctness by class, width rank and speed rank.
///
/// The width rank orders strategies by their mean per-expression rank of
/// the median ulp bucket; the speed rank orders them by total time.
pub fn summarize(
    corpus: &[CorpusEntry],
    correctness: &[CorrectnessRow],
    width: &[WidthHistogram],
    timing: &[TimingRow],
) -> Result<Summary, SummaryError> {
    if correctness.is_empty() {
        return Err(SummaryError::IncompleteData("correctness"));
    }
    if width.is_empty() {
        return Err(SummaryError::IncompleteData("width"));
    }
    if timing.is_empty() {
        return Err(SummaryError::IncompleteData("timing"));
    }
    let class_of: BTreeMap<&str, ExprClass> = corpus.iter().map(|e| (e.id.as_str(), e.class)).collect();
    let mut strategies: Vec<String> = Vec::new();
    for s in correctness.iter().map(|r| &r.strategy) {
        if !strategies.contains(s) {
            strategies.push(s.clone());
        }
    }
    let has = |names: &mut dyn Iterator<Item = &String>| names.cloned().collect::<BTreeSet<String>>();
    let in_width = has(&mut width.iter().map(|h| &h.strategy));
    let in_timing = has(&mut timing.iter().map(|t| &t.strategy));
    for s in &strategies {
        if !in_width.contains(s) {
            return Err(SummaryError::MissingStrategy { strategy: s.clone(), section: "width" });
        }
        if !in_timing.contains(s) {
            return Err(SummaryError::MissingStrategy { strategy: s.clone(), section: "timing" });
        }
    }

    let mut correct: BTreeMap<&str, BTreeMap<ExprClass, bool>> = BTreeMap::new();
    for r in correctness {
        let class = *class_of.get(r.expr_id.as_str()).ok_or_else(|| SummaryError::UnknownEntry(r.expr_id.clone()))?;
        let ok = r.violated == 0 && r.undecided == 0;
        *correct.entry(&r.strategy).or_default().entry(class).or_insert(true) &= ok;
    }
    let classes: Vec<ExprClass> =
        correct.values().flat_map(|m| m.keys().copied()).collect::<BTreeSet<_>>().into_iter().collect();

    // per expression, rank strategies by median bucket (ties share the
    // lower rank), then average
    let mut per_expr: BTreeMap<&str, Vec<(&str, Option<MedianBucket>)>> = BTreeMap::new();
    for h in width {
        per_expr.entry(&h.expr_id).or_default().push((&h.strategy, h.median_bucket()));
    }
    let mut width_score: BTreeMap<&str, f64> = BTreeMap::new();
    for medians in per_expr.values() {
        for (s, m) in medians {
            let better = medians.iter().filter(|(_, other)| other.is_some() && (m.is_none() || other < m)).count();
            *width_score.entry(s).or_default() += (better + 1) as f64 / per_expr.len() as f64;
        }
    }
    let mut total_ms: BTreeMap<&str, f64> = BTreeMap::new();
    for t in timing {
        *total_ms.entry(&t.strategy).or_default() += t.total_ms;
    }
    let width_rank = ranks(&strategies, |s| width_score.get(s).copied().unwrap_or(f64::INFINITY));
    let speed_rank = ranks(&strategies, |s| total_ms[s]);

    let rows = strategies
        .iter()
        .map(|s| SummaryRow {
            strategy: s.clone(),
            correct: correct.remove(s.as_str()).unwrap_or_default(),
            width_rank: width_rank[s],
            speed_rank: speed_rank[s],
            total_ms: total_ms[s.as_str()],
        })
        .collect();
    Ok(Summary { classes, rows })
}

impl Summary {
    /// Fixed-width text table, one line per strategy.
    pub fn to_table(&self) -> String {
        let mut out = format!("{:<16}", "strategy");
        for c in &self.classes {
            let _ = write!(out, " {:<16}", c.name());
        }
        let _ = writeln!(out, " {:>10} {:>10} {:>12}", "width_rank", "speed_rank", "total_ms");
        for r in &self.rows {
            let _ = write!(out, "{:<16}", r.strategy);
            for c in &self.classes {
                let cell = match r.correct.get(c) {
                    Some(true) => "pass",
                    Some(false) => "FAIL",
                    None => "-",
                };
                let _ = write!(out, " {cell:<16}");
            }
            let _ = writeln!(out, " {:>10} {:>10} {:>12.3}", r.width_rank, r.speed_rank, r.total_ms);
        }
        out
    }
}
