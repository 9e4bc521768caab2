//! Query datasets on disk and the false-positive benchmark.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{ccd_oracle, multivariate_ccd, univariate_ccd, CcdError, CcdQuery, CcdResult, QueryKind, Vec3};
use crate::bench_harness::Format;
use crate::interval_core::Strategy;

/// A query with its label; `None` means the exact decision supplies it.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledQuery {
    pub query: CcdQuery,
    pub truth: Option<bool>,
}

fn parse_kind(s: &str) -> Option<QueryKind> {
    match s.trim().to_ascii_lowercase().as_str() {
        "vf" | "vertex-face" => Some(QueryKind::VertexFace),
        "ee" | "edge-edge" => Some(QueryKind::EdgeEdge),
        _ => None,
    }
}

fn parse_coord(s: &str) -> Option<f64> {
    let s = s.trim();
    let lower = s.to_ascii_lowercase();
    if lower.starts_with("0x") || lower.starts_with("-0x") || lower.starts_with("+0x") {
        hexf_parse::parse_hexf64(s, false).ok()
    } else {
        s.parse().ok()
    }
}

/// Reads `kind,` followed by 24 coordinates (the four start positions,
/// then the four end positions) and an optional `0`, `1` or `?` label.
/// Blank lines, `#` comments and a leading header row are skipped.
pub fn read_dataset(text: &str) -> Result<Vec<LabeledQuery>, CcdError> {
    let mut out = Vec::new();
    let mut seen_data = false;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split(',').map(str::trim).collect();
        let err = |message: String| CcdError::Parse { line, message };
        let Some(kind) = parse_kind(fields[0]) else {
            if !seen_data && fields[0].eq_ignore_ascii_case("kind") {
                seen_data = true;
                continue;
            }
            return Err(err(format!("unknown query kind `{}`", fields[0])));
        };
        seen_data = true;
        if fields.len() != 25 && fields.len() != 26 {
            return Err(err(format!("expected 25 or 26 fields, found {}", fields.len())));
        }
        let mut coords = [0.0f64; 24];
        for (i, f) in fields[1..25].iter().enumerate() {
            coords[i] = parse_coord(f).ok_or_else(|| err(format!("bad coordinate `{f}` in field {}", i + 2)))?;
        }
        let truth = match fields.get(25).copied() {
            None | Some("?") | Some("") => None,
            Some("0") => Some(false),
            Some("1") => Some(true),
            Some(other) => return Err(err(format!("bad ground truth `{other}`"))),
        };
        let vertex =
            |o: usize| -> [Vec3; 4] { std::array::from_fn(|i| std::array::from_fn(|k| coords[o + 3 * i + k])) };
        let query = CcdQuery::new(kind, vertex(0), vertex(12)).map_err(|e| err(e.to_string()))?;
        out.push(LabeledQuery { query, truth });
    }
    Ok(out)
}

/// Inverse of [`read_dataset`], with a header row. Coordinates are written
/// in shortest round-trip form.
pub fn write_dataset(queries: &[LabeledQuery]) -> String {
    let mut out = String::from("kind");
    for phase in ["s", "e"] {
        for i in 0..4 {
            for axis in ["x", "y", "z"] {
                out.push_str(&format!(",{axis}{i}{phase}"));
            }
        }
    }
    out.push_str(",ground_truth\n");
    for lq in queries {
        out.push_str(lq.query.kind.name());
        for v in lq.query.start.iter().chain(lq.query.end.iter()) {
            for x in v {
                out.push_str(&format!(",{x:?}"));
            }
        }
        out.push_str(match lq.truth {
            Some(true) => ",1\n",
            Some(false) => ",0\n",
            None => ",?\n",
        });
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CcdMethod {
    Univariate,
    Multivariate,
}

impl CcdMethod {
    pub fn name(self) -> &'static str {
        match self {
            CcdMethod::Univariate => "univariate",
            CcdMethod::Multivariate => "multivariate",
        }
    }

    /// Runs the method. A univariate query whose coplanarity polynomial
    /// vanishes identically is reported as a hit.
    pub fn run(self, q: &CcdQuery, s: Strategy, delta: f64) -> CcdResult {
        match self {
            CcdMethod::Multivariate => multivariate_ccd(q, s, delta),
            CcdMethod::Univariate => univariate_ccd(q, s, delta).unwrap_or(CcdResult { hit: true, t_box: None }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CcdRow {
    pub method: CcdMethod,
    pub strategy: String,
    pub queries: u64,
    pub hits: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub total_ms: f64,
}

/// Runs both methods under every strategy. Ground truth is the label when
/// present, otherwise the exact decision; queries it rejects as degenerate
/// are left out of the counts.
pub fn run_ccd_benchmark(dataset: &[LabeledQuery], strategies: &[Strategy], delta: f64) -> Vec<CcdRow> {
    let labeled: Vec<(&CcdQuery, bool)> = dataset
        .iter()
        .filter_map(|lq| lq.truth.or_else(|| ccd_oracle(&lq.query).ok()).map(|t| (&lq.query, t)))
        .collect();
    let mut rows = Vec::new();
    for method in [CcdMethod::Univariate, CcdMethod::Multivariate] {
        for &s in strategies {
            let mut row = CcdRow {
                method,
                strategy: s.name().to_string(),
                queries: labeled.len() as u64,
                hits: 0,
                false_positives: 0,
                false_negatives: 0,
                total_ms: 0.0,
            };
            let start = Instant::now();
            for (q, truth) in &labeled {
                let hit = method.run(q, s, delta).hit;
                row.hits += hit as u64;
                row.false_positives += (hit && !truth) as u64;
                row.false_negatives += (!hit && *truth) as u64;
            }
            row.total_ms = start.elapsed().as_secs_f64() * 1e3;
            rows.push(row);
        }
    }
    rows
}

/// Benchmark rows as CSV or as a JSON array.
pub fn write_ccd_report(rows: &[CcdRow], format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(rows).expect("serialisable");
            out.push(b'\n');
            out
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["method", "strategy", "queries", "hits", "false_positives", "false_negatives", "total_ms"])
                .expect("in-memory write");
            for r in rows {
                w.write_record([
                    r.method.name().to_string(),
                    r.strategy.clone(),
                    r.queries.to_string(),
                    r.hits.to_string(),
                    r.false_positives.to_string(),
                    r.false_negatives.to_string(),
                    format!("{:.3}", r.total_ms),
                ])
                .expect("in-memory write");
            }
            w.into_inner().expect("in-memory write")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ccd::fixture_suite;

    #[test]
    fn round_trip_and_formats() {
        let suite: Vec<LabeledQuery> =
            fixture_suite().into_iter().take(5).map(|(_, query, t)| LabeledQuery { query, truth: Some(t) }).collect();
        let text = write_dataset(&suite);
        assert_eq!(read_dataset(&text).unwrap(), suite);

        let hex = "# comment\nvf,0x1p-1,0,0, 0,0,0, 1,0,0, 0,1,0, -0x1.8p1,0,0, 0,0,0, 1,0,0, 0,1,0\n\n";
        let parsed = read_dataset(hex).unwrap();
        assert_eq!(parsed[0].query.start[0][0], 0.5);
        assert_eq!(parsed[0].query.end[0][0], -3.0);
        assert_eq!(parsed[0].truth, None);
    }

    #[test]
    fn malformed_rows_name_their_line() {
        let bad = "kind,x\nvf,1,2\n";
        assert!(matches!(read_dataset(bad), Err(CcdError::Parse { line: 2, .. })));
        let row = format!("ee{}", ",0".repeat(24));
        assert!(read_dataset(&format!("{row},2\n")).is_err());
        assert!(read_dataset(&format!("xx{}\n", ",0".repeat(24))).is_err());
        assert!(matches!(
            read_dataset(&format!("{row}\nee{}", ",nan".repeat(24))),
            Err(CcdError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn benchmark_counts() {
        let suite: Vec<LabeledQuery> =
            fixture_suite().into_iter().map(|(_, query, _)| LabeledQuery { query, truth: None }).collect();
        let rows = run_ccd_benchmark(&suite, &[Strategy::PredSucc], 1e-4);
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert_eq!(r.queries as usize, suite.len());
            assert_eq!(r.false_negatives, 0);
            assert!(r.hits >= r.false_positives);
        }
        let csv = String::from_utf8(write_ccd_report(&rows, Format::Csv)).unwrap();
        assert!(csv.starts_with("method,strategy,queries,hits,false_positives,false_negatives,total_ms\n"));
        assert!(csv.contains("\nmultivariate,pred-succ,"));
    }
}
