use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::ast::Expr;
use super::gen::{gen_expr, ExprClass};
use super::parse::{parse, parse_number, ParseError};

/// Default per-variable input range.
pub const DEFAULT_DOMAIN: (f64, f64) = (-100.0, 100.0);

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusEntry {
    pub id: String,
    pub expr: Expr,
    pub class: ExprClass,
    /// Closed input range for every free variable.
    pub domains: BTreeMap<String, (f64, f64)>,
}

impl CorpusEntry {
    /// Entry whose variables all range over [`DEFAULT_DOMAIN`].
    pub fn new(id: &str, class: ExprClass, expr: Expr) -> Self {
        let domains = expr.free_vars().into_iter().map(|v| (v, DEFAULT_DOMAIN)).collect();
        CorpusEntry { id: id.to_string(), expr, class, domains }
    }

    fn parsed(id: &str, class: ExprClass, text: &str) -> Self {
        Self::new(id, class, parse(text).expect("builtin expression parses"))
    }
}

pub const EQ1: &str = "(- (- (/ (* a (+ a (* b c))) (+ b (* c d))) (/ (* d (+ e (/ f g))) (+ g h))) (/ i j))";
pub const EQ2: &str = "(cos (* (cos (+ (cos f) (exp (/ d c)))) (sin (- (+ (+ (sqrt e) a) b) (sqrt (+ d c))))))";
pub const EQ3: &str = "(exp (sqrt (exp (sqrt (exp (sqrt a))))))";
pub const EQ4: &str =
    "(exp (/ (sqrt (/ (exp (cos (/ a d))) (exp (cos (sqrt f))))) (sqrt (/ (cos (cos (cos c))) (sqrt (sin (cos b)))))))";
pub const POLAR_X: &str = "(* r (cos (* theta (/ 3.14159265359 180.0))))";
pub const SINE_ORDER3: &str = "(- (* 0.954929658551372 x0) (* 0.12900613773279798 (* (* x0 x0) x0)))";

/// Seed from which the generated composite entries derive theirs.
pub const CORPUS_SEED: u64 = 2021;

/// `(seed offset, n_ops)` of the generated arithmetic composites. Offsets
/// whose expressions admit no valid inputs on the default domain are skipped.
const ARITH_ENTRIES: [(u64, usize); 9] = [(0, 4), (1, 5), (2, 6), (3, 7), (4, 8), (5, 9), (6, 10), (7, 11), (8, 12)];
const MIXED_ENTRIES: [(u64, usize); 7] = [(100, 4), (101, 5), (102, 6), (103, 7), (104, 8), (105, 9), (106, 10)];

/// The 30 benchmark expressions.
pub fn builtin_corpus() -> Vec<CorpusEntry> {
    use ExprClass::*;
    let mut out = Vec::with_capacity(30);
    for (id, text) in [("add", "(+ a b)"), ("sub", "(- a b)"), ("mul", "(* a b)"), ("div", "(/ a b)")] {
        out.push(CorpusEntry::parsed(id, SingleArith, text));
    }
    for f in ["sqrt", "exp", "sin", "cos"] {
        out.push(CorpusEntry::parsed(f, SingleTransc, &format!("({f} a)")));
    }
    for (i, (offset, n)) in ARITH_ENTRIES.iter().enumerate() {
        let e = gen_expr(CORPUS_SEED + offset, CompositeArith, *n).expect("valid generator arguments");
        out.push(CorpusEntry::new(&format!("arith-{:02}", i + 1), CompositeArith, e));
    }
    out.push(CorpusEntry::parsed("eq1", CompositeArith, EQ1));
    for (i, (offset, n)) in MIXED_ENTRIES.iter().enumerate() {
        let e = gen_expr(CORPUS_SEED + offset, CompositeMixed, *n).expect("valid generator arguments");
        out.push(CorpusEntry::new(&format!("mixed-{:02}", i + 1), CompositeMixed, e));
    }
    out.push(CorpusEntry::parsed("eq2", CompositeMixed, EQ2));
    out.push(CorpusEntry::parsed("eq3", CompositeMixed, EQ3));
    out.push(CorpusEntry::parsed("eq4", CompositeMixed, EQ4));
    out.push(CorpusEntry::parsed("polarToCarthesian-x", Regression, POLAR_X));
    out.push(CorpusEntry::parsed("sineOrder3", Regression, SINE_ORDER3));
    out
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorpusError {
    #[error("line {line}: expected 4 tab-separated fields")]
    Fields { line: usize },
    #[error("line {line}: unknown class `{class}`")]
    Class { line: usize, class: String },
    #[error("line {line}: {source}")]
    Expr {
        line: usize,
        #[source]
        source: ParseError,
    },
    #[error("line {line}: invalid domain `{text}`")]
    Domain { line: usize, text: String },
    #[error("line {line}: variable `{var}` has no domain")]
    MissingDomain { line: usize, var: String },
}

fn format_domains(domains: &BTreeMap<String, (f64, f64)>) -> String {
    let mut out = String::new();
    for (i, (v, (lo, hi))) in domains.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v}:{lo:?}:{hi:?}");
    }
    out
}

/// One `id<TAB>class<TAB>sexpr<TAB>domains` line per entry, where domains
/// reads `a:-100.0:100.0,b:...`.
pub fn write_corpus(entries: &[CorpusEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", e.id, e.class.name(), e.expr, format_domains(&e.domains));
    }
    out
}

/// Inverse of [`write_corpus`]. Blank lines and lines starting with `#`
/// are skipped.
pub fn read_corpus(text: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 4 {
            return Err(CorpusError::Fields { line });
        }
        let class =
            ExprClass::from_name(fields[1]).ok_or_else(|| CorpusError::Class { line, class: fields[1].to_string() })?;
        let expr = parse(fields[2]).map_err(|source| CorpusError::Expr { line, source })?;
        let mut domains = BTreeMap::new();
        for d in fields[3].split(',').filter(|d| !d.is_empty()) {
            let bad = || CorpusError::Domain { line, text: d.to_string() };
            let parts: Vec<&str> = d.split(':').collect();
            let [v, lo, hi] = parts[..] else {
                return Err(bad());
            };
            let lo = parse_number(lo).ok_or_else(bad)?;
            let hi = parse_number(hi).ok_or_else(bad)?;
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(bad());
            }
            domains.insert(v.to_string(), (lo, hi));
        }
        if let Some(var) = expr.free_vars().into_iter().find(|v| !domains.contains_key(v)) {
            return Err(CorpusError::MissingDomain { line, var });
        }
        out.push(CorpusEntry { id: fields[0].to_string(), expr, class, domains });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_shape() {
        let c = builtin_corpus();
        assert_eq!(c.len(), 30);
        let count = |k: ExprClass| c.iter().filter(|e| e.class == k).count();
        assert_eq!(count(ExprClass::SingleArith), 4);
        assert_eq!(count(ExprClass::SingleTransc), 4);
        assert_eq!(count(ExprClass::CompositeArith), 10);
        assert_eq!(count(ExprClass::CompositeMixed), 10);
        assert_eq!(count(ExprClass::Regression), 2);
        for e in c.iter().filter(|e| e.class != ExprClass::Regression) {
            let arith_only = matches!(e.class, ExprClass::SingleArith | ExprClass::CompositeArith);
            assert_eq!(arith_only, !e.expr.has_transcendental(), "{}", e.id);
            assert!(e.expr.free_vars().iter().all(|v| e.domains.contains_key(v)));
        }
        let texts: Vec<String> = c.iter().map(|e| e.expr.to_text()).collect();
        assert!(texts.iter().any(|t| t.contains("(cos (+ (cos f) (exp (/ d c))))")));
        assert!(texts.iter().any(|t| t.contains("(exp (cos (/ a d)))")));
        let ids: std::collections::BTreeSet<&str> = c.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids.len(), 30);
    }

    #[test]
    fn tsv_round_trip() {
        let c = builtin_corpus();
        assert_eq!(read_corpus(&write_corpus(&c)).unwrap(), c);
    }

    #[test]
    fn tsv_errors() {
        assert_eq!(read_corpus("x\tregression\ta"), Err(CorpusError::Fields { line: 1 }));
        assert!(matches!(read_corpus("x\tbogus\ta\ta:0:1"), Err(CorpusError::Class { .. })));
        assert!(matches!(read_corpus("\n# c\nx\tregression\t(+ a\ta:0:1"), Err(CorpusError::Expr { line: 3, .. })));
        assert!(matches!(read_corpus("x\tregression\ta\ta:1:0"), Err(CorpusError::Domain { .. })));
        assert!(matches!(read_corpus("x\tregression\t(+ a b)\ta:0:1"), Err(CorpusError::MissingDomain { .. })));
    }
}
