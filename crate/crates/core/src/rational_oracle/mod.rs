//! Exact rational arithmetic and rigorous enclosures of sqrt, exp, sin and
//! cos. This is the ground truth every interval result is checked against.

mod enclose;
mod rational;
mod series;

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::expr_engine::{parse, Env, Expr};
use crate::float_kernel::decompose;
use crate::interval_core::Interval;

pub use enclose::{enclose, eval_exact};
pub(crate) use enclose::{enclose_guarded, Guards};
pub(crate) use rational::cmp_bound;
pub use rational::{floor_log2, rat_arith, Rational, RationalInterval};
pub use series::{
    exp_enclosure, pi_enclosure, sqrt_decide, sqrt_enclosure, sqrt_upper_decide, trig_enclosure, trig_interval, Trig,
    EXP_ARG_LIMIT, TRIG_ARG_LOG2_LIMIT,
};

/// Precision of the first containment attempt.
pub const PRECISION_START: u32 = 64;
/// Largest precision tried before giving up with [`Verdict::Undecided`].
pub const PRECISION_CAP: u32 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainViolation {
    NegativeSqrt,
    SmallDivisor,
    ExpArgument,
}

impl std::fmt::Display for DomainViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DomainViolation::NegativeSqrt => "sqrt of a negative value",
            DomainViolation::SmallDivisor => "divisor is zero or below the allowed magnitude",
            DomainViolation::ExpArgument => "exp argument above the allowed bound",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("negative argument")]
    NegativeDomain,
    #[error("{function} argument {value} is out of range")]
    ArgumentOutOfRange { function: &'static str, value: String },
    #[error("`{0}` has no exact rational value")]
    NotExact(&'static str),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("constant {0} is not finite")]
    NonFiniteConstant(f64),
    #[error("domain error at {node}: {reason}")]
    Domain { node: String, reason: DomainViolation },
    #[error("cannot decide the domain of {node} at this precision")]
    Indeterminate { node: String },
    #[error("interval has an infinite endpoint")]
    UnboundedInterval,
    #[error("malformed query: {0}")]
    Query(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Contained,
    Violated,
    Undecided,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Contained => "contained",
            Verdict::Violated => "violated",
            Verdict::Undecided => "undecided",
        }
    }
}

/// `lower <= expr(inputs) <= upper`, everything exact.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationQuery {
    pub expr: Expr,
    pub inputs: Vec<(String, Rational)>,
    pub lower: Rational,
    pub upper: Rational,
}

impl VerificationQuery {
    /// Query asserting that `iv` encloses `expr` at `env`.
    pub fn from_interval(expr: &Expr, env: &Env<Rational>, iv: Interval) -> Result<Self, OracleError> {
        let (lower, upper) = finite_bounds(iv)?;
        let mut inputs = Vec::new();
        for name in expr.free_vars() {
            let value = env.get(&name).ok_or_else(|| OracleError::UnboundVariable(name.clone()))?;
            inputs.push((name, value.clone()));
        }
        Ok(VerificationQuery { expr: expr.clone(), inputs, lower, upper })
    }

    pub fn env(&self) -> Env<Rational> {
        self.inputs.iter().cloned().collect()
    }
}

fn finite_bounds(iv: Interval) -> Result<(Rational, Rational), OracleError> {
    match (decompose(iv.lo()), decompose(iv.hi())) {
        (Ok(lo), Ok(hi)) => Ok((lo, hi)),
        _ => Err(OracleError::UnboundedInterval),
    }
}

/// Exact width `hi - lo`.
pub fn width_exact(iv: Interval) -> Result<Rational, OracleError> {
    let (lo, hi) = finite_bounds(iv)?;
    Ok(hi - lo)
}

/// Decides whether `iv` contains the exact value of `expr` at `env`,
/// refining the oracle precision from 64 bits up to 4096.
pub fn check_containment(iv: Interval, expr: &Expr, env: &Env<Rational>) -> Result<Verdict, OracleError> {
    if iv.is_empty() {
        return Ok(Verdict::Violated);
    }
    // None stands for an infinite endpoint, which bounds nothing
    let lo = decompose(iv.lo()).ok();
    let hi = decompose(iv.hi()).ok();
    let mut p = PRECISION_START;
    while p <= PRECISION_CAP {
        match enclose(expr, env, p) {
            Ok(o) => {
                let below_hi = |x: &Rational| cmp_bound(x, hi.as_ref(), Ordering::Less);
                let above_lo = |x: &Rational| cmp_bound(x, lo.as_ref(), Ordering::Greater);
                if above_lo(o.lo()) != Ordering::Less && below_hi(o.hi()) != Ordering::Greater {
                    return Ok(Verdict::Contained);
                }
                if above_lo(o.hi()) == Ordering::Less || below_hi(o.lo()) == Ordering::Greater {
                    return Ok(Verdict::Violated);
                }
            }
            Err(OracleError::Indeterminate { .. }) => {}
            Err(e) => return Err(e),
        }
        p *= 2;
    }
    Ok(Verdict::Undecided)
}

fn write_ratio(out: &mut String, q: &Rational) {
    // BigRational keeps the denominator positive
    let _ = write!(out, "{}/{}", q.numer(), q.denom());
}

/// `NL/DL <= EXPR [name := N/D, ...] <= NU/DU`
pub fn export_query(q: &VerificationQuery) -> String {
    let mut out = String::new();
    write_ratio(&mut out, &q.lower);
    let _ = write!(out, " <= {} [", q.expr);
    for (i, (name, value)) in q.inputs.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{name} := ");
        write_ratio(&mut out, value);
    }
    out.push_str("] <= ");
    write_ratio(&mut out, &q.upper);
    out
}

fn parse_ratio(s: &str) -> Result<Rational, OracleError> {
    let bad = || OracleError::Query(format!("invalid ratio `{s}`"));
    let (n, d) = s.trim().split_once('/').ok_or_else(bad)?;
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Inverse of [`export_query`].
pub fn parse_query(line: &str) -> Result<VerificationQuery, OracleError> {
    let (lower, rest) = line.trim().split_once(" <= ").ok_or_else(|| OracleError::Query("missing `<=`".into()))?;
    let (middle, upper) = rest.rsplit_once(" <= ").ok_or_else(|| OracleError::Query("missing `<=`".into()))?;
    let open = middle.rfind('[').ok_or_else(|| OracleError::Query("missing bindings".into()))?;
    let bindings =
        middle[open + 1..].strip_suffix(']').ok_or_else(|| OracleError::Query("unterminated bindings".into()))?;
    let expr = parse(middle[..open].trim()).map_err(|e| OracleError::Query(e.to_string()))?;
    let mut inputs: Vec<(String, Rational)> = Vec::new();
    for binding in bindings.split(',').map(str::trim).filter(|b| !b.is_empty()) {
        let (name, value) =
            binding.split_once(":=").ok_or_else(|| OracleError::Query(format!("invalid binding `{binding}`")))?;
        let name = name.trim().to_string();
        if inputs.iter().any(|(n, _)| *n == name) {
            return Err(OracleError::Query(format!("`{name}` bound twice")));
        }
        inputs.push((name, parse_ratio(value)?));
    }
    for name in expr.free_vars() {
        if !inputs.iter().any(|(n, _)| *n == name) {
            return Err(OracleError::UnboundVariable(name));
        }
    }
    Ok(VerificationQuery { expr, inputs, lower: parse_ratio(lower)?, upper: parse_ratio(upper)? })
}
