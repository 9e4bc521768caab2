use std::collections::BTreeMap;

use thiserror::Error;

use super::ast::{BinaryOp, Expr, UnaryOp};
use super::eval::eval_interval;
use super::Env;
use crate::float_kernel::decompose;
use crate::interval_core::{make_point, Interval, Strategy};
use crate::rational_oracle::{enclose_guarded, Guards, Rational};
use crate::rng::SplitMix64;

/// Smallest divisor magnitude accepted by [`gen_inputs`]: 2^-20.
pub const DELTA_DIV: f64 = 1.0 / (1u64 << 20) as f64;
/// Largest exp argument accepted by [`gen_inputs`].
pub const X_EXP_MAX: f64 = 300.0;
/// Draws per tuple before [`GenError::RetryExhausted`].
pub const MAX_RETRIES: usize = 1000;
pub const MAX_OPS: usize = 64;

pub const VARIABLES: [&str; 10] = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExprClass {
    SingleArith,
    SingleTransc,
    CompositeArith,
    CompositeMixed,
    Regression,
}

impl ExprClass {
    pub const ALL: [ExprClass; 5] = [
        ExprClass::SingleArith,
        ExprClass::SingleTransc,
        ExprClass::CompositeArith,
        ExprClass::CompositeMixed,
        ExprClass::Regression,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExprClass::SingleArith => "single-arith",
            ExprClass::SingleTransc => "single-transc",
            ExprClass::CompositeArith => "composite-arith",
            ExprClass::CompositeMixed => "composite-mixed",
            ExprClass::Regression => "regression",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("n_ops = {0} is outside 1..=64 for this class")]
    InvalidOpCount(usize),
    #[error("class {0} cannot be generated")]
    UnsupportedClass(&'static str),
    #[error("no valid input found in {MAX_RETRIES} draws for {0}")]
    RetryExhausted(String),
    #[error("variable `{0}` has no input domain")]
    MissingDomain(String),
}

const TRANSCENDENTAL: [UnaryOp; 4] = [UnaryOp::Sqrt, UnaryOp::Exp, UnaryOp::Sin, UnaryOp::Cos];

fn draw_var(rng: &mut SplitMix64) -> Expr {
    Expr::var(VARIABLES[rng.below(VARIABLES.len() as u64) as usize])
}

fn draw_binary(rng: &mut SplitMix64) -> BinaryOp {
    BinaryOp::ALL[rng.below(4) as usize]
}

fn build(rng: &mut SplitMix64, n_ops: usize, mixed: bool) -> Expr {
    if n_ops == 0 {
        return draw_var(rng);
    }
    // in mixed expressions one node in three is a unary function
    if mixed && rng.below(3) == 0 {
        let op = TRANSCENDENTAL[rng.below(4) as usize];
        return Expr::unary(op, build(rng, n_ops - 1, mixed));
    }
    let op = draw_binary(rng);
    let left_ops = rng.below(n_ops as u64) as usize;
    let left = build(rng, left_ops, mixed);
    let right = build(rng, n_ops - 1 - left_ops, mixed);
    Expr::binary(op, left, right)
}

/// Random expression with exactly `n_ops` operator nodes over `a..j`.
///
/// Single classes take `n_ops = 1`. Mixed expressions are redrawn until they
/// contain at least one function node.
pub fn gen_expr(seed: u64, class: ExprClass, n_ops: usize) -> Result<Expr, GenError> {
    let mut rng = SplitMix64::new(seed);
    match class {
        ExprClass::SingleArith | ExprClass::SingleTransc if n_ops != 1 => Err(GenError::InvalidOpCount(n_ops)),
        ExprClass::SingleArith => {
            let op = draw_binary(&mut rng);
            let left = draw_var(&mut rng);
            Ok(Expr::binary(op, left, draw_var(&mut rng)))
        }
        ExprClass::SingleTransc => {
            let op = TRANSCENDENTAL[rng.below(4) as usize];
            Ok(Expr::unary(op, draw_var(&mut rng)))
        }
        ExprClass::CompositeArith | ExprClass::CompositeMixed if !(1..=MAX_OPS).contains(&n_ops) => {
            Err(GenError::InvalidOpCount(n_ops))
        }
        ExprClass::CompositeArith => Ok(build(&mut rng, n_ops, false)),
        ExprClass::CompositeMixed => loop {
            let e = build(&mut rng, n_ops, true);
            if e.has_transcendental() {
                return Ok(e);
            }
        },
        ExprClass::Regression => Err(GenError::UnsupportedClass(class.name())),
    }
}

/// Validity limits of generated inputs as oracle guards.
fn input_guards() -> Guards {
    Guards { min_divisor: decompose(DELTA_DIV).expect("finite"), max_exp_arg: decompose(X_EXP_MAX).expect("finite") }
}

const VALIDITY_PRECISION: u32 = 64;

/// True when `env` keeps every sqrt argument non-negative, every divisor at
/// least [`DELTA_DIV`] in magnitude and every exp argument at most
/// [`X_EXP_MAX`], as decided by the exact oracle, and when both widening
/// strategies evaluate `expr` at `env` without error.
pub fn is_valid_input(expr: &Expr, env: &Env<f64>) -> bool {
    let exact: Option<Env<Rational>> = env.iter().map(|(k, v)| Some((k.clone(), decompose(*v).ok()?))).collect();
    let Some(exact) = exact else { return false };
    if enclose_guarded(expr, &exact, VALIDITY_PRECISION, &input_guards()).is_err() {
        return false;
    }
    let points: Option<Env<Interval>> = env.iter().map(|(k, v)| Some((k.clone(), make_point(*v).ok()?))).collect();
    let Some(points) = points else { return false };
    [Strategy::PredSucc, Strategy::multiplicative_default()]
        .into_iter()
        .all(|s| eval_interval(expr, &points, s).is_ok())
}

/// `count` valid input tuples drawn uniformly from `domains`.
pub fn gen_inputs(
    seed: u64,
    expr: &Expr,
    domains: &BTreeMap<String, (f64, f64)>,
    count: usize,
) -> Result<Vec<Env<f64>>, GenError> {
    let vars = expr.free_vars();
    let mut ranges = Vec::with_capacity(vars.len());
    for v in &vars {
        let d = domains.get(v).ok_or_else(|| GenError::MissingDomain(v.clone()))?;
        ranges.push((v.clone(), *d));
    }
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut found = None;
        for _ in 0..MAX_RETRIES {
            let env: Env<f64> = ranges.iter().map(|(v, (lo, hi))| (v.clone(), rng.uniform(*lo, *hi))).collect();
            if is_valid_input(expr, &env) {
                found = Some(env);
                break;
            }
        }
        out.push(found.ok_or_else(|| GenError::RetryExhausted(expr.to_text()))?);
    }
    Ok(out)
}
