use num_traits::{Signed, Zero};

use super::rational::{rat_arith, Rational, RationalInterval};
use super::series::{exp_enclosure, sqrt_enclosure, trig_interval, Trig, EXP_ARG_LIMIT};
use super::{DomainViolation, OracleError};
use crate::expr_engine::{BinaryOp, Env, Expr, UnaryOp};
use crate::float_kernel::decompose;

fn lookup<'a>(env: &'a Env<Rational>, name: &str) -> Result<&'a Rational, OracleError> {
    env.get(name).ok_or_else(|| OracleError::UnboundVariable(name.to_string()))
}

fn constant(v: f64) -> Result<Rational, OracleError> {
    decompose(v).map_err(|_| OracleError::NonFiniteConstant(v))
}

/// Exact value of an expression without transcendental nodes.
pub fn eval_exact(expr: &Expr, env: &Env<Rational>) -> Result<Rational, OracleError> {
    match expr {
        Expr::Var(name) => lookup(env, name).cloned(),
        Expr::Const(v) => constant(*v),
        Expr::Unary(UnaryOp::Neg, c) => Ok(-eval_exact(c, env)?),
        Expr::Unary(op, _) => Err(OracleError::NotExact(op.name())),
        Expr::Binary(op, l, r) => {
            let a = eval_exact(l, env)?;
            let b = eval_exact(r, env)?;
            rat_arith(*op, &a, &b)
        }
    }
}

/// Limits applied on top of the mathematical domain during evaluation.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Guards {
    /// Divisors must satisfy `|d| >= min_divisor`.
    pub min_divisor: Rational,
    /// Arguments to exp must satisfy `x <= max_exp_arg`.
    pub max_exp_arg: Rational,
}

impl Guards {
    pub(crate) fn mathematical() -> Self {
        Guards { min_divisor: Rational::zero(), max_exp_arg: Rational::from_integer(EXP_ARG_LIMIT.into()) }
    }
}

/// Rational interval containing the exact real value of `expr`.
///
/// Arithmetic nodes propagate exactly; sqrt, exp, sin and cos are enclosed
/// at precision `p`.
pub fn enclose(expr: &Expr, env: &Env<Rational>, p: u32) -> Result<RationalInterval, OracleError> {
    enclose_guarded(expr, env, p, &Guards::mathematical())
}

pub(crate) fn enclose_guarded(
    expr: &Expr,
    env: &Env<Rational>,
    p: u32,
    guards: &Guards,
) -> Result<RationalInterval, OracleError> {
    let domain = |reason: DomainViolation| OracleError::Domain { node: expr.to_text(), reason };
    let indeterminate = || OracleError::Indeterminate { node: expr.to_text() };
    match expr {
        Expr::Var(name) => Ok(RationalInterval::point(lookup(env, name)?.clone())),
        Expr::Const(v) => Ok(RationalInterval::point(constant(*v)?)),
        Expr::Unary(op, c) => {
            let x = enclose_guarded(c, env, p, guards)?;
            match op {
                UnaryOp::Neg => Ok(x.neg()),
                UnaryOp::Sqrt => {
                    if x.hi().is_negative() {
                        return Err(domain(DomainViolation::NegativeSqrt));
                    }
                    if x.lo().is_negative() {
                        return Err(indeterminate());
                    }
                    let lo = sqrt_enclosure(x.lo(), p)?;
                    if x.is_point() {
                        return Ok(lo);
                    }
                    let hi = sqrt_enclosure(x.hi(), p)?;
                    Ok(RationalInterval::new(lo.lo().clone(), hi.hi().clone()))
                }
                UnaryOp::Exp => {
                    if x.lo() > &guards.max_exp_arg {
                        return Err(domain(DomainViolation::ExpArgument));
                    }
                    if x.hi() > &guards.max_exp_arg {
                        return Err(indeterminate());
                    }
                    let lo = exp_enclosure(x.lo(), p)?;
                    if x.is_point() {
                        return Ok(lo);
                    }
                    let hi = exp_enclosure(x.hi(), p)?;
                    Ok(RationalInterval::new(lo.lo().clone(), hi.hi().clone()))
                }
                UnaryOp::Sin => Ok(trig_interval(Trig::Sin, &x, p)),
                UnaryOp::Cos => Ok(trig_interval(Trig::Cos, &x, p)),
            }
        }
        Expr::Binary(op, l, r) => {
            let a = enclose_guarded(l, env, p, guards)?;
            let b = enclose_guarded(r, env, p, guards)?;
            match op {
                BinaryOp::Add => Ok(a.add(&b)),
                BinaryOp::Sub => Ok(a.sub(&b)),
                BinaryOp::Mul => Ok(a.mul(&b)),
                BinaryOp::Div => {
                    let min = &guards.min_divisor;
                    let clear_of_zero = |iv: &RationalInterval| {
                        (iv.lo().is_positive() && iv.lo() >= min) || (iv.hi().is_negative() && -iv.hi() >= *min)
                    };
                    if clear_of_zero(&b) {
                        return a.div(&b);
                    }
                    // every point of b is provably inside (-min, min), or b is exactly 0
                    let inside = b.lo() > &-min && b.hi() < min;
                    if inside || (b.is_point() && b.lo().is_zero()) {
                        return Err(domain(DomainViolation::SmallDivisor));
                    }
                    Err(indeterminate())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr_engine::parse;
    use crate::rational_oracle::series::exp_enclosure;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn env_of(pairs: &[(&str, Rational)]) -> Env<Rational> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    const EQ1: &str = "(- (- (/ (* a (+ a (* b c))) (+ b (* c d))) (/ (* d (+ e (/ f g))) (+ g h))) (/ i j))";

    #[test]
    fn exact_examples() {
        let ones: Env<Rational> = "abcdefghij".chars().map(|c| (c.to_string(), q(1, 1))).collect();
        assert_eq!(eval_exact(&parse(EQ1).unwrap(), &ones).unwrap(), q(-1, 1));
        let halves = env_of(&[("a", q(1, 2)), ("b", q(1, 2))]);
        assert_eq!(eval_exact(&parse("(+ a b)").unwrap(), &halves).unwrap(), q(1, 1));
        assert_eq!(eval_exact(&parse("(sqrt a)").unwrap(), &halves), Err(OracleError::NotExact("sqrt")));
        let zero_b = env_of(&[("a", q(1, 1)), ("b", q(0, 1))]);
        assert_eq!(eval_exact(&parse("(/ a b)").unwrap(), &zero_b), Err(OracleError::DivisionByZero));
        assert!(matches!(eval_exact(&parse("c").unwrap(), &zero_b), Err(OracleError::UnboundVariable(_))));
    }

    #[test]
    fn nested_exp_sqrt_at_zero() {
        let e = parse("(exp (sqrt (exp (sqrt (exp (sqrt a))))))").unwrap();
        let env = env_of(&[("a", q(0, 1))]);
        let coarse = enclose(&e, &env, 64).unwrap();
        let fine = enclose(&e, &env, 128).unwrap();
        assert!(fine.is_subset_of(&coarse));
        // e^(sqrt(e)) = 5.2003..; the stepwise values: sqrt 0 = 0, e^0 = 1,
        // sqrt 1 = 1, e^1 = e, sqrt e, e^sqrt e
        let sqrt_e =
            crate::rational_oracle::series::sqrt_enclosure(exp_enclosure(&q(1, 1), 100).unwrap().lo(), 100).unwrap();
        let stepwise = exp_enclosure(sqrt_e.lo(), 100).unwrap();
        assert!(coarse.lo() <= stepwise.hi() && stepwise.lo() <= coarse.hi());
        assert!(coarse.lo() > &q(52003, 10000) && coarse.hi() < &q(52004, 10000));
    }

    #[test]
    fn arithmetic_is_degenerate_and_exact() {
        let e = parse(EQ1).unwrap();
        let env: Env<Rational> =
            "abcdefghij".chars().enumerate().map(|(i, c)| (c.to_string(), q(i as i64 + 1, 3))).collect();
        let iv = enclose(&e, &env, 64).unwrap();
        assert!(iv.is_point());
        assert_eq!(iv.lo(), &eval_exact(&e, &env).unwrap());
    }

    #[test]
    fn domain_errors_name_the_node() {
        let env = env_of(&[("a", q(1, 1)), ("b", q(0, 1))]);
        match enclose(&parse("(+ a (/ a b))").unwrap(), &env, 64) {
            Err(OracleError::Domain { node, reason }) => {
                assert_eq!(node, "(/ a b)");
                assert_eq!(reason, DomainViolation::SmallDivisor);
            }
            other => panic!("unexpected {other:?}"),
        }
        let neg = env_of(&[("a", q(-1, 1))]);
        assert!(matches!(
            enclose(&parse("(sqrt a)").unwrap(), &neg, 64),
            Err(OracleError::Domain { reason: DomainViolation::NegativeSqrt, .. })
        ));
        // sin(a) - sin(a) is exactly 0 but its enclosure straddles 0
        let pos = env_of(&[("a", q(1, 1))]);
        assert!(matches!(
            enclose(&parse("(sqrt (- (sin a) (sin a)))").unwrap(), &pos, 64),
            Err(OracleError::Indeterminate { .. })
        ));
    }

    #[test]
    fn guards_reject_small_divisors_and_large_exponents() {
        let guards = Guards { min_divisor: q(1, 1 << 20), max_exp_arg: q(300, 1) };
        let env = env_of(&[("a", q(1, 1 << 22)), ("b", q(301, 1))]);
        assert!(matches!(
            enclose_guarded(&parse("(/ b a)").unwrap(), &env, 64, &guards),
            Err(OracleError::Domain { reason: DomainViolation::SmallDivisor, .. })
        ));
        assert!(matches!(
            enclose_guarded(&parse("(exp b)").unwrap(), &env, 64, &guards),
            Err(OracleError::Domain { reason: DomainViolation::ExpArgument, .. })
        ));
        assert!(enclose_guarded(&parse("(exp a)").unwrap(), &env, 64, &guards).is_ok());
    }
}
