use thiserror::Error;

use super::ast::{BinaryOp, Expr, UnaryOp};
use super::Env;
use crate::interval_core::{self as ic, make_point, Interval, IntervalError, Strategy};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("{source} at {node}")]
    Interval {
        node: String,
        #[source]
        source: IntervalError,
    },
}

/// Bottom-up interval evaluation.
pub fn eval_interval(expr: &Expr, env: &Env<Interval>, s: Strategy) -> Result<Interval, EvalError> {
    let tag = |source: IntervalError| EvalError::Interval { node: expr.to_text(), source };
    match expr {
        Expr::Var(name) => env.get(name).copied().ok_or_else(|| EvalError::UnboundVariable(name.clone())),
        Expr::Const(v) => make_point(*v).map_err(tag),
        Expr::Unary(op, c) => {
            let x = eval_interval(c, env, s)?;
            apply_unary(*op, x).map_err(tag)
        }
        Expr::Binary(op, l, r) => {
            let a = eval_interval(l, env, s)?;
            let b = eval_interval(r, env, s)?;
            apply_binary(*op, a, b, s).map_err(tag)
        }
    }
}

#[inline]
fn apply_unary(op: UnaryOp, x: Interval) -> Result<Interval, IntervalError> {
    match op {
        UnaryOp::Neg => Ok(ic::neg(x)),
        UnaryOp::Sqrt => ic::sqrt(x),
        UnaryOp::Exp => Ok(ic::exp(x)),
        UnaryOp::Sin => ic::sin(x),
        UnaryOp::Cos => ic::cos(x),
    }
}

#[inline]
fn apply_binary(op: BinaryOp, a: Interval, b: Interval, s: Strategy) -> Result<Interval, IntervalError> {
    match op {
        BinaryOp::Add => Ok(ic::add(a, b, s)),
        BinaryOp::Sub => Ok(ic::sub(a, b, s)),
        BinaryOp::Mul => Ok(ic::mul(a, b, s)),
        BinaryOp::Div => ic::div(a, b, s),
    }
}

/// Plain round-to-nearest evaluation; may return infinities or NaN.
pub fn eval_float(expr: &Expr, env: &Env<f64>) -> Result<f64, EvalError> {
    Ok(match expr {
        Expr::Var(name) => *env.get(name).ok_or_else(|| EvalError::UnboundVariable(name.clone()))?,
        Expr::Const(v) => *v,
        Expr::Unary(op, c) => {
            let x = eval_float(c, env)?;
            match op {
                UnaryOp::Neg => -x,
                UnaryOp::Sqrt => x.sqrt(),
                UnaryOp::Exp => x.exp(),
                UnaryOp::Sin => x.sin(),
                UnaryOp::Cos => x.cos(),
            }
        }
        Expr::Binary(op, l, r) => {
            let a = eval_float(l, env)?;
            let b = eval_float(r, env)?;
            match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div => a / b,
            }
        }
    })
}

#[derive(Clone, Debug)]
enum Instr {
    Load(usize),
    Const(Interval),
    Unary(UnaryOp),
    Binary(BinaryOp),
}

/// An expression flattened to postfix form over numbered input slots, for
/// evaluating the same expression many times without tree walking or map
/// lookups.
#[derive(Clone, Debug)]
pub struct Program {
    vars: Vec<String>,
    code: Vec<Instr>,
    max_stack: usize,
}

impl Program {
    pub fn compile(expr: &Expr) -> Result<Program, EvalError> {
        let vars: Vec<String> = expr.free_vars().into_iter().collect();
        let mut code = Vec::with_capacity(expr.op_count() * 2 + 1);
        emit(expr, &vars, &mut code)?;
        let mut depth = 0usize;
        let mut max_stack = 0usize;
        for instr in &code {
            match instr {
                Instr::Load(_) | Instr::Const(_) => depth += 1,
                Instr::Unary(_) => {}
                Instr::Binary(_) => depth -= 1,
            }
            max_stack = max_stack.max(depth);
        }
        Ok(Program { vars, code, max_stack })
    }

    /// Variable names in slot order.
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Slot values for `env`, in the order of [`Program::vars`].
    pub fn slots(&self, env: &Env<Interval>) -> Result<Vec<Interval>, EvalError> {
        self.vars.iter().map(|v| env.get(v).copied().ok_or_else(|| EvalError::UnboundVariable(v.clone()))).collect()
    }

    /// Scratch stack large enough for [`Program::run`].
    pub fn stack(&self) -> Vec<Interval> {
        Vec::with_capacity(self.max_stack)
    }

    /// Evaluates with inputs in slot order. Errors are not tagged with a
    /// node; re-run [`eval_interval`] to locate one.
    #[inline]
    pub fn run(&self, slots: &[Interval], s: Strategy, stack: &mut Vec<Interval>) -> Result<Interval, IntervalError> {
        stack.clear();
        for instr in &self.code {
            match instr {
                Instr::Load(i) => stack.push(slots[*i]),
                Instr::Const(c) => stack.push(*c),
                Instr::Unary(op) => {
                    let x = stack.pop().expect("stack underflow");
                    stack.push(apply_unary(*op, x)?);
                }
                Instr::Binary(op) => {
                    let b = stack.pop().expect("stack underflow");
                    let a = stack.pop().expect("stack underflow");
                    stack.push(apply_binary(*op, a, b, s)?);
                }
            }
        }
        Ok(stack.pop().expect("empty program"))
    }
}

fn emit(expr: &Expr, vars: &[String], code: &mut Vec<Instr>) -> Result<(), EvalError> {
    match expr {
        Expr::Var(name) => {
            let slot = vars.iter().position(|v| v == name).expect("free var collected");
            code.push(Instr::Load(slot));
        }
        Expr::Const(v) => {
            let iv = make_point(*v).map_err(|source| EvalError::Interval { node: expr.to_text(), source })?;
            code.push(Instr::Const(iv));
        }
        Expr::Unary(op, c) => {
            emit(c, vars, code)?;
            code.push(Instr::Unary(*op));
        }
        Expr::Binary(op, l, r) => {
            emit(l, vars, code)?;
            emit(r, vars, code)?;
            code.push(Instr::Binary(*op));
        }
    }
    Ok(())
}
