//! Expressions: AST, reader, seeded generators, evaluators and the builtin
//! benchmark corpus.

mod ast;
mod corpus;
mod eval;
mod gen;
mod parse;

use std::collections::BTreeMap;

pub use ast::{BinaryOp, Expr, UnaryOp};
pub use corpus::{
    builtin_corpus, read_corpus, write_corpus, CorpusEntry, CorpusError, CORPUS_SEED, DEFAULT_DOMAIN, EQ1, EQ2, EQ3,
    EQ4, POLAR_X, SINE_ORDER3,
};
pub use eval::{eval_float, eval_interval, EvalError, Program};
pub use gen::{
    gen_expr, gen_inputs, is_valid_input, ExprClass, GenError, DELTA_DIV, MAX_OPS, MAX_RETRIES, VARIABLES, X_EXP_MAX,
};
pub use parse::{parse, parse_number, ParseError, MAX_INPUT_BYTES};

/// Variable bindings.
pub type Env<T> = BTreeMap<String, T>;
