//! Prefix s-expression reader.
//!
//! ```text
//! expr  := var | const | '(' unop expr ')' | '(' binop expr expr ')'
//! unop  := 'neg' | 'sqrt' | 'exp' | 'sin' | 'cos'
//! binop := '+' | '-' | '*' | '/'
//! const := decimal or hexfloat literal
//! ```

use num_bigint::BigInt;
use num_traits::{Num, One};
use thiserror::Error;

use super::ast::{is_valid_var_name, BinaryOp, Expr, UnaryOp};
use crate::float_kernel::nearest_f64;
use crate::rational_oracle::Rational;

pub const MAX_INPUT_BYTES: usize = 64 * 1024;
const MAX_DEPTH: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown operator `{name}` at byte {offset}")]
    UnknownOperator { offset: usize, name: String },
    #[error("operator `{op}` at byte {offset} takes {expected} operand(s), found {found}")]
    Arity { offset: usize, op: String, expected: usize, found: usize },
    #[error("input is {0} bytes, limit is 64 KiB")]
    TooLarge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Token<'a> {
    Open,
    Close,
    Atom(&'a str),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&mut self) -> Option<(usize, Token<'a>)> {
        let save = self.pos;
        let t = self.next_token();
        self.pos = save;
        t
    }

    fn next_token(&mut self) -> Option<(usize, Token<'a>)> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= bytes.len() {
            return None;
        }
        let start = self.pos;
        match bytes[start] {
            b'(' => {
                self.pos += 1;
                Some((start, Token::Open))
            }
            b')' => {
                self.pos += 1;
                Some((start, Token::Close))
            }
            _ => {
                while self.pos < bytes.len()
                    && !bytes[self.pos].is_ascii_whitespace()
                    && bytes[self.pos] != b'('
                    && bytes[self.pos] != b')'
                {
                    self.pos += 1;
                }
                Some((start, Token::Atom(&self.src[start..self.pos])))
            }
        }
    }
}

/// Parses one expression; trailing input other than whitespace is an error.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    if text.len() > MAX_INPUT_BYTES {
        return Err(ParseError::TooLarge(text.len()));
    }
    let mut lexer = Lexer { src: text, pos: 0 };
    let expr = parse_expr(&mut lexer, 0)?;
    if let Some((offset, _)) = lexer.next_token() {
        return Err(ParseError::Syntax { offset, message: "trailing input after expression".into() });
    }
    Ok(expr)
}

fn parse_expr(lexer: &mut Lexer<'_>, depth: usize) -> Result<Expr, ParseError> {
    let end = lexer.src.len();
    let (offset, token) =
        lexer.next_token().ok_or(ParseError::Syntax { offset: end, message: "unexpected end of input".into() })?;
    match token {
        Token::Close => Err(ParseError::Syntax { offset, message: "unexpected `)`".into() }),
        Token::Atom(atom) => parse_atom(atom, offset),
        Token::Open => {
            if depth >= MAX_DEPTH {
                return Err(ParseError::Syntax { offset, message: "nesting too deep".into() });
            }
            let (op_offset, op_token) = lexer
                .next_token()
                .ok_or(ParseError::Syntax { offset: end, message: "unexpected end of input".into() })?;
            let name = match op_token {
                Token::Atom(name) => name,
                _ => return Err(ParseError::Syntax { offset: op_offset, message: "expected an operator".into() }),
            };
            let mut args = Vec::new();
            loop {
                match lexer.peek() {
                    None => return Err(ParseError::Syntax { offset: end, message: "unexpected end of input".into() }),
                    Some((_, Token::Close)) => {
                        lexer.next_token();
                        break;
                    }
                    Some(_) => args.push(parse_expr(lexer, depth + 1)?),
                }
            }
            build_node(name, op_offset, args)
        }
    }
}

fn build_node(name: &str, offset: usize, mut args: Vec<Expr>) -> Result<Expr, ParseError> {
    let arity = |expected: usize, found: usize| ParseError::Arity { offset, op: name.to_string(), expected, found };
    if let Some(op) = UnaryOp::from_name(name) {
        if args.len() != 1 {
            return Err(arity(1, args.len()));
        }
        return Ok(Expr::unary(op, args.pop().expect("one operand")));
    }
    if let Some(op) = BinaryOp::from_symbol(name) {
        if args.len() != 2 {
            return Err(arity(2, args.len()));
        }
        let right = args.pop().expect("two operands");
        let left = args.pop().expect("two operands");
        return Ok(Expr::binary(op, left, right));
    }
    Err(ParseError::UnknownOperator { offset, name: name.to_string() })
}

fn looks_numeric(atom: &str) -> bool {
    let body = atom.strip_prefix(['-', '+']).unwrap_or(atom);
    body.starts_with(|c: char| c.is_ascii_digit() || c == '.')
}

fn parse_atom(atom: &str, offset: usize) -> Result<Expr, ParseError> {
    if looks_numeric(atom) {
        let value = parse_number(atom)
            .ok_or_else(|| ParseError::Syntax { offset, message: format!("invalid numeric literal `{atom}`") })?;
        if !value.is_finite() {
            return Err(ParseError::Syntax { offset, message: format!("literal `{atom}` is not finite") });
        }
        return Ok(Expr::Const(value));
    }
    if is_valid_var_name(atom) {
        return Ok(Expr::Var(atom.to_string()));
    }
    Err(ParseError::Syntax { offset, message: format!("invalid token `{atom}`") })
}

/// Decimal or hexfloat literal to the nearest binary64.
pub fn parse_number(atom: &str) -> Option<f64> {
    let (negative, body) = match atom.as_bytes().first() {
        Some(b'-') => (true, &atom[1..]),
        Some(b'+') => (false, &atom[1..]),
        _ => (false, atom),
    };
    let value = if body.starts_with("0x") || body.starts_with("0X") {
        parse_hexfloat(&body[2..])?
    } else {
        if !body.bytes().all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'e' | b'E' | b'-' | b'+')) {
            return None;
        }
        body.parse::<f64>().ok()?
    };
    Some(if negative { -value } else { value })
}

fn parse_hexfloat(s: &str) -> Option<f64> {
    let (digits, exp) = match s.find(['p', 'P']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(i) => (&digits[..i], &digits[i + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let all: String = [int_part, frac_part].concat();
    let mantissa = BigInt::from_str_radix(&all, 16).ok()?;
    let shift = exp - 4 * frac_part.len() as i64;
    if shift.abs() > 1 << 20 {
        // far outside the binary64 range either way
        return Some(if shift > 0 && mantissa != BigInt::from(0) { f64::INFINITY } else { 0.0 });
    }
    let q = if shift >= 0 {
        Rational::from_integer(mantissa << shift as usize)
    } else {
        Rational::new(mantissa, BigInt::one() << (-shift) as usize)
    };
    Some(nearest_f64(&q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_binary_node() {
        let e = parse("(+ a b)").unwrap();
        assert_eq!(e, Expr::binary(BinaryOp::Add, Expr::var("a"), Expr::var("b")));
    }

    #[test]
    fn parses_polar_factor() {
        let e = parse("(cos (* theta 0.017453292519943295))").unwrap();
        let expected = Expr::unary(
            UnaryOp::Cos,
            Expr::binary(BinaryOp::Mul, Expr::var("theta"), Expr::constant(0.017453292519943295)),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn reports_end_of_input() {
        assert_eq!(parse("(+ a"), Err(ParseError::Syntax { offset: 4, message: "unexpected end of input".into() }));
    }

    #[test]
    fn reports_unknown_operator_and_arity() {
        assert!(matches!(parse("(log a)"), Err(ParseError::UnknownOperator { offset: 1, .. })));
        assert!(matches!(parse("(sqrt a b)"), Err(ParseError::Arity { expected: 1, found: 2, .. })));
        assert!(matches!(parse("(- a)"), Err(ParseError::Arity { expected: 2, found: 1, .. })));
        assert!(matches!(parse("a b"), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse(")"), Err(ParseError::Syntax { offset: 0, .. })));
        assert!(matches!(parse("(+ A b)"), Err(ParseError::Syntax { offset: 3, .. })));
        assert!(matches!(parse("1e999"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("((+ a b))"), Err(ParseError::Syntax { offset: 1, .. })));
    }

    #[test]
    fn parses_literals() {
        assert_eq!(parse_number("0x1.8p1"), Some(3.0));
        assert_eq!(parse_number("-0x1p-1074"), Some(-crate::float_kernel::MIN_SUBNORMAL));
        assert_eq!(parse_number("0x.8"), Some(0.5));
        assert_eq!(parse_number("0x1.fffffffffffffp1023"), Some(f64::MAX));
        assert_eq!(parse_number("1e-3"), Some(0.001));
        assert_eq!(parse_number("-.5"), Some(-0.5));
        assert_eq!(parse_number("0x"), None);
        assert_eq!(parse_number("1.2.3"), None);
        let zero = parse("-0.0").unwrap();
        assert!(matches!(zero, Expr::Const(z) if z == 0.0 && z.is_sign_negative()));
    }

    #[test]
    fn rejects_oversized_input() {
        let big = "a ".repeat(MAX_INPUT_BYTES);
        assert!(matches!(parse(&big), Err(ParseError::TooLarge(_))));
        let deep = "(neg ".repeat(2000) + "a" + &")".repeat(2000);
        assert!(matches!(parse(&deep), Err(ParseError::Syntax { .. })));
    }
}
