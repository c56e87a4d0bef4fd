//! Recursive-descent parser for rational expressions in `z`, and
//! compilation of the syntax tree into a [`RationalFunction`].
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' int)?
//! atom   := number | number 'i' | 'i' | 'z' | '(' expr ')'
//! ```
//!
//! `i` is a reserved literal, not an identifier. Juxtaposition is accepted
//! only between a numeric literal and `i`, so `2i` and `2*i` both parse.
//! Exponents are integer literals (optionally negative). Whitespace is
//! insignificant.

use std::fmt;

use num_complex::Complex64;

use crate::error::Error;
use crate::ratfun::RationalFunction;

/// Degree guard for compiled expressions.
pub const MAX_COMPILED_DEGREE: usize = 64;

/// Syntax error with a byte offset into the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at offset {}: expected {}, found {}",
            self.offset, self.expected, self.found
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Literal(Complex64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

impl Expr {
    /// Direct evaluation of the syntax tree.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Expr::Literal(c) => *c,
            Expr::Var => z,
            Expr::Neg(e) => -e.eval(z),
            Expr::Add(a, b) => a.eval(z) + b.eval(z),
            Expr::Sub(a, b) => a.eval(z) - b.eval(z),
            Expr::Mul(a, b) => a.eval(z) * b.eval(z),
            Expr::Div(a, b) => a.eval(z) / b.eval(z),
            Expr::Pow(e, n) => e.eval(z).powi(*n),
        }
    }

    /// Bottom-up compilation into a rational function in lowest terms.
    pub fn compile(&self) -> Result<RationalFunction, Error> {
        let r = match self {
            Expr::Literal(c) => RationalFunction::constant(*c),
            Expr::Var => RationalFunction::var(),
            Expr::Neg(e) => e.compile()?.neg(),
            Expr::Add(a, b) => a.compile()?.add(&b.compile()?)?,
            Expr::Sub(a, b) => a.compile()?.sub(&b.compile()?)?,
            Expr::Mul(a, b) => a.compile()?.mul(&b.compile()?)?,
            Expr::Div(a, b) => a.compile()?.div(&b.compile()?)?,
            Expr::Pow(e, n) => {
                let base = e.compile()?;
                let mut acc = RationalFunction::constant(Complex64::new(1.0, 0.0));
                for _ in 0..n.unsigned_abs() {
                    acc = acc.mul(&base)?;
                    guard_degree(&acc)?;
                }
                if *n < 0 {
                    acc = RationalFunction::constant(Complex64::new(1.0, 0.0)).div(&acc)?;
                }
                acc
            }
        };
        guard_degree(&r)?;
        Ok(r)
    }

    /// Fully parenthesized form that re-parses to an equivalent tree.
    pub fn pretty(&self) -> String {
        match self {
            Expr::Literal(c) => format_complex(*c),
            Expr::Var => "z".to_string(),
            Expr::Neg(e) => format!("(-{})", e.pretty()),
            Expr::Add(a, b) => format!("({} + {})", a.pretty(), b.pretty()),
            Expr::Sub(a, b) => format!("({} - {})", a.pretty(), b.pretty()),
            Expr::Mul(a, b) => format!("({} * {})", a.pretty(), b.pretty()),
            Expr::Div(a, b) => format!("({} / {})", a.pretty(), b.pretty()),
            Expr::Pow(e, n) => format!("({}^{})", e.pretty(), n),
        }
    }
}

fn guard_degree(r: &RationalFunction) -> Result<(), Error> {
    let d = r.map_degree();
    if d > MAX_COMPILED_DEGREE {
        Err(Error::DegreeOverflow {
            degree: d,
            cap: MAX_COMPILED_DEGREE,
        })
    } else {
        Ok(())
    }
}

fn format_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        if c.re < 0.0 {
            format!("(-{})", -c.re)
        } else {
            format!("{}", c.re)
        }
    } else if c.re == 0.0 {
        if c.im < 0.0 {
            format!("(-{}i)", -c.im)
        } else {
            format!("{}i", c.im)
        }
    } else {
        let sign = if c.im < 0.0 { '-' } else { '+' };
        let re = if c.re < 0.0 {
            format!("(-{})", -c.re)
        } else {
            format!("{}", c.re)
        };
        format!("({} {} {}i)", re, sign, c.im.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Tok {
    Num(f64),
    ImagNum(f64),
    I,
    Z,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number `{v}`"),
            Tok::ImagNum(v) => format!("imaginary literal `{v}i`"),
            Tok::I => "`i`".into(),
            Tok::Z => "`z`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

struct Lexed {
    tok: Tok,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let b = bytes[pos];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                pos += 1;
            }
            b'+' => {
                out.push(Lexed { tok: Tok::Plus, offset: pos });
                pos += 1;
            }
            b'-' => {
                out.push(Lexed { tok: Tok::Minus, offset: pos });
                pos += 1;
            }
            b'*' => {
                out.push(Lexed { tok: Tok::Star, offset: pos });
                pos += 1;
            }
            b'/' => {
                out.push(Lexed { tok: Tok::Slash, offset: pos });
                pos += 1;
            }
            b'^' => {
                out.push(Lexed { tok: Tok::Caret, offset: pos });
                pos += 1;
            }
            b'(' => {
                out.push(Lexed { tok: Tok::LParen, offset: pos });
                pos += 1;
            }
            b')' => {
                out.push(Lexed { tok: Tok::RParen, offset: pos });
                pos += 1;
            }
            b'i' => {
                out.push(Lexed { tok: Tok::I, offset: pos });
                pos += 1;
            }
            b'z' => {
                out.push(Lexed { tok: Tok::Z, offset: pos });
                pos += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if pos < bytes.len() && bytes[pos] == b'.' {
                    pos += 1;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                }
                if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
                    let mut probe = pos + 1;
                    if probe < bytes.len() && (bytes[probe] == b'+' || bytes[probe] == b'-') {
                        probe += 1;
                    }
                    if probe < bytes.len() && bytes[probe].is_ascii_digit() {
                        pos = probe;
                        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                            pos += 1;
                        }
                    }
                }
                let slice = &text[start..pos];
                let value: f64 = slice.parse().map_err(|_| ParseError {
                    offset: start,
                    expected: "a numeric literal".into(),
                    found: format!("`{slice}`"),
                })?;
                // Juxtaposed imaginary unit: `0.35i`, `2i`.
                if pos < bytes.len() && bytes[pos] == b'i' {
                    pos += 1;
                    out.push(Lexed { tok: Tok::ImagNum(value), offset: start });
                } else {
                    out.push(Lexed { tok: Tok::Num(value), offset: start });
                }
            }
            other => {
                return Err(ParseError {
                    offset: pos,
                    expected: "a number, `i`, `z`, an operator, or parentheses".into(),
                    found: format!("`{}`", other as char),
                });
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Lexed],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Lexed> {
        self.toks.get(self.pos)
    }

    fn advance(&mut self) -> Option<&Lexed> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        match self.peek() {
            Some(l) => ParseError {
                offset: l.offset,
                expected: expected.into(),
                found: l.tok.describe(),
            },
            None => ParseError {
                offset: self.end,
                expected: expected.into(),
                found: "end of input".into(),
            },
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_term()?;
        while let Some(l) = self.peek() {
            match l.tok {
                Tok::Plus => {
                    self.advance();
                    let rhs = self.parse_term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Tok::Minus => {
                    self.advance();
                    let rhs = self.parse_term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn parse_term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_factor()?;
        while let Some(l) = self.peek() {
            match l.tok {
                Tok::Star => {
                    self.advance();
                    let rhs = self.parse_factor()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Tok::Slash => {
                    self.advance();
                    let rhs = self.parse_factor()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn parse_factor(&mut self) -> Result<Expr, ParseError> {
        if matches!(self.peek(), Some(l) if l.tok == Tok::Minus) {
            self.advance();
            let inner = self.parse_factor()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        let atom = self.parse_atom()?;
        if matches!(self.peek(), Some(l) if l.tok == Tok::Caret) {
            self.advance();
            let exponent = self.parse_int_exponent()?;
            return Ok(Expr::Pow(Box::new(atom), exponent));
        }
        Ok(atom)
    }

    fn parse_int_exponent(&mut self) -> Result<i32, ParseError> {
        let negative = if matches!(self.peek(), Some(l) if l.tok == Tok::Minus) {
            self.advance();
            true
        } else {
            false
        };
        match self.peek() {
            Some(l) => {
                if let Tok::Num(v) = l.tok {
                    let offset = l.offset;
                    if v.fract() != 0.0 || v.abs() > i32::MAX as f64 {
                        return Err(ParseError {
                            offset,
                            expected: "an integer exponent".into(),
                            found: format!("`{v}`"),
                        });
                    }
                    self.advance();
                    let n = v as i32;
                    Ok(if negative { -n } else { n })
                } else {
                    Err(self.error("an integer exponent"))
                }
            }
            None => Err(self.error("an integer exponent")),
        }
    }

    fn parse_atom(&mut self) -> Result<Expr, ParseError> {
        let Some(l) = self.peek() else {
            return Err(self.error("a number, `i`, `z`, or `(`"));
        };
        match l.tok {
            Tok::Num(v) => {
                self.advance();
                Ok(Expr::Literal(Complex64::new(v, 0.0)))
            }
            Tok::ImagNum(v) => {
                self.advance();
                Ok(Expr::Literal(Complex64::new(0.0, v)))
            }
            Tok::I => {
                self.advance();
                Ok(Expr::Literal(Complex64::new(0.0, 1.0)))
            }
            Tok::Z => {
                self.advance();
                Ok(Expr::Var)
            }
            Tok::LParen => {
                self.advance();
                let inner = self.parse_expr()?;
                if matches!(self.peek(), Some(l) if l.tok == Tok::RParen) {
                    self.advance();
                    Ok(inner)
                } else {
                    Err(self.error("`)`"))
                }
            }
            _ => Err(self.error("a number, `i`, `z`, or `(`")),
        }
    }
}

/// Parses an expression in `z` into a syntax tree.
pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser {
        toks: &toks,
        pos: 0,
        end: text.len(),
    };
    let expr = parser.parse_expr()?;
    if parser.pos != toks.len() {
        return Err(parser.error("end of input or an operator"));
    }
    Ok(expr)
}

/// Parses and compiles in one step.
pub fn compile_expression(text: &str) -> Result<RationalFunction, CompileError> {
    let ast = parse_expression(text).map_err(CompileError::Parse)?;
    ast.compile().map_err(CompileError::Eval)
}

/// Either a syntax error or a compilation failure.
#[derive(Clone, Debug)]
pub enum CompileError {
    Parse(ParseError),
    Eval(Error),
}

impl fmt::Display for CompileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompileError::Parse(e) => write!(f, "{e}"),
            CompileError::Eval(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CompileError {}
