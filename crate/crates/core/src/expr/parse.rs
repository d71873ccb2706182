//! Recursive-descent parser for expression text.
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := unary (('*'|'/') unary)*
//! unary  := '-' unary | factor
//! factor := base ('^' ['-'] integer)?
//! base   := 'z' | 'i' | float | float 'i' | '(' float (',' float)? ')' | '(' expr ')'
//!         | 'exp' '(' expr ')'
//! ```
//!
//! The argument of `exp` must reduce to a Laurent polynomial.

use num_complex::Complex64;

use super::MeroExpr;
use crate::error::{Error, Result, SyntaxError};
use crate::laurent::LaurentPolynomial;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    text: String,
    line: usize,
    column: usize,
}

fn describe(t: &Token) -> String {
    match t.tok {
        Tok::End => "end of input".into(),
        _ => format!("'{}'", t.text),
    }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lit: String = chars[start..i].iter().collect();
            let value: f64 = lit.parse().map_err(|_| {
                Error::Syntax(SyntaxError {
                    line,
                    column,
                    expected: vec!["number".into()],
                    found: format!("'{lit}'"),
                })
            })?;
            let imag = i < chars.len()
                && chars[i] == 'i'
                && !chars.get(i + 1).is_some_and(|d| d.is_alphanumeric() || *d == '_');
            if imag {
                i += 1;
                Tok::Imag(value)
            } else {
                Tok::Num(value)
            }
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if "+-*/^(),".contains(c) {
            i += 1;
            Tok::Sym(c)
        } else {
            return Err(Error::Syntax(SyntaxError {
                line,
                column,
                expected: vec!["expression".into()],
                found: format!("'{c}'"),
            }));
        };
        out.push(Token {
            tok,
            text: chars[start..i].iter().collect(),
            line,
            column,
        });
        column += i - start;
    }
    out.push(Token {
        tok: Tok::End,
        text: String::new(),
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T> {
        let t = &self.toks[self.pos];
        Err(Error::Syntax(SyntaxError {
            line: t.line,
            column: t.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: describe(t),
        }))
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.error(&[&format!("'{c}'")])
        }
    }

    fn expr(&mut self) -> Result<MeroExpr> {
        let mut acc = if self.eat('-') {
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MeroExpr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if *self.peek() == Tok::Sym('/') {
                let at = self.pos;
                self.pos += 1;
                let rhs = self.unary()?;
                acc = match acc.div(&rhs) {
                    Ok(v) => v,
                    Err(Error::ZeroDivisor) => {
                        self.pos = at;
                        return self.error(&["nonzero divisor"]);
                    }
                    Err(e) => return Err(e),
                };
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<MeroExpr> {
        if self.eat('-') {
            Ok(self.unary()?.neg())
        } else {
            self.factor()
        }
    }

    fn factor(&mut self) -> Result<MeroExpr> {
        let base = self.base()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let negative = self.eat('-');
        let Tok::Num(n) = *self.peek() else {
            return self.error(&["integer exponent"]);
        };
        if n.fract() != 0.0 || n > i32::MAX as f64 || self.toks[self.pos].text.contains(['.', 'e', 'E']) {
            return self.error(&["integer exponent"]);
        }
        let at = self.pos;
        self.pos += 1;
        let n = if negative { -(n as i32) } else { n as i32 };
        base.powi(n).map_err(|e| match e {
            Error::ZeroDivisor => {
                let t = &self.toks[at];
                Error::Syntax(SyntaxError {
                    line: t.line,
                    column: t.column,
                    expected: vec!["nonnegative exponent of a zero base".into()],
                    found: describe(t),
                })
            }
            other => other,
        })
    }

    fn signed_float(&mut self) -> Option<f64> {
        let neg = *self.peek() == Tok::Sym('-');
        let k = usize::from(neg);
        if let Tok::Num(v) = *self.peek_at(k) {
            self.pos += k + 1;
            Some(if neg { -v } else { v })
        } else {
            None
        }
    }

    fn is_tuple_ahead(&self) -> bool {
        let k = usize::from(*self.peek_at(1) == Tok::Sym('-'));
        matches!(self.peek_at(1 + k), Tok::Num(_))
            && matches!(self.peek_at(2 + k), Tok::Sym(',') | Tok::Sym(')'))
    }

    fn base(&mut self) -> Result<MeroExpr> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(MeroExpr::real(v))
            }
            Tok::Imag(v) => {
                self.pos += 1;
                Ok(MeroExpr::constant(Complex64::new(0.0, v)))
            }
            Tok::Ident(name) if name == "z" => {
                self.pos += 1;
                Ok(MeroExpr::var())
            }
            Tok::Ident(name) if name == "i" => {
                self.pos += 1;
                Ok(MeroExpr::constant(Complex64::new(0.0, 1.0)))
            }
            Tok::Ident(name) if name == "exp" => {
                self.pos += 1;
                self.expect('(')?;
                let start = self.pos;
                let arg = self.expr()?;
                let laurent = arg
                    .to_rational()
                    .ok()
                    .and_then(|r| LaurentPolynomial::from_rational(&r));
                let Some(q) = laurent else {
                    self.pos = start;
                    return self.error(&["Laurent polynomial argument"]);
                };
                self.expect(')')?;
                Ok(MeroExpr::exp(q))
            }
            Tok::Sym('(') if self.is_tuple_ahead() => {
                self.pos += 1;
                let re = self.signed_float().expect("checked by lookahead");
                let im = if self.eat(',') {
                    match self.signed_float() {
                        Some(v) => v,
                        None => return self.error(&["number"]),
                    }
                } else {
                    0.0
                };
                self.expect(')')?;
                Ok(MeroExpr::constant(Complex64::new(re, im)))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            _ => self.error(&["'z'", "number", "'('", "'exp'"]),
        }
    }
}

/// Parses expression text into a folded expression tree.
pub fn parse_expression(text: &str) -> Result<MeroExpr> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.error(&["operator", "end of input"]);
    }
    Ok(e)
}
