//! Recursive-descent parser for the scalar and one-form grammars.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?            (right associative)
//! primary := number | ident | ident '(' sum ')' | '(' sum ')'
//!          | 'd' '(' ident ')'                (one-form literals only)
//! ```

use std::sync::Arc;

use crate::error::{Error, Result};

use super::{Chart, Expr, Func};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let v: f64 = lit.parse().map_err(|_| Error::Syntax {
                offset: start,
                message: format!("malformed number `{lit}`"),
            })?;
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(Error::Syntax {
                        offset: start,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            i += c.len_utf8();
            out.push((tok, start));
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

/// Scalar or one-form value of a parsed subterm.
#[derive(Clone, Debug)]
enum Lin {
    Scalar(Expr),
    Form(Vec<Expr>),
}

struct Parser<'a> {
    chart: &'a Chart,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    forms: bool,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!("expected {what}"))
        }
    }

    fn mixed<T>(&self, at: usize) -> Result<T> {
        Err(Error::Syntax {
            offset: at,
            message: "one-forms may only be added and scaled by scalar expressions".into(),
        })
    }

    fn sum(&mut self) -> Result<Lin> {
        let mut acc = self.product()?;
        while let Tok::Op(op @ ('+' | '-')) = *self.peek() {
            let at = self.offset();
            self.bump();
            let rhs = self.product()?;
            acc = match (acc, rhs) {
                (Lin::Scalar(a), Lin::Scalar(b)) => {
                    let b = if op == '-' { Expr::Neg(Arc::new(b)) } else { b };
                    Lin::Scalar(Expr::Add(vec![a, b].into()))
                }
                (Lin::Form(a), Lin::Form(b)) => Lin::Form(
                    a.into_iter()
                        .zip(b)
                        .map(|(x, y)| if op == '-' { x - y } else { x + y })
                        .collect(),
                ),
                _ => return self.mixed(at),
            };
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Lin> {
        let mut acc = self.unary()?;
        while let Tok::Op(op @ ('*' | '/')) = *self.peek() {
            let at = self.offset();
            self.bump();
            let rhs = self.unary()?;
            acc = match (acc, rhs, op) {
                (Lin::Scalar(a), Lin::Scalar(b), '*') => Lin::Scalar(Expr::Mul(vec![a, b].into())),
                (Lin::Scalar(a), Lin::Scalar(b), _) => Lin::Scalar(Expr::Div(Arc::new(a), Arc::new(b))),
                (Lin::Scalar(s), Lin::Form(f), '*') | (Lin::Form(f), Lin::Scalar(s), '*') => {
                    let s = s.simplify();
                    Lin::Form(f.into_iter().map(|c| c * &s).collect())
                }
                (Lin::Form(f), Lin::Scalar(s), _) => {
                    let s = s.simplify();
                    Lin::Form(f.into_iter().map(|c| c / &s).collect())
                }
                _ => return self.mixed(at),
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Lin> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(match self.unary()? {
                Lin::Scalar(e) => Lin::Scalar(Expr::Neg(Arc::new(e))),
                Lin::Form(f) => Lin::Form(f.into_iter().map(Expr::negate).collect()),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Lin> {
        let base = self.primary()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        let at = self.offset();
        self.bump();
        let exp = self.unary()?;
        match (base, exp) {
            (Lin::Scalar(b), Lin::Scalar(e)) => Ok(Lin::Scalar(Expr::Pow(Arc::new(b), Arc::new(e)))),
            _ => self.mixed(at),
        }
    }

    fn primary(&mut self) -> Result<Lin> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(v) => Ok(Lin::Scalar(Expr::Const(v))),
            Tok::LParen => {
                let inner = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if *self.peek() != Tok::LParen {
                    return self.chart.var(&name).map(Lin::Scalar);
                }
                if self.forms && name == "d" {
                    self.bump();
                    let coord_at = self.offset();
                    let Tok::Ident(coord) = self.bump() else {
                        return Err(Error::Syntax {
                            offset: coord_at,
                            message: "expected a coordinate inside d(...)".into(),
                        });
                    };
                    let index = self
                        .chart
                        .index_of(&coord)
                        .ok_or(Error::UndeclaredVariable(coord))?;
                    self.expect(Tok::RParen, "`)`")?;
                    let mut coeffs = vec![Expr::ZERO; self.chart.dim()];
                    coeffs[index] = Expr::ONE;
                    return Ok(Lin::Form(coeffs));
                }
                let Some(func) = Func::from_name(&name) else {
                    return Err(Error::Syntax {
                        offset: at,
                        message: format!("unknown function `{name}`"),
                    });
                };
                self.bump();
                let arg = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                match arg {
                    Lin::Scalar(a) => Ok(Lin::Scalar(Expr::Func(func, Arc::new(a)))),
                    Lin::Form(_) => self.mixed(at),
                }
            }
            Tok::Op(c) => Err(Error::Syntax {
                offset: at,
                message: format!("unexpected operator `{c}`"),
            }),
            Tok::RParen => Err(Error::Syntax {
                offset: at,
                message: "unexpected `)`".into(),
            }),
            Tok::End => Err(Error::Syntax {
                offset: at,
                message: "unexpected end of input".into(),
            }),
        }
    }

    fn finish(&mut self, value: Lin) -> Result<Lin> {
        if *self.peek() != Tok::End {
            return self.syntax("unexpected trailing input");
        }
        Ok(value)
    }
}

fn run(chart: &Chart, text: &str, forms: bool) -> Result<Lin> {
    let mut p = Parser {
        chart,
        toks: tokenize(text)?,
        pos: 0,
        forms,
    };
    let v = p.sum()?;
    p.finish(v)
}

impl Chart {
    /// Parses a scalar expression. The tree is returned as written; call
    /// [`Expr::simplify`] to normalize it.
    pub fn parse(&self, text: &str) -> Result<Expr> {
        match run(self, text, false)? {
            Lin::Scalar(e) => Ok(e),
            Lin::Form(_) => unreachable!("differentials are only parsed in one-form mode"),
        }
    }
}

/// Parses a one-form literal such as `d(s) - p*d(q)` into its coefficient
/// vector (one entry per coordinate).
pub fn parse_one_form_coeffs(chart: &Chart, text: &str) -> Result<Vec<Expr>> {
    match run(chart, text, true)? {
        Lin::Form(f) => Ok(f),
        Lin::Scalar(e) if e.simplify().is_zero_literal() => Ok(vec![Expr::ZERO; chart.dim()]),
        Lin::Scalar(_) => Err(Error::Syntax {
            offset: 0,
            message: "expected a one-form (terms like `expr*d(coord)`)".into(),
        }),
    }
}
