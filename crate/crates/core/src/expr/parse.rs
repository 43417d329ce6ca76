//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)?
//! exponent:= '-' exponent | power
//! primary := number | coordinate | func '(' expr ')' | '(' expr ')'
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use super::{Expr, Func};
use crate::jet::Chart;

const MAX_EXPONENT: i64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown coordinate `{name}` at offset {position}")]
    UnknownCoordinate { name: String, position: usize },
    #[error("unsupported exponent at offset {position}: {message}")]
    UnsupportedExponent { position: usize, message: String },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl Lexer<'_> {
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&b) = bytes.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        if b.is_ascii_digit() || b == b'.' {
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let int_end = self.pos;
            let mut frac_end = int_end;
            if self.pos < bytes.len() && bytes[self.pos] == b'.' {
                self.pos += 1;
                while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                frac_end = self.pos;
            }
            let int_part = &self.src[start..int_end];
            let frac_part = if frac_end > int_end {
                &self.src[int_end + 1..frac_end]
            } else {
                ""
            };
            if int_part.is_empty() && frac_part.is_empty() {
                return Err(ParseError::Syntax {
                    position: start,
                    message: "malformed number".into(),
                });
            }
            let digits = format!("{int_part}{frac_part}");
            let numer: BigInt = digits.parse().unwrap_or_else(|_| BigInt::zero());
            let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
            return Ok((Tok::Num(BigRational::new(numer, denom)), start));
        }
        if b.is_ascii_alphabetic() {
            while self.pos < bytes.len()
                && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
            {
                self.pos += 1;
            }
            return Ok((Tok::Ident(self.src[start..self.pos].to_string()), start));
        }
        if b"+-*/^()".contains(&b) {
            self.pos += 1;
            return Ok((Tok::Op(b as char), start));
        }
        let ch = self.src[start..].chars().next().unwrap_or('?');
        Err(ParseError::Syntax {
            position: start,
            message: format!("unexpected character `{ch}`"),
        })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    chart: &'a Chart,
    tok: Tok,
    at: usize,
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(), ParseError> {
        let (tok, at) = self.lexer.next()?;
        self.tok = tok;
        self.at = at;
        Ok(())
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            position: self.at,
            message: message.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.tok == Tok::Op(c) {
            self.bump()
        } else {
            self.syntax(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.tok {
                Tok::Op('+') => {
                    self.bump()?;
                    acc = acc + self.term()?;
                }
                Tok::Op('-') => {
                    self.bump()?;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.tok {
                Tok::Op('*') => {
                    self.bump()?;
                    acc = acc * self.unary()?;
                }
                Tok::Op('/') => {
                    self.bump()?;
                    let at = self.at;
                    let d = self.unary()?;
                    if d.is_zero() {
                        return Err(ParseError::Syntax {
                            position: at,
                            message: "division by zero".into(),
                        });
                    }
                    acc = acc / d;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Op('-') {
            self.bump()?;
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.tok != Tok::Op('^') {
            return Ok(base);
        }
        self.bump()?;
        let at = self.at;
        let e = self.exponent()?;
        let unsupported = |message: String| ParseError::UnsupportedExponent {
            position: at,
            message,
        };
        let r = e
            .as_rational()
            .ok_or_else(|| unsupported(format!("`{e}` is not a rational constant")))?;
        if r.denom() > &BigInt::from(4) {
            return Err(unsupported(format!("denominator of {r} exceeds 4")));
        }
        if r.abs() > BigRational::from_integer(BigInt::from(MAX_EXPONENT)) {
            return Err(unsupported(format!("{r} is too large")));
        }
        if base.is_zero() && r.is_negative() {
            return Err(ParseError::Syntax {
                position: at,
                message: "division by zero".into(),
            });
        }
        Ok(base.pow(r))
    }

    fn exponent(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Op('-') {
            self.bump()?;
            return Ok(-self.exponent()?);
        }
        self.power()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.tok.clone() {
            Tok::Num(c) => {
                self.bump()?;
                Ok(Expr::constant(c))
            }
            Tok::Op('(') => {
                self.bump()?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let at = self.at;
                self.bump()?;
                if let Some(f) = Func::from_name(&name) {
                    if self.tok == Tok::Op('(') {
                        self.bump()?;
                        let arg = self.expr()?;
                        self.expect(')')?;
                        return Ok(Expr::apply(f, &arg));
                    }
                    return self.syntax(format!("expected `(` after `{name}`"));
                }
                match self.chart.resolve(&name) {
                    Some(c) => Ok(Expr::coord(c)),
                    None => Err(ParseError::UnknownCoordinate { name, position: at }),
                }
            }
            Tok::End => self.syntax("unexpected end of input"),
            Tok::Op(c) => self.syntax(format!("unexpected `{c}`")),
        }
    }
}

/// Parses `src` over `chart` and returns its canonical form.
pub fn parse_expr(src: &str, chart: &Chart) -> Result<Expr, ParseError> {
    let mut p = Parser {
        lexer: Lexer { src, pos: 0 },
        chart,
        tok: Tok::End,
        at: 0,
    };
    p.bump()?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return p.syntax("trailing input");
    }
    Ok(e)
}
