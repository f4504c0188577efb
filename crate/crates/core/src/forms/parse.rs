//! Parser for polynomial strings such as `z1^2 - 3i z1 z2 + conj(z2)`.
//!
//! Variables are `z1..zn`; with conjugates allowed also `zb1..zbn` (or `z̄1`),
//! `x1..xn`, `y1..yn` and `conj(..)`. Multiplication may be implicit.

use crate::error::{Error, Result};
use crate::forms::scalar::ScalarField;
use num_complex::Complex64 as C64;

#[derive(Clone, Copy, Debug)]
pub struct ParseOptions {
    pub nvars: usize,
    pub allow_conj: bool,
}

impl ParseOptions {
    pub fn holomorphic(nvars: usize) -> ParseOptions {
        ParseOptions { nvars, allow_conj: false }
    }

    pub fn smooth(nvars: usize) -> ParseOptions {
        ParseOptions { nvars, allow_conj: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn normalize(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '₀'..='₉' => out.push((b'0' + (ch as u32 - '₀' as u32) as u8) as char),
            '\u{0304}' => out.push('b'),
            '·' | '⋅' => out.push('*'),
            '−' => out.push('-'),
            _ => out.push(ch),
        }
    }
    out
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = normalize(s).chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                toks.push(Tok::Plus);
                i += 1
            }
            '-' => {
                toks.push(Tok::Minus);
                i += 1
            }
            '*' => {
                toks.push(Tok::Star);
                i += 1
            }
            '^' => {
                toks.push(Tok::Caret);
                i += 1
            }
            '(' => {
                toks.push(Tok::LParen);
                i += 1
            }
            ')' => {
                toks.push(Tok::RParen);
                i += 1
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // exponent part, e.g. 1e-3
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '-' || chars[j] == '+') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v = text.parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{}'", text)))?;
                toks.push(Tok::Num(v));
            }
            c if c.is_alphabetic() => {
                // identifiers: letters followed by digits (z12) or a bare word (conj, i)
                let start = i;
                while i < chars.len() && chars[i].is_alphabetic() {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                toks.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            _ => return Err(Error::Parse(format!("unexpected character '{}' in '{}'", c, s))),
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    opts: ParseOptions,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse(format!("{} in '{}'", msg.into(), self.src))
    }

    fn expr(&mut self) -> Result<ScalarField> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ScalarField> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<ScalarField> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<ScalarField> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            match self.next() {
                Some(Tok::Num(v)) if v >= 0.0 && v.fract() == 0.0 && v <= 64.0 => Ok(base.pow(v as u32)),
                _ => Err(self.err("exponent must be a small non-negative integer")),
            }
        } else {
            Ok(base)
        }
    }

    fn var_index(&self, name: &str, digits: &str) -> Result<usize> {
        let k: usize = digits.parse().map_err(|_| self.err(format!("variable '{}' needs an index", name)))?;
        if k == 0 || k > self.opts.nvars {
            return Err(self.err(format!("variable '{}{}' outside z1..z{}", name, k, self.opts.nvars)));
        }
        Ok(k - 1)
    }

    fn need_conj(&self, what: &str) -> Result<()> {
        if self.opts.allow_conj {
            Ok(())
        } else {
            Err(self.err(format!("'{}' is not holomorphic; only polynomials in z1..z{} are allowed here", what, self.opts.nvars)))
        }
    }

    fn atom(&mut self) -> Result<ScalarField> {
        match self.next() {
            Some(Tok::Num(v)) => Ok(ScalarField::real(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(self.err("missing ')'")),
                }
            }
            Some(Tok::Ident(id)) => {
                let split = id.find(|c: char| c.is_ascii_digit()).unwrap_or(id.len());
                let (name, digits) = id.split_at(split);
                match name {
                    "i" if digits.is_empty() => Ok(ScalarField::constant(C64::new(0.0, 1.0))),
                    "conj" if digits.is_empty() => {
                        self.need_conj("conj")?;
                        match self.peek() {
                            Some(Tok::LParen) => Ok(self.atom()?.conj()),
                            _ => Err(self.err("conj needs a parenthesized argument")),
                        }
                    }
                    "z" => Ok(ScalarField::z(self.var_index(name, digits)?)),
                    "zb" => {
                        self.need_conj(&id)?;
                        Ok(ScalarField::zb(self.var_index(name, digits)?))
                    }
                    "x" => {
                        self.need_conj(&id)?;
                        Ok(ScalarField::x(self.var_index(name, digits)?))
                    }
                    "y" => {
                        self.need_conj(&id)?;
                        Ok(ScalarField::y(self.var_index(name, digits)?))
                    }
                    // "2i" lexes as Num(2) Ident(i); "iz1" is not accepted
                    _ => Err(self.err(format!("unknown symbol '{}'", id))),
                }
            }
            Some(t) => Err(self.err(format!("unexpected token {:?}", t))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parse a polynomial string into a [`ScalarField`].
pub fn parse_polynomial(src: &str, opts: ParseOptions) -> Result<ScalarField> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut p = Parser { toks, pos: 0, opts, src };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}
