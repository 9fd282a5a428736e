use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::PolyError;
use crate::poly::Polynomial;
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(usize),
    T,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, PolyError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '/' => out.push((start, Tok::Slash)),
            '^' => out.push((start, Tok::Caret)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("digits");
                out.push((start, Tok::Num(n)));
                continue;
            }
            'x' => {
                i += 1;
                let s = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if s == i {
                    return Err(PolyError::Syntax { pos: start, msg: "expected variable index after 'x'".into() });
                }
                let idx: usize = text[s..i]
                    .parse()
                    .map_err(|_| PolyError::Syntax { pos: start, msg: "variable index too large".into() })?;
                if idx == 0 {
                    return Err(PolyError::VarOutOfRange { index: 0, nvars: 0 });
                }
                out.push((start, Tok::Var(idx)));
                continue;
            }
            't' => out.push((start, Tok::T)),
            _ => {
                return Err(PolyError::Syntax { pos: start, msg: format!("unexpected character {c:?}") });
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    nvars: usize,
    total: usize,
    allow_t: bool,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: &str) -> Result<T, PolyError> {
        Err(PolyError::Syntax { pos: self.here(), msg: msg.to_string() })
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Star) = self.peek() {
            self.pos += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial, PolyError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, PolyError> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n
                        .try_into()
                        .map_err(|_| PolyError::Syntax { pos: self.here(), msg: "exponent too large".into() })?;
                    return Ok(base.pow(e));
                }
                _ => return self.err("exponent must be a nonnegative integer literal"),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial, PolyError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                if let Some(Tok::Slash) = self.peek() {
                    self.pos += 1;
                    match self.peek().cloned() {
                        Some(Tok::Num(d)) => {
                            if d.is_zero() {
                                return self.err("zero denominator");
                            }
                            self.pos += 1;
                            Ok(Polynomial::constant(self.total, Q::new(n, d)))
                        }
                        _ => self.err("expected denominator"),
                    }
                } else {
                    Ok(Polynomial::constant(self.total, Q::from_integer(n)))
                }
            }
            Some(Tok::Var(i)) => {
                if i > self.nvars {
                    return Err(PolyError::VarOutOfRange { index: i, nvars: self.nvars });
                }
                self.pos += 1;
                Ok(Polynomial::var(self.total, i - 1))
            }
            Some(Tok::T) => {
                if !self.allow_t {
                    return self.err("variable t not allowed here");
                }
                self.pos += 1;
                Ok(Polynomial::var(self.total, self.nvars))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => self.err("expected ')'"),
                }
            }
            Some(_) => self.err("unexpected token"),
            None => self.err("unexpected end of input"),
        }
    }
}

fn parse_inner(text: &str, nvars: usize, allow_t: bool) -> Result<Polynomial, PolyError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        nvars,
        total: if allow_t { nvars + 1 } else { nvars },
        allow_t,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Parses and fully expands a polynomial in x1..x{nvars}.
pub fn parse_polynomial(text: &str, nvars: usize) -> Result<Polynomial, PolyError> {
    parse_inner(text, nvars, false)
}

/// Like `parse_polynomial` but also accepts `t`, which becomes variable index `nvars`
/// (so the result has nvars + 1 variables).
pub fn parse_polynomial_with_t(text: &str, nvars: usize) -> Result<Polynomial, PolyError> {
    parse_inner(text, nvars, true)
}

/// Largest variable index mentioned in `text` (at least 1).
pub fn infer_nvars(text: &str) -> Result<usize, PolyError> {
    let toks = lex(text)?;
    Ok(toks
        .iter()
        .filter_map(|(_, t)| if let Tok::Var(i) = t { Some(*i) } else { None })
        .max()
        .unwrap_or(1))
}

/// Parses a comma-separated list of rationals, e.g. `1,1,-2` or `1/2, 3`.
pub fn parse_point(text: &str) -> Result<Vec<Q>, PolyError> {
    text.split(',').map(crate::rational::parse_q).collect()
}
