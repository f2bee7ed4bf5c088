//! Infix shorthand for rational maps, e.g. `z^3-3z` or `(a*z^2+1)/(z)`.
//!
//! The variable is `z`; other identifiers must be bound to exact constants.
//! Juxtaposition multiplies (`3z`, `2(z+1)`), `^` takes an integer exponent,
//! and numbers may be integers, fractions via `/`, or finite decimals.

use std::collections::BTreeMap;

use crate::arith::rational::parse_rational;
use crate::arith::{Field, FieldElement, Poly};
use crate::error::{Error, Result};
use crate::map::RationalMap;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push((start, Tok::Num(chars[start..i].iter().collect())));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else if c == '(' {
            out.push((i, Tok::LParen));
            i += 1;
        } else if c == ')' {
            out.push((i, Tok::RParen));
            i += 1;
        } else {
            return Err(Error::parse(format!("column {}", i + 1), format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

/// A rational function as an unreduced quotient.
#[derive(Clone)]
struct Frac {
    num: Poly,
    den: Poly,
}

impl Frac {
    fn constant(c: FieldElement) -> Frac {
        let field = c.field().clone();
        Frac {
            num: Poly::constant(c),
            den: Poly::one(&field),
        }
    }

    fn add(&self, o: &Frac) -> Frac {
        Frac {
            num: &(&self.num * &o.den) + &(&o.num * &self.den),
            den: &self.den * &o.den,
        }
        .reduced()
    }

    fn neg(&self) -> Frac {
        Frac {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    fn mul(&self, o: &Frac) -> Frac {
        Frac {
            num: &self.num * &o.num,
            den: &self.den * &o.den,
        }
        .reduced()
    }

    fn inv(&self) -> Option<Frac> {
        (!self.num.is_zero()).then(|| Frac {
            num: self.den.clone(),
            den: self.num.clone(),
        })
    }

    fn reduced(self) -> Frac {
        let g = self.num.gcd(&self.den);
        if g.is_constant() {
            return self;
        }
        Frac {
            num: self.num.exact_div(&g).expect("gcd divides"),
            den: self.den.exact_div(&g).expect("gcd divides"),
        }
    }

    fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    field: &'a Field,
    symbols: &'a BTreeMap<String, FieldElement>,
    allow_variable: bool,
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn column(&self) -> String {
        let at = self.toks.get(self.pos).map_or(self.len, |(p, _)| *p);
        format!("column {}", at + 1)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::parse(self.column(), msg))
    }

    fn expr(&mut self) -> Result<Frac> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == '+' { acc.add(&rhs) } else { acc.add(&rhs.neg()) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Frac> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().cloned() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = acc.mul(&rhs);
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    let inv = match rhs.inv() {
                        Some(r) => r,
                        None => return self.err("division by zero"),
                    };
                    acc = acc.mul(&inv);
                }
                Some(Tok::Num(_) | Tok::Ident(_) | Tok::LParen) => {
                    let rhs = self.power()?;
                    acc = acc.mul(&rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Frac> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Frac> {
        let base = self.primary()?;
        if self.peek() != Some(&Tok::Op('^')) {
            return Ok(base);
        }
        self.pos += 1;
        let paren = self.peek() == Some(&Tok::LParen);
        if paren {
            self.pos += 1;
        }
        let negative = self.peek() == Some(&Tok::Op('-'));
        if negative {
            self.pos += 1;
        }
        let exp: u32 = match self.peek().cloned() {
            Some(Tok::Num(s)) => match s.parse() {
                Ok(e) if e <= 4096 => e,
                _ => return self.err(format!("exponent {s:?} is not a small integer")),
            },
            _ => return self.err("expected an integer exponent"),
        };
        self.pos += 1;
        if paren {
            if self.peek() != Some(&Tok::RParen) {
                return self.err("expected ')'");
            }
            self.pos += 1;
        }
        let mut out = Frac {
            num: base.num.pow(exp),
            den: base.den.pow(exp),
        };
        if negative {
            out = match out.inv() {
                Some(r) => r,
                None => return self.err("zero to a negative power"),
            };
        }
        Ok(out)
    }

    fn primary(&mut self) -> Result<Frac> {
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                let q = match parse_rational(&s) {
                    Ok(q) => q,
                    Err(_) => return self.err(format!("bad number {s:?}")),
                };
                self.pos += 1;
                Ok(Frac::constant(self.field.from_rational(q)))
            }
            Some(Tok::Ident(name)) => {
                if name == "z" {
                    if !self.allow_variable {
                        return self.err("the variable z is not allowed in a constant");
                    }
                    self.pos += 1;
                    return Ok(Frac {
                        num: Poly::x(self.field),
                        den: Poly::one(self.field),
                    });
                }
                match self.symbols.get(&name) {
                    Some(v) => {
                        self.pos += 1;
                        Ok(Frac::constant(v.clone()))
                    }
                    None => self.err(format!("unbound symbol {name:?}")),
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

fn parse_frac(
    src: &str,
    field: &Field,
    symbols: &BTreeMap<String, FieldElement>,
    allow_variable: bool,
) -> Result<Frac> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        field,
        symbols,
        allow_variable,
        len: src.chars().count(),
    };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(out)
}

/// Parses a map written in `z` over `field`.
pub fn parse_map(
    src: &str,
    field: &Field,
    symbols: &BTreeMap<String, FieldElement>,
) -> Result<RationalMap> {
    let f = parse_frac(src, field, symbols, true)?;
    if f.den.is_zero() {
        return Err(Error::parse("column 1", "denominator vanishes"));
    }
    RationalMap::new(f.num, f.den).map_err(|e| Error::parse("column 1", e.to_string()))
}

/// Parses a constant expression such as `1/2` or `1+w`.
pub fn parse_constant(
    src: &str,
    field: &Field,
    symbols: &BTreeMap<String, FieldElement>,
) -> Result<FieldElement> {
    let f = parse_frac(src, field, symbols, false)?;
    debug_assert!(f.is_constant());
    let n = f.num.coeff(0);
    let d = f.den.coeff(0);
    if d.is_zero() {
        return Err(Error::parse("column 1", "division by zero"));
    }
    Ok(&n / &d)
}
