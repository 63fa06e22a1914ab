//! Recursive-descent parser for differential polynomials and operator
//! literals.
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := base ("^" uint)?
//! base   := int | coord | "(" expr ")" | "-" factor | opD
//! coord  := ident jetsuffix?
//! jetsuffix := "_{" ident ("," ident)* "}" | "_" shortnames
//! opD    := "D" jetsuffix            (operator literals only)
//! ```
//!
//! Division is only accepted by a nonzero rational constant. In operator
//! literals an `opD` factor must be the last factor of its term.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::expr::{CoordId, DiffPoly, MultiIndex, Rational, Vars};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("undeclared identifier `{name}` at offset {offset}")]
    Undeclared { offset: usize, name: String },
    #[error("malformed jet suffix at offset {offset}: {message}")]
    MalformedJetSuffix { offset: usize, message: String },
    #[error("division by zero at offset {offset}")]
    DivisionByZero { offset: usize },
    #[error("divisor at offset {offset} is not a rational constant")]
    NonConstantDivisor { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::Undeclared { offset, .. }
            | ParseError::MalformedJetSuffix { offset, .. }
            | ParseError::DivisionByZero { offset }
            | ParseError::NonConstantDivisor { offset } => *offset,
        }
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { offset, message: message.into() }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Underscore,
    LBrace,
    RBrace,
    Comma,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' | '−' => Tok::Minus,
            '*' | '·' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '_' => Tok::Underscore,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            d if d.is_ascii_digit() => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                toks.push((Tok::Int(s.parse().expect("digits")), start));
                continue;
            }
            a if a.is_alphabetic() => {
                while i < chars.len() && chars[i].is_alphanumeric() {
                    i += 1;
                }
                toks.push((Tok::Ident(chars[start..i].iter().collect()), start));
                continue;
            }
            other => return Err(syntax(start, format!("unexpected character `{}`", other))),
        };
        toks.push((tok, start));
        i += 1;
    }
    toks.push((Tok::End, chars.len()));
    Ok(toks)
}

/// Σ a^σ D_σ as parsed; plain expressions only use the empty multi-index.
pub type OpTerms = BTreeMap<MultiIndex, DiffPoly>;

fn op_add(a: &mut OpTerms, b: OpTerms) {
    for (k, v) in b {
        let e = a.entry(k.clone()).or_default();
        *e += &v;
        if e.is_zero() {
            a.remove(&k);
        }
    }
}

fn op_neg(a: OpTerms) -> OpTerms {
    a.into_iter().map(|(k, v)| (k, -v)).collect()
}

fn op_scalar(a: &OpTerms) -> Option<DiffPoly> {
    if a.keys().all(MultiIndex::is_empty) {
        Some(a.get(&MultiIndex::empty()).cloned().unwrap_or_default())
    } else {
        None
    }
}

fn op_from_poly(p: DiffPoly) -> OpTerms {
    let mut t = OpTerms::new();
    if !p.is_zero() {
        t.insert(MultiIndex::empty(), p);
    }
    t
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a Vars,
    operators: bool,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn sum(&mut self) -> Result<OpTerms, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let t = self.term()?;
                    op_add(&mut acc, t);
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.term()?;
                    op_add(&mut acc, op_neg(t));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<OpTerms, ParseError> {
        let first_at = self.offset();
        let mut acc = self.factor()?;
        let mut operator_at = (op_scalar(&acc).is_none()).then_some(first_at);
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let at = self.offset();
                    let rhs = self.factor()?;
                    if let Some(op_at) = operator_at {
                        return Err(syntax(op_at, "operator factor must be the last factor of a term"));
                    }
                    let coef = op_scalar(&acc).expect("scalar so far");
                    if op_scalar(&rhs).is_none() {
                        operator_at = Some(at);
                    }
                    acc = rhs.into_iter().map(|(k, v)| (k, &coef * &v)).filter(|(_, v)| !v.is_zero()).collect();
                }
                Tok::Slash => {
                    self.bump();
                    let at = self.offset();
                    let rhs = self.factor()?;
                    let divisor = op_scalar(&rhs)
                        .and_then(|p| p.as_constant())
                        .ok_or(ParseError::NonConstantDivisor { offset: at })?;
                    if divisor.is_zero() {
                        return Err(ParseError::DivisionByZero { offset: at });
                    }
                    let inv = Rational::from_integer(1.into()) / divisor;
                    acc = acc.into_iter().map(|(k, v)| (k, v.scale(&inv))).collect();
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<OpTerms, ParseError> {
        let at = self.offset();
        let base = self.base()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let (tok, eat) = self.bump();
            let e = match tok {
                Tok::Int(v) => v.to_u32().ok_or_else(|| syntax(eat, "exponent too large"))?,
                _ => return Err(syntax(eat, "expected unsigned integer exponent")),
            };
            let p = op_scalar(&base).ok_or_else(|| syntax(at, "operators cannot be raised to a power"))?;
            return Ok(op_from_poly(p.pow(e)));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<OpTerms, ParseError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Int(v) => Ok(op_from_poly(DiffPoly::constant(Rational::from_integer(v)))),
            Tok::Minus => Ok(op_neg(self.factor()?)),
            Tok::LParen => {
                let inner = self.sum()?;
                match self.bump() {
                    (Tok::RParen, _) => Ok(inner),
                    (_, o) => Err(syntax(o, "expected `)`")),
                }
            }
            Tok::Ident(name) => {
                if self.operators && name == "D" && *self.peek() == Tok::Underscore {
                    let sigma = self.suffix()?;
                    let mut t = OpTerms::new();
                    t.insert(sigma, DiffPoly::one());
                    return Ok(t);
                }
                self.coordinate(name, at)
            }
            Tok::End => Err(syntax(at, "unexpected end of input")),
            other => Err(syntax(at, format!("unexpected token {:?}", other))),
        }
    }

    fn coordinate(&mut self, name: String, at: usize) -> Result<OpTerms, ParseError> {
        let vars = self.vars;
        let coord = if let Some(i) = vars.independent_index(&name) {
            CoordId::Independent(i)
        } else if let Some(j) = vars.dependents.iter().position(|s| *s == name) {
            let sigma = if *self.peek() == Tok::Underscore { self.suffix()? } else { MultiIndex::empty() };
            return Ok(op_from_poly(DiffPoly::coord(CoordId::jet(j, sigma))));
        } else if let Some(p) = vars.parameters.iter().position(|s| *s == name) {
            CoordId::Parameter(p)
        } else {
            return Err(ParseError::Undeclared { offset: at, name });
        };
        if *self.peek() == Tok::Underscore {
            return Err(ParseError::MalformedJetSuffix {
                offset: self.offset(),
                message: format!("`{}` is not a dependent variable", name),
            });
        }
        Ok(op_from_poly(DiffPoly::coord(coord)))
    }

    /// Parses `_{a,b}` or `_ab` (the underscore is the current token).
    fn suffix(&mut self) -> Result<MultiIndex, ParseError> {
        let (_, under_at) = self.bump();
        let vars = self.vars;
        let lookup = |name: &str, at: usize| {
            vars.independent_index(name).ok_or_else(|| ParseError::MalformedJetSuffix {
                offset: at,
                message: format!("`{}` is not an independent variable", name),
            })
        };
        match self.bump() {
            (Tok::LBrace, _) => {
                let mut idx = Vec::new();
                loop {
                    match self.bump() {
                        (Tok::Ident(n), at) => idx.push(lookup(&n, at)?),
                        (_, at) => {
                            return Err(ParseError::MalformedJetSuffix {
                                offset: at,
                                message: "expected independent variable name".into(),
                            })
                        }
                    }
                    match self.bump() {
                        (Tok::Comma, _) => continue,
                        (Tok::RBrace, _) => break,
                        (_, at) => {
                            return Err(ParseError::MalformedJetSuffix {
                                offset: at,
                                message: "expected `,` or `}`".into(),
                            })
                        }
                    }
                }
                Ok(MultiIndex::new(idx))
            }
            (Tok::Ident(names), at) => {
                if !vars.short_suffixes() {
                    return Err(ParseError::MalformedJetSuffix {
                        offset: at,
                        message: "shorthand suffixes need single-character independent names; use `_{a,b}`".into(),
                    });
                }
                let mut idx = Vec::new();
                for (k, ch) in names.chars().enumerate() {
                    idx.push(lookup(&ch.to_string(), at + k)?);
                }
                Ok(MultiIndex::new(idx))
            }
            _ => Err(syntax(under_at, "expected jet suffix after `_`")),
        }
    }
}

fn run(text: &str, vars: &Vars, operators: bool) -> Result<OpTerms, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, vars, operators };
    let out = p.sum()?;
    match p.peek() {
        Tok::End => Ok(out),
        _ => Err(syntax(p.offset(), "unexpected trailing input")),
    }
}

/// Parses a differential polynomial.
pub fn parse_expr(text: &str, vars: &Vars) -> Result<DiffPoly, ParseError> {
    let terms = run(text, vars, false)?;
    Ok(op_scalar(&terms).expect("no operator factors in expression mode"))
}

/// Parses a scalar operator literal `Σ a^σ D_σ`.
pub fn parse_op_terms(text: &str, vars: &Vars) -> Result<OpTerms, ParseError> {
    run(text, vars, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{int, rat};

    fn kdv_vars() -> Vars {
        Vars::new(&["x", "t"], &["u"], &["lambda"])
    }

    fn jet(sigma: &[usize]) -> DiffPoly {
        DiffPoly::coord(CoordId::jet(0, MultiIndex::new(sigma.to_vec())))
    }

    #[test]
    fn kdv_equation_has_three_terms() {
        let v = kdv_vars();
        let p = parse_expr("u_t - u*u_x - u_{x,x,x}", &v).unwrap();
        assert_eq!(p.num_terms(), 3);
        let expect = &(&jet(&[1]) - &(&jet(&[]) * &jet(&[0]))) - &jet(&[0, 0, 0]);
        assert_eq!(p, expect);
        assert_eq!(parse_expr("u_xxx", &v).unwrap(), jet(&[0, 0, 0]));
        assert_eq!(parse_expr("u_{t,x}", &v).unwrap(), parse_expr("u_xt", &v).unwrap());
    }

    #[test]
    fn zero_parses_to_empty_map() {
        assert!(parse_expr("0", &kdv_vars()).unwrap().is_zero());
        assert!(parse_expr("u - u", &kdv_vars()).unwrap().is_zero());
    }

    #[test]
    fn dangling_underscore_is_rejected_at_its_offset() {
        let err = parse_expr("u_", &kdv_vars()).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 1, .. }), "{err:?}");
    }

    #[test]
    fn undeclared_and_malformed() {
        let v = kdv_vars();
        assert!(matches!(parse_expr("u + w", &v), Err(ParseError::Undeclared { offset: 4, .. })));
        assert!(matches!(parse_expr("u_y", &v), Err(ParseError::MalformedJetSuffix { .. })));
        assert!(matches!(parse_expr("x_t", &v), Err(ParseError::MalformedJetSuffix { .. })));
        assert!(matches!(parse_expr("u_{x,", &v), Err(ParseError::MalformedJetSuffix { .. })));
        let long = Vars::new(&["x1", "x2"], &["u"], &[]);
        assert!(matches!(parse_expr("u_x1x2", &long), Err(ParseError::MalformedJetSuffix { .. })));
        assert!(parse_expr("u_{x1,x2}", &long).is_ok());
    }

    #[test]
    fn rationals_and_division() {
        let v = kdv_vars();
        let p = parse_expr("1/6*u - u/3 + 2^2", &v).unwrap();
        let expect = &jet(&[]).scale(&rat(-1, 6)) + &DiffPoly::from_int(4);
        assert_eq!(p, expect);
        assert!(matches!(parse_expr("u/0", &v), Err(ParseError::DivisionByZero { .. })));
        assert!(matches!(parse_expr("1/u", &v), Err(ParseError::NonConstantDivisor { .. })));
    }

    #[test]
    fn unary_minus_and_powers() {
        let v = kdv_vars();
        assert_eq!(parse_expr("-u^2", &v).unwrap(), -jet(&[]).pow(2));
        assert_eq!(parse_expr("(u + 1)^2", &v).unwrap(), parse_expr("u^2 + 2*u + 1", &v).unwrap());
        assert_eq!(parse_expr("-(lambda+u)", &v).unwrap().num_terms(), 2);
        assert_eq!(parse_expr("2 * -3", &v).unwrap(), DiffPoly::constant(int(-6)));
    }

    #[test]
    fn operator_literals() {
        let v = kdv_vars();
        let t = parse_op_terms("D_{t} - u*D_x - u_x - D_{x,x,x}", &v).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t[&MultiIndex::single(1)], DiffPoly::one());
        assert_eq!(t[&MultiIndex::single(0)], -jet(&[]));
        assert_eq!(t[&MultiIndex::empty()], -jet(&[0]));
        assert_eq!(t[&MultiIndex::repeated(0, 3)], DiffPoly::from_int(-1));
        assert!(parse_op_terms("D_x*u", &v).is_err());
        assert!(parse_op_terms("D_x^2", &v).is_err());
        // `D` is an ordinary (here undeclared) name in expressions
        assert!(matches!(parse_expr("D_x", &v), Err(ParseError::Undeclared { .. })));
    }
}
