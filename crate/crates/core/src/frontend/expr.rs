//! Lexer and expression parser shared by the DSL, the CLI and textual scalars.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::algebra::{RGen, TMono, TPoly};
use crate::formal::LPoly;
use crate::scalar::{ParamSpace, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    pub fn new(span: Span, message: impl Into<String>) -> Self {
        Diagnostic { span, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Int(BigInt),
    Ident(String),
    Str(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Comma,
    Semi,
    Eq,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

pub fn lex(text: &str) -> Result<Vec<(Tok, Span)>, Diagnostic> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        let advance = |i: &mut usize, col: &mut usize, n: usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(&mut i, &mut col, 1),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                out.push((Tok::Int(s.parse().expect("digits")), span));
            }
            'λ' => {
                advance(&mut i, &mut col, 1);
                out.push((Tok::Ident("lambda".into()), span));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                col += i - start;
                out.push((Tok::Ident(chars[start..i].iter().collect()), span));
            }
            '"' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '"' && chars[j] != '\n' {
                    j += 1;
                }
                if j >= chars.len() || chars[j] != '"' {
                    return Err(Diagnostic::new(span, "unterminated string"));
                }
                out.push((Tok::Str(chars[start..j].iter().collect()), span));
                col += j + 1 - i;
                i = j + 1;
            }
            _ => {
                let tok = match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ':' => Tok::Colon,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    '=' => Tok::Eq,
                    other => return Err(Diagnostic::new(span, format!("unexpected character `{other}`"))),
                };
                advance(&mut i, &mut col, 1);
                out.push((tok, span));
            }
        }
    }
    out.push((Tok::Eof, Span { line, col }));
    Ok(out)
}

/// One factor `T^n name` inside a `: ... :` monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorAst {
    pub derivs: u32,
    pub name: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt, Span),
    Ident(String, Span),
    Mono(Vec<FactorAst>, Span),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>, Span),
    Div(Box<Expr>, Box<Expr>, Span),
    Pow(Box<Expr>, u32, Span),
}

pub struct Parser<'a> {
    toks: &'a [(Tok, Span)],
    pos: usize,
}

impl<'a> Parser<'a> {
    pub fn new(toks: &'a [(Tok, Span)]) -> Self {
        Parser { toks, pos: 0 }
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    pub fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    pub fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<Span, Diagnostic> {
        if self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(Diagnostic::new(self.span(), format!("expected {tok}, found {}", self.peek())))
        }
    }

    pub fn expect_ident(&mut self) -> Result<(String, Span), Diagnostic> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.bump().1;
                Ok((s, sp))
            }
            other => Err(Diagnostic::new(self.span(), format!("expected identifier, found {other}"))),
        }
    }

    /// Skips to just after the next `;` (error recovery).
    pub fn recover(&mut self) {
        while !matches!(self.peek(), Tok::Semi | Tok::Eof) {
            self.bump();
        }
        if self.peek() == &Tok::Semi {
            self.bump();
        }
    }

    pub fn at_eof(&self) -> bool {
        self.peek() == &Tok::Eof
    }

    pub fn parse_expr(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = match self.peek() {
            Tok::Minus => {
                self.bump();
                Expr::Neg(Box::new(self.parse_term()?))
            }
            Tok::Plus => {
                self.bump();
                self.parse_term()?
            }
            _ => self.parse_term()?,
        };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.parse_term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.parse_term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Int(_) | Tok::Ident(_) | Tok::LParen | Tok::Colon)
    }

    fn parse_term(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.parse_unary()?;
        loop {
            let sp = self.span();
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.parse_unary()?), sp);
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.parse_unary()?), sp);
                }
                _ if self.starts_atom() => {
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.parse_unary()?), sp);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_unary(&mut self) -> Result<Expr, Diagnostic> {
        if self.peek() == &Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.parse_unary()?)));
        }
        let base = self.parse_atom()?;
        if self.peek() == &Tok::Caret {
            let sp = self.bump().1;
            let e = self.parse_exponent()?;
            return Ok(Expr::Pow(Box::new(base), e, sp));
        }
        Ok(base)
    }

    fn parse_exponent(&mut self) -> Result<u32, Diagnostic> {
        let sp = self.span();
        match self.bump().0 {
            Tok::Int(n) => n.to_u32().ok_or_else(|| Diagnostic::new(sp, "exponent too large")),
            Tok::LParen => {
                let n = self.parse_exponent()?;
                self.expect(&Tok::RParen)?;
                Ok(n)
            }
            other => Err(Diagnostic::new(sp, format!("expected a nonnegative integer exponent, found {other}"))),
        }
    }

    fn parse_atom(&mut self) -> Result<Expr, Diagnostic> {
        let (tok, sp) = self.bump();
        match tok {
            Tok::Int(n) => Ok(Expr::Int(n, sp)),
            Tok::Ident(s) => Ok(Expr::Ident(s, sp)),
            Tok::LParen => {
                let e = self.parse_expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Tok::Colon => self.parse_mono(sp),
            other => Err(Diagnostic::new(sp, format!("expected an expression, found {other}"))),
        }
    }

    fn parse_mono(&mut self, open: Span) -> Result<Expr, Diagnostic> {
        let mut factors = Vec::new();
        loop {
            let sp = self.span();
            match self.peek().clone() {
                Tok::Colon => {
                    self.bump();
                    break;
                }
                Tok::Int(n) if n == BigInt::from(1) && factors.is_empty() => {
                    self.bump();
                    self.expect(&Tok::Colon)?;
                    return Ok(Expr::Mono(Vec::new(), open));
                }
                Tok::Ident(t) if t == "T" => {
                    self.bump();
                    let derivs = if self.peek() == &Tok::Caret {
                        self.bump();
                        self.parse_exponent()?
                    } else {
                        1
                    };
                    let (name, nsp) = self.expect_ident()?;
                    if name == "T" {
                        return Err(Diagnostic::new(nsp, "write repeated derivatives as `T^n`"));
                    }
                    factors.push(FactorAst { derivs, name, span: nsp });
                }
                Tok::Ident(name) => {
                    self.bump();
                    factors.push(FactorAst { derivs: 0, name, span: sp });
                }
                Tok::Eof => return Err(Diagnostic::new(open, "unterminated `:` monomial")),
                other => return Err(Diagnostic::new(sp, format!("unexpected {other} inside monomial"))),
            }
        }
        if factors.is_empty() {
            return Err(Diagnostic::new(open, "empty monomial; write `1` for the unit"));
        }
        Ok(Expr::Mono(factors, open))
    }
}

/// Name resolution for expression evaluation.
pub struct Scope<'a> {
    pub space: &'a ParamSpace,
    pub generator: &'a dyn Fn(&str) -> Option<u32>,
    pub allow_lambda: bool,
}

fn is_scalar(v: &LPoly) -> bool {
    v.terms().all(|(e, c)| e[0] == 0 && c.terms().all(|(m, _)| m.is_empty()))
}

fn has_tensor(v: &LPoly) -> bool {
    v.terms().any(|(_, c)| c.terms().any(|(m, _)| !m.is_empty()))
}

fn mul_values(a: &LPoly, b: &LPoly, sp: Span) -> Result<LPoly, Diagnostic> {
    if has_tensor(a) && has_tensor(b) {
        return Err(Diagnostic::new(
            sp,
            "product of two tensor expressions; write the factors inside one `: ... :` monomial",
        ));
    }
    let mut r = LPoly::zero(1);
    for (ea, ca) in a.terms() {
        for (eb, cb) in b.terms() {
            r.add_term(vec![ea[0] + eb[0]], ca.tensor(cb));
        }
    }
    Ok(r)
}

pub fn eval(expr: &Expr, scope: &Scope<'_>) -> Result<LPoly, Diagnostic> {
    let space = scope.space;
    let scalar = |s: Scalar| LPoly::constant(1, TPoly::scalar(s));
    match expr {
        Expr::Int(n, _) => Ok(scalar(Scalar::from_bigint(space, n.clone()))),
        Expr::Ident(name, sp) => {
            if name == "lambda" {
                if !scope.allow_lambda {
                    return Err(Diagnostic::new(*sp, "`lambda` is not allowed here"));
                }
                let mut r = LPoly::zero(1);
                r.add_term(vec![1], TPoly::unit(space));
                return Ok(r);
            }
            if let Ok(s) = Scalar::param(space, name) {
                return Ok(scalar(s));
            }
            if let Some(g) = (scope.generator)(name) {
                return Ok(LPoly::constant(1, TPoly::mono(TMono::single(RGen::new(g, 0)), space)));
            }
            if name == "T" {
                return Err(Diagnostic::new(*sp, "`T` may only appear inside a `: ... :` monomial"));
            }
            Err(Diagnostic::new(*sp, format!("undeclared name `{name}`")))
        }
        Expr::Mono(factors, _) => {
            let mut gens = Vec::with_capacity(factors.len());
            for f in factors {
                let g = (scope.generator)(&f.name)
                    .ok_or_else(|| Diagnostic::new(f.span, format!("undeclared generator `{}`", f.name)))?;
                gens.push(RGen::new(g, f.derivs));
            }
            Ok(LPoly::constant(1, TPoly::mono(TMono(gens), space)))
        }
        Expr::Neg(e) => Ok(eval(e, scope)?.neg()),
        Expr::Add(a, b) => Ok(eval(a, scope)?.add(&eval(b, scope)?)),
        Expr::Sub(a, b) => Ok(eval(a, scope)?.sub(&eval(b, scope)?)),
        Expr::Mul(a, b, sp) => mul_values(&eval(a, scope)?, &eval(b, scope)?, *sp),
        Expr::Div(a, b, sp) => {
            let num = eval(a, scope)?;
            let den = eval(b, scope)?;
            if !is_scalar(&den) {
                return Err(Diagnostic::new(*sp, "can only divide by a scalar"));
            }
            let d = den.coeff(&[0]).and_then(TPoly::scalar_part).cloned().unwrap_or_else(|| Scalar::zero(space));
            if d.is_zero() {
                return Err(Diagnostic::new(*sp, "division by zero"));
            }
            Ok(num.scale(&d.inv().expect("nonzero")))
        }
        Expr::Pow(base, k, sp) => {
            let b = eval(base, scope)?;
            if has_tensor(&b) && *k > 1 {
                return Err(Diagnostic::new(*sp, "powers of tensor expressions are not allowed"));
            }
            let mut acc = LPoly::constant(1, TPoly::unit(space));
            for _ in 0..*k {
                acc = mul_values(&acc, &b, *sp)?;
            }
            Ok(acc)
        }
    }
}

/// Parses a complete expression (to end of input) in the given scope.
pub fn parse_value(text: &str, scope: &Scope<'_>) -> Result<LPoly, Diagnostic> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks);
    let e = p.parse_expr()?;
    if !p.at_eof() {
        return Err(Diagnostic::new(p.span(), format!("unexpected {}", p.peek())));
    }
    eval(&e, scope)
}

pub(crate) fn parse_scalar(text: &str, space: &ParamSpace) -> Result<Scalar, String> {
    let scope = Scope { space, generator: &|_| None, allow_lambda: false };
    let v = parse_value(text, &scope).map_err(|d| d.to_string())?;
    if !is_scalar(&v) {
        return Err("not a scalar expression".into());
    }
    Ok(v.coeff(&[0]).and_then(TPoly::scalar_part).cloned().unwrap_or_else(|| Scalar::zero(space)))
}

/// Reads a nonnegative exact rational like `2`, `3/2`.
pub fn parse_rational_literal(p: &mut Parser<'_>) -> Result<num_rational::Rational64, Diagnostic> {
    let sp = p.span();
    let neg = if p.peek() == &Tok::Minus {
        p.bump();
        true
    } else {
        false
    };
    let num = match p.bump().0 {
        Tok::Int(n) => n,
        other => return Err(Diagnostic::new(sp, format!("expected a rational number, found {other}"))),
    };
    let den = if p.peek() == &Tok::Slash {
        p.bump();
        match p.bump().0 {
            Tok::Int(n) => n,
            other => return Err(Diagnostic::new(sp, format!("expected a denominator, found {other}"))),
        }
    } else {
        BigInt::from(1)
    };
    if den.is_zero() {
        return Err(Diagnostic::new(sp, "zero denominator"));
    }
    let n = num.to_i64().ok_or_else(|| Diagnostic::new(sp, "number too large"))?;
    let d = den.to_i64().ok_or_else(|| Diagnostic::new(sp, "number too large"))?;
    Ok(num_rational::Rational64::new(if neg { -n } else { n }, d))
}
