//! The `.nlca` definition language: parsing, rendering back to source, and
//! JSON export.
//!
//! ```text
//! name "virasoro";
//! param c;
//! generator L parity=even degree=2 weight=2;
//! bracket [L, L] = :T L: + 2 lambda :L: + c/12 lambda^3;
//! ```

pub mod cli;
pub mod expr;

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::algebra::{GeneratorDecl, Parity, Presentation, TPoly};
use crate::ansatz;
use crate::formal::LPoly;
pub use expr::{Diagnostic, Span};
use expr::{lex, Expr, Parser, Scope, Tok};

/// One or more positioned problems found while reading a source file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostics {}

impl From<Diagnostic> for Diagnostics {
    fn from(d: Diagnostic) -> Self {
        Diagnostics(vec![d])
    }
}

const RESERVED: [&str; 9] = ["lambda", "T", "param", "unknown", "generator", "bracket", "name", "parity", "degree"];

struct BracketAst {
    left: (String, Span),
    right: (String, Span),
    value: Expr,
}

fn parse_names(p: &mut Parser<'_>) -> Result<Vec<(String, Span)>, Diagnostic> {
    let mut out = vec![p.expect_ident()?];
    while p.peek() == &Tok::Comma {
        p.bump();
        out.push(p.expect_ident()?);
    }
    p.expect(&Tok::Semi)?;
    Ok(out)
}

fn parse_generator(p: &mut Parser<'_>) -> Result<(GeneratorDecl, Span), Diagnostic> {
    let (name, sp) = p.expect_ident()?;
    let (mut parity, mut degree, mut weight) = (None, None, None);
    while p.peek() != &Tok::Semi {
        let (key, ksp) = p.expect_ident()?;
        p.expect(&Tok::Eq)?;
        match key.as_str() {
            "parity" => {
                let (v, vsp) = p.expect_ident()?;
                parity = Some(match v.as_str() {
                    "even" => Parity::Even,
                    "odd" => Parity::Odd,
                    _ => return Err(Diagnostic::new(vsp, format!("parity must be `even` or `odd`, not `{v}`"))),
                });
            }
            "degree" => degree = Some(expr::parse_rational_literal(p)?),
            "weight" => weight = Some(expr::parse_rational_literal(p)?),
            _ => return Err(Diagnostic::new(ksp, format!("unknown generator attribute `{key}`"))),
        }
    }
    p.expect(&Tok::Semi)?;
    let parity = parity.ok_or_else(|| Diagnostic::new(sp, format!("generator `{name}` needs `parity=`")))?;
    let degree = degree.ok_or_else(|| Diagnostic::new(sp, format!("generator `{name}` needs `degree=`")))?;
    Ok((GeneratorDecl { name, parity, degree, weight }, sp))
}

fn parse_bracket(p: &mut Parser<'_>) -> Result<BracketAst, Diagnostic> {
    p.expect(&Tok::LBracket)?;
    let left = p.expect_ident()?;
    p.expect(&Tok::Comma)?;
    let right = p.expect_ident()?;
    p.expect(&Tok::RBracket)?;
    p.expect(&Tok::Eq)?;
    let value = p.parse_expr()?;
    p.expect(&Tok::Semi)?;
    Ok(BracketAst { left, right, value })
}

/// Parses a source file into a presentation. Structural problems of the
/// bracket table (grading, parity, missing pairs) are left to
/// [`Presentation::validate`]; only name resolution and syntax are checked here.
pub fn parse(text: &str) -> Result<Presentation, Diagnostics> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks);
    let mut diags = Vec::new();
    let mut name = None;
    let mut params: Vec<(String, Span)> = Vec::new();
    let mut unknowns: Vec<(String, Span)> = Vec::new();
    let mut gens: Vec<(GeneratorDecl, Span)> = Vec::new();
    let mut brackets = Vec::new();

    while !p.at_eof() {
        let (kw, sp) = match p.expect_ident() {
            Ok(x) => x,
            Err(d) => {
                diags.push(d);
                p.recover();
                continue;
            }
        };
        let res = match kw.as_str() {
            "name" => match p.bump() {
                (Tok::Str(s), _) => p.expect(&Tok::Semi).map(|_| name = Some(s)),
                (other, osp) => Err(Diagnostic::new(osp, format!("expected a quoted name, found {other}"))),
            },
            "param" => parse_names(&mut p).map(|v| params.extend(v)),
            "unknown" => parse_names(&mut p).map(|v| unknowns.extend(v)),
            "generator" => parse_generator(&mut p).map(|g| gens.push(g)),
            "bracket" => parse_bracket(&mut p).map(|b| brackets.push(b)),
            _ => Err(Diagnostic::new(sp, format!("unknown statement `{kw}`"))),
        };
        if let Err(d) = res {
            diags.push(d);
            p.recover();
        }
    }

    let mut seen: BTreeMap<String, &'static str> = BTreeMap::new();
    let all: Vec<(&String, Span, &'static str)> = params
        .iter()
        .map(|(n, sp)| (n, *sp, "parameter"))
        .chain(unknowns.iter().map(|(n, sp)| (n, *sp, "unknown")))
        .chain(gens.iter().map(|(g, sp)| (&g.name, *sp, "generator")))
        .collect();
    for (n, sp, kind) in all {
        if RESERVED.contains(&n.as_str()) {
            diags.push(Diagnostic::new(sp, format!("`{n}` is reserved")));
        } else if let Some(prev) = seen.get(n) {
            diags.push(Diagnostic::new(sp, format!("duplicate declaration of `{n}` (already a {prev})")));
        } else {
            seen.insert(n.clone(), kind);
        }
    }

    let params: Vec<String> = params.into_iter().map(|x| x.0).collect();
    let unknowns: Vec<String> = unknowns.into_iter().map(|x| x.0).collect();
    let space = Presentation::space_for(&params, &unknowns);
    let generators: Vec<GeneratorDecl> = gens.into_iter().map(|x| x.0).collect();
    let lookup = |n: &str| generators.iter().position(|g| g.name == n).map(|i| i as u32);
    let scope = Scope { space: &space, generator: &lookup, allow_lambda: true };

    let mut table = BTreeMap::new();
    for b in &brackets {
        let mut resolve = |(n, sp): &(String, Span)| {
            let r = lookup(n);
            if r.is_none() {
                diags.push(Diagnostic::new(*sp, format!("undeclared generator `{n}`")));
            }
            r
        };
        let (l, r) = (resolve(&b.left), resolve(&b.right));
        let value = match expr::eval(&b.value, &scope) {
            Ok(v) => v,
            Err(d) => {
                diags.push(d);
                continue;
            }
        };
        let (Some(l), Some(r)) = (l, r) else { continue };
        if !unknowns.is_empty() {
            if let Some(bad) = ansatz::first_nonaffine(&value, params.len()) {
                diags.push(Diagnostic::new(
                    b.left.1,
                    format!("coefficient `{bad}` of [{}, {}] is not affine in the unknowns", b.left.0, b.right.0),
                ));
            }
        }
        if table.insert((l, r), value).is_some() {
            diags.push(Diagnostic::new(b.left.1, format!("bracket [{}, {}] given twice", b.left.0, b.right.0)));
        }
    }

    if !diags.is_empty() {
        return Err(Diagnostics(diags));
    }
    Ok(Presentation::new(name, params, unknowns, generators, table).with_space(space))
}

/// Parses an element of the tensor algebra over `pres` (no formal variables).
pub fn parse_tpoly(pres: &Presentation, text: &str) -> Result<TPoly, Diagnostic> {
    let lookup = |n: &str| pres.generator_index(n);
    let scope = Scope { space: pres.space(), generator: &lookup, allow_lambda: false };
    let v = expr::parse_value(text, &scope)?;
    Ok(v.coeff(&[0]).cloned().unwrap_or_default())
}

/// Parses a polynomial in lambda over the tensor algebra of `pres`.
pub fn parse_lpoly(pres: &Presentation, text: &str) -> Result<LPoly, Diagnostic> {
    let lookup = |n: &str| pres.generator_index(n);
    let scope = Scope { space: pres.space(), generator: &lookup, allow_lambda: true };
    expr::parse_value(text, &scope)
}

fn fmt_rational(q: &num_rational::Rational64) -> String {
    q.to_string()
}

/// Renders a presentation back to source text that reparses to an equal presentation.
pub fn render(pres: &Presentation) -> String {
    let mut out = String::new();
    if let Some(n) = &pres.name {
        out.push_str(&format!("name \"{n}\";\n"));
    }
    for c in pres.params() {
        out.push_str(&format!("param {c};\n"));
    }
    for u in pres.unknowns() {
        out.push_str(&format!("unknown {u};\n"));
    }
    for g in pres.generators() {
        out.push_str(&format!("generator {} parity={} degree={}", g.name, g.parity, fmt_rational(&g.degree)));
        if let Some(w) = &g.weight {
            out.push_str(&format!(" weight={}", fmt_rational(w)));
        }
        out.push_str(";\n");
    }
    for (&(a, b), v) in pres.brackets() {
        out.push_str(&format!(
            "bracket [{}, {}] = {};\n",
            pres.generator(a).name,
            pres.generator(b).name,
            pres.render_lpoly(v)
        ));
    }
    out
}

/// JSON view of a polynomial: one record per (lambda powers, monomial).
pub fn lpoly_json(pres: &Presentation, p: &LPoly) -> Value {
    let mut terms = Vec::new();
    for (e, c) in p.terms() {
        for (m, s) in c.terms() {
            terms.push(json!({ "lambda": e, "monomial": pres.render_mono(m), "coeff": s.to_string() }));
        }
    }
    Value::Array(terms)
}

/// JSON export with canonical scalar strings.
pub fn presentation_json(pres: &Presentation) -> Value {
    let gens: Vec<Value> = pres
        .generators()
        .iter()
        .map(|g| {
            json!({
                "name": g.name,
                "parity": g.parity,
                "degree": fmt_rational(&g.degree),
                "weight": g.weight.as_ref().map(fmt_rational),
            })
        })
        .collect();
    let brackets: Vec<Value> = pres
        .brackets()
        .iter()
        .map(|(&(a, b), v)| {
            json!({
                "pair": [pres.generator(a).name, pres.generator(b).name],
                "value": pres.render_lpoly(v),
                "terms": lpoly_json(pres, v),
            })
        })
        .collect();
    json!({
        "name": pres.name,
        "params": pres.params(),
        "unknowns": pres.unknowns(),
        "generators": gens,
        "brackets": brackets,
    })
}
