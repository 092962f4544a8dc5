//! Bracket tables with unknown coefficients: the linear conditions that the
//! Jacobi identity imposes on them, and substitution of a solution.
//!
//! Unknowns are extra variables of the scalar space (after the parameters).
//! Every table coefficient must be affine in them; the jacobiator of a triple
//! whose terms multiply two table entries containing unknowns is rejected.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use thiserror::Error;

use crate::algebra::{Presentation, RGen, TMono, TPoly};
use crate::calculus::{CalcError, Engine};
use crate::formal::LPoly;
use crate::pbw::normal_order;
use crate::scalar::poly::Poly;
use crate::scalar::{LinearSystem, ParamSpace, Scalar};
use crate::verify::{run_all, Report};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnsatzError {
    #[error("presentation is not valid: {0}")]
    Invalid(String),
    #[error("triple ({triple}) gives a coefficient that is not affine in the unknowns: {coefficient}")]
    NonAffine { triple: String, coefficient: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("`{0}` is not a declared unknown")]
    UnknownName(String),
    #[error("bad triple `{0}`; expected three comma-separated generator names")]
    BadTriple(String),
    #[error("the system has no solution")]
    EmptySolutionSpace,
    #[error("normalization annihilates solution space")]
    Annihilated,
    #[error("solution space is {} dimensional after normalization; kernel basis: {}", .basis.len(), render_basis(.basis))]
    MultiDimensional { basis: Vec<Vec<String>> },
    #[error(transparent)]
    Calc(#[from] CalcError),
}

fn render_basis(b: &[Vec<String>]) -> String {
    let v: Vec<String> = b.iter().map(|x| format!("({})", x.join(", "))).collect();
    v.join(", ")
}

/// Splits `s` (over params ++ unknowns) as `const + sum_i u_i coeff_i` with
/// parameter-only coefficients; `None` unless `s` is affine in the unknowns.
pub fn affine_split(s: &Scalar, nparams: usize, target: &ParamSpace) -> Option<(Scalar, Vec<Scalar>)> {
    let nv = s.space().len();
    let nunk = nv - nparams;
    let keep: Vec<Option<usize>> = (0..nparams).map(Some).collect();
    let den = s.denominator().remap(nparams, &keep)?;
    let mut parts: Vec<Vec<(Box<[u32]>, BigInt)>> = vec![Vec::new(); nunk + 1];
    for (e, c) in s.numerator().terms() {
        let unk: Vec<usize> = (nparams..nv).filter(|&i| e[i] > 0).collect();
        let slot = match unk.as_slice() {
            [] => 0,
            [i] if e[*i] == 1 => i - nparams + 1,
            _ => return None,
        };
        parts[slot].push((e[..nparams].to_vec().into_boxed_slice(), c.clone()));
    }
    let mut out = parts
        .into_iter()
        .map(|t| Scalar::canonicalize(target, Poly::from_terms(nparams, t), den.clone()).expect("nonzero denominator"));
    let constant = out.next().expect("constant slot");
    Some((constant, out.collect()))
}

/// First table coefficient that is not affine in the unknowns, rendered.
pub fn first_nonaffine(value: &LPoly, nparams: usize) -> Option<String> {
    let target = ParamSpace::new((0..nparams).map(|i| format!("p{i}")));
    for (_, c) in value.terms() {
        for (_, s) in c.terms() {
            if affine_split(s, nparams, &target).is_none() {
                return Some(s.to_string());
            }
        }
    }
    None
}

/// Parses `a,b,c;d,e,f` into generator index triples.
pub fn parse_triples(pres: &Presentation, text: &str) -> Result<Vec<[u32; 3]>, AnsatzError> {
    let mut out = Vec::new();
    for t in text.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = t.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(AnsatzError::BadTriple(t.to_string()));
        }
        let mut ix = [0; 3];
        for (k, name) in parts.iter().enumerate() {
            ix[k] = pres.generator_index(name).ok_or_else(|| AnsatzError::UnknownGenerator(name.to_string()))?;
        }
        out.push(ix);
    }
    Ok(out)
}

fn param_space(pres: &Presentation) -> ParamSpace {
    ParamSpace::new(pres.params().iter().cloned())
}

fn row_key(coeffs: &[Scalar], rhs: &Scalar) -> Vec<String> {
    coeffs.iter().chain(std::iter::once(rhs)).map(Scalar::to_string).collect()
}

/// Scales a row so that its first nonzero entry is 1.
fn normalize_row(coeffs: Vec<Scalar>, rhs: Scalar) -> Option<(Vec<Scalar>, Scalar)> {
    let lead = coeffs.iter().chain(std::iter::once(&rhs)).find(|x| !x.is_zero())?.clone();
    let inv = lead.inv().expect("nonzero");
    Some((coeffs.iter().map(|c| c * &inv).collect(), &rhs * &inv))
}

/// Linear conditions on the unknowns: one equation per (triple, lambda/mu
/// monomial, ordered monomial) of the normal-ordered jacobiator, normalized,
/// deduplicated and sorted so the result does not depend on triple order.
pub fn extract_system(pres: &Presentation, triples: &[[u32; 3]]) -> Result<LinearSystem, AnsatzError> {
    let bad: Vec<String> = crate::verify::check_validate(pres).witnesses.iter().map(|w| w.residue.clone()).collect();
    if !bad.is_empty() {
        return Err(AnsatzError::Invalid(bad.join("; ")));
    }
    let engine = Engine::new(pres);
    let nparams = pres.params().len();
    let target = param_space(pres);
    let mut rows: BTreeMap<Vec<String>, (Vec<Scalar>, Scalar)> = BTreeMap::new();
    for t in triples {
        let label = t.iter().map(|&g| pres.generator(g).name.as_str()).collect::<Vec<_>>().join(",");
        let ops: Vec<TPoly> =
            t.iter().map(|&g| TPoly::mono(TMono::single(RGen::new(g, 0)), pres.space())).collect();
        let j = engine.jacobiator(&ops[0], &ops[1], &ops[2])?;
        for (_, x) in j.terms() {
            for (_, s) in normal_order(&engine, x)?.terms() {
                let (constant, coeffs) = affine_split(s, nparams, &target)
                    .ok_or_else(|| AnsatzError::NonAffine { triple: label.clone(), coefficient: s.to_string() })?;
                if let Some((c, r)) = normalize_row(coeffs, -&constant) {
                    rows.insert(row_key(&c, &r), (c, r));
                }
            }
        }
    }
    let mut sys = LinearSystem::new(&target, pres.unknowns().to_vec());
    for (_, (c, r)) in rows {
        sys.push_row(c, r);
    }
    Ok(sys)
}

/// A solved ansatz: unknown values, the concrete presentation, and its full verification.
pub struct Solved {
    pub values: Vec<(String, Scalar)>,
    pub presentation: Presentation,
    pub report: Report,
}

/// Solves `sys` with the unknown `pin.0` fixed to `pin.1`, substitutes the
/// unique solution into the table and verifies the result.
pub fn solve_and_substitute(
    pres: &Presentation,
    sys: &LinearSystem,
    pin: (&str, &Scalar),
) -> Result<Solved, AnsatzError> {
    let k = pres.unknowns().iter().position(|u| u == pin.0).ok_or_else(|| AnsatzError::UnknownName(pin.0.into()))?;
    let space = sys.space().clone();
    let value = pin.1.to_space(&space).map_err(|_| AnsatzError::UnknownName(pin.1.to_string()))?;
    let n = pres.unknowns().len();
    if sys.is_homogeneous() && sys.nullspace().is_empty() {
        return Err(AnsatzError::EmptySolutionSpace);
    }
    if sys.solve().is_none() {
        return Err(AnsatzError::EmptySolutionSpace);
    }
    let mut pinned = sys.clone();
    let mut row = vec![Scalar::zero(&space); n];
    row[k] = Scalar::one(&space);
    pinned.push_row(row, value);
    let sol = pinned.solve().ok_or(AnsatzError::Annihilated)?;
    if !sol.kernel.is_empty() {
        let basis = sol.kernel.iter().map(|v| v.iter().map(Scalar::to_string).collect()).collect();
        return Err(AnsatzError::MultiDimensional { basis });
    }
    let values: Vec<(String, Scalar)> = pres.unknowns().iter().cloned().zip(sol.particular.iter().cloned()).collect();
    let presentation = substitute(pres, &sol.particular)?;
    let report = run_all(&presentation);
    Ok(Solved { values, presentation, report })
}

/// Replaces every unknown by the given parameter-space value.
pub fn substitute(pres: &Presentation, values: &[Scalar]) -> Result<Presentation, AnsatzError> {
    let nparams = pres.params().len();
    let target = param_space(pres);
    pres.map_brackets(pres.params().to_vec(), Vec::new(), |s, space| {
        let (constant, coeffs) = affine_split(s, nparams, &target)
            .ok_or_else(|| AnsatzError::NonAffine { triple: "table".into(), coefficient: s.to_string() })?;
        let r = coeffs.iter().zip(values).fold(constant, |acc, (c, v)| acc + c * v);
        Ok(r.to_space(space).expect("same parameters"))
    })
}
