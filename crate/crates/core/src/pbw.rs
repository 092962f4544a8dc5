//! Reduction of tensors to ordered (PBW) monomials, and enumeration of the
//! ordered monomials by conformal weight.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::{Degree, Presentation, RGen, TMono, TPoly};
use crate::calculus::{Engine, Result};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PbwError {
    #[error("generator `{0}` has no declared weight")]
    MissingWeight(String),
    #[error("generator `{0}` has non-positive weight")]
    NonPositiveWeight(String),
    #[error("weight {0} is negative")]
    NegativeWeight(String),
}

/// True when `x` must move to the right of `y` (or the pair is an odd repeat).
fn inverted(pres: &Presentation, x: RGen, y: RGen) -> bool {
    let (kx, ky) = (pres.pbw_key(x), pres.pbw_key(y));
    kx > ky || (kx == ky && pres.rgen_parity(x).is_odd())
}

/// Number of pairs `p < q` that are out of order.
pub fn inversions(pres: &Presentation, m: &TMono) -> usize {
    let f = m.factors();
    let mut count = 0;
    for p in 0..f.len() {
        for q in p + 1..f.len() {
            if inverted(pres, f[p], f[q]) {
                count += 1;
            }
        }
    }
    count
}

pub fn is_ordered(pres: &Presentation, m: &TMono) -> bool {
    m.factors().windows(2).all(|w| !inverted(pres, w[0], w[1]))
}

/// Whether every monomial of `x` is ordered.
pub fn is_pbw(pres: &Presentation, x: &TPoly) -> bool {
    x.terms().all(|(m, _)| is_ordered(pres, m))
}

fn check_descent(pres: &Presentation, from: &TMono, to: &TPoly) {
    let key = (pres.mono_degree(from), inversions(pres, from));
    for (m, _) in to.terms() {
        let k = (pres.mono_degree(m), inversions(pres, m));
        assert!(k < key, "normal ordering failed to descend: {} -> {}", pres.render_mono(from), pres.render_mono(m));
    }
}

/// The normal-ordering map: linear, fixes ordered monomials, and rewrites the
/// leftmost inversion until none remain.
pub fn normal_order(engine: &Engine<'_>, x: &TPoly) -> Result<TPoly> {
    let mut r = TPoly::zero();
    for (m, s) in x.terms() {
        r.add_scaled(&normal_order_mono(engine, m)?, s);
    }
    Ok(r)
}

pub fn normal_order_mono(engine: &Engine<'_>, m: &TMono) -> Result<TPoly> {
    let pres = engine.presentation();
    let f = m.factors();
    let Some(p) = f.windows(2).position(|w| inverted(pres, w[0], w[1])) else {
        return Ok(TPoly::mono(m.clone(), pres.space()));
    };
    if engine.memoizing() {
        if let Some(v) = engine.memo.borrow().sigma.get(m) {
            return Ok(v.clone());
        }
    }
    let (a, b) = (f[p], f[p + 1]);
    let prefix = TMono(f[..p].to_vec());
    let suffix = TPoly::mono(TMono(f[p + 2..].to_vec()), pres.space());
    let ap = TPoly::mono(TMono::single(a), pres.space());
    let bp = TPoly::mono(TMono::single(b), pres.space());
    let correction = engine.nprod(&engine.lie(&ap, &bp)?, &suffix)?.prefixed(&prefix);
    let mut step = TPoly::zero();
    if pres.pbw_key(a) == pres.pbw_key(b) {
        // odd repeat: 2 A a a D = A N(lie(a,a), D) modulo relations
        step.add_scaled(&correction, &Scalar::from_ratio(pres.space(), 1, 2));
    } else {
        let mut swapped = f.to_vec();
        swapped.swap(p, p + 1);
        let s = pres.sign(&TMono::single(a), &TMono::single(b));
        step.add_term(TMono(swapped), Scalar::from_int(pres.space(), s));
        step.add_assign(&correction);
    }
    check_descent(pres, m, &step);
    let r = normal_order(engine, &step)?;
    if engine.memoizing() {
        engine.memo.borrow_mut().sigma.insert(m.clone(), r.clone());
    }
    Ok(r)
}

fn weights(pres: &Presentation) -> std::result::Result<Vec<Degree>, PbwError> {
    pres.generators()
        .iter()
        .map(|g| match g.weight {
            None => Err(PbwError::MissingWeight(g.name.clone())),
            Some(w) if w <= Degree::zero() => Err(PbwError::NonPositiveWeight(g.name.clone())),
            Some(w) => Ok(w),
        })
        .collect()
}

/// All `T^n g` of weight at most `max`, in PBW order.
fn candidates(pres: &Presentation, max: Degree) -> std::result::Result<Vec<(RGen, Degree)>, PbwError> {
    let ws = weights(pres)?;
    let mut out = Vec::new();
    for (g, &w) in ws.iter().enumerate() {
        let mut n = 0u32;
        while w + Degree::from_integer(n as i64) <= max {
            out.push((RGen::new(g as u32, n), w + Degree::from_integer(n as i64)));
            n += 1;
        }
    }
    out.sort_by_key(|(x, _)| pres.pbw_key(*x));
    Ok(out)
}

/// Ordered monomials of total conformal weight exactly `weight`.
pub fn enumerate_basis(pres: &Presentation, weight: Degree) -> std::result::Result<Vec<TMono>, PbwError> {
    if weight.is_negative() {
        return Err(PbwError::NegativeWeight(weight.to_string()));
    }
    let cands = candidates(pres, weight)?;
    let mut out = Vec::new();
    let mut cur = Vec::new();
    extend(pres, &cands, 0, weight, &mut cur, &mut out);
    Ok(out)
}

fn extend(
    pres: &Presentation,
    cands: &[(RGen, Degree)],
    start: usize,
    left: Degree,
    cur: &mut Vec<RGen>,
    out: &mut Vec<TMono>,
) {
    if left.is_zero() {
        out.push(TMono(cur.clone()));
        return;
    }
    for i in start..cands.len() {
        let (x, w) = cands[i];
        if w > left {
            continue;
        }
        cur.push(x);
        let next = if pres.rgen_parity(x).is_odd() { i + 1 } else { i };
        extend(pres, cands, next, left - w, cur, out);
        cur.pop();
    }
}

/// Dimensions of the weight spaces up to `max_weight`, on the lattice spanned
/// by the declared weights (step `1/d` for the common denominator `d`).
pub fn character(pres: &Presentation, max_weight: Degree) -> std::result::Result<BTreeMap<Degree, u64>, PbwError> {
    if max_weight.is_negative() {
        return Err(PbwError::NegativeWeight(max_weight.to_string()));
    }
    let ws = weights(pres)?;
    let d = ws.iter().fold(max_weight.denom().abs(), |acc, w| acc.lcm(w.denom()));
    let steps = (max_weight * Degree::from_integer(d)).to_integer().to_usize().expect("weight range fits in memory");
    // product over R of 1/(1-q^w) (even) or (1+q^w) (odd), truncated
    let mut series = vec![0u64; steps + 1];
    series[0] = 1;
    for (x, w) in candidates(pres, max_weight)? {
        let k = (w * Degree::from_integer(d)).to_integer() as usize;
        if pres.rgen_parity(x).is_odd() {
            for i in (k..=steps).rev() {
                series[i] += series[i - k];
            }
        } else {
            for i in k..=steps {
                series[i] += series[i - k];
            }
        }
    }
    Ok(series
        .into_iter()
        .enumerate()
        .map(|(i, n)| (Degree::new(i as i64, d), n))
        .collect())
}

/// `0:1 1:0 2:1 ...`
pub fn render_character(table: &BTreeMap<Degree, u64>) -> String {
    let parts: Vec<String> = table.iter().map(|(w, n)| format!("{w}:{n}")).collect();
    parts.join(" ")
}

/// Total weight of an ordered monomial, when all weights are declared.
pub fn weight_of(pres: &Presentation, m: &TMono) -> Option<Degree> {
    pres.mono_weight(m)
}
