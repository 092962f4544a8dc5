#![allow(dead_code)]

use std::path::PathBuf;

use nlca_core::{parse, Degree, Presentation, RGen, Scalar, TMono, TPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BUNDLED: [&str; 7] =
    ["virasoro", "free_boson", "free_fermion", "affine_sl2", "w3", "w3_ansatz", "free_pair"];

/// Presentations whose axioms hold, used by the property suites.
pub const VERIFIED: [&str; 5] = ["virasoro", "free_boson", "free_fermion", "affine_sl2", "w3"];

pub fn algebra_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("algebras").join(format!("{name}.nlca"))
}

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("data").join(name)
}

pub fn load(name: &str) -> Presentation {
    let text = std::fs::read_to_string(algebra_path(name)).expect("bundled file");
    parse(&text).unwrap_or_else(|d| panic!("{name}: {d}"))
}

pub fn load_data(file: &str) -> Presentation {
    let text = std::fs::read_to_string(data_path(file)).expect("test data file");
    parse(&text).unwrap_or_else(|d| panic!("{file}: {d}"))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape limits for random tensors, chosen per presentation so a single
/// reduction stays well under a second.
#[derive(Clone, Copy)]
pub struct Shape {
    pub max_factors: usize,
    pub max_t: u32,
    pub max_degree: Degree,
    /// Bound on the summed conformal weight of the operands of one defect or
    /// jacobiator; weight, unlike degree, counts powers of T.
    pub operand_cap: Degree,
}

pub fn shape_for(name: &str) -> Shape {
    let d = |n| Degree::from_integer(n);
    match name {
        "w3" => Shape { max_factors: 2, max_t: 1, max_degree: d(7), operand_cap: d(12) },
        "virasoro" => Shape { max_factors: 3, max_t: 2, max_degree: d(8), operand_cap: d(14) },
        _ => Shape { max_factors: 3, max_t: 2, max_degree: d(5), operand_cap: d(9) },
    }
}

pub fn random_rgen(pres: &Presentation, r: &mut impl Rng, max_t: u32) -> RGen {
    let g = r.random_range(0..pres.generators().len()) as u32;
    RGen::new(g, r.random_range(0..=max_t))
}

/// Random monomial with at most `max_factors` factors and degree at most `max_degree`.
pub fn random_mono(pres: &Presentation, r: &mut impl Rng, shape: Shape) -> TMono {
    loop {
        let k = r.random_range(0..=shape.max_factors);
        let m = TMono((0..k).map(|_| random_rgen(pres, r, shape.max_t)).collect());
        if pres.mono_degree(&m) <= shape.max_degree {
            return m;
        }
    }
}

/// Nonempty random monomial, homogeneous in parity.
pub fn random_nonunit_mono(pres: &Presentation, r: &mut impl Rng, shape: Shape) -> TMono {
    loop {
        let m = random_mono(pres, r, shape);
        if !m.is_empty() {
            return m;
        }
    }
}

/// Small nonzero coefficient, sometimes involving the first parameter.
pub fn random_scalar(pres: &Presentation, r: &mut impl Rng) -> Scalar {
    let sp = pres.space();
    let mut n = r.random_range(1..=5i64);
    if r.random_bool(0.5) {
        n = -n;
    }
    let q = Scalar::from_ratio(sp, n, r.random_range(1..=3));
    match pres.params().first() {
        Some(c) if r.random_bool(0.3) => {
            let p = Scalar::param(sp, c).unwrap();
            &q * &(&p + &Scalar::from_int(sp, r.random_range(-2..=2)))
        }
        _ => q,
    }
}

/// Random combination of up to `terms` monomials of the same parity.
pub fn random_tpoly(pres: &Presentation, r: &mut impl Rng, shape: Shape, terms: usize) -> TPoly {
    let first = random_mono(pres, r, shape);
    let parity = pres.mono_parity(&first);
    let mut x = TPoly::term(first, random_scalar(pres, r));
    for _ in 1..terms {
        let m = random_mono(pres, r, shape);
        if pres.mono_parity(&m) == parity {
            x.add_term(m, random_scalar(pres, r));
        }
    }
    x
}

pub fn mono_poly(pres: &Presentation, m: TMono) -> TPoly {
    TPoly::mono(m, pres.space())
}

/// Counts partitions of `n` into parts from `parts` (each usable without
/// limit, or at most once when `distinct`), by plain recursion.
pub fn count_partitions(n: u32, parts: &[u32], distinct: bool) -> u64 {
    fn go(n: u32, parts: &[u32], distinct: bool) -> u64 {
        if n == 0 {
            return 1;
        }
        let Some((&p, rest)) = parts.split_first() else { return 0 };
        let mut total = go(n, rest, distinct);
        let mut used = p;
        while used <= n {
            total += go(n - used, rest, distinct);
            if distinct {
                break;
            }
            used += p;
        }
        total
    }
    go(n, parts, distinct)
}

/// Every multiset of `parts` (labelled by colour) summing to `n`, listed
/// explicitly; used to cross-check counts and the basis enumerator.
pub fn list_partitions(n: u32, parts: &[(u32, u32)], distinct: bool) -> Vec<Vec<(u32, u32)>> {
    fn go(n: u32, parts: &[(u32, u32)], distinct: bool, cur: &mut Vec<(u32, u32)>, out: &mut Vec<Vec<(u32, u32)>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        let Some((&p, rest)) = parts.split_first() else { return };
        go(n, rest, distinct, cur, out);
        let mut k = 1;
        while k * p.1 <= n {
            for _ in 0..k {
                cur.push(p);
            }
            go(n - k * p.1, rest, distinct, cur, out);
            for _ in 0..k {
                cur.pop();
            }
            if distinct {
                break;
            }
            k += 1;
        }
    }
    let mut out = Vec::new();
    go(n, parts, distinct, &mut Vec::new(), &mut out);
    out
}

/// `k` nonempty random monomials whose weights sum to at most `cap`.
pub fn random_operands(pres: &Presentation, r: &mut impl Rng, shape: Shape, k: usize, cap: Degree) -> Vec<TPoly> {
    loop {
        let ms: Vec<TMono> = (0..k).map(|_| random_nonunit_mono(pres, r, shape)).collect();
        let total: Degree = ms.iter().map(|m| pres.mono_weight(m).expect("weights declared")).sum();
        if total <= cap {
            return ms.into_iter().map(|m| mono_poly(pres, m)).collect();
        }
    }
}

/// Random combination whose monomials each have weight at most `max_weight`.
pub fn random_light_tpoly(pres: &Presentation, r: &mut impl Rng, shape: Shape, terms: usize, max_weight: Degree) -> TPoly {
    loop {
        let x = random_tpoly(pres, r, shape, terms);
        if x.terms().all(|(m, _)| pres.mono_weight(m).is_some_and(|w| w <= max_weight)) {
            return x;
        }
    }
}
