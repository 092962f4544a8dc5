//! Presentations of non-linear conformal superalgebras: generators, the
//! tensor algebra over R = C[T] (x) span(generators), and the generator-level
//! lambda-bracket table extended to all of R by sesquilinearity.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formal::{self, LPoly};
use crate::scalar::{ParamSpace, Scalar};

/// Gamma-degree and conformal weight values.
pub type Degree = Rational64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn add(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Sign `(-1)^{p(a) p(b)}`.
pub fn parity_sign(a: Parity, b: Parity) -> i64 {
    if a.is_odd() && b.is_odd() {
        -1
    } else {
        1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorDecl {
    pub name: String,
    pub parity: Parity,
    pub degree: Degree,
    pub weight: Option<Degree>,
}

/// Basis element `T^n g` of R.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RGen {
    pub gen: u32,
    pub n: u32,
}

impl RGen {
    pub fn new(gen: u32, n: u32) -> Self {
        RGen { gen, n }
    }

    pub fn t(self) -> Self {
        RGen { gen: self.gen, n: self.n + 1 }
    }
}

/// Tensor monomial; the empty sequence is the unit `1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TMono(pub Vec<RGen>);

impl TMono {
    pub fn unit() -> Self {
        TMono(Vec::new())
    }

    pub fn single(g: RGen) -> Self {
        TMono(vec![g])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[RGen] {
        &self.0
    }

    pub fn concat(&self, other: &TMono) -> TMono {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        TMono(v)
    }

    /// Splits off the first factor.
    pub fn split_first(&self) -> Option<(RGen, TMono)> {
        self.0.split_first().map(|(a, rest)| (*a, TMono(rest.to_vec())))
    }
}

impl From<Vec<RGen>> for TMono {
    fn from(v: Vec<RGen>) -> Self {
        TMono(v)
    }
}

/// Finite linear combination of tensor monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TPoly {
    terms: BTreeMap<TMono, Scalar>,
}

impl TPoly {
    pub fn zero() -> Self {
        TPoly { terms: BTreeMap::new() }
    }

    pub fn unit(space: &ParamSpace) -> Self {
        Self::mono(TMono::unit(), space)
    }

    pub fn mono(m: TMono, space: &ParamSpace) -> Self {
        Self::term(m, Scalar::one(space))
    }

    pub fn term(m: TMono, s: Scalar) -> Self {
        let mut p = Self::zero();
        p.add_term(m, s);
        p
    }

    pub fn scalar(s: Scalar) -> Self {
        Self::term(TMono::unit(), s)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TMono, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &TMono) -> Option<&Scalar> {
        self.terms.get(m)
    }

    /// Coefficient of the unit monomial.
    pub fn scalar_part(&self) -> Option<&Scalar> {
        self.terms.get(&TMono::unit())
    }

    fn any_space(&self) -> Option<&ParamSpace> {
        self.terms.values().next().map(Scalar::space)
    }

    pub fn add_term(&mut self, m: TMono, s: Scalar) {
        if s.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(c) => {
                *c = &*c + &s;
                if c.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, s);
            }
        }
    }

    pub fn add_assign(&mut self, other: &TPoly) {
        for (m, s) in &other.terms {
            self.add_term(m.clone(), s.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &TPoly) {
        for (m, s) in &other.terms {
            self.add_term(m.clone(), -s);
        }
    }

    /// Adds `s * other`.
    pub fn add_scaled(&mut self, other: &TPoly, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * s);
        }
    }

    pub fn add(&self, other: &TPoly) -> TPoly {
        let mut r = self.clone();
        r.add_assign(other);
        r
    }

    pub fn sub(&self, other: &TPoly) -> TPoly {
        let mut r = self.clone();
        r.sub_assign(other);
        r
    }

    pub fn neg(&self) -> TPoly {
        TPoly { terms: self.terms.iter().map(|(m, s)| (m.clone(), -s)).collect() }
    }

    pub fn scale(&self, s: &Scalar) -> TPoly {
        if s.is_zero() {
            return TPoly::zero();
        }
        if s.is_one() {
            return self.clone();
        }
        TPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }

    pub fn scale_q(&self, q: &BigRational) -> TPoly {
        match self.any_space() {
            None => TPoly::zero(),
            Some(sp) => self.scale(&Scalar::from_rational(sp, q)),
        }
    }

    pub fn scale_int(&self, n: &BigInt) -> TPoly {
        if n.is_one() {
            return self.clone();
        }
        match self.any_space() {
            None => TPoly::zero(),
            Some(sp) => self.scale(&Scalar::from_bigint(sp, n.clone())),
        }
    }

    /// The derivation T, extended to tensors by the Leibniz rule; T(1) = 0.
    pub fn apply_t(&self) -> TPoly {
        let mut r = TPoly::zero();
        for (m, s) in &self.terms {
            for i in 0..m.len() {
                let mut f = m.0.clone();
                f[i] = f[i].t();
                r.add_term(TMono(f), s.clone());
            }
        }
        r
    }

    pub fn apply_t_pow(&self, k: u32) -> TPoly {
        let mut r = self.clone();
        for _ in 0..k {
            if r.is_zero() {
                break;
            }
            r = r.apply_t();
        }
        r
    }

    /// `prefix (x) self`.
    pub fn prefixed(&self, prefix: &TMono) -> TPoly {
        if prefix.is_empty() {
            return self.clone();
        }
        TPoly { terms: self.terms.iter().map(|(m, s)| (prefix.concat(m), s.clone())).collect() }
    }

    /// `self (x) suffix`.
    pub fn suffixed(&self, suffix: &TMono) -> TPoly {
        if suffix.is_empty() {
            return self.clone();
        }
        TPoly { terms: self.terms.iter().map(|(m, s)| (m.concat(suffix), s.clone())).collect() }
    }

    /// Tensor product.
    pub fn tensor(&self, other: &TPoly) -> TPoly {
        let mut r = TPoly::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                r.add_term(a.concat(b), x * y);
            }
        }
        r
    }

    /// Applies a coefficient map, dropping zeros.
    pub fn try_map_scalars<E>(&self, mut f: impl FnMut(&Scalar) -> Result<Scalar, E>) -> Result<TPoly, E> {
        let mut r = TPoly::zero();
        for (m, s) in &self.terms {
            r.add_term(m.clone(), f(s)?);
        }
        Ok(r)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("no bracket entry for [{0}, {1}] in either orientation")]
    MissingBracket(String, String),
    #[error("unknown generator index {0}")]
    UnknownGenerator(u32),
}

/// A structured problem found by [`Presentation::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateGenerator { name: String },
    NonPositiveDegree { generator: String, degree: String },
    NonPositiveWeight { generator: String, weight: String },
    UnknownGenerator { pair: (String, String), index: u32 },
    MissingPair { pair: (String, String) },
    BadVariables { pair: (String, String), nvars: usize },
    Grading { pair: (String, String), term: String, degree: String, bound: String },
    Parity { pair: (String, String), term: String },
    Weight { pair: (String, String), term: String, weight: String, expected: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateGenerator { name } => write!(f, "duplicate generator `{name}`"),
            Violation::NonPositiveDegree { generator, degree } => {
                write!(f, "generator `{generator}` has non-positive degree {degree}")
            }
            Violation::NonPositiveWeight { generator, weight } => {
                write!(f, "generator `{generator}` has non-positive weight {weight}")
            }
            Violation::UnknownGenerator { pair, index } => {
                write!(f, "bracket [{}, {}] references unknown generator #{index}", pair.0, pair.1)
            }
            Violation::MissingPair { pair } => write!(f, "no bracket given for [{}, {}]", pair.0, pair.1),
            Violation::BadVariables { pair, nvars } => {
                write!(f, "bracket [{}, {}] must be a polynomial in lambda only ({nvars} variables)", pair.0, pair.1)
            }
            Violation::Grading { pair, term, degree, bound } => write!(
                f,
                "grading condition fails in [{}, {}]: term {term} has degree {degree}, not < {bound}",
                pair.0, pair.1
            ),
            Violation::Parity { pair, term } => {
                write!(f, "bracket [{}, {}] is not parity preserving at term {term}", pair.0, pair.1)
            }
            Violation::Weight { pair, term, weight, expected } => write!(
                f,
                "bracket [{}, {}]: term {term} has weight {weight}, expected {expected}",
                pair.0, pair.1
            ),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Presentation {
    pub name: Option<String>,
    params: Vec<String>,
    unknowns: Vec<String>,
    space: ParamSpace,
    generators: Vec<GeneratorDecl>,
    brackets: BTreeMap<(u32, u32), LPoly>,
    rank: Vec<u32>,
}

impl Presentation {
    /// Assembles a presentation. Scalars in `brackets` must live in the space
    /// `params ++ unknowns` (see [`Presentation::space_for`]).
    pub fn new(
        name: Option<String>,
        params: Vec<String>,
        unknowns: Vec<String>,
        generators: Vec<GeneratorDecl>,
        brackets: BTreeMap<(u32, u32), LPoly>,
    ) -> Self {
        let space = Self::space_for(&params, &unknowns);
        let mut order: Vec<usize> = (0..generators.len()).collect();
        order.sort_by(|&a, &b| generators[a].degree.cmp(&generators[b].degree).then(a.cmp(&b)));
        let mut rank = vec![0; generators.len()];
        for (r, &g) in order.iter().enumerate() {
            rank[g] = r as u32;
        }
        Presentation { name, params, unknowns, space, generators, brackets, rank }
    }

    /// Coefficient space for the given declarations: parameters followed by unknowns.
    pub fn space_for(params: &[String], unknowns: &[String]) -> ParamSpace {
        ParamSpace::new(params.iter().chain(unknowns.iter()).cloned())
    }

    pub fn with_space(mut self, space: ParamSpace) -> Self {
        assert_eq!(space.names(), Self::space_for(&self.params, &self.unknowns).names());
        self.space = space;
        self
    }

    pub fn space(&self) -> &ParamSpace {
        &self.space
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn unknowns(&self) -> &[String] {
        &self.unknowns
    }

    pub fn generators(&self) -> &[GeneratorDecl] {
        &self.generators
    }

    pub fn generator(&self, g: u32) -> &GeneratorDecl {
        &self.generators[g as usize]
    }

    pub fn generator_index(&self, name: &str) -> Option<u32> {
        self.generators.iter().position(|g| g.name == name).map(|i| i as u32)
    }

    pub fn brackets(&self) -> &BTreeMap<(u32, u32), LPoly> {
        &self.brackets
    }

    pub fn scalar(&self, n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(&self.space, n, d)
    }

    pub fn rgen(&self, name: &str, n: u32) -> Option<RGen> {
        self.generator_index(name).map(|g| RGen::new(g, n))
    }

    /// Single-factor tensor `T^n name`.
    pub fn gen_poly(&self, name: &str, n: u32) -> TPoly {
        let g = self.rgen(name, n).unwrap_or_else(|| panic!("unknown generator `{name}`"));
        TPoly::mono(TMono::single(g), &self.space)
    }

    pub fn unit(&self) -> TPoly {
        TPoly::unit(&self.space)
    }

    // ---- gradings --------------------------------------------------------

    pub fn rgen_degree(&self, x: RGen) -> Degree {
        self.generators[x.gen as usize].degree
    }

    pub fn rgen_parity(&self, x: RGen) -> Parity {
        self.generators[x.gen as usize].parity
    }

    pub fn rgen_weight(&self, x: RGen) -> Option<Degree> {
        self.generators[x.gen as usize].weight.map(|w| w + Degree::from_integer(x.n as i64))
    }

    pub fn mono_degree(&self, m: &TMono) -> Degree {
        m.0.iter().fold(Degree::zero(), |acc, &x| acc + self.rgen_degree(x))
    }

    pub fn mono_parity(&self, m: &TMono) -> Parity {
        m.0.iter().fold(Parity::Even, |acc, &x| acc.add(self.rgen_parity(x)))
    }

    pub fn mono_weight(&self, m: &TMono) -> Option<Degree> {
        m.0.iter().try_fold(Degree::zero(), |acc, &x| Some(acc + self.rgen_weight(x)?))
    }

    /// Maximum term degree; `None` for the zero polynomial (which has every degree).
    pub fn degree_bound(&self, x: &TPoly) -> Option<Degree> {
        x.terms().map(|(m, _)| self.mono_degree(m)).max()
    }

    pub fn lpoly_degree_bound(&self, p: &LPoly) -> Option<Degree> {
        p.terms().filter_map(|(_, c)| self.degree_bound(c)).max()
    }

    /// `(-1)^{p(A) p(B)}` for monomials.
    pub fn sign(&self, a: &TMono, b: &TMono) -> i64 {
        parity_sign(self.mono_parity(a), self.mono_parity(b))
    }

    /// Position of a generator in the PBW order: ascending (degree, declaration index).
    pub fn rank(&self, g: u32) -> u32 {
        self.rank[g as usize]
    }

    /// PBW total order key on R: (generator degree, declaration index, derivative order).
    pub fn pbw_key(&self, x: RGen) -> (u32, u32) {
        (self.rank[x.gen as usize], x.n)
    }

    // ---- brackets --------------------------------------------------------

    /// The stored or skew-derived value of `[a_lambda b]` on generators.
    pub fn base_bracket(&self, a: u32, b: u32) -> Result<LPoly, AlgebraError> {
        if a as usize >= self.generators.len() {
            return Err(AlgebraError::UnknownGenerator(a));
        }
        if b as usize >= self.generators.len() {
            return Err(AlgebraError::UnknownGenerator(b));
        }
        if let Some(v) = self.brackets.get(&(a, b)) {
            return Ok(v.clone());
        }
        if let Some(v) = self.brackets.get(&(b, a)) {
            // [a_lambda b] = -p(a,b) [b_{-lambda-T} a]
            let s = parity_sign(self.generator(a).parity, self.generator(b).parity);
            let sub = formal::subst_neg_lambda_minus_t(v);
            return Ok(if s == 1 { sub.neg() } else { sub });
        }
        Err(AlgebraError::MissingBracket(self.generator(a).name.clone(), self.generator(b).name.clone()))
    }

    /// `[T^m a _lambda T^n b] = (-lambda)^m (lambda + T)^n [a_lambda b]`.
    pub fn bracket_r(&self, x: RGen, y: RGen) -> Result<LPoly, AlgebraError> {
        let base = self.base_bracket(x.gen, y.gen)?;
        let mut r = base.mul_lambda_plus_t(0, y.n).shift(0, x.n);
        if x.n % 2 == 1 {
            r = r.neg();
        }
        Ok(r)
    }

    /// Checks names, degrees, the grading condition, parity preservation and
    /// (when all weights are declared) weight homogeneity of every table entry.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let ngen = self.generators.len() as u32;
        for (i, g) in self.generators.iter().enumerate() {
            if self.generators[..i].iter().any(|h| h.name == g.name) {
                out.push(Violation::DuplicateGenerator { name: g.name.clone() });
            }
            if g.degree <= Degree::zero() {
                out.push(Violation::NonPositiveDegree { generator: g.name.clone(), degree: g.degree.to_string() });
            }
            if let Some(w) = g.weight {
                if w <= Degree::zero() {
                    out.push(Violation::NonPositiveWeight { generator: g.name.clone(), weight: w.to_string() });
                }
            }
        }
        let name = |g: u32| {
            self.generators.get(g as usize).map_or_else(|| format!("#{g}"), |d| d.name.clone())
        };
        for a in 0..ngen {
            for b in a..ngen {
                if !self.brackets.contains_key(&(a, b)) && !self.brackets.contains_key(&(b, a)) {
                    out.push(Violation::MissingPair { pair: (name(a), name(b)) });
                }
            }
        }
        let weights_declared = self.generators.iter().all(|g| g.weight.is_some());
        for (&(a, b), value) in &self.brackets {
            let pair = (name(a), name(b));
            if a >= ngen || b >= ngen {
                out.push(Violation::UnknownGenerator { pair, index: a.max(b) });
                continue;
            }
            if value.nvars() != 1 {
                out.push(Violation::BadVariables { pair, nvars: value.nvars() });
                continue;
            }
            let bound = self.generator(a).degree + self.generator(b).degree;
            let parity = self.generator(a).parity.add(self.generator(b).parity);
            for (k, coeff) in value.univariate() {
                for (m, _) in coeff.terms() {
                    if let Some(bad) = m.0.iter().find(|x| x.gen >= ngen) {
                        out.push(Violation::UnknownGenerator { pair: pair.clone(), index: bad.gen });
                        continue;
                    }
                    let term = self.render_mono(m);
                    let d = self.mono_degree(m);
                    if d >= bound {
                        out.push(Violation::Grading {
                            pair: pair.clone(),
                            term: term.clone(),
                            degree: d.to_string(),
                            bound: bound.to_string(),
                        });
                    }
                    if self.mono_parity(m) != parity {
                        out.push(Violation::Parity { pair: pair.clone(), term: term.clone() });
                    }
                    if weights_declared {
                        let wa = self.generator(a).weight.unwrap();
                        let wb = self.generator(b).weight.unwrap();
                        let expected = wa + wb - Degree::from_integer(k as i64 + 1);
                        let w = self.mono_weight(m).unwrap();
                        if w != expected {
                            out.push(Violation::Weight {
                                pair: pair.clone(),
                                term: format!("lambda^{k} {term}"),
                                weight: w.to_string(),
                                expected: expected.to_string(),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// Replaces every bracket coefficient through `f` and moves to a new
    /// parameter/unknown declaration.
    pub fn map_brackets<E>(
        &self,
        params: Vec<String>,
        unknowns: Vec<String>,
        mut f: impl FnMut(&Scalar, &ParamSpace) -> Result<Scalar, E>,
    ) -> Result<Presentation, E> {
        let space = Self::space_for(&params, &unknowns);
        let mut brackets = BTreeMap::new();
        for (&k, v) in &self.brackets {
            brackets.insert(k, v.try_map_coeffs(|c| c.try_map_scalars(|s| f(s, &space)))?);
        }
        Ok(Presentation::new(self.name.clone(), params, unknowns, self.generators.clone(), brackets).with_space(space))
    }

    // ---- rendering -------------------------------------------------------

    pub fn render_rgen(&self, x: RGen) -> String {
        let name = &self.generators[x.gen as usize].name;
        if x.n == 0 {
            name.clone()
        } else {
            format!("T^{} {}", x.n, name)
        }
    }

    pub fn render_mono(&self, m: &TMono) -> String {
        if m.is_empty() {
            return "1".into();
        }
        let parts: Vec<String> = m.0.iter().map(|&x| self.render_rgen(x)).collect();
        format!(":{}:", parts.join(" "))
    }

    pub fn render_tpoly(&self, x: &TPoly) -> String {
        let mut out = String::new();
        for (m, s) in x.terms() {
            push_term(&mut out, s, "", m, self);
        }
        if out.is_empty() {
            "0".into()
        } else {
            out
        }
    }

    pub fn render_lpoly(&self, p: &LPoly) -> String {
        let mut out = String::new();
        for (e, c) in p.terms() {
            let mut lam = String::new();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !lam.is_empty() {
                    lam.push(' ');
                }
                lam.push_str(&formal::var_name(i));
                if k > 1 {
                    lam.push_str(&format!("^{k}"));
                }
            }
            for (m, s) in c.terms() {
                push_term(&mut out, s, &lam, m, self);
            }
        }
        if out.is_empty() {
            "0".into()
        } else {
            out
        }
    }
}

fn push_term(out: &mut String, s: &Scalar, lam: &str, m: &TMono, pres: &Presentation) {
    let negative = s.is_negative_leading();
    let abs = if negative { -s } else { s.clone() };
    if out.is_empty() {
        if negative {
            out.push('-');
        }
    } else {
        out.push_str(if negative { " - " } else { " + " });
    }
    let mut parts: Vec<String> = Vec::new();
    let trivial = m.is_empty() && lam.is_empty();
    if !abs.is_one() || trivial {
        let text = abs.to_string();
        if abs.denominator().is_one() && abs.numerator().len() > 1 {
            parts.push(format!("({text})"));
        } else {
            parts.push(text);
        }
    }
    if !lam.is_empty() {
        parts.push(lam.to_string());
    }
    if !m.is_empty() {
        parts.push(pres.render_mono(m));
    }
    out.push_str(&parts.join(" "));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;

    const VIRASORO: &str = "param c;
        generator L parity=even degree=2 weight=2;
        bracket [L, L] = :T L: + 2*lambda*:L: + (c/12)*lambda^3*1;";

    fn vir() -> Presentation {
        parse(VIRASORO).unwrap()
    }

    #[test]
    fn t_on_unit_is_zero() {
        let p = vir();
        assert!(p.unit().apply_t().is_zero());
    }

    #[test]
    fn t_on_generator() {
        let p = vir();
        assert_eq!(p.gen_poly("L", 0).apply_t(), p.gen_poly("L", 1));
    }

    #[test]
    fn t_leibniz() {
        let p = vir();
        let l = p.gen_poly("L", 0);
        let tl = p.gen_poly("L", 1);
        let ll = l.tensor(&l);
        assert_eq!(ll.apply_t(), tl.tensor(&l).add(&l.tensor(&tl)));
    }

    #[test]
    fn bracket_with_derivative_on_left() {
        let p = vir();
        let r = p.bracket_r(p.rgen("L", 1).unwrap(), p.rgen("L", 0).unwrap()).unwrap();
        assert_eq!(p.render_lpoly(&r), "-lambda :T^1 L: - 2 lambda^2 :L: - c/12 lambda^4");
    }

    #[test]
    fn bracket_with_derivative_on_right() {
        let p = vir();
        let r = p.bracket_r(p.rgen("L", 0).unwrap(), p.rgen("L", 1).unwrap()).unwrap();
        assert_eq!(p.render_lpoly(&r), ":T^2 L: + 3 lambda :T^1 L: + 2 lambda^2 :L: + c/12 lambda^4");
    }

    #[test]
    fn zero_entry_brackets_to_zero() {
        let p = parse("generator a parity=even degree=1; generator b parity=even degree=1;
            bracket [a,a] = 0; bracket [a,b] = 0; bracket [b,b] = 0;")
        .unwrap();
        assert!(p.bracket_r(RGen::new(0, 2), RGen::new(1, 1)).unwrap().is_zero());
        assert!(p.bracket_r(RGen::new(1, 0), RGen::new(0, 0)).unwrap().is_zero());
    }

    #[test]
    fn validate_virasoro_ok() {
        assert!(vir().validate().is_empty());
    }

    #[test]
    fn validate_grading_boundary() {
        let p = parse("generator a parity=even degree=1; generator b parity=even degree=1;
            bracket [a,a] = 0; bracket [b,b] = 0; bracket [a,b] = :a b:;")
        .unwrap();
        let v = p.validate();
        assert!(v.iter().any(|x| matches!(x, Violation::Grading { .. })), "{v:?}");
    }

    #[test]
    fn validate_parity_and_weight() {
        let p = parse("generator a parity=odd degree=1 weight=1; generator b parity=even degree=2 weight=2;
            bracket [a,a] = 0; bracket [b,b] = 0; bracket [a,b] = :a:;")
        .unwrap();
        let v = p.validate();
        assert!(!v.iter().any(|x| matches!(x, Violation::Parity { .. })), "{v:?}");
        assert!(v.iter().any(|x| matches!(x, Violation::Weight { .. })), "{v:?}");
        let q = parse("generator a parity=odd degree=1; generator b parity=even degree=1;
            bracket [a,a] = 0; bracket [b,b] = 0; bracket [a,b] = 1;")
        .unwrap();
        assert!(q.validate().iter().any(|x| matches!(x, Violation::Parity { .. })));
    }

    #[test]
    fn validate_missing_pair() {
        let p = parse("generator a parity=even degree=1; generator b parity=even degree=1;
            bracket [a,a] = 0; bracket [b,b] = 0;")
        .unwrap();
        assert_eq!(p.validate(), vec![Violation::MissingPair { pair: ("a".into(), "b".into()) }]);
    }

    #[test]
    fn pbw_rank_orders_by_degree_then_declaration() {
        let p = parse("generator W parity=even degree=3; generator L parity=even degree=2;
            bracket [W,W] = 0; bracket [L,W] = 0; bracket [L,L] = 0;")
        .unwrap();
        assert!(p.rank(1) < p.rank(0));
    }
}
