//! Sparse multivariate polynomials over the integers.
//!
//! Terms are kept sorted in descending graded-lexicographic order (total
//! degree first, then lexicographic on the variable order), with no zero
//! coefficients stored. The variable count is fixed per polynomial.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Exponents = Box<[u32]>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: Vec<(Exponents, BigInt)>,
}

/// Graded lexicographic comparison of exponent vectors.
pub fn grlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(nvars);
        }
        Poly { nvars, terms: vec![(vec![0; nvars].into_boxed_slice(), c)] }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable index out of range");
        let mut e = vec![0; nvars];
        e[index] = 1;
        Poly { nvars, terms: vec![(e.into_boxed_slice(), BigInt::one())] }
    }

    /// Builds a polynomial from arbitrary (possibly repeated, unsorted) terms.
    pub fn from_terms(nvars: usize, mut terms: Vec<(Exponents, BigInt)>) -> Self {
        for (e, _) in &terms {
            assert_eq!(e.len(), nvars, "exponent vector length mismatch");
        }
        terms.sort_by(|a, b| grlex(&b.0, &a.0));
        let mut out: Vec<(Exponents, BigInt)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            match out.last_mut() {
                Some((le, lc)) if *le == e => *lc += c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { nvars, terms: out }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Exponents, BigInt)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.iter().all(|&e| e == 0))
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && !self.is_zero() && self.terms[0].1.is_one()
    }

    /// Constant term value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<BigInt> {
        if self.is_zero() {
            Some(BigInt::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.terms.first().map(|(_, c)| c)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(e, _)| e[var]).max().unwrap_or(0)
    }

    pub fn neg(&self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    fn merge(&self, other: &Poly, negate_other: bool) -> Poly {
        assert_eq!(self.nvars, other.nvars, "polynomial variable count mismatch");
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ea, ca) = &self.terms[i];
            let (eb, cb) = &other.terms[j];
            match grlex(ea, eb) {
                Ordering::Greater => {
                    out.push((ea.clone(), ca.clone()));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((eb.clone(), if negate_other { -cb } else { cb.clone() }));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate_other { ca - cb } else { ca + cb };
                    if !c.is_zero() {
                        out.push((ea.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        for (e, c) in &other.terms[j..] {
            out.push((e.clone(), if negate_other { -c } else { c.clone() }));
        }
        Poly { nvars: self.nvars, terms: out }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.merge(other, true)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars, "polynomial variable count mismatch");
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.nvars);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                terms.push((e, ca * cb));
            }
        }
        Poly::from_terms(self.nvars, terms)
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    fn mul_monomial(&self, exps: &[u32], c: &BigInt) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, x)| (e.iter().zip(exps).map(|(a, b)| a + b).collect(), x * c))
                .collect(),
        }
    }

    /// Gcd of the integer coefficients (nonnegative).
    pub fn integer_content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides every coefficient by an integer that divides all of them.
    pub fn div_integer_exact(&self, d: &BigInt) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c / d)).collect(),
        }
    }

    /// Exact division; `None` if `divisor` does not divide `self` in Z[x].
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if let Some(c) = divisor.as_constant() {
            if self.terms.iter().all(|(_, x)| (x % &c).is_zero()) {
                return Some(self.div_integer_exact(&c));
            }
            return None;
        }
        let (le, lc) = &divisor.terms[0];
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((re, rc)) = rem.terms.first() {
            if re.iter().zip(le.iter()).any(|(a, b)| a < b) {
                return None;
            }
            let (q, r) = rc.div_rem(lc);
            if !r.is_zero() {
                return None;
            }
            let e: Exponents = re.iter().zip(le.iter()).map(|(a, b)| a - b).collect();
            rem = rem.sub(&divisor.mul_monomial(&e, &q));
            quot.push((e, q));
        }
        Some(Poly::from_terms(self.nvars, quot))
    }

    /// Coefficients with respect to `var`, indexed by power; each coefficient
    /// has zero exponent in `var`.
    fn coefficients_in(&self, var: usize) -> Vec<Poly> {
        let deg = self.degree_in(var) as usize;
        let mut buckets: Vec<Vec<(Exponents, BigInt)>> = vec![Vec::new(); deg + 1];
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[var] as usize;
            e2[var] = 0;
            buckets[k].push((e2, c.clone()));
        }
        buckets.into_iter().map(|t| Poly::from_terms(self.nvars, t)).collect()
    }

    fn leading_coeff_in(&self, var: usize) -> Poly {
        let d = self.degree_in(var);
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[var] == d)
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2[var] = 0;
                (e2, c.clone())
            })
            .collect();
        Poly::from_terms(self.nvars, terms)
    }

    fn lowest_var_from(&self, start: usize) -> Option<usize> {
        (start..self.nvars).find(|&v| self.terms.iter().any(|(e, _)| e[v] > 0))
    }

    /// Content with respect to `var`: the gcd of the coefficients in `var`.
    fn content_in(&self, var: usize) -> Poly {
        let mut g = Poly::zero(self.nvars);
        for c in self.coefficients_in(var) {
            if c.is_zero() {
                continue;
            }
            g = gcd_from(&g, &c, var + 1);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn pseudo_rem(&self, divisor: &Poly, var: usize) -> Poly {
        let db = divisor.degree_in(var);
        let lcb = divisor.leading_coeff_in(var);
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(var) >= db {
            let dr = r.degree_in(var);
            let lcr = r.leading_coeff_in(var);
            let mut shift = vec![0u32; self.nvars];
            shift[var] = dr - db;
            let t = lcr.mul(&divisor.mul_monomial(&shift, &BigInt::one()));
            r = lcb.mul(&r).sub(&t);
        }
        r
    }

    /// Makes the leading (graded-lex) coefficient positive.
    pub fn normalize_sign(self) -> Poly {
        match self.leading_coeff() {
            Some(c) if c.is_negative() => self.neg(),
            _ => self,
        }
    }

    /// Gcd in Z[x], normalized to a positive leading coefficient.
    pub fn gcd(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars, "polynomial variable count mismatch");
        gcd_from(self, other, 0)
    }

    /// Substitutes `value` for variable `var` (the result keeps `var` with exponent 0).
    pub fn eval_var(&self, var: usize, value: &BigInt) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e2 = e.clone();
                let k = e2[var];
                e2[var] = 0;
                (e2, c * num_traits::pow(value.clone(), k as usize))
            })
            .collect();
        Poly::from_terms(self.nvars, terms)
    }

    /// Re-indexes variables: output variable `i` takes exponent from input `map[i]`
    /// (or zero). Input variables not listed must have zero exponent.
    pub fn remap(&self, nvars: usize, map: &[Option<usize>]) -> Option<Poly> {
        let mut used = vec![false; self.nvars];
        for m in map.iter().flatten() {
            used[*m] = true;
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            if e.iter().enumerate().any(|(i, &x)| x > 0 && !used[i]) {
                return None;
            }
            let e2: Exponents = map.iter().map(|m| m.map_or(0, |i| e[i])).collect();
            terms.push((e2, c.clone()));
        }
        Some(Poly::from_terms(nvars, terms))
    }

    pub fn fmt_with(&self, names: &[String], f: &mut impl fmt::Write) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let is_const = e.iter().all(|&x| x == 0);
            let mut first = true;
            if is_const || !abs.is_one() {
                write!(f, "{abs}")?;
                first = false;
            }
            for (i, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                f.write_str(&names[i])?;
                if x > 1 {
                    write!(f, "^{x}")?;
                }
            }
        }
        Ok(())
    }
}

fn gcd_from(a: &Poly, b: &Poly, start: usize) -> Poly {
    if a.is_zero() {
        return b.clone().normalize_sign();
    }
    if b.is_zero() {
        return a.clone().normalize_sign();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::constant(a.nvars, a.integer_content().gcd(&b.integer_content()));
    }
    let var = match (a.lowest_var_from(start), b.lowest_var_from(start)) {
        (None, None) => {
            let ga = a.integer_content();
            let gb = b.integer_content();
            return Poly::constant(a.nvars, ga.gcd(&gb));
        }
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) | (None, Some(x)) => x,
    };
    if a.degree_in(var) == 0 {
        return gcd_from(a, &b.content_in(var), var + 1);
    }
    if b.degree_in(var) == 0 {
        return gcd_from(&a.content_in(var), b, var + 1);
    }
    let ca = a.content_in(var);
    let cb = b.content_in(var);
    let g = gcd_from(&ca, &cb, var + 1);
    let mut p = a.div_exact(&ca).expect("content divides");
    let mut q = b.div_exact(&cb).expect("content divides");
    if p.degree_in(var) < q.degree_in(var) {
        std::mem::swap(&mut p, &mut q);
    }
    loop {
        let r = p.pseudo_rem(&q, var);
        if r.is_zero() {
            break;
        }
        if r.degree_in(var) == 0 {
            q = Poly::one(a.nvars);
            break;
        }
        let cr = r.content_in(var);
        p = q;
        q = r.div_exact(&cr).expect("content divides");
    }
    let cq = q.content_in(var);
    let q = q.div_exact(&cq).expect("content divides");
    g.mul(&q).normalize_sign()
}
