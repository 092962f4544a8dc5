//! Polynomials in formal variables (lambda, mu, nu, ...) with tensor-algebra
//! coefficients, plus the integrals and operator substitutions of the
//! lambda-bracket calculus.
//!
//! Plain powers are used throughout: `lambda^n`, never divided powers, except
//! in [`exp_t_dlambda_expand`] whose contract is stated in divided powers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::algebra::TPoly;
use crate::scalar::{binomial, factorial, ratio, Scalar};

/// Display names of the formal variables by position.
pub fn var_name(i: usize) -> String {
    match i {
        0 => "lambda".into(),
        1 => "mu".into(),
        2 => "nu".into(),
        _ => format!("lambda{}", i + 1),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, TPoly>,
}

impl LPoly {
    pub fn zero(nvars: usize) -> Self {
        LPoly { nvars, terms: BTreeMap::new() }
    }

    /// `x` as a polynomial of degree zero.
    pub fn constant(nvars: usize, x: TPoly) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], x);
        p
    }

    /// Univariate polynomial from coefficients indexed by power.
    pub fn from_coeffs(coeffs: Vec<TPoly>) -> Self {
        let mut p = Self::zero(1);
        for (k, c) in coeffs.into_iter().enumerate() {
            p.add_term(vec![k as u32], c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &TPoly)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> Option<&TPoly> {
        self.terms.get(exps)
    }

    /// Univariate view: (power, coefficient).
    pub fn univariate(&self) -> impl Iterator<Item = (u32, &TPoly)> {
        assert_eq!(self.nvars, 1, "univariate view of a multivariate polynomial");
        self.terms.iter().map(|(e, c)| (e[0], c))
    }

    pub fn max_degree(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, exps: Vec<u32>, x: TPoly) {
        debug_assert_eq!(exps.len(), self.nvars);
        if x.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(c) => {
                c.add_assign(&x);
                if c.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, x);
            }
        }
    }

    pub fn add_assign(&mut self, other: &LPoly) {
        assert_eq!(self.nvars, other.nvars, "formal variable count mismatch");
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &LPoly) {
        assert_eq!(self.nvars, other.nvars, "formal variable count mismatch");
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c.neg());
        }
    }

    pub fn add(&self, other: &LPoly) -> LPoly {
        let mut r = self.clone();
        r.add_assign(other);
        r
    }

    pub fn sub(&self, other: &LPoly) -> LPoly {
        let mut r = self.clone();
        r.sub_assign(other);
        r
    }

    pub fn neg(&self) -> LPoly {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, s: &Scalar) -> LPoly {
        if s.is_zero() {
            return LPoly::zero(self.nvars);
        }
        self.map_coeffs(|c| c.scale(s))
    }

    /// Applies `f` to every coefficient, dropping zeros.
    pub fn map_coeffs(&self, mut f: impl FnMut(&TPoly) -> TPoly) -> LPoly {
        let mut r = LPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            r.add_term(e.clone(), f(c));
        }
        r
    }

    /// Applies a fallible map to every coefficient.
    pub fn try_map_coeffs<E>(&self, mut f: impl FnMut(&TPoly) -> Result<TPoly, E>) -> Result<LPoly, E> {
        let mut r = LPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            r.add_term(e.clone(), f(c)?);
        }
        Ok(r)
    }

    /// Multiplies by `var^k`.
    pub fn shift(&self, var: usize, k: u32) -> LPoly {
        let mut r = LPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2[var] += k;
            r.terms.insert(e2, c.clone());
        }
        r
    }

    /// Applies T to every coefficient.
    pub fn apply_t(&self) -> LPoly {
        self.map_coeffs(TPoly::apply_t)
    }

    /// Multiplies by `(lambda + T)^n`, where T acts on the coefficients.
    pub fn mul_lambda_plus_t(&self, var: usize, n: u32) -> LPoly {
        let mut r = LPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut tc = c.clone();
            for i in 0..=n {
                let mut e2 = e.clone();
                e2[var] += n - i;
                r.add_term(e2, tc.scale_int(&binomial(n, i)));
                if i < n {
                    tc = tc.apply_t();
                    if tc.is_zero() {
                        break;
                    }
                }
            }
        }
        r
    }

    /// Places this polynomial's variables at positions `map` of a polynomial in `nvars` variables.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> LPoly {
        assert_eq!(map.len(), self.nvars);
        let mut r = LPoly::zero(nvars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; nvars];
            for (i, &m) in map.iter().enumerate() {
                e2[m] += e[i];
            }
            r.add_term(e2, c.clone());
        }
        r
    }

    /// Removes variable `var`, which must not occur.
    pub fn drop_var(&self, var: usize) -> LPoly {
        let mut r = LPoly::zero(self.nvars - 1);
        for (e, c) in &self.terms {
            assert_eq!(e[var], 0, "dropping a variable that occurs");
            let mut e2 = e.clone();
            e2.remove(var);
            r.add_term(e2, c.clone());
        }
        r
    }
}

/// `int_0^{upper} d(var) p`: each `var^m` becomes `upper^(m+1)/(m+1)` and `var`
/// is eliminated. Variable indices above `var` shift down by one.
pub fn integrate_zero_to(p: &LPoly, var: usize, upper: usize) -> LPoly {
    assert!(var < p.nvars() && upper < p.nvars() && var != upper, "bad integration variables");
    let mut r = LPoly::zero(p.nvars());
    for (e, c) in p.terms() {
        let m = e[var];
        let mut e2 = e.to_vec();
        e2[var] = 0;
        e2[upper] += m + 1;
        r.add_term(e2, c.scale_q(&ratio(BigInt::from(1), BigInt::from(m + 1))));
    }
    r.drop_var(var)
}

/// `int_0^T d(lambda)` applied to `left` against a univariate `p`:
/// returns the pairs `(T^(m+1) left / (m+1), p_m)` whose normally ordered
/// products sum to the integral.
pub fn integrate_zero_to_t(left: &TPoly, p: &LPoly) -> Vec<(TPoly, TPoly)> {
    let mut out = Vec::new();
    for (m, y) in p.univariate() {
        let img = left.apply_t_pow(m + 1);
        if img.is_zero() {
            continue;
        }
        out.push((img.scale_q(&ratio(BigInt::from(1), BigInt::from(m + 1))), y.clone()));
    }
    out
}

/// `int_{-T}^0 d(lambda) p`: `lambda^m X` becomes `(-1)^m T^(m+1) X / (m+1)`.
pub fn integrate_neg_t_to_zero(p: &LPoly) -> TPoly {
    let mut r = TPoly::zero();
    for (m, x) in p.univariate() {
        let img = x.apply_t_pow(m + 1);
        if img.is_zero() {
            continue;
        }
        let sign = if m % 2 == 0 { 1 } else { -1 };
        r.add_assign(&img.scale_q(&ratio(BigInt::from(sign), BigInt::from(m + 1))));
    }
    r
}

/// Substitutes `lambda -> -lambda - T` with T acting from the left on coefficients:
/// `lambda^n X -> sum_k C(n,k) (-lambda)^(n-k) (-1)^k T^k X`.
pub fn subst_neg_lambda_minus_t(p: &LPoly) -> LPoly {
    let mut r = LPoly::zero(1);
    for (n, x) in p.univariate() {
        let mut tx = x.clone();
        for k in 0..=n {
            let sign: i64 = if n % 2 == 0 { 1 } else { -1 }; // (-1)^(n-k) * (-1)^k
            r.add_term(vec![n - k], tx.scale_int(&(binomial(n, k) * sign)));
            if k < n {
                tx = tx.apply_t();
                if tx.is_zero() {
                    break;
                }
            }
        }
    }
    r
}

/// Expansion of `N(e^{T d/dlambda} a, lambda^(m) X)` in divided powers:
/// returns `(m - k, T^(k) a)` for `k = 0..=m`, meaning
/// `sum_k lambda^(m-k) N(T^(k) a, X)`.
pub fn exp_t_dlambda_expand(a: &TPoly, m: u32) -> Vec<(u32, TPoly)> {
    let mut out = Vec::new();
    let mut ta = a.clone();
    for k in 0..=m {
        if ta.is_zero() {
            break;
        }
        out.push((m - k, ta.scale_q(&ratio(BigInt::from(1), factorial(k)))));
        ta = ta.apply_t();
    }
    out
}

/// Plain-power form of `N(e^{T d/dlambda} left, p)` for univariate `p`:
/// triples `(lambda exponent, C(m,k) T^k left, p_m)`.
pub fn exp_t_dlambda_pairs(left: &TPoly, p: &LPoly) -> Vec<(u32, TPoly, TPoly)> {
    let mut out = Vec::new();
    for (m, y) in p.univariate() {
        let mut tl = left.clone();
        for k in 0..=m {
            if tl.is_zero() {
                break;
            }
            out.push((m - k, tl.scale_int(&binomial(m, k)), y.clone()));
            tl = tl.apply_t();
        }
    }
    out
}

/// Substitutes `lambda -> lambda + mu` in a univariate polynomial, producing a
/// polynomial in (lambda, mu).
pub fn subst_lambda_plus_mu(p: &LPoly) -> LPoly {
    let mut r = LPoly::zero(2);
    for (n, x) in p.univariate() {
        for k in 0..=n {
            r.add_term(vec![k, n - k], x.scale_int(&binomial(n, k)));
        }
    }
    r
}

/// `int_0^lambda dmu mu^j (lambda - mu)^k = lambda^(j+k+1) * j! k! / (j+k+1)!`.
pub fn beta_coefficient(j: u32, k: u32) -> num_rational::BigRational {
    let num = factorial(j) * factorial(k);
    let den = factorial(j + k + 1);
    debug_assert!(!den.is_zero());
    ratio(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{RGen, TMono};
    use crate::scalar::ParamSpace;

    fn sp() -> ParamSpace {
        ParamSpace::new(["c"])
    }

    fn gen(n: u32) -> TPoly {
        TPoly::mono(TMono::single(RGen::new(0, n)), &sp())
    }

    fn unit() -> TPoly {
        TPoly::unit(&sp())
    }

    fn sc(t: &str) -> Scalar {
        Scalar::parse(t, &sp()).unwrap()
    }

    /// (T + 2 lambda) L + c/12 lambda^3
    fn virasoro_ll() -> LPoly {
        LPoly::from_coeffs(vec![gen(1), gen(0).scale(&sc("2")), TPoly::zero(), unit().scale(&sc("c/12"))])
    }

    #[test]
    fn neg_t_integral_of_virasoro_vanishes() {
        assert!(integrate_neg_t_to_zero(&virasoro_ll()).is_zero());
    }

    #[test]
    fn neg_t_integral_kills_scalars() {
        assert!(integrate_neg_t_to_zero(&LPoly::constant(1, unit())).is_zero());
    }

    #[test]
    fn zero_to_lambda_integral() {
        // int_0^lambda dmu mu X = lambda^2/2 X
        let mut p = LPoly::zero(2);
        p.add_term(vec![0, 1], gen(0));
        let r = integrate_zero_to(&p, 1, 0);
        assert_eq!(r, LPoly::from_coeffs(vec![TPoly::zero(), TPoly::zero(), gen(0).scale(&sc("1/2"))]));
    }

    #[test]
    fn skew_substitution_on_virasoro() {
        let r = subst_neg_lambda_minus_t(&virasoro_ll());
        assert_eq!(r, virasoro_ll().neg());
    }

    #[test]
    fn skew_substitution_edge_cases() {
        let x = LPoly::constant(1, gen(0));
        assert_eq!(subst_neg_lambda_minus_t(&x), x);
        let l = LPoly::from_coeffs(vec![TPoly::zero(), unit()]);
        assert_eq!(subst_neg_lambda_minus_t(&l), l.neg());
    }

    #[test]
    fn skew_substitution_is_involution() {
        let p = LPoly::from_coeffs(vec![gen(2), gen(1).scale(&sc("c")), gen(0), unit()]);
        assert_eq!(subst_neg_lambda_minus_t(&subst_neg_lambda_minus_t(&p)), p);
    }

    #[test]
    fn exp_expansion_divided_powers() {
        assert_eq!(exp_t_dlambda_expand(&gen(0), 0), vec![(0, gen(0))]);
        assert_eq!(exp_t_dlambda_expand(&gen(0), 1), vec![(1, gen(0)), (0, gen(1))]);
        assert_eq!(
            exp_t_dlambda_expand(&gen(0), 2),
            vec![(2, gen(0)), (1, gen(1)), (0, gen(2).scale(&sc("1/2")))]
        );
    }

    #[test]
    fn lambda_plus_mu() {
        let p = LPoly::from_coeffs(vec![TPoly::zero(), TPoly::zero(), unit()]);
        let r = subst_lambda_plus_mu(&p);
        assert_eq!(r.coeff(&[1, 1]), Some(&unit().scale(&sc("2"))));
        assert_eq!(r.len(), 3);
    }

    #[test]
    fn beta_integral() {
        // int_0^l mu (l - mu) dmu = l^3/6
        assert_eq!(beta_coefficient(1, 1), ratio(BigInt::from(1), BigInt::from(6)));
    }
}
