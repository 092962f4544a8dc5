//! The normally ordered product N and the bracket P_lambda on the whole tensor
//! algebra, defined recursively from the generator table, and the defect
//! quantities built from them.
//!
//! Left arguments are always split as `a (x) A'`, right arguments of a
//! single-factor left argument as `b (x) C`. All results are memoized per
//! monomial pair.

use std::cell::RefCell;
use std::fmt;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::algebra::{AlgebraError, Degree, Presentation, RGen, TMono, TPoly};
use crate::formal::{self, LPoly};
use crate::scalar::{binomial, ratio, Scalar};
use num_bigint::BigInt;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CalcError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("{kind} takes {expected} operands, got {got}")]
    Arity { kind: Defect, expected: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Defect {
    Sl,
    Sn,
    Wl,
    Wr,
    Q,
}

impl Defect {
    pub const ALL: [Defect; 5] = [Defect::Sl, Defect::Sn, Defect::Wl, Defect::Wr, Defect::Q];

    pub fn arity(self) -> usize {
        match self {
            Defect::Sl => 2,
            _ => 3,
        }
    }

    /// Whether the value carries the formal variable lambda.
    pub fn has_lambda(self) -> bool {
        matches!(self, Defect::Sl | Defect::Wl | Defect::Wr)
    }
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Defect::Sl => "sl",
            Defect::Sn => "sn",
            Defect::Wl => "wl",
            Defect::Wr => "wr",
            Defect::Q => "q",
        })
    }
}

impl std::str::FromStr for Defect {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "sl" => Defect::Sl,
            "sn" => Defect::Sn,
            "wl" => Defect::Wl,
            "wr" => Defect::Wr,
            "q" => Defect::Q,
            other => return Err(format!("unknown defect kind `{other}`")),
        })
    }
}

pub type Result<T, E = CalcError> = std::result::Result<T, E>;

#[derive(Default)]
pub(crate) struct Memo {
    n: FxHashMap<(TMono, TMono), TPoly>,
    p: FxHashMap<(TMono, TMono), LPoly>,
    pub(crate) sigma: FxHashMap<TMono, TPoly>,
}

/// Evaluation context over one presentation, owning the memo tables.
pub struct Engine<'p> {
    pres: &'p Presentation,
    memoize: bool,
    checked: bool,
    pub(crate) memo: RefCell<Memo>,
}

fn lambda_pow(k: u32) -> Vec<u32> {
    vec![k]
}

impl<'p> Engine<'p> {
    /// Memoizing engine; grading bounds are asserted in debug builds.
    pub fn new(pres: &'p Presentation) -> Self {
        Engine { pres, memoize: true, checked: cfg!(debug_assertions), memo: RefCell::default() }
    }

    /// Engine that asserts the grading bounds on every memo insert.
    pub fn checked(pres: &'p Presentation) -> Self {
        Engine { checked: true, ..Self::new(pres) }
    }

    /// Engine with every cache disabled (reference evaluation).
    pub fn unmemoized(pres: &'p Presentation) -> Self {
        Engine { memoize: false, ..Self::new(pres) }
    }

    pub fn presentation(&self) -> &'p Presentation {
        self.pres
    }

    pub(crate) fn memoizing(&self) -> bool {
        self.memoize
    }

    fn space_poly(&self, m: TMono) -> TPoly {
        TPoly::mono(m, self.pres.space())
    }

    fn deg(&self, m: &TMono) -> Degree {
        self.pres.mono_degree(m)
    }

    // ---- N ---------------------------------------------------------------

    pub fn nprod(&self, a: &TPoly, b: &TPoly) -> Result<TPoly> {
        let mut r = TPoly::zero();
        for (ma, sa) in a.terms() {
            for (mb, sb) in b.terms() {
                let v = self.nprod_mono(ma, mb)?;
                r.add_scaled(&v, &(sa * sb));
            }
        }
        Ok(r)
    }

    pub fn nprod_mono(&self, a: &TMono, c: &TMono) -> Result<TPoly> {
        if a.is_empty() || c.is_empty() || a.len() == 1 {
            return Ok(self.space_poly(a.concat(c)));
        }
        let key = (a.clone(), c.clone());
        if self.memoize {
            if let Some(v) = self.memo.borrow().n.get(&key) {
                return Ok(v.clone());
            }
        }
        let (x, rest) = a.split_first().expect("non-empty");
        let xm = TMono::single(x);
        let mut r = self.nprod_mono(&rest, c)?.prefixed(&xm);
        let q = |m: u32| ratio(BigInt::from(1), BigInt::from(m + 1));
        for (m, y) in self.pbracket_mono(&rest, c)?.univariate() {
            let left = self.space_poly(TMono::single(RGen::new(x.gen, x.n + m + 1))).scale_q(&q(m));
            r.add_assign(&self.nprod(&left, y)?);
        }
        let s = self.pres.sign(&xm, &rest);
        let rest_poly = self.space_poly(rest.clone());
        for (m, z) in self.pbracket_mono(&xm, c)?.univariate() {
            let left = rest_poly.apply_t_pow(m + 1).scale_q(&q(m));
            let v = self.nprod(&left, z)?;
            if s == 1 {
                r.add_assign(&v);
            } else {
                r.sub_assign(&v);
            }
        }
        if self.checked {
            let bound = self.deg(a) + self.deg(c);
            if let Some(d) = self.pres.degree_bound(&r) {
                assert!(d <= bound, "grading bound violated by N: degree {d} > {bound}");
            }
        }
        if self.memoize {
            self.memo.borrow_mut().n.insert(key, r.clone());
        }
        Ok(r)
    }

    /// `N(A, p)` coefficientwise for a polynomial `p` in formal variables.
    pub fn nprod_left(&self, a: &TPoly, p: &LPoly) -> Result<LPoly> {
        p.try_map_coeffs(|c| self.nprod(a, c))
    }

    /// `N(p, C)` coefficientwise.
    pub fn nprod_right(&self, p: &LPoly, c: &TPoly) -> Result<LPoly> {
        p.try_map_coeffs(|x| self.nprod(x, c))
    }

    // ---- P_lambda ----------------------------------------------------------

    /// `P_lambda(A, B)` as a polynomial in the single variable lambda.
    pub fn pbracket(&self, a: &TPoly, b: &TPoly) -> Result<LPoly> {
        let mut r = LPoly::zero(1);
        for (ma, sa) in a.terms() {
            for (mb, sb) in b.terms() {
                let v = self.pbracket_mono(ma, mb)?;
                r.add_assign(&v.scale(&(sa * sb)));
            }
        }
        Ok(r)
    }

    pub fn pbracket_mono(&self, a: &TMono, b: &TMono) -> Result<LPoly> {
        if a.is_empty() || b.is_empty() {
            return Ok(LPoly::zero(1));
        }
        if a.len() == 1 && b.len() == 1 {
            return Ok(self.pres.bracket_r(a.0[0], b.0[0])?);
        }
        let key = (a.clone(), b.clone());
        if self.memoize {
            if let Some(v) = self.memo.borrow().p.get(&key) {
                return Ok(v.clone());
            }
        }
        let r = if a.len() == 1 { self.left_wick(a.0[0], b)? } else { self.right_wick(a, b)? };
        if self.checked {
            let bound = self.deg(a) + self.deg(b);
            if let Some(d) = self.pres.lpoly_degree_bound(&r) {
                assert!(d < bound, "grading bound violated by P: degree {d} >= {bound}");
            }
        }
        if self.memoize {
            self.memo.borrow_mut().p.insert(key, r.clone());
        }
        Ok(r)
    }

    /// `P_lambda(a, b (x) C) = N(P(a,b), C) + p(a,b) b (x) P(a,C) + int_0^lambda dmu P_mu(P_lambda(a,b), C)`.
    fn left_wick(&self, a: RGen, bc: &TMono) -> Result<LPoly> {
        let (b, c) = bc.split_first().expect("non-empty");
        let am = TMono::single(a);
        let bm = TMono::single(b);
        let cp = self.space_poly(c.clone());
        let x = self.pres.bracket_r(a, b)?;
        let mut r = LPoly::zero(1);
        for (k, xk) in x.univariate() {
            r.add_term(lambda_pow(k), self.nprod(xk, &cp)?);
            for (j, y) in self.pbracket(xk, &cp)?.univariate() {
                r.add_term(lambda_pow(k + j + 1), y.scale_q(&ratio(BigInt::from(1), BigInt::from(j + 1))));
            }
        }
        let s = self.pres.sign(&am, &bm);
        for (k, z) in self.pbracket_mono(&am, &c)?.univariate() {
            let v = z.prefixed(&bm);
            r.add_term(lambda_pow(k), if s == 1 { v } else { v.neg() });
        }
        Ok(r)
    }

    /// `P_lambda(a (x) A', C) = N(e^{T d_lambda} a, P(A',C)) + s N(e^{T d_lambda} A', P(a,C))
    ///   + s int_0^lambda dmu P_mu(A', P_{lambda-mu}(a,C))`, `s = p(a,A')`.
    fn right_wick(&self, a: &TMono, c: &TMono) -> Result<LPoly> {
        let (x, rest) = a.split_first().expect("non-empty");
        let xm = TMono::single(x);
        let s = self.pres.sign(&xm, &rest);
        let sign = |v: TPoly| if s == 1 { v } else { v.neg() };
        let mut r = LPoly::zero(1);
        for (m, y) in self.pbracket_mono(&rest, c)?.univariate() {
            for i in 0..=m {
                let left = self.space_poly(TMono::single(RGen::new(x.gen, x.n + i)));
                let v = self.nprod(&left, y)?.scale_int(&binomial(m, i));
                r.add_term(lambda_pow(m - i), v);
            }
        }
        let rest_poly = self.space_poly(rest.clone());
        let z = self.pbracket_mono(&xm, c)?;
        for (m, zm) in z.univariate() {
            let mut left = rest_poly.clone();
            for i in 0..=m {
                if left.is_zero() {
                    break;
                }
                let v = self.nprod(&left, zm)?.scale_int(&binomial(m, i));
                r.add_term(lambda_pow(m - i), sign(v));
                left = left.apply_t();
            }
        }
        for (k, zk) in z.univariate() {
            for (j, w) in self.pbracket(&rest_poly, zk)?.univariate() {
                let v = w.scale_q(&formal::beta_coefficient(j, k));
                r.add_term(lambda_pow(k + j + 1), sign(v));
            }
        }
        Ok(r)
    }

    /// `int_{-T}^0 dlambda P_lambda(A, B)`.
    pub fn lie(&self, a: &TPoly, b: &TPoly) -> Result<TPoly> {
        Ok(formal::integrate_neg_t_to_zero(&self.pbracket(a, b)?))
    }

    /// Sign `p(A, B)` of two homogeneous monomials.
    fn sign(&self, a: &TMono, b: &TMono) -> Scalar {
        Scalar::from_int(self.pres.space(), self.pres.sign(a, b))
    }

    // ---- defects -------------------------------------------------------------

    /// Evaluates one of the defect quantities on the given operands; results
    /// without a formal variable are returned as constant polynomials in lambda.
    pub fn structure_defect(&self, kind: Defect, operands: &[TPoly]) -> Result<LPoly> {
        if operands.len() != kind.arity() {
            return Err(CalcError::Arity { kind, expected: kind.arity(), got: operands.len() });
        }
        let mut r = LPoly::zero(1);
        if kind == Defect::Sl {
            for (ma, sa) in operands[0].terms() {
                for (mb, sb) in operands[1].terms() {
                    r.add_assign(&self.sl_mono(ma, mb)?.scale(&(sa * sb)));
                }
            }
            return Ok(r);
        }
        for (ma, sa) in operands[0].terms() {
            for (mb, sb) in operands[1].terms() {
                for (mc, sc) in operands[2].terms() {
                    let s = &(sa * sb) * sc;
                    let v = match kind {
                        Defect::Sn => LPoly::constant(1, self.sn_mono(ma, mb, mc)?),
                        Defect::Wl => self.wl_mono(ma, mb, mc)?,
                        Defect::Wr => self.wr_mono(ma, mb, mc)?,
                        Defect::Q => LPoly::constant(1, self.q_mono(ma, mb, mc)?),
                        Defect::Sl => unreachable!(),
                    };
                    r.add_assign(&v.scale(&s));
                }
            }
        }
        Ok(r)
    }

    pub fn sl(&self, a: &TPoly, b: &TPoly) -> Result<LPoly> {
        self.structure_defect(Defect::Sl, &[a.clone(), b.clone()])
    }

    pub fn sn(&self, a: &TPoly, b: &TPoly, c: &TPoly) -> Result<TPoly> {
        let v = self.structure_defect(Defect::Sn, &[a.clone(), b.clone(), c.clone()])?;
        Ok(v.coeff(&[0]).cloned().unwrap_or_default())
    }

    fn sl_mono(&self, a: &TMono, b: &TMono) -> Result<LPoly> {
        let ab = self.pbracket_mono(a, b)?;
        let ba = formal::subst_neg_lambda_minus_t(&self.pbracket_mono(b, a)?);
        Ok(ab.add(&ba.scale(&self.sign(a, b))))
    }

    fn sn_mono(&self, a: &TMono, b: &TMono, c: &TMono) -> Result<TPoly> {
        let ap = self.space_poly(a.clone());
        let bp = self.space_poly(b.clone());
        let cp = self.space_poly(c.clone());
        let mut r = self.nprod(&ap, &self.nprod_mono(b, c)?)?;
        r.sub_assign(&self.nprod(&bp, &self.nprod_mono(a, c)?)?.scale(&self.sign(a, b)));
        r.sub_assign(&self.nprod(&self.lie(&ap, &bp)?, &cp)?);
        Ok(r)
    }

    /// `int_0^lambda dmu P_mu(p_lambda, C)` for `p` univariate in lambda.
    fn integral_p_of(&self, p: &LPoly, c: &TPoly) -> Result<LPoly> {
        let mut r = LPoly::zero(1);
        for (k, xk) in p.univariate() {
            for (j, y) in self.pbracket(xk, c)?.univariate() {
                r.add_term(lambda_pow(k + j + 1), y.scale_q(&ratio(BigInt::from(1), BigInt::from(j + 1))));
            }
        }
        Ok(r)
    }

    fn wl_mono(&self, a: &TMono, b: &TMono, c: &TMono) -> Result<LPoly> {
        let ap = self.space_poly(a.clone());
        let bp = self.space_poly(b.clone());
        let cp = self.space_poly(c.clone());
        let pab = self.pbracket_mono(a, b)?;
        let mut r = self.pbracket(&ap, &self.nprod_mono(b, c)?)?;
        r.sub_assign(&self.integral_p_of(&pab, &cp)?);
        r.sub_assign(&self.nprod_right(&pab, &cp)?);
        r.sub_assign(&self.nprod_left(&bp, &self.pbracket_mono(a, c)?)?.scale(&self.sign(a, b)));
        Ok(r)
    }

    /// `N(e^{T d_lambda} A, p)` for univariate `p`.
    fn nprod_exp(&self, a: &TPoly, p: &LPoly) -> Result<LPoly> {
        let mut r = LPoly::zero(1);
        for (k, left, y) in formal::exp_t_dlambda_pairs(a, p) {
            r.add_term(lambda_pow(k), self.nprod(&left, &y)?);
        }
        Ok(r)
    }

    fn wr_mono(&self, a: &TMono, b: &TMono, c: &TMono) -> Result<LPoly> {
        let ap = self.space_poly(a.clone());
        let bp = self.space_poly(b.clone());
        let s = self.sign(a, b);
        let mut r = self.pbracket(&self.nprod_mono(a, b)?, &self.space_poly(c.clone()))?;
        let pac = self.pbracket_mono(a, c)?;
        let mut integral = LPoly::zero(1);
        for (k, zk) in pac.univariate() {
            for (j, w) in self.pbracket(&bp, zk)?.univariate() {
                integral.add_term(lambda_pow(k + j + 1), w.scale_q(&formal::beta_coefficient(j, k)));
            }
        }
        r.sub_assign(&integral.scale(&s));
        r.sub_assign(&self.nprod_exp(&ap, &self.pbracket_mono(b, c)?)?);
        r.sub_assign(&self.nprod_exp(&bp, &pac)?.scale(&s));
        Ok(r)
    }

    /// `N(int_0^T dlambda A, p)` for univariate `p`.
    fn nprod_int(&self, a: &TPoly, p: &LPoly) -> Result<TPoly> {
        let mut r = TPoly::zero();
        for (left, y) in formal::integrate_zero_to_t(a, p) {
            r.add_assign(&self.nprod(&left, &y)?);
        }
        Ok(r)
    }

    fn q_mono(&self, a: &TMono, b: &TMono, c: &TMono) -> Result<TPoly> {
        let ap = self.space_poly(a.clone());
        let bp = self.space_poly(b.clone());
        let cp = self.space_poly(c.clone());
        let mut r = self.nprod(&self.nprod_mono(a, b)?, &cp)?;
        r.sub_assign(&self.nprod(&ap, &self.nprod_mono(b, c)?)?);
        r.sub_assign(&self.nprod_int(&ap, &self.pbracket_mono(b, c)?)?);
        r.sub_assign(&self.nprod_int(&bp, &self.pbracket_mono(a, c)?)?.scale(&self.sign(a, b)));
        Ok(r)
    }

    /// `P_lambda(a, P_mu(b, c)) - p(a,b) P_mu(b, P_lambda(a, c)) - P_{lambda+mu}(P_lambda(a, b), c)`
    /// as a polynomial in (lambda, mu).
    pub fn jacobiator(&self, a: &TPoly, b: &TPoly, c: &TPoly) -> Result<LPoly> {
        let mut r = LPoly::zero(2);
        for (ma, sa) in a.terms() {
            for (mb, sb) in b.terms() {
                for (mc, sc) in c.terms() {
                    let s = &(sa * sb) * sc;
                    r.add_assign(&self.jacobiator_mono(ma, mb, mc)?.scale(&s));
                }
            }
        }
        Ok(r)
    }

    fn jacobiator_mono(&self, a: &TMono, b: &TMono, c: &TMono) -> Result<LPoly> {
        let ap = self.space_poly(a.clone());
        let bp = self.space_poly(b.clone());
        let cp = self.space_poly(c.clone());
        let mut r = LPoly::zero(2);
        // P_lambda(a, P_mu(b, c)): outer lambda is var 0, inner mu is var 1
        for (j, z) in self.pbracket_mono(b, c)?.univariate() {
            for (i, w) in self.pbracket(&ap, z)?.univariate() {
                r.add_term(vec![i, j], w.clone());
            }
        }
        let s = self.sign(a, b);
        for (i, z) in self.pbracket_mono(a, c)?.univariate() {
            for (j, w) in self.pbracket(&bp, z)?.univariate() {
                r.add_term(vec![i, j], w.scale(&s).neg());
            }
        }
        for (k, x) in self.pbracket_mono(a, b)?.univariate() {
            let outer = formal::subst_lambda_plus_mu(&self.pbracket(x, &cp)?);
            r.sub_assign(&outer.shift(0, k));
        }
        Ok(r)
    }

    /// `A (x) sn(b, c, D)`, a spanning element of the relation space.
    pub fn m_element(&self, a: &TPoly, b: RGen, c: RGen, d: &TPoly) -> Result<TPoly> {
        let bp = self.space_poly(TMono::single(b));
        let cp = self.space_poly(TMono::single(c));
        Ok(a.tensor(&self.sn(&bp, &cp, d)?))
    }

    /// Number of cached N and P entries.
    pub fn cache_sizes(&self) -> (usize, usize, usize) {
        let m = self.memo.borrow();
        (m.n.len(), m.p.len(), m.sigma.len())
    }
}
