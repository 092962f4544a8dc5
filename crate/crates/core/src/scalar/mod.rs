//! Exact arithmetic in the rational function field Q(p1, ..., pk).
//!
//! A [`Scalar`] is a reduced fraction of integer polynomials over a declared,
//! ordered [`ParamSpace`]. Canonical form: numerator and denominator share no
//! common factor in Z[p], the denominator's leading coefficient (graded lex on
//! the declared order) is positive, and zero is `0/1`. Equality is structural.

mod linsys;
pub mod poly;

pub use linsys::{LinearSystem, Solution};

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use poly::Poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("scalars belong to different parameter sets ({0} vs {1})")]
    SpaceMismatch(String, String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("{0}")]
    Parse(String),
}

/// An ordered set of parameter names generating the coefficient field.
#[derive(Clone)]
pub struct ParamSpace(Arc<[String]>);

impl ParamSpace {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        ParamSpace(names.into_iter().map(Into::into).collect::<Vec<_>>().into())
    }

    /// The field Q with no parameters.
    pub fn rationals() -> Self {
        ParamSpace::new(Vec::<String>::new())
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn same(&self, other: &ParamSpace) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl PartialEq for ParamSpace {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}
impl Eq for ParamSpace {}

impl fmt::Debug for ParamSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParamSpace({:?})", &*self.0)
    }
}

#[derive(Clone)]
pub struct Scalar {
    space: ParamSpace,
    num: Poly,
    den: Poly,
}

impl Scalar {
    pub fn zero(space: &ParamSpace) -> Self {
        Scalar { space: space.clone(), num: Poly::zero(space.len()), den: Poly::one(space.len()) }
    }

    pub fn one(space: &ParamSpace) -> Self {
        Self::from_int(space, 1)
    }

    pub fn from_int(space: &ParamSpace, n: i64) -> Self {
        Self::from_bigint(space, BigInt::from(n))
    }

    pub fn from_bigint(space: &ParamSpace, n: BigInt) -> Self {
        Scalar { space: space.clone(), num: Poly::constant(space.len(), n), den: Poly::one(space.len()) }
    }

    pub fn from_ratio(space: &ParamSpace, n: i64, d: i64) -> Self {
        Self::from_rational(space, &BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_rational(space: &ParamSpace, q: &BigRational) -> Self {
        let nv = space.len();
        Scalar { space: space.clone(), num: Poly::constant(nv, q.numer().clone()), den: Poly::constant(nv, q.denom().clone()) }
    }

    pub fn param(space: &ParamSpace, name: &str) -> Result<Self, ScalarError> {
        let i = space.index_of(name).ok_or_else(|| ScalarError::UnknownParameter(name.to_string()))?;
        Ok(Scalar { space: space.clone(), num: Poly::var(space.len(), i), den: Poly::one(space.len()) })
    }

    /// Reduces `num/den` to canonical form.
    pub fn canonicalize(space: &ParamSpace, num: Poly, den: Poly) -> Result<Self, ScalarError> {
        assert_eq!(num.nvars(), space.len());
        assert_eq!(den.nvars(), space.len());
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero(space));
        }
        let (num, den) = reduce(num, den);
        Ok(Scalar { space: space.clone(), num, den })
    }

    pub fn space(&self) -> &ParamSpace {
        &self.space
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// Rational value if the scalar does not depend on any parameter.
    pub fn as_rational(&self) -> Option<BigRational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(BigRational::new(n, d))
    }

    /// Number of stored monomials; used as a structural size measure.
    pub fn complexity(&self) -> usize {
        self.num.len() + self.den.len()
    }

    /// True when the leading numerator coefficient is negative.
    pub fn is_negative_leading(&self) -> bool {
        self.num.leading_coeff().is_some_and(|c| c.is_negative())
    }

    fn check(&self, other: &Scalar) -> Result<(), ScalarError> {
        if self.space.same(&other.space) {
            Ok(())
        } else {
            Err(ScalarError::SpaceMismatch(
                format!("{:?}", self.space.names()),
                format!("{:?}", other.space.names()),
            ))
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check(other)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.den == other.den {
            let num = self.num.add(&other.num);
            return Scalar::canonicalize(&self.space, num, self.den.clone());
        }
        let g = self.den.gcd(&other.den);
        let da = self.den.div_exact(&g).expect("gcd divides");
        let db = other.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul(&db).add(&other.num.mul(&da));
        let den = self.den.mul(&db);
        Scalar::canonicalize(&self.space, num, den)
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Scalar::zero(&self.space));
        }
        if self.is_one() {
            return Ok(other.clone());
        }
        if other.is_one() {
            return Ok(self.clone());
        }
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = other.den.div_exact(&g1).expect("gcd divides");
        let n2 = other.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        let num = n1.mul(&n2);
        let den = d1.mul(&d2);
        Ok(sign_normalized(&self.space, num, den))
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(sign_normalized(&self.space, self.den.clone(), self.num.clone()))
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check(other)?;
        self.try_mul(&other.inv()?)
    }

    pub fn neg_ref(&self) -> Scalar {
        Scalar { space: self.space.clone(), num: self.num.neg(), den: self.den.clone() }
    }

    pub fn pow(&self, n: u32) -> Scalar {
        Scalar { space: self.space.clone(), num: self.num.pow(n), den: self.den.pow(n) }
    }

    pub fn mul_int(&self, n: i64) -> Scalar {
        self * &Scalar::from_int(&self.space, n)
    }

    /// Moves the scalar into another space by variable name. Fails if a
    /// parameter the scalar depends on is missing from `target`.
    pub fn to_space(&self, target: &ParamSpace) -> Result<Scalar, ScalarError> {
        if self.space.same(target) {
            return Ok(self.clone());
        }
        let map: Vec<Option<usize>> = target.names().iter().map(|n| self.space.index_of(n)).collect();
        let missing = || {
            let name = self
                .space
                .names()
                .iter()
                .find(|n| target.index_of(n).is_none())
                .cloned()
                .unwrap_or_default();
            ScalarError::UnknownParameter(name)
        };
        let num = self.num.remap(target.len(), &map).ok_or_else(missing)?;
        let den = self.den.remap(target.len(), &map).ok_or_else(missing)?;
        Scalar::canonicalize(target, num, den)
    }

    /// Substitutes a rational value for the named parameter; the result stays
    /// in the same space.
    pub fn substitute(&self, name: &str, value: &BigRational) -> Result<Scalar, ScalarError> {
        let i = self.space.index_of(name).ok_or_else(|| ScalarError::UnknownParameter(name.to_string()))?;
        let (vn, vd) = (value.numer(), value.denom());
        // homogenize: p(n/d) * d^deg
        let hom = |p: &Poly, deg: u32| -> Poly {
            let terms = p
                .terms()
                .iter()
                .map(|(e, c)| {
                    let k = e[i];
                    let mut e2 = e.clone();
                    e2[i] = 0;
                    let f = num_traits::pow(vn.clone(), k as usize) * num_traits::pow(vd.clone(), (deg - k) as usize);
                    (e2, c * f)
                })
                .collect();
            Poly::from_terms(p.nvars(), terms)
        };
        let dn = self.num.degree_in(i);
        let dd = self.den.degree_in(i);
        let mut num = hom(&self.num, dn);
        let mut den = hom(&self.den, dd);
        if dn > dd {
            den = den.scale(&num_traits::pow(vd.clone(), (dn - dd) as usize));
        } else if dd > dn {
            num = num.scale(&num_traits::pow(vd.clone(), (dd - dn) as usize));
        }
        Scalar::canonicalize(&self.space, num, den)
    }

    /// Parses the textual form (`p/q`, parameters, `+ - * / ^`, parentheses).
    pub fn parse(text: &str, space: &ParamSpace) -> Result<Scalar, ScalarError> {
        crate::frontend::expr::parse_scalar(text, space).map_err(ScalarError::Parse)
    }
}

fn reduce(num: Poly, den: Poly) -> (Poly, Poly) {
    if den.is_one() {
        return (num, den);
    }
    let g = num.gcd(&den);
    let (num, den) = if g.is_one() {
        (num, den)
    } else {
        (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
    };
    normalize_pair(num, den)
}

fn normalize_pair(num: Poly, den: Poly) -> (Poly, Poly) {
    if den.leading_coeff().is_some_and(|c| c.is_negative()) {
        (num.neg(), den.neg())
    } else {
        (num, den)
    }
}

fn sign_normalized(space: &ParamSpace, num: Poly, den: Poly) -> Scalar {
    let (num, den) = normalize_pair(num, den);
    Scalar { space: space.clone(), num, den }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.space.same(&other.space) && self.num == other.num && self.den == other.den
    }
}
impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

fn den_needs_parens(den: &Poly) -> bool {
    if den.is_constant() {
        return false;
    }
    if den.len() > 1 {
        return true;
    }
    let (e, c) = &den.terms()[0];
    !(c.is_one() && e.iter().filter(|&&x| x > 0).count() == 1)
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.space.names();
        if self.den.is_one() {
            return self.num.fmt_with(names, f);
        }
        if self.num.len() > 1 {
            f.write_str("(")?;
            self.num.fmt_with(names, f)?;
            f.write_str(")")?;
        } else {
            self.num.fmt_with(names, f)?;
        }
        f.write_str("/")?;
        if den_needs_parens(&self.den) {
            f.write_str("(")?;
            self.den.fmt_with(names, f)?;
            f.write_str(")")
        } else {
            self.den.fmt_with(names, f)
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                self.$try(rhs).unwrap_or_else(|e| panic!("scalar {}: {e}", stringify!($m)))
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);
binop!(Div, div, try_div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

/// Binomial coefficient as a big integer.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, i| a * BigInt::from(i))
}

/// `num / den` as a rational, reduced.
pub fn ratio(num: BigInt, den: BigInt) -> BigRational {
    let g = num.gcd(&den);
    BigRational::new(num / &g, den / g)
}
