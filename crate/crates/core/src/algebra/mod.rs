//! Exact rational and bivariate polynomial arithmetic in the indeterminates `u` and `t`.
//!
//! Every stationary entry, transition rate and closed form in this crate is a
//! [`BivarPoly`]: a sparse map from exponent pairs to nonzero [`Rational`]
//! coefficients. Terms are ordered lexicographically with `u > t`, which fixes
//! both the printed form and the sign convention used by the gcd.

mod gcd;
mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use gcd::{content_gcd, gcd};

/// Arbitrary-precision rational; always stored in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Builds the rational `num/den`. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Exponent pair `u^u t^t`. The derived order is lexicographic with `u` first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    pub u: u32,
    pub t: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { u: 0, t: 0 };

    pub fn new(u: u32, t: u32) -> Self {
        Monomial { u, t }
    }

    pub fn degree(self) -> u32 {
        self.u + self.t
    }

    pub fn divides(self, other: Monomial) -> bool {
        self.u <= other.u && self.t <= other.t
    }
}

impl Mul for Monomial {
    type Output = Monomial;
    fn mul(self, rhs: Monomial) -> Monomial {
        Monomial::new(self.u + rhs.u, self.t + rhs.t)
    }
}

/// Sparse polynomial in `u` and `t` with rational coefficients.
///
/// No stored coefficient is ever zero, so structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BivarPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl BivarPoly {
    pub fn zero() -> Self {
        BivarPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn u() -> Self {
        Self::monomial(Rational::one(), 1, 0)
    }

    pub fn t() -> Self {
        Self::monomial(Rational::one(), 0, 1)
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(Rational::from_integer(BigInt::from(c)))
    }

    pub fn monomial(c: Rational, eu: u32, et: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::new(eu, et), c);
        }
        BivarPoly { terms }
    }

    /// Builds a polynomial from `(coefficient, e_u, e_t)` triples, merging repeats.
    pub fn from_terms<I>(iter: I) -> Self
    where
        I: IntoIterator<Item = (Rational, u32, u32)>,
    {
        let mut p = BivarPoly::zero();
        for (c, eu, et) in iter {
            p.add_term(Monomial::new(eu, et), c);
        }
        p
    }

    /// `u^k`.
    pub fn u_pow(k: u32) -> Self {
        Self::monomial(Rational::one(), k, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Monomial::ONE).is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| *m == Monomial::ONE)
    }

    /// The single term of a monomial polynomial, if it is one.
    pub fn as_monomial(&self) -> Option<(&Rational, Monomial)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(m, c)| (c, *m))
        } else {
            None
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical (lexicographically descending) order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (Monomial, &Rational)> + '_ {
        self.terms.iter().rev().map(|(m, c)| (*m, c))
    }

    pub fn coeff(&self, m: Monomial) -> Rational {
        self.terms.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Lexicographically greatest term.
    pub fn leading_term(&self) -> Option<(Monomial, &Rational)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, c))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_u(&self) -> u32 {
        self.terms.keys().map(|m| m.u).max().unwrap_or(0)
    }

    pub fn degree_t(&self) -> u32 {
        self.terms.keys().map(|m| m.t).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> BivarPoly {
        if c.is_zero() {
            return BivarPoly::zero();
        }
        BivarPoly {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> BivarPoly {
        self.scale(&Rational::from_integer(BigInt::from(c)))
    }

    fn mul_term(&self, m: Monomial, c: &Rational) -> BivarPoly {
        BivarPoly {
            terms: self.terms.iter().map(|(k, v)| (*k * m, v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> BivarPoly {
        let mut acc = BivarPoly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Exact value at `(u0, t0)`.
    pub fn eval(&self, u0: &Rational, t0: &Rational) -> Rational {
        if self.is_zero() {
            return Rational::zero();
        }
        // Sum over the common denominator lcm(c) * den(u0)^du * den(t0)^dt in integers.
        let coeff_den = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let (du, dt) = (self.degree_u(), self.degree_t());
        let u_table = homogenized_powers(u0, du);
        let t_table = homogenized_powers(t0, dt);
        let mut num = BigInt::zero();
        for (m, c) in &self.terms {
            let scaled = c.numer() * (&coeff_den / c.denom());
            num += scaled * &u_table[m.u as usize] * &t_table[m.t as usize];
        }
        let den = coeff_den * &den_power(u0, du) * &den_power(t0, dt);
        Rational::new(num, den)
    }

    /// Exact quotient `self / divisor`; fails with [`Error::NotDivisible`] on a nonzero remainder.
    pub fn exact_div(&self, divisor: &BivarPoly) -> Result<BivarPoly> {
        let (lm, lc) = divisor.leading_term().ok_or(Error::NotDivisible)?;
        let lc = lc.clone();
        let mut rem = self.clone();
        let mut quot = BivarPoly::zero();
        while let Some((m, c)) = rem.leading_term() {
            if !lm.divides(m) {
                return Err(Error::NotDivisible);
            }
            let qm = Monomial::new(m.u - lm.u, m.t - lm.t);
            let qc = c / &lc;
            rem -= &divisor.mul_term(qm, &qc);
            quot.add_term(qm, qc);
        }
        Ok(quot)
    }

    /// Coefficient of `t^k`, as a polynomial in `u` alone.
    pub(crate) fn coeff_t(&self, k: u32) -> BivarPoly {
        BivarPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.t == k)
                .map(|(m, c)| (Monomial::new(m.u, 0), c.clone()))
                .collect(),
        }
    }

    pub(crate) fn mul_t_pow(&self, k: u32) -> BivarPoly {
        self.mul_term(Monomial::new(0, k), &Rational::one())
    }

    /// Splits off a rational factor so that the remaining polynomial has integer
    /// coefficients with content 1 and a positive leading coefficient.
    pub fn integer_primitive(&self) -> (Rational, BivarPoly) {
        if self.is_zero() {
            return (Rational::one(), BivarPoly::zero());
        }
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            let scaled = c.numer() * (&den_lcm / c.denom());
            num_gcd = num_gcd.gcd(&scaled);
        }
        let mut factor = Rational::new(num_gcd, den_lcm);
        if self.leading_term().is_some_and(|(_, c)| c.is_negative()) {
            factor = -factor;
        }
        let inv = factor.recip();
        (factor, self.scale(&inv))
    }

    /// True when every coefficient is an integer.
    pub fn has_integer_coeffs(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// True when every coefficient is nonnegative.
    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }
}

/// `numer(x)^i * denom(x)^(d-i)` for `i = 0..=d`.
fn homogenized_powers(x: &Rational, d: u32) -> Vec<BigInt> {
    let d = d as usize;
    let mut num_pows = vec![BigInt::one(); d + 1];
    let mut den_pows = vec![BigInt::one(); d + 1];
    for i in 1..=d {
        num_pows[i] = &num_pows[i - 1] * x.numer();
        den_pows[i] = &den_pows[i - 1] * x.denom();
    }
    (0..=d).map(|i| &num_pows[i] * &den_pows[d - i]).collect()
}

fn den_power(x: &Rational, d: u32) -> BigInt {
    num_traits::pow(x.denom().clone(), d as usize)
}

impl fmt::Display for BivarPoly {
    /// Renders as `u^2 + 3*u*t + 4*u`: canonical order, explicit `*`, `^` for powers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m == Monomial::ONE {
                factors.push(abs.to_string());
            }
            for (name, e) in [("u", m.u), ("t", m.t)] {
                match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BivarPoly({self})")
    }
}

impl std::str::FromStr for BivarPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse::parse_poly(s)
    }
}

impl From<i64> for BivarPoly {
    fn from(c: i64) -> Self {
        BivarPoly::from_int(c)
    }
}

impl From<Rational> for BivarPoly {
    fn from(c: Rational) -> Self {
        BivarPoly::constant(c)
    }
}

impl<'a> AddAssign<&'a BivarPoly> for BivarPoly {
    fn add_assign(&mut self, rhs: &'a BivarPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl AddAssign for BivarPoly {
    fn add_assign(&mut self, rhs: BivarPoly) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl<'a> SubAssign<&'a BivarPoly> for BivarPoly {
    fn sub_assign(&mut self, rhs: &'a BivarPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, -c.clone());
        }
    }
}

impl SubAssign for BivarPoly {
    fn sub_assign(&mut self, rhs: BivarPoly) {
        *self -= &rhs;
    }
}

impl<'a> MulAssign<&'a BivarPoly> for BivarPoly {
    fn mul_assign(&mut self, rhs: &'a BivarPoly) {
        *self = &*self * rhs;
    }
}

impl<'b> Add<&'b BivarPoly> for &BivarPoly {
    type Output = BivarPoly;
    fn add(self, rhs: &'b BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'b> Sub<&'b BivarPoly> for &BivarPoly {
    type Output = BivarPoly;
    fn sub(self, rhs: &'b BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'b> Mul<&'b BivarPoly> for &BivarPoly {
    type Output = BivarPoly;
    fn mul(self, rhs: &'b BivarPoly) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(*ma * *mb, ca * cb);
            }
        }
        out
    }
}

impl Neg for &BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        BivarPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Neg for BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<BivarPoly> for BivarPoly {
            type Output = BivarPoly;
            fn $method(self, rhs: BivarPoly) -> BivarPoly {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a BivarPoly> for BivarPoly {
            type Output = BivarPoly;
            fn $method(self, rhs: &'a BivarPoly) -> BivarPoly {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<BivarPoly> for &'a BivarPoly {
            type Output = BivarPoly;
            fn $method(self, rhs: BivarPoly) -> BivarPoly {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl std::iter::Sum for BivarPoly {
    fn sum<I: Iterator<Item = BivarPoly>>(iter: I) -> Self {
        let mut acc = BivarPoly::zero();
        for p in iter {
            acc += p;
        }
        acc
    }
}

impl<'a> std::iter::Sum<&'a BivarPoly> for BivarPoly {
    fn sum<I: Iterator<Item = &'a BivarPoly>>(iter: I) -> Self {
        let mut acc = BivarPoly::zero();
        for p in iter {
            acc += p;
        }
        acc
    }
}
