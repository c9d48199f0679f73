//! Exact multivariate polynomials over the variables `(t, x_1, .., x_n, u)`.
//!
//! Coefficients are arbitrary-precision rationals, so every identity between
//! generator fields (brackets, coefficient comparisons) is checked with `==`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Builds `num/den` as an exact rational.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"` or `"p"` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("not a rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite float (every finite f64 is a dyadic rational).
pub fn rational_from_f64(v: f64) -> Result<Rational> {
    Rational::from_float(v).ok_or_else(|| Error::InvalidParameter(format!("non-finite value {v}")))
}

/// A variable of the jet space `(t, x, u)`. Spatial axes are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    T,
    X(usize),
    U,
}

impl Var {
    /// Position in an exponent vector of arity `n + 2`.
    pub fn index(self, n: usize) -> Result<usize> {
        match self {
            Var::T => Ok(0),
            Var::X(i) if (1..=n).contains(&i) => Ok(i),
            Var::X(i) => Err(Error::InvalidVariable(i)),
            Var::U => Ok(n + 1),
        }
    }
}

/// Sparse polynomial: exponent vector over `(t, x_1..x_n, u)` -> nonzero coefficient.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    n: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MultiPoly {
    pub fn zero(n: usize) -> Self {
        MultiPoly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        let mut p = Self::zero(n);
        p.insert(vec![0; n + 2], c);
        p
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Rational::one())
    }

    pub fn var(n: usize, v: Var) -> Result<Self> {
        let idx = v.index(n)?;
        let mut e = vec![0; n + 2];
        e[idx] = 1;
        let mut p = Self::zero(n);
        p.insert(e, Rational::one());
        Ok(p)
    }

    /// `t`, panics never.
    pub fn t(n: usize) -> Self {
        Self::var(n, Var::T).unwrap()
    }

    /// `u`.
    pub fn u(n: usize) -> Self {
        Self::var(n, Var::U).unwrap()
    }

    /// `x_i`, 1-based; panics on an out-of-range axis.
    pub fn x(n: usize, i: usize) -> Self {
        Self::var(n, Var::X(i)).expect("spatial axis out of range")
    }

    /// Single monomial `c * t^e0 x_1^e1 .. u^e(n+1)`.
    pub fn monomial(n: usize, exponents: Vec<u32>, c: Rational) -> Result<Self> {
        if exponents.len() != n + 2 {
            return Err(Error::ArityMismatch { expected: n + 2, found: exponents.len() });
        }
        let mut p = Self::zero(n);
        p.insert(exponents, c);
        Ok(p)
    }

    fn insert(&mut self, e: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    /// Spatial dimension n (arity is n + 2).
    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Coefficient of the exponent vector `e` (zero when absent).
    pub fn coeff(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ArityMismatch { expected: self.n + 2, found: other.n + 2 });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = Self::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.n);
        if c.is_zero() {
            return out;
        }
        for (e, v) in &self.terms {
            out.terms.insert(e.clone(), v * c);
        }
        out
    }

    /// Exact partial derivative.
    pub fn diff(&self, v: Var) -> Result<Self> {
        let idx = v.index(self.n)?;
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            if e[idx] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            let k = e2[idx];
            e2[idx] -= 1;
            out.insert(e2, c * Rational::from_integer(BigInt::from(k)));
        }
        Ok(out)
    }

    /// Partial derivative by raw exponent position (0 = t, 1..n = x, n+1 = u).
    pub fn diff_index(&self, idx: usize) -> Result<Self> {
        let v = match idx {
            0 => Var::T,
            i if i <= self.n => Var::X(i),
            i if i == self.n + 1 => Var::U,
            i => return Err(Error::InvalidVariable(i)),
        };
        self.diff(v)
    }

    /// Spatial Laplacian `sum_i d^2/dx_i^2`.
    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.n);
        for i in 1..=self.n {
            let d2 = self.diff(Var::X(i)).and_then(|p| p.diff(Var::X(i))).unwrap();
            out = &out + &d2;
        }
        out
    }

    /// Exact evaluation at a rational point of arity n + 2.
    pub fn eval_rational(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.n + 2 {
            return Err(Error::ArityMismatch { expected: self.n + 2, found: point.len() });
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (base, &k) in point.iter().zip(e) {
                if k > 0 {
                    term *= num_traits::pow(base.clone(), k as usize);
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Floating evaluation at a point of arity n + 2.
    pub fn eval_f64(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.n + 2 {
            return Err(Error::ArityMismatch { expected: self.n + 2, found: point.len() });
        }
        Ok(self.eval_f64_unchecked(point))
    }

    pub(crate) fn eval_f64_unchecked(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut term = rational_to_f64(c);
                for (base, &k) in point.iter().zip(e) {
                    if k > 0 {
                        term *= base.powi(k as i32);
                    }
                }
                term
            })
            .sum()
    }

    /// Evaluates at `(t, x, u)`.
    pub fn eval_txu(&self, t: f64, x: &[f64], u: f64) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, found: x.len() });
        }
        let mut pt = Vec::with_capacity(self.n + 2);
        pt.push(t);
        pt.extend_from_slice(x);
        pt.push(u);
        Ok(self.eval_f64_unchecked(&pt))
    }

    /// True when the polynomial does not involve `t` or `u`.
    pub fn is_spatial(&self) -> bool {
        self.terms.keys().all(|e| e[0] == 0 && e[self.n + 1] == 0)
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let n = self.n;
        let name = |i: usize| -> String {
            if i == 0 {
                "t".into()
            } else if i == n + 1 {
                "u".into()
            } else {
                format!("x{i}")
            }
        };
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if k > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            let mag = c.abs();
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| if p == 1 { name(i) } else { format!("{}^{p}", name(i)) })
                .collect();
            if vars.is_empty() || !mag.is_one() {
                write!(f, "{mag}")?;
                if !vars.is_empty() {
                    write!(f, "*")?;
                }
            }
            write!(f, "{}", vars.join("*"))?;
        }
        Ok(())
    }
}

// Operator sugar; these panic on arity mismatch like nalgebra's dimension checks.
// Use the `try_*` forms where the arity is not known statically.

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_add(rhs).expect("polynomial arity mismatch")
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_sub(rhs).expect("polynomial arity mismatch")
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_mul(rhs).expect("polynomial arity mismatch")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rational::one())
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: MultiPoly) -> MultiPoly {
        &self + &rhs
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        &self - &rhs
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}
