use nalgebra::{DMatrix, DVector, Matrix2};
use num_traits::{One, Zero};

use super::{CharacterParams, Field};
use crate::decomp::{bruhat_factor, rotation_to};
use crate::error::{Error, Result};
use crate::exact_poly::{rational_to_f64, MultiPoly, Rational};
use crate::matgroup::{make_m, GroupElement};

const BOUNDARY_TOL: f64 = 1e-12;

/// A function on G with `phi(g q^-) = chi(q^-)^{-1} phi(g)`.
pub trait InducedSection {
    fn n(&self) -> usize;
    fn params(&self) -> CharacterParams;
    fn eval_g(&self, g: &GroupElement) -> Result<f64>;
    fn in_domain(&self, g: &GroupElement) -> bool {
        self.eval_g(g).is_ok()
    }
}

/// Section determined by a field on N; defined on the big cell only.
#[derive(Debug, Clone)]
pub struct FieldSection {
    pub field: Field,
}

impl InducedSection for FieldSection {
    fn n(&self) -> usize {
        self.field.n()
    }

    fn params(&self) -> CharacterParams {
        *self.field.params()
    }

    fn eval_g(&self, g: &GroupElement) -> Result<f64> {
        let f = bruhat_factor(g)?;
        let c = self.field.params().value(f.params.j, f.params.a, f.params.y);
        Ok(self.field.eval(f.params.t, &f.params.x)? / c)
    }
}

fn check_m(m: &Rational) -> Result<()> {
    if m.is_zero() || m.is_one() {
        return Err(Error::InvalidParameter(format!("m must avoid 0 and 1, got {m}")));
    }
    Ok(())
}

fn positive_pow(base: f64, e: f64, what: &str) -> Result<f64> {
    if !(base > 0.0) || !base.is_finite() {
        return Err(Error::DomainViolation(format!("{what} base {base:e} is not positive")));
    }
    Ok(base.powf(e))
}

fn sl2_prefactor(g: &GroupElement, p: u8, r: f64) -> Result<f64> {
    let d = g.sl2()[(1, 1)];
    if d == 0.0 {
        return Err(Error::OutsideDomain("SL(2) entry d vanishes".into()));
    }
    let sign = if p == 1 && d < 0.0 { -1.0 } else { 1.0 };
    Ok(sign * d.abs().powf(r))
}

struct Exponents {
    r: f64,
    inv_m: f64,
    outer: f64,
}

fn exponents(m: &Rational) -> Exponents {
    let one = Rational::one();
    let two = Rational::from_integer(2.into());
    Exponents {
        r: rational_to_f64(&(&two / (m - &one))),
        inv_m: rational_to_f64(&(&one / m)),
        outer: rational_to_f64(&(&two / (&one - m))),
    }
}

/// Closed-form extension of the stationary solution `x^{1/m}` (n = 1) to G.
pub fn stationary_phi_1d(g: &GroupElement, p: u8, m: &Rational) -> Result<f64> {
    if g.n() != 1 {
        return Err(Error::ArityMismatch { expected: 1, found: g.n() });
    }
    check_m(m)?;
    let e = exponents(m);
    let l = g.lorentz();
    let a = |i: usize, j: usize| l[(i - 1, j - 1)];
    let scale = l.abs().max();
    let tol = BOUNDARY_TOL * scale;
    let (b1, b2) = if (1.0 + a(1, 1)).abs() > tol {
        let den = a(1, 2) - a(1, 3);
        if den.abs() <= tol {
            return Err(Error::OutsideDomain("a12 = a13".into()));
        }
        let s = a(2, 1) + a(3, 1);
        (s / (1.0 + a(1, 1)), -2.0 * s / ((1.0 + a(1, 1)) * den))
    } else if (a(2, 1) + a(3, 1)).abs() <= tol && a(3, 1) != 0.0 && a(1, 3) != 0.0 {
        (-1.0 / a(3, 1), -1.0 / (a(3, 1) * a(1, 3)))
    } else {
        return Err(Error::OutsideDomain("a11 = -1 without a21 = -a31".into()));
    };
    Ok(sl2_prefactor(g, p, e.r)? * positive_pow(b1, e.inv_m, "first")? * positive_pow(b2, e.outer, "second")?)
}

/// The two fractional-power bases of the generic 1D formula, in exact arithmetic.
/// `l` is the 3x3 Lorentz factor, row-major.
pub fn stationary_1d_bases_exact(l: &[[Rational; 3]; 3]) -> Result<(Rational, Rational)> {
    let a = |i: usize, j: usize| &l[i - 1][j - 1];
    let one = Rational::one();
    let c = &one + a(1, 1);
    let den = a(1, 2) - a(1, 3);
    if c.is_zero() || den.is_zero() {
        return Err(Error::OutsideDomain("generic formula undefined".into()));
    }
    let s = a(2, 1) + a(3, 1);
    let b1 = &s / &c;
    let b2 = -(Rational::from_integer(2.into()) * &s) / (&c * &den);
    Ok((b1, b2))
}

/// Closed-form extension of `k(x)^{1/m}` (n = 2, k harmonic) to G.
pub fn stationary_phi_2d(k: &MultiPoly, g: &GroupElement, p: u8, m: &Rational) -> Result<f64> {
    if g.n() != 2 || k.nvars() != 2 {
        return Err(Error::ArityMismatch { expected: 2, found: if g.n() != 2 { g.n() } else { k.nvars() } });
    }
    check_m(m)?;
    if !k.is_spatial() || !k.laplacian().is_zero() {
        return Err(Error::NotHarmonic);
    }
    let e = exponents(m);
    let l = g.lorentz();
    let a = |i: usize, j: usize| l[(i - 1, j - 1)];
    let alpha = a(1, 1) + a(2, 2);
    let beta = a(1, 2) - a(2, 1);
    let den = alpha * alpha + beta * beta;
    if den <= BOUNDARY_TOL * l.abs().max().powi(2) {
        return Err(Error::OutsideDomain("a12 = a21 and a11 = -a22".into()));
    }
    let v1 = a(3, 1) + a(4, 1);
    let v2 = a(3, 2) + a(4, 2);
    let z1 = (alpha * v1 + beta * v2) / den;
    let z2 = (alpha * v2 - beta * v1) / den;
    let q = z1 * z1 + z2 * z2;
    let last = a(4, 4) * (1.0 + q) - a(3, 4) * (q - 1.0) - 2.0 * (a(1, 4) * z1 + a(2, 4) * z2);
    let kz = k.eval_txu(0.0, &[z1, z2], 0.0)?;
    Ok(sl2_prefactor(g, p, e.r)? * positive_pow(kz, e.inv_m, "harmonic")? * positive_pow(last, e.outer, "second")?)
}

#[derive(Debug, Clone)]
pub struct StationarySection1d {
    pub p: u8,
    pub m: Rational,
}

impl InducedSection for StationarySection1d {
    fn n(&self) -> usize {
        1
    }

    fn params(&self) -> CharacterParams {
        CharacterParams::symmetric(self.p, &self.m).expect("m validated at evaluation")
    }

    fn eval_g(&self, g: &GroupElement) -> Result<f64> {
        stationary_phi_1d(g, self.p, &self.m)
    }
}

#[derive(Debug, Clone)]
pub struct StationarySection2d {
    pub k: MultiPoly,
    pub p: u8,
    pub m: Rational,
}

impl InducedSection for StationarySection2d {
    fn n(&self) -> usize {
        2
    }

    fn params(&self) -> CharacterParams {
        CharacterParams::symmetric(self.p, &self.m).expect("m validated at evaluation")
    }

    fn eval_g(&self, g: &GroupElement) -> Result<f64> {
        stationary_phi_2d(&self.k, g, self.p, &self.m)
    }
}

/// A point `(theta, z)` of `S^1 x S^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactPoint {
    theta: f64,
    z: Vec<f64>,
}

impl CompactPoint {
    pub fn new(theta: f64, z: Vec<f64>) -> Result<Self> {
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if z.len() < 2 || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("z must be a unit vector in R^(n+1), |z| = {norm}")));
        }
        Ok(CompactPoint { theta, z })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn n(&self) -> usize {
        self.z.len() - 1
    }

    pub fn shifted(&self, dtheta: f64) -> Self {
        CompactPoint { theta: self.theta + dtheta, z: self.z.clone() }
    }
}

/// An element of K over `pt`: SO(2) rotation by theta and a rotation taking `e_{n+1}` to `z`.
pub fn compact_lift(pt: &CompactPoint) -> GroupElement {
    let n = pt.n();
    let (c, s) = (pt.theta.cos(), pt.theta.sin());
    let mut l = DMatrix::identity(n + 2, n + 2);
    l.view_mut((0, 0), (n + 1, n + 1)).copy_from(&rotation_to(&DVector::from_column_slice(&pt.z)));
    GroupElement::from_parts_unchecked(Matrix2::new(c, -s, s, c), l)
}

/// The lift multiplied on the right by `m_{0,B}`, another element of K over `pt`.
pub fn compact_lift_with(pt: &CompactPoint, b: &DMatrix<f64>) -> Result<GroupElement> {
    compact_lift(pt).mul(&make_m(0, b)?)
}

/// Value of the section on the K-lift of `pt`.
pub fn compact_restrict(phi: &dyn InducedSection, pt: &CompactPoint) -> Result<f64> {
    if pt.n() != phi.n() {
        return Err(Error::ArityMismatch { expected: phi.n(), found: pt.n() });
    }
    phi.eval_g(&compact_lift(pt))
}
