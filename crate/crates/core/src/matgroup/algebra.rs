use std::fmt;

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use super::{lorentz_form, GroupElement, PRODUCT_TOL};
use crate::error::{Error, Result};

const ANTISYM_TOL: f64 = 1e-12;

/// Catalogue of basis elements of sl(2) + so(n+1,1). Spatial indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BasisKey {
    /// diag(1, -1)
    SlH,
    /// upper nilpotent
    SlE,
    /// lower nilpotent
    SlF,
    /// H_{0,1} = -E_{n+1,n+2} - E_{n+2,n+1}
    Cartan,
    NuPlus(usize),
    NuMinus(usize),
    /// E_{i,j} - E_{j,i}, i < j
    Rot(usize, usize),
}

impl fmt::Display for BasisKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisKey::SlH => write!(f, "H"),
            BasisKey::SlE => write!(f, "E"),
            BasisKey::SlF => write!(f, "F"),
            BasisKey::Cartan => write!(f, "H01"),
            BasisKey::NuPlus(i) => write!(f, "nu+{i}"),
            BasisKey::NuMinus(i) => write!(f, "nu-{i}"),
            BasisKey::Rot(i, j) => write!(f, "R{i},{j}"),
        }
    }
}

impl std::str::FromStr for BasisKey {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidKey(s.to_string());
        let idx = |r: &str| r.trim().parse::<usize>().map_err(|_| bad());
        Ok(match s.trim() {
            "H" => BasisKey::SlH,
            "E" => BasisKey::SlE,
            "F" => BasisKey::SlF,
            "H01" => BasisKey::Cartan,
            k if k.starts_with("nu+") => BasisKey::NuPlus(idx(&k[3..])?),
            k if k.starts_with("nu-") => BasisKey::NuMinus(idx(&k[3..])?),
            k if k.starts_with('R') => {
                let (a, b) = k[1..].split_once(',').ok_or_else(bad)?;
                BasisKey::Rot(idx(a)?, idx(b)?)
            }
            _ => return Err(bad()),
        })
    }
}

impl BasisKey {
    pub fn validate(&self, n: usize) -> Result<()> {
        let ok = match *self {
            BasisKey::NuPlus(i) | BasisKey::NuMinus(i) => (1..=n).contains(&i),
            BasisKey::Rot(i, j) => 1 <= i && i < j && j <= n,
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidKey(format!("{self} for n = {n}")))
        }
    }

    /// Full basis of sl(2) + so(n+1,1).
    pub fn full(n: usize) -> Vec<BasisKey> {
        let mut v = vec![BasisKey::SlH, BasisKey::SlE, BasisKey::SlF, BasisKey::Cartan];
        v.extend((1..=n).map(BasisKey::NuPlus));
        v.extend((1..=n).map(BasisKey::NuMinus));
        v.extend(rotation_keys(n));
        v
    }

    /// Basis of the part realized by point symmetries for every m:
    /// upper-triangular sl(2), the Cartan element, nu+ and rotations.
    pub fn parabolic(n: usize) -> Vec<BasisKey> {
        let mut v = vec![BasisKey::SlE, BasisKey::SlH, BasisKey::Cartan];
        v.extend((1..=n).map(BasisKey::NuPlus));
        v.extend(rotation_keys(n));
        v
    }
}

fn rotation_keys(n: usize) -> impl Iterator<Item = BasisKey> {
    (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| BasisKey::Rot(i, j)))
}

/// `(sl2, lorentz)` pair in the Lie algebra of G.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    sl2: Matrix2<f64>,
    lorentz: DMatrix<f64>,
}

fn unit(k: usize, r: usize, c: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(k, k);
    m[(r, c)] = 1.0;
    m
}

impl AlgebraElement {
    pub fn zero(n: usize) -> Self {
        AlgebraElement { sl2: Matrix2::zeros(), lorentz: DMatrix::zeros(n + 2, n + 2) }
    }

    /// Validates tracelessness and `X^T J + J X = 0`.
    pub fn from_parts(sl2: Matrix2<f64>, lorentz: DMatrix<f64>) -> Result<Self> {
        let k = lorentz.nrows();
        if k < 3 || lorentz.ncols() != k {
            return Err(Error::InvalidParameter("Lorentz part must be (n+2)x(n+2), n >= 1".into()));
        }
        let scale = 1.0 + sl2.abs().max() + lorentz.abs().max();
        let tr = sl2.trace().abs();
        if tr > ANTISYM_TOL * scale {
            return Err(Error::InvalidParameter(format!("sl(2) part has trace {tr:e}")));
        }
        let j = lorentz_form(k - 2);
        let dev = (lorentz.transpose() * &j + &j * &lorentz).abs().max();
        if dev > ANTISYM_TOL * scale {
            return Err(Error::InvalidParameter(format!("Lorentz part is not J-antisymmetric ({dev:e})")));
        }
        Ok(AlgebraElement { sl2, lorentz })
    }

    pub fn n(&self) -> usize {
        self.lorentz.nrows() - 2
    }

    pub fn sl2(&self) -> &Matrix2<f64> {
        &self.sl2
    }

    pub fn lorentz(&self) -> &DMatrix<f64> {
        &self.lorentz
    }

    /// Catalogued basis element.
    pub fn basis(n: usize, key: BasisKey) -> Result<Self> {
        key.validate(n)?;
        let k = n + 2;
        let mut x = AlgebraElement::zero(n);
        // 0-based light-cone indices
        let (p, q) = (n, n + 1);
        match key {
            BasisKey::SlH => x.sl2 = Matrix2::new(1.0, 0.0, 0.0, -1.0),
            BasisKey::SlE => x.sl2 = Matrix2::new(0.0, 1.0, 0.0, 0.0),
            BasisKey::SlF => x.sl2 = Matrix2::new(0.0, 0.0, 1.0, 0.0),
            BasisKey::Cartan => x.lorentz = -(unit(k, p, q) + unit(k, q, p)),
            BasisKey::NuPlus(i) | BasisKey::NuMinus(i) => {
                let sign = if matches!(key, BasisKey::NuPlus(_)) { 1.0 } else { -1.0 };
                let i = i - 1;
                x.lorentz = unit(k, p, i) - unit(k, i, p) + (unit(k, q, i) + unit(k, i, q)) * sign;
            }
            BasisKey::Rot(i, j) => x.lorentz = unit(k, i - 1, j - 1) - unit(k, j - 1, i - 1),
        }
        Ok(x)
    }

    /// `H_{v,y}`: diag(v, -v) and `-y (E_{n+1,n+2} + E_{n+2,n+1})`.
    pub fn h(v: f64, y: f64, n: usize) -> Self {
        let k = n + 2;
        AlgebraElement {
            sl2: Matrix2::new(v, 0.0, 0.0, -v),
            lorentz: -(unit(k, n, n + 1) + unit(k, n + 1, n)) * y,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_n(other)?;
        Ok(AlgebraElement { sl2: self.sl2 + other.sl2, lorentz: &self.lorentz + &other.lorentz })
    }

    pub fn scale(&self, c: f64) -> Self {
        AlgebraElement { sl2: self.sl2 * c, lorentz: &self.lorentz * c }
    }

    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.same_n(other)?;
        Ok(AlgebraElement {
            sl2: self.sl2 * other.sl2 - other.sl2 * self.sl2,
            lorentz: &self.lorentz * &other.lorentz - &other.lorentz * &self.lorentz,
        })
    }

    fn same_n(&self, other: &Self) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::ArityMismatch { expected: self.n(), found: other.n() });
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.n() != other.n() {
            return f64::INFINITY;
        }
        (self.sl2 - other.sl2).abs().max().max((&self.lorentz - &other.lorentz).abs().max())
    }

    /// Coordinates in the full catalogue basis (zero entries omitted).
    pub fn coordinates(&self) -> Result<Vec<(BasisKey, f64)>> {
        let n = self.n();
        let (p, q) = (n, n + 1);
        let l = &self.lorentz;
        let mut out = Vec::new();
        let mut push = |k: BasisKey, c: f64| {
            if c != 0.0 {
                out.push((k, c));
            }
        };
        push(BasisKey::SlH, self.sl2[(0, 0)]);
        push(BasisKey::SlE, self.sl2[(0, 1)]);
        push(BasisKey::SlF, self.sl2[(1, 0)]);
        push(BasisKey::Cartan, -l[(p, q)]);
        for i in 0..n {
            push(BasisKey::NuPlus(i + 1), (l[(p, i)] + l[(q, i)]) / 2.0);
        }
        for i in 0..n {
            push(BasisKey::NuMinus(i + 1), (l[(p, i)] - l[(q, i)]) / 2.0);
        }
        for i in 0..n {
            for j in i + 1..n {
                push(BasisKey::Rot(i + 1, j + 1), l[(i, j)]);
            }
        }
        let mut rebuilt = AlgebraElement::zero(n);
        for &(k, c) in &out {
            rebuilt = rebuilt.add(&AlgebraElement::basis(n, k)?.scale(c))?;
        }
        let dev = rebuilt.max_abs_diff(self);
        if dev > ANTISYM_TOL * (1.0 + self.sl2.abs().max() + l.abs().max()) {
            return Err(Error::OutsideSpan(format!("residual {dev:e} after basis expansion")));
        }
        Ok(out)
    }

    /// `exp(eps X)`. Closed forms whenever `Y^3 = c Y`, scaling-and-squaring otherwise.
    pub fn exp(&self, eps: f64) -> Result<GroupElement> {
        let sl2 = exp_sl2(&(self.sl2 * eps));
        let lorentz = exp_lorentz(&(&self.lorentz * eps))?;
        let g = GroupElement::from_parts_unchecked(sl2, lorentz);
        g.validate(PRODUCT_TOL)?;
        Ok(g)
    }
}

/// Traceless 2x2: `Y^2 = -det(Y) I`.
fn exp_sl2(y: &Matrix2<f64>) -> Matrix2<f64> {
    let c = -y.determinant();
    let id = Matrix2::identity();
    if c > 0.0 {
        let w = c.sqrt();
        id * w.cosh() + y * (w.sinh() / w)
    } else if c < 0.0 {
        let w = (-c).sqrt();
        id * w.cos() + y * (w.sin() / w)
    } else {
        id + y
    }
}

fn exp_lorentz(y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let k = y.nrows();
    let id = DMatrix::identity(k, k);
    let ny = y.abs().max();
    if ny == 0.0 {
        return Ok(id);
    }
    let y2 = y * y;
    let y3 = &y2 * y;
    let tol = 1e-14 * ny.powi(3).max(ny);
    if y3.abs().max() <= tol {
        return Ok(id + y + y2 * 0.5);
    }
    // least-squares c for Y^3 = c Y
    let c = y3.dot(y) / y.dot(y);
    if (&y3 - y * c).abs().max() <= tol {
        let (a1, a2) = if c > 0.0 {
            let w = c.sqrt();
            (w.sinh() / w, (w.cosh() - 1.0) / c)
        } else {
            let w = (-c).sqrt();
            (w.sin() / w, (1.0 - w.cos()) / (w * w))
        };
        return Ok(id + y * a1 + y2 * a2);
    }
    exp_series(y)
}

fn exp_series(y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let k = y.nrows();
    let norm = y.abs().max() * k as f64;
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    if squarings > 64 {
        return Err(Error::Convergence(format!("exponential argument too large (norm {norm:e})")));
    }
    let z = y / 2f64.powi(squarings as i32);
    let mut term = DMatrix::identity(k, k);
    let mut sum = term.clone();
    let mut converged = false;
    for j in 1..=30 {
        term = &term * &z / j as f64;
        sum += &term;
        if term.abs().max() <= 1e-17 * sum.abs().max() {
            converged = true;
            break;
        }
    }
    if !converged || sum.iter().any(|v| !v.is_finite()) {
        return Err(Error::Convergence("Taylor series for the exponential did not converge".into()));
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}
