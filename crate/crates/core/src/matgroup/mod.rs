//! Elements of G = SL(2,R) x SO(n+1,1)_0 and the parametrized subgroups
//! A, M, N and N^- used throughout the crate.
//!
//! Lorentz matrices preserve `J = diag(1, .., 1, -1)` of size n + 2; the last
//! two coordinates are the light-cone pair `(n+1, n+2)`.

mod algebra;

pub use algebra::{AlgebraElement, BasisKey};

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for elements built from closed forms.
pub const CONSTRUCTOR_TOL: f64 = 1e-12;
/// Tolerance for products of words (scaled by the squared entry norm).
pub const PRODUCT_TOL: f64 = 1e-9;

/// The Lorentz form `diag(1, .., 1, -1)` of size n + 2.
pub fn lorentz_form(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::identity(n + 2, n + 2);
    j[(n + 1, n + 1)] = -1.0;
    j
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
}

/// How far an element is from satisfying the group invariants.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GroupDeviation {
    /// max |g^T J g - J| for the Lorentz factor.
    pub lorentz_form: f64,
    /// |det - 1| for the Lorentz factor.
    pub lorentz_det: f64,
    /// |det - 1| for the SL(2) factor.
    pub sl2_det: f64,
    /// Entry (n+2, n+2), at least 1 on the identity component.
    pub time_entry: f64,
    /// Largest absolute entry of either factor.
    pub scale: f64,
}

impl GroupDeviation {
    pub fn worst(&self) -> f64 {
        self.lorentz_form.max(self.lorentz_det).max(self.sl2_det)
    }
}

/// An element `[sl2, lorentz]` of G.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    sl2: Matrix2<f64>,
    lorentz: DMatrix<f64>,
}

impl GroupElement {
    pub fn identity(n: usize) -> Self {
        GroupElement { sl2: Matrix2::identity(), lorentz: DMatrix::identity(n + 2, n + 2) }
    }

    /// Wraps raw matrices, validating at the product tolerance.
    pub fn from_parts(sl2: Matrix2<f64>, lorentz: DMatrix<f64>) -> Result<Self> {
        if lorentz.nrows() != lorentz.ncols() || lorentz.nrows() < 3 {
            return Err(Error::InvalidParameter(format!(
                "Lorentz factor must be (n+2)x(n+2) with n >= 1, got {}x{}",
                lorentz.nrows(),
                lorentz.ncols()
            )));
        }
        let g = GroupElement { sl2, lorentz };
        g.validate(PRODUCT_TOL)?;
        Ok(g)
    }

    pub(crate) fn from_parts_unchecked(sl2: Matrix2<f64>, lorentz: DMatrix<f64>) -> Self {
        GroupElement { sl2, lorentz }
    }

    /// Spatial dimension n.
    pub fn n(&self) -> usize {
        self.lorentz.nrows() - 2
    }

    pub fn sl2(&self) -> &Matrix2<f64> {
        &self.sl2
    }

    pub fn lorentz(&self) -> &DMatrix<f64> {
        &self.lorentz
    }

    /// Embeds an SL(2) matrix with identity Lorentz factor.
    pub fn from_sl2(sl2: Matrix2<f64>, n: usize) -> Result<Self> {
        let g = GroupElement { sl2, lorentz: DMatrix::identity(n + 2, n + 2) };
        g.validate(CONSTRUCTOR_TOL)?;
        Ok(g)
    }

    pub fn deviation(&self) -> GroupDeviation {
        let n = self.n();
        let j = lorentz_form(n);
        let form = self.lorentz.transpose() * &j * &self.lorentz - &j;
        let scale = max_abs(&self.lorentz).max(self.sl2.iter().fold(0.0_f64, |a, v| a.max(v.abs())));
        GroupDeviation {
            lorentz_form: max_abs(&form),
            lorentz_det: (self.lorentz.clone().determinant() - 1.0).abs(),
            sl2_det: (self.sl2.determinant() - 1.0).abs(),
            time_entry: self.lorentz[(n + 1, n + 1)],
            scale,
        }
    }

    /// Checks both factor invariants; `tol` is scaled by the squared entry norm
    /// because the form residual is quadratic in the entries.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let d = self.deviation();
        let allowed = tol * d.scale.max(1.0).powi(2);
        if !(d.sl2_det <= allowed) {
            return Err(Error::NotInGroup { what: "SL(2) factor", deviation: d.sl2_det });
        }
        if !(d.lorentz_form <= allowed) {
            return Err(Error::NotInGroup { what: "Lorentz factor (g^T J g = J)", deviation: d.lorentz_form });
        }
        let n2 = (self.n() + 2) as i32;
        if !(d.lorentz_det <= tol * d.scale.max(1.0).powi(n2)) {
            return Err(Error::NotInGroup { what: "Lorentz factor (det = 1)", deviation: d.lorentz_det });
        }
        if !(d.time_entry >= 1.0 - allowed) {
            return Err(Error::NotInGroup {
                what: "Lorentz factor (orthochronous)",
                deviation: 1.0 - d.time_entry,
            });
        }
        Ok(())
    }

    fn check_same_n(&self, other: &Self) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::ArityMismatch { expected: self.n(), found: other.n() });
        }
        Ok(())
    }

    /// Componentwise product, re-validated.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let g = self.mul_unchecked(other)?;
        g.validate(PRODUCT_TOL)?;
        Ok(g)
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Result<Self> {
        self.check_same_n(other)?;
        Ok(GroupElement { sl2: self.sl2 * other.sl2, lorentz: &self.lorentz * &other.lorentz })
    }

    /// Inverse via the adjugate (SL(2)) and `J g^T J` (Lorentz).
    pub fn inverse(&self) -> Self {
        let s = &self.sl2;
        let det = s.determinant();
        let sl2 = Matrix2::new(s[(1, 1)], -s[(0, 1)], -s[(1, 0)], s[(0, 0)]) / det;
        let j = lorentz_form(self.n());
        let lorentz = &j * self.lorentz.transpose() * &j;
        GroupElement { sl2, lorentz }
    }

    /// Max-abs entry difference over both factors.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.n() != other.n() {
            return f64::INFINITY;
        }
        let a = (self.sl2 - other.sl2).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let b = max_abs(&(&self.lorentz - &other.lorentz));
        a.max(b)
    }

    /// Product of a word of elements, left to right.
    pub fn product<'a>(n: usize, word: impl IntoIterator<Item = &'a GroupElement>) -> Result<Self> {
        let mut acc = GroupElement::identity(n);
        for g in word {
            acc = acc.mul_unchecked(g)?;
        }
        acc.validate(PRODUCT_TOL)?;
        Ok(acc)
    }
}

/// `h_{a,y}`: `diag(a, 1/a)` with a boost of rapidity y in the light-cone block.
pub fn make_h(a: f64, y: f64, n: usize) -> Result<GroupElement> {
    if !(a > 0.0) || !a.is_finite() || !y.is_finite() {
        return Err(Error::InvalidParameter(format!("h_(a,y) needs a > 0, got a = {a}, y = {y}")));
    }
    let mut l = DMatrix::identity(n + 2, n + 2);
    let (c, s) = (y.cosh(), y.sinh());
    l[(n, n)] = c;
    l[(n + 1, n + 1)] = c;
    l[(n, n + 1)] = s;
    l[(n + 1, n)] = s;
    Ok(GroupElement { sl2: Matrix2::new(a, 0.0, 0.0, 1.0 / a), lorentz: l })
}

/// `m_{j,B}`: `(-I)^j` with the rotation B in the upper-left n x n block.
pub fn make_m(j: u8, b: &DMatrix<f64>) -> Result<GroupElement> {
    let n = b.nrows();
    if n == 0 || b.ncols() != n {
        return Err(Error::InvalidParameter("B must be a square n x n matrix, n >= 1".into()));
    }
    if j > 1 {
        return Err(Error::InvalidParameter(format!("j must be 0 or 1, got {j}")));
    }
    let orth = max_abs(&(b.transpose() * b - DMatrix::identity(n, n)));
    let det = (b.clone().determinant() - 1.0).abs();
    if orth > 1e-10 || det > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "B is not special orthogonal (|B^T B - I| = {orth:e}, |det B - 1| = {det:e})"
        )));
    }
    let mut l = DMatrix::identity(n + 2, n + 2);
    l.view_mut((0, 0), (n, n)).copy_from(b);
    let sign = if j == 1 { -1.0 } else { 1.0 };
    Ok(GroupElement { sl2: Matrix2::identity() * sign, lorentz: l })
}

/// `n_{t,x}`.
pub fn make_n(t: f64, x: &[f64]) -> GroupElement {
    let n = x.len();
    let q: f64 = x.iter().map(|v| v * v).sum();
    let mut l = DMatrix::identity(n + 2, n + 2);
    for (i, &xi) in x.iter().enumerate() {
        l[(i, n)] = -xi;
        l[(i, n + 1)] = xi;
        l[(n, i)] = xi;
        l[(n + 1, i)] = xi;
    }
    l[(n, n)] = 1.0 - 0.5 * q;
    l[(n, n + 1)] = 0.5 * q;
    l[(n + 1, n)] = -0.5 * q;
    l[(n + 1, n + 1)] = 1.0 + 0.5 * q;
    GroupElement { sl2: Matrix2::new(1.0, t, 0.0, 1.0), lorentz: l }
}

/// `n^-_{t,x}`.
pub fn make_nminus(t: f64, x: &[f64]) -> GroupElement {
    let n = x.len();
    let q: f64 = x.iter().map(|v| v * v).sum();
    let mut l = DMatrix::identity(n + 2, n + 2);
    for (i, &xi) in x.iter().enumerate() {
        l[(i, n)] = xi;
        l[(i, n + 1)] = xi;
        l[(n, i)] = -xi;
        l[(n + 1, i)] = xi;
    }
    l[(n, n)] = 1.0 - 0.5 * q;
    l[(n, n + 1)] = -0.5 * q;
    l[(n + 1, n)] = 0.5 * q;
    l[(n + 1, n + 1)] = 1.0 + 0.5 * q;
    GroupElement { sl2: Matrix2::new(1.0, 0.0, t, 1.0), lorentz: l }
}

/// The n x n plane rotation `exp(theta (E_ij - E_ji))`, axes 1-based.
pub fn plane_rotation(n: usize, i: usize, j: usize, theta: f64) -> Result<DMatrix<f64>> {
    if !(1 <= i && i < j && j <= n) {
        return Err(Error::InvalidParameter(format!("rotation axes need 1 <= i < j <= n = {n}, got ({i}, {j})")));
    }
    let (i, j) = (i - 1, j - 1);
    let (c, s) = (theta.cos(), theta.sin());
    let mut r = DMatrix::identity(n, n);
    r[(i, i)] = c;
    r[(j, j)] = c;
    r[(i, j)] = s;
    r[(j, i)] = -s;
    Ok(r)
}

/// `g_{i,j,theta}` with identity SL(2) factor.
pub fn make_rotation(n: usize, i: usize, j: usize, theta: f64) -> Result<GroupElement> {
    let r = plane_rotation(n, i, j, theta)?;
    make_m(0, &r)
}

/// Upper-triangular `[[a, b], [0, 1/a]]` with identity Lorentz factor.
pub fn make_sl2_upper(a: f64, b: f64, n: usize) -> Result<GroupElement> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::InvalidParameter(format!("upper-triangular SL(2) element needs a != 0, got {a}")));
    }
    GroupElement::from_sl2(Matrix2::new(a, b, 0.0, 1.0 / a), n)
}

/// Lower-triangular `[[1, 0], [c, 1]]` with identity Lorentz factor.
pub fn make_sl2_lower(c: f64, n: usize) -> GroupElement {
    GroupElement { sl2: Matrix2::new(1.0, 0.0, c, 1.0), lorentz: DMatrix::identity(n + 2, n + 2) }
}

/// JSON shape `{ "n": .., "sl2": [[..]], "lorentz": [[..]] }`, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupElementJson {
    pub n: usize,
    pub sl2: [[f64; 2]; 2],
    pub lorentz: Vec<Vec<f64>>,
}

impl From<&GroupElement> for GroupElementJson {
    fn from(g: &GroupElement) -> Self {
        let l = &g.lorentz;
        GroupElementJson {
            n: g.n(),
            sl2: [[g.sl2[(0, 0)], g.sl2[(0, 1)]], [g.sl2[(1, 0)], g.sl2[(1, 1)]]],
            lorentz: (0..l.nrows()).map(|r| (0..l.ncols()).map(|c| l[(r, c)]).collect()).collect(),
        }
    }
}

impl TryFrom<GroupElementJson> for GroupElement {
    type Error = Error;
    fn try_from(j: GroupElementJson) -> Result<Self> {
        let k = j.n + 2;
        if j.n == 0 || j.lorentz.len() != k || j.lorentz.iter().any(|row| row.len() != k) {
            return Err(Error::ArityMismatch { expected: k, found: j.lorentz.len() });
        }
        let sl2 = Matrix2::new(j.sl2[0][0], j.sl2[0][1], j.sl2[1][0], j.sl2[1][1]);
        let lorentz = DMatrix::from_fn(k, k, |r, c| j.lorentz[r][c]);
        GroupElement::from_parts(sl2, lorentz)
    }
}

impl Serialize for GroupElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GroupElementJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = GroupElementJson::deserialize(d)?;
        GroupElement::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    const TIGHT: f64 = 1e-10;

    #[test]
    fn h_identity_and_diagonal() {
        let g = make_h(1.0, 0.0, 3).unwrap();
        assert_eq!(g, GroupElement::identity(3));
        let g = make_h(2.0, 0.0, 1).unwrap();
        assert_eq!(*g.sl2(), Matrix2::new(2.0, 0.0, 0.0, 0.5));
        assert!(make_h(0.0, 0.1, 1).is_err());
        assert!(make_h(-1.0, 0.1, 1).is_err());
    }

    #[test]
    fn boost_addition() {
        for &(y1, y2) in &[(0.3, 0.4), (-1.1, 0.25), (2.0, -0.5)] {
            let lhs = make_h(1.0, y1, 2).unwrap().mul(&make_h(1.0, y2, 2).unwrap()).unwrap();
            let rhs = make_h(1.0, y1 + y2, 2).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < TIGHT);
        }
        let lhs = make_h(1.5, 0.2, 1).unwrap().mul(&make_h(0.4, -0.7, 1).unwrap()).unwrap();
        assert!(lhs.max_abs_diff(&make_h(0.6, -0.5, 1).unwrap()) < TIGHT);
    }

    #[test]
    fn m_elements() {
        let id = DMatrix::identity(2, 2);
        assert_eq!(make_m(0, &id).unwrap(), GroupElement::identity(2));
        assert_eq!(*make_m(1, &id).unwrap().sl2(), -Matrix2::identity());
        let r = plane_rotation(2, 1, 2, 0.7).unwrap();
        let rinv = plane_rotation(2, 1, 2, -0.7).unwrap();
        let p = make_m(0, &r).unwrap().mul(&make_m(0, &rinv).unwrap()).unwrap();
        assert!(p.max_abs_diff(&GroupElement::identity(2)) < TIGHT);
        // reflection is orthogonal but not special
        let refl = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(make_m(0, &refl).is_err());
        assert!(make_m(2, &id).is_err());
    }

    #[test]
    fn n_block_values() {
        let g = make_n(0.0, &[1.0]);
        let expected = DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 1.0, 1.0, 0.5, 0.5, 1.0, -0.5, 1.5]);
        assert_eq!(*g.lorentz(), expected);
        assert_eq!(make_n(0.0, &[0.0, 0.0]), GroupElement::identity(2));
        assert_eq!(make_nminus(0.0, &[0.0]), GroupElement::identity(1));
        for x in [[0.3, -1.2, 2.0], [5.0, 0.0, -0.1]] {
            make_n(0.7, &x).validate(CONSTRUCTOR_TOL).unwrap();
            make_nminus(-0.2, &x).validate(CONSTRUCTOR_TOL).unwrap();
        }
    }

    #[test]
    fn n_group_law_is_additive() {
        let p = make_n(1.0, &[0.5]).mul(&make_n(2.0, &[-0.5])).unwrap();
        assert!(p.max_abs_diff(&make_n(3.0, &[0.0])) < TIGHT);
        let a = [0.3, -0.4, 1.1];
        let b = [-0.9, 0.2, 0.5];
        let sum: Vec<f64> = a.iter().zip(&b).map(|(u, v)| u + v).collect();
        let p = make_n(0.2, &a).mul(&make_n(-1.0, &b)).unwrap();
        assert!(p.max_abs_diff(&make_n(-0.8, &sum)) < TIGHT);
        let p = make_nminus(0.2, &a).mul(&make_nminus(-1.0, &b)).unwrap();
        assert!(p.max_abs_diff(&make_nminus(-0.8, &sum)) < TIGHT);
    }

    #[test]
    fn inverses() {
        let x = [0.3, -0.4];
        let g = make_n(0.5, &x);
        assert!(g.inverse().max_abs_diff(&make_n(-0.5, &[-0.3, 0.4])) < TIGHT);
        let h = make_h(2.5, 0.8, 2).unwrap();
        assert!(h.inverse().max_abs_diff(&make_h(0.4, -0.8, 2).unwrap()) < TIGHT);
        let w = make_n(0.1, &x).mul(&h).unwrap().mul(&make_nminus(2.0, &[1.0, 0.5])).unwrap();
        let id = w.mul(&w.inverse()).unwrap();
        assert!(id.max_abs_diff(&GroupElement::identity(2)) < TIGHT);
    }

    #[test]
    fn rotation_conventions() {
        let g = make_rotation(2, 1, 2, 0.0).unwrap();
        assert_eq!(g, GroupElement::identity(2));
        let g = make_rotation(2, 1, 2, FRAC_PI_2).unwrap();
        // column 1 is the image of e_1
        assert!((g.lorentz()[(0, 0)]).abs() < 1e-15);
        assert!((g.lorentz()[(1, 0)] + 1.0).abs() < 1e-15);
        let back = g.mul(&make_rotation(2, 1, 2, -FRAC_PI_2).unwrap()).unwrap();
        assert!(back.max_abs_diff(&GroupElement::identity(2)) < TIGHT);
        assert!(make_rotation(2, 2, 1, 0.1).is_err());
        assert!(make_rotation(2, 1, 3, 0.1).is_err());
    }

    #[test]
    fn sl2_diagonal_commutes_past_n() {
        // diag(1/a, a) n_{t,x} = n_{t/a^2, x} diag(1/a, a)
        let a = 1.7;
        let d = GroupElement::from_sl2(Matrix2::new(1.0 / a, 0.0, 0.0, a), 2).unwrap();
        let lhs = d.mul(&make_n(0.9, &[0.2, -0.3])).unwrap();
        let rhs = make_n(0.9 / (a * a), &[0.2, -0.3]).mul(&d).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < TIGHT);
    }

    #[test]
    fn rotation_conjugates_n() {
        let n = 3;
        let theta = 0.61;
        let x = [0.4, -1.3, 0.8];
        let g = make_rotation(n, 1, 3, -theta).unwrap();
        let r = plane_rotation(n, 1, 3, -theta).unwrap();
        let rx: Vec<f64> = (&r * nalgebra::DVector::from_column_slice(&x)).iter().copied().collect();
        let lhs = g.mul(&make_n(0.5, &x)).unwrap();
        let rhs = make_n(0.5, &rx).mul(&g).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < TIGHT);
    }

    #[test]
    fn dilation_conjugates_n() {
        // h_{1,e}^{-1} n_{t,x} = n_{t, e^{-e} x} h_{1,e}^{-1}
        let eps = 0.37;
        let x = [0.6, -0.25];
        let hinv = make_h(1.0, -eps, 2).unwrap();
        let lhs = hinv.mul(&make_n(0.1, &x)).unwrap();
        let scaled: Vec<f64> = x.iter().map(|v| v * (-eps).exp()).collect();
        let rhs = make_n(0.1, &scaled).mul(&hinv).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < TIGHT);
    }

    #[test]
    fn validation_rejects_drift() {
        let mut l = DMatrix::identity(3, 3);
        l[(0, 1)] = 1e-6;
        assert!(GroupElement::from_parts(Matrix2::identity(), l).is_err());
        // improper time orientation
        let l = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 1.0, -1.0]));
        assert!(matches!(
            GroupElement::from_parts(Matrix2::identity(), l),
            Err(Error::NotInGroup { what: "Lorentz factor (orthochronous)", .. })
        ));
    }

    #[test]
    fn json_round_trip_is_row_major() {
        let g = make_n(0.25, &[1.0]);
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"lorentz\":[[1.0,-1.0,1.0],[1.0,0.5,0.5],[1.0,-0.5,1.5]]"), "{s}");
        let back: GroupElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        let bad = r#"{"n":1,"sl2":[[1,0],[0,1]],"lorentz":[[1,0],[0,1]]}"#;
        assert!(serde_json::from_str::<GroupElement>(bad).is_err());
    }
}
