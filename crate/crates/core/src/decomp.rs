//! Factorizations of group elements: the big-cell Bruhat factorization
//! `g = n m a n^-`, the explicit conformal factorization through the maps
//! delta, gamma, kappa, and the global Iwasawa factorization `g = k a n^-`.

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::Serialize;

use crate::error::{CellCondition, Error, Result};
use crate::exact_poly::Rational;
use crate::matgroup::{make_h, make_m, make_n, make_nminus, GroupElement, PRODUCT_TOL};

/// Threshold below which a cell quantity counts as zero.
pub const CELL_TOL: f64 = 1e-12;
/// Threshold below which delta is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-12;
const MEMBER_TOL: f64 = 1e-9;

fn check_axis(i: usize, n: usize) -> Result<()> {
    if !(1..=n).contains(&i) {
        return Err(Error::InvalidParameter(format!("axis {i} outside 1..={n}")));
    }
    Ok(())
}

/// `delta_i(x) = 1 - 2 x_i + |x|^2`, axis 1-based.
pub fn delta(i: usize, x: &[f64]) -> Result<f64> {
    check_axis(i, x.len())?;
    let q: f64 = x.iter().map(|v| v * v).sum();
    Ok(1.0 - 2.0 * x[i - 1] + q)
}

/// Exact `delta_i` on rational points.
pub fn delta_exact(i: usize, x: &[Rational]) -> Result<Rational> {
    check_axis(i, x.len())?;
    let two = Rational::from_integer(2.into());
    let mut acc = Rational::from_integer(1.into()) - &two * &x[i - 1];
    for v in x {
        acc += v * v;
    }
    Ok(acc)
}

fn scaled_delta(i: usize, eps: f64, x: &[f64]) -> Result<f64> {
    let ex: Vec<f64> = x.iter().map(|v| eps * v).collect();
    let d = delta(i, &ex)?;
    if d.abs() < SINGULAR_TOL {
        return Err(Error::SingularPoint(format!("delta_{i}(eps x) = {d:e} at eps = {eps}, x = {x:?}")));
    }
    Ok(d)
}

/// `gamma_i(eps, x) = (x - eps |x|^2 e_i) / delta_i(eps x)`.
pub fn gamma(i: usize, eps: f64, x: &[f64]) -> Result<Vec<f64>> {
    let d = scaled_delta(i, eps, x)?;
    let q: f64 = x.iter().map(|v| v * v).sum();
    let mut out: Vec<f64> = x.to_vec();
    out[i - 1] -= eps * q;
    Ok(out.into_iter().map(|v| v / d).collect())
}

/// `kappa_i(eps, x) = eps (eps x - e_i) / delta_i(eps x)`.
pub fn kappa(i: usize, eps: f64, x: &[f64]) -> Result<Vec<f64>> {
    let d = scaled_delta(i, eps, x)?;
    let mut out: Vec<f64> = x.iter().map(|v| eps * v).collect();
    out[i - 1] -= 1.0;
    Ok(out.into_iter().map(|v| eps * v / d).collect())
}

/// Coordinates of the four Bruhat factors.
#[derive(Debug, Clone, Serialize)]
pub struct BruhatParams {
    pub t: f64,
    pub x: Vec<f64>,
    pub j: u8,
    /// Row-major rotation block of the M factor.
    pub b: Vec<Vec<f64>>,
    pub a: f64,
    pub y: f64,
    pub t_minus: f64,
    pub x_minus: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct BruhatFactors {
    pub n_part: GroupElement,
    pub m_part: GroupElement,
    pub a_part: GroupElement,
    pub nminus_part: GroupElement,
    pub params: BruhatParams,
}

impl BruhatFactors {
    pub fn product(&self) -> Result<GroupElement> {
        GroupElement::product(self.n_part.n(), [&self.n_part, &self.m_part, &self.a_part, &self.nminus_part])
    }

    /// Max-abs residual of the reconstruction against `g`.
    pub fn residual(&self, g: &GroupElement) -> Result<f64> {
        Ok(self.product()?.max_abs_diff(g))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IwasawaParams {
    pub a: f64,
    pub y: f64,
    pub t_minus: f64,
    pub x_minus: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct IwasawaFactors {
    pub k_part: GroupElement,
    pub a_part: GroupElement,
    pub nminus_part: GroupElement,
    pub params: IwasawaParams,
}

impl IwasawaFactors {
    pub fn product(&self) -> Result<GroupElement> {
        GroupElement::product(self.k_part.n(), [&self.k_part, &self.a_part, &self.nminus_part])
    }

    pub fn residual(&self, g: &GroupElement) -> Result<f64> {
        Ok(self.product()?.max_abs_diff(g))
    }
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect()).collect()
}

/// Lorentz image of the isotropic vector `e_{n+1} - e_{n+2}`.
fn xi_minus_image(l: &DMatrix<f64>) -> DVector<f64> {
    let n = l.nrows() - 2;
    l.column(n) - l.column(n + 1)
}

/// Splits `p` in M N^- (Lorentz factor only) into the rotation block and the N^- parameter.
fn split_m_nminus(p: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let n = p.nrows() - 2;
    let xm: Vec<f64> = (0..n).map(|c| p[(n + 1, c)]).collect();
    let neg: Vec<f64> = xm.iter().map(|v| -v).collect();
    let m = p * make_nminus(0.0, &neg).lorentz();
    (m.view((0, 0), (n, n)).into_owned(), xm)
}

fn sl2_scale(s: &Matrix2<f64>) -> f64 {
    s.abs().max().max(1.0)
}

/// Big-cell factorization `g = n_{t,x} m_{j,B} h_{a,y} n^-_{t',x'}`.
pub fn bruhat_factor(g: &GroupElement) -> Result<BruhatFactors> {
    let n = g.n();
    let s = g.sl2();
    let d = s[(1, 1)];
    if d.abs() <= CELL_TOL * sl2_scale(s) {
        return Err(Error::OutsideCell(CellCondition::Sl2Corner));
    }
    let l = g.lorentz();
    let w = xi_minus_image(l);
    let gap = w[n] - w[n + 1];
    if !(gap > CELL_TOL * l.abs().max()) {
        return Err(Error::OutsideCell(CellCondition::LorentzBoundary));
    }
    let e_neg_y = gap / 2.0;
    let y = -e_neg_y.ln();
    let x: Vec<f64> = (0..n).map(|i| -w[i] / (2.0 * e_neg_y)).collect();

    let sign = d.signum();
    let j = if sign < 0.0 { 1 } else { 0 };
    let alpha = 1.0 / d.abs();
    let tau = s[(0, 1)] / d;
    let sigma = s[(1, 0)] / d;

    let neg_x: Vec<f64> = x.iter().map(|v| -v).collect();
    let p = make_h(1.0, -y, n)?.lorentz() * make_n(0.0, &neg_x).lorentz() * l;
    let (b, x_minus) = split_m_nminus(&p);

    let n_part = make_n(tau, &x);
    let m_part = make_m(j, &b).map_err(|_| Error::NotInSubgroup("M"))?;
    let a_part = make_h(alpha, y, n)?;
    let nminus_part = make_nminus(sigma, &x_minus);
    Ok(BruhatFactors {
        params: BruhatParams { t: tau, x, j, b: rows(&b), a: alpha, y, t_minus: sigma, x_minus },
        n_part,
        m_part,
        a_part,
        nminus_part,
    })
}

/// Closed-form factorization of `n^-_{0,-eps e_i} n_{t,x}`:
/// `n_{t,gamma} m h_{1,-log delta} n^-_{0,kappa}` with `delta = delta_i(eps x)`.
pub fn lemma_factor(i: usize, eps: f64, t: f64, x: &[f64]) -> Result<BruhatFactors> {
    let n = x.len();
    let d = scaled_delta(i, eps, x)?;
    if d <= 0.0 {
        return Err(Error::SingularPoint(format!("delta_{i}(eps x) = {d:e} is not positive")));
    }
    let gm = gamma(i, eps, x)?;
    let kp = kappa(i, eps, x)?;
    let y = -d.ln();
    let n_part = make_n(t, &gm);
    let a_part = make_h(1.0, y, n)?;
    let nminus_part = make_nminus(0.0, &kp);
    let mut e = vec![0.0; n];
    e[i - 1] = -eps;
    let input = make_nminus(0.0, &e).mul(&make_n(t, x))?;
    let m_raw = n_part.inverse().mul_unchecked(&input)?.mul_unchecked(&nminus_part.inverse())?.mul_unchecked(&a_part.inverse())?;
    if !is_in_m(&m_raw) {
        return Err(Error::NotInSubgroup("M"));
    }
    let b = m_raw.lorentz().view((0, 0), (n, n)).into_owned();
    let j = if m_raw.sl2()[(0, 0)] < 0.0 { 1 } else { 0 };
    let m_part = make_m(j, &b).map_err(|_| Error::NotInSubgroup("M"))?;
    Ok(BruhatFactors {
        params: BruhatParams { t, x: gm, j, b: rows(&b), a: 1.0, y, t_minus: 0.0, x_minus: kp },
        n_part,
        m_part,
        a_part,
        nminus_part,
    })
}

/// Rotation of R^k taking `e_k` to the unit vector `z`, built as a product of two reflections.
pub(crate) fn rotation_to(z: &DVector<f64>) -> DMatrix<f64> {
    let k = z.len();
    let mut e = DVector::zeros(k);
    e[k - 1] = 1.0;
    let c = z[k - 1];
    if c > -0.5 {
        // reflect e -> -z through e + z, then z -> -z through z
        let u = &e + z;
        let h1 = householder(&u);
        let h2 = householder(z);
        h2 * h1
    } else {
        // reflect e -> z through e - z, then fix z with a reflection orthogonal to it
        let v = &e - z;
        let h1 = householder(&v);
        let mut best = 0;
        for i in 0..k {
            if z[i].abs() < z[best].abs() {
                best = i;
            }
        }
        let mut u = DVector::zeros(k);
        u[best] = 1.0;
        let u = &u - z * z[best];
        householder(&u) * h1
    }
}

fn householder(v: &DVector<f64>) -> DMatrix<f64> {
    let k = v.len();
    let nn = v.dot(v);
    DMatrix::identity(k, k) - v * v.transpose() * (2.0 / nn)
}

/// Global factorization `g = k h_{a,y} n^-_{t',x'}` with `k` in SO(2) x SO(n+1).
pub fn iwasawa_factor(g: &GroupElement) -> Result<IwasawaFactors> {
    let n = g.n();
    let s = g.sl2();
    let col = s.column(1);
    let len = col.norm();
    let (kc, ks) = (col[1] / len, -col[0] / len);
    let k2 = Matrix2::new(kc, -ks, ks, kc);
    let alpha = 1.0 / len;
    let an = k2.transpose() * s;
    let sigma = an[(1, 0)] * alpha;

    let l = g.lorentz();
    let w = xi_minus_image(l);
    let e_neg_y = -w[n + 1];
    if !(e_neg_y > 0.0) {
        return Err(Error::Convergence("Lorentz factor maps the light cone outside the future sheet".into()));
    }
    let y = -e_neg_y.ln();
    let z = w.rows(0, n + 1) / e_neg_y;
    let z = &z / z.norm();
    let kp = rotation_to(&z);
    let mut kl = DMatrix::identity(n + 2, n + 2);
    kl.view_mut((0, 0), (n + 1, n + 1)).copy_from(&kp);
    let p = make_h(1.0, -y, n)?.lorentz() * kl.transpose() * l;
    let (b, x_minus) = split_m_nminus(&p);
    let mut mb = DMatrix::identity(n + 2, n + 2);
    mb.view_mut((0, 0), (n, n)).copy_from(&b);
    let kl = kl * mb;

    let k_part = GroupElement::from_parts(k2, kl)?;
    let a_part = make_h(alpha, y, n)?;
    let nminus_part = make_nminus(sigma, &x_minus);
    Ok(IwasawaFactors { k_part, a_part, nminus_part, params: IwasawaParams { a: alpha, y, t_minus: sigma, x_minus } })
}

fn close(a: &GroupElement, b: &GroupElement) -> bool {
    let scale = a.lorentz().abs().max().max(a.sl2().abs().max()).max(1.0);
    a.max_abs_diff(b) <= MEMBER_TOL * scale
}

pub fn is_in_n(g: &GroupElement) -> bool {
    let n = g.n();
    let x: Vec<f64> = (0..n).map(|c| g.lorentz()[(n, c)]).collect();
    close(g, &make_n(g.sl2()[(0, 1)], &x))
}

pub fn is_in_nminus(g: &GroupElement) -> bool {
    let n = g.n();
    let x: Vec<f64> = (0..n).map(|c| g.lorentz()[(n + 1, c)]).collect();
    close(g, &make_nminus(g.sl2()[(1, 0)], &x))
}

pub fn is_in_a(g: &GroupElement) -> bool {
    let n = g.n();
    let a = g.sl2()[(0, 0)];
    if !(a > 0.0) {
        return false;
    }
    match make_h(a, g.lorentz()[(n, n + 1)].asinh(), n) {
        Ok(h) => close(g, &h),
        Err(_) => false,
    }
}

pub fn is_in_m(g: &GroupElement) -> bool {
    let n = g.n();
    let j = if g.sl2()[(0, 0)] < 0.0 { 1 } else { 0 };
    let b = g.lorentz().view((0, 0), (n, n)).into_owned();
    match make_m(j, &b) {
        Ok(m) => close(g, &m),
        Err(_) => false,
    }
}

pub fn is_in_k(g: &GroupElement) -> bool {
    let n = g.n();
    let s = g.sl2();
    let orth2 = (s.transpose() * s - Matrix2::identity()).abs().max();
    let l = g.lorentz();
    let mut expected_tail = DMatrix::zeros(n + 2, n + 2);
    expected_tail[(n + 1, n + 1)] = 1.0;
    let mut block = l.clone();
    block.view_mut((0, 0), (n + 1, n + 1)).fill(0.0);
    let kb = l.view((0, 0), (n + 1, n + 1)).into_owned();
    let orth = (kb.transpose() * &kb - DMatrix::identity(n + 1, n + 1)).abs().max();
    orth2 <= MEMBER_TOL && orth <= MEMBER_TOL && (block - expected_tail).abs().max() <= MEMBER_TOL
        && g.validate(PRODUCT_TOL).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_poly::rat;
    use crate::matgroup::{make_rotation, plane_rotation};

    #[test]
    fn delta_values() {
        assert_eq!(delta(1, &[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(delta(1, &[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(delta(1, &[0.25, 0.0]).unwrap(), 0.5625);
        assert_eq!(delta_exact(1, &[rat(1, 4), rat(0, 1)]).unwrap(), rat(9, 16));
        assert!(delta(3, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn gamma_kappa_values() {
        let x = [0.3, -0.7];
        assert_eq!(gamma(2, 0.0, &x).unwrap(), x.to_vec());
        assert_eq!(kappa(2, 0.0, &x).unwrap(), vec![0.0, 0.0]);
        let g = gamma(1, 0.5, &[0.5]).unwrap();
        let k = kappa(1, 0.5, &[0.5]).unwrap();
        assert!((g[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((k[0] + 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(gamma(1, 0.5, &[2.0, 0.0]), Err(Error::SingularPoint(_))));
        assert!(matches!(kappa(1, 0.5, &[2.0, 0.0]), Err(Error::SingularPoint(_))));
    }

    #[test]
    fn bruhat_identity_and_sl2_example() {
        let f = bruhat_factor(&GroupElement::identity(2)).unwrap();
        for part in [&f.n_part, &f.m_part, &f.a_part, &f.nminus_part] {
            assert_eq!(part.max_abs_diff(&GroupElement::identity(2)), 0.0);
        }
        let g = GroupElement::from_sl2(Matrix2::new(2.0, 1.0, 1.0, 1.0), 1).unwrap();
        let f = bruhat_factor(&g).unwrap();
        assert_eq!((f.params.t, f.params.a, f.params.t_minus, f.params.j), (1.0, 1.0, 1.0, 0));
        assert!(f.residual(&g).unwrap() < 1e-15);
    }

    #[test]
    fn bruhat_round_trip() {
        let x0 = [0.4, -1.2];
        let x1 = [0.3, 0.9];
        let b0 = plane_rotation(2, 1, 2, 0.8).unwrap();
        let g = GroupElement::product(
            2,
            [
                &make_n(1.0, &x0),
                &make_m(1, &b0).unwrap(),
                &make_h(2.0, 0.3, 2).unwrap(),
                &make_nminus(0.7, &x1),
            ],
        )
        .unwrap();
        let f = bruhat_factor(&g).unwrap();
        let p = &f.params;
        assert!((p.t - 1.0).abs() < 1e-12 && (p.a - 2.0).abs() < 1e-12 && (p.y - 0.3).abs() < 1e-12);
        assert!((p.t_minus - 0.7).abs() < 1e-12 && p.j == 1);
        for (u, v) in p.x.iter().zip(&x0).chain(p.x_minus.iter().zip(&x1)) {
            assert!((u - v).abs() < 1e-12);
        }
        assert!(f.m_part.max_abs_diff(&make_m(1, &b0).unwrap()) < 1e-12);
        assert!(f.residual(&g).unwrap() < 1e-12);
        assert!(is_in_n(&f.n_part) && is_in_m(&f.m_part) && is_in_a(&f.a_part) && is_in_nminus(&f.nminus_part));
        assert!(!is_in_n(&f.nminus_part) && !is_in_a(&f.n_part));
    }

    #[test]
    fn bruhat_cell_boundary() {
        let w = GroupElement::from_sl2(Matrix2::new(0.0, 1.0, -1.0, 0.0), 1).unwrap();
        assert!(matches!(bruhat_factor(&w), Err(Error::OutsideCell(CellCondition::Sl2Corner))));
        // rotation by pi in the (1, n+1) plane reverses e_{n+1}
        let mut l = DMatrix::identity(3, 3);
        l[(0, 0)] = -1.0;
        l[(1, 1)] = -1.0;
        let g = GroupElement::from_parts(Matrix2::identity(), l).unwrap();
        assert!(matches!(bruhat_factor(&g), Err(Error::OutsideCell(CellCondition::LorentzBoundary))));
    }

    #[test]
    fn lemma_spot_values() {
        let f = lemma_factor(1, 0.5, 0.0, &[0.5]).unwrap();
        assert!((f.params.x[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((f.params.x_minus[0] + 2.0 / 3.0).abs() < 1e-15);
        assert!((f.params.y + 0.5625f64.ln()).abs() < 1e-15);
        let input = make_nminus(0.0, &[-0.5]).mul(&make_n(0.0, &[0.5])).unwrap();
        assert!(f.residual(&input).unwrap() < 1e-12);
        let f0 = lemma_factor(1, 0.0, 0.4, &[0.2]).unwrap();
        assert!(f0.n_part.max_abs_diff(&make_n(0.4, &[0.2])) < 1e-15);
        assert!(f0.a_part.max_abs_diff(&GroupElement::identity(1)) < 1e-15);
    }

    #[test]
    fn lemma_agrees_with_bruhat() {
        let x = [0.3, -0.4, 0.8];
        for i in 1..=3 {
            for eps in [-0.7, 0.2, 0.9] {
                let l = lemma_factor(i, eps, 0.6, &x).unwrap();
                let mut e = vec![0.0; 3];
                e[i - 1] = -eps;
                let g = make_nminus(0.0, &e).mul(&make_n(0.6, &x)).unwrap();
                let b = bruhat_factor(&g).unwrap();
                assert!(l.n_part.max_abs_diff(&b.n_part) < 1e-12);
                assert!(l.m_part.max_abs_diff(&b.m_part) < 1e-12);
                assert!(l.a_part.max_abs_diff(&b.a_part) < 1e-12);
                assert!(l.nminus_part.max_abs_diff(&b.nminus_part) < 1e-12);
            }
        }
    }

    #[test]
    fn iwasawa_examples() {
        let f = iwasawa_factor(&GroupElement::identity(2)).unwrap();
        assert!(f.k_part.max_abs_diff(&GroupElement::identity(2)) < 1e-15);
        let h = make_h(3.0, 0.4, 2).unwrap();
        let f = iwasawa_factor(&h).unwrap();
        assert!(f.k_part.max_abs_diff(&GroupElement::identity(2)) < 1e-14);
        assert!((f.params.a - 3.0).abs() < 1e-14 && (f.params.y - 0.4).abs() < 1e-14);

        let mut k = DMatrix::identity(5, 5);
        let r = make_rotation(3, 1, 2, 0.7).unwrap();
        k.view_mut((0, 0), (3, 3)).copy_from(&r.lorentz().view((0, 0), (3, 3)));
        let mut boostlike = DMatrix::identity(5, 5);
        let (c, s) = (2.1f64.cos(), 2.1f64.sin());
        boostlike[(2, 2)] = c;
        boostlike[(3, 3)] = c;
        boostlike[(2, 3)] = -s;
        boostlike[(3, 2)] = s;
        let kl = k * boostlike;
        let (c2, s2) = (1.3f64.cos(), 1.3f64.sin());
        let kg = GroupElement::from_parts(Matrix2::new(c2, -s2, s2, c2), kl).unwrap();
        let g = GroupElement::product(3, [&kg, &make_h(0.6, -0.8, 3).unwrap(), &make_nminus(0.25, &[1.0, -0.5, 0.2])])
            .unwrap();
        let f = iwasawa_factor(&g).unwrap();
        assert!(f.residual(&g).unwrap() < 1e-12);
        assert!(is_in_k(&f.k_part));
        assert!((f.params.a - 0.6).abs() < 1e-12 && (f.params.y + 0.8).abs() < 1e-12);
        assert!((f.params.t_minus - 0.25).abs() < 1e-12);
    }

    #[test]
    fn iwasawa_of_reversed_light_cone() {
        // k sends e_{n+1} near -e_{n+1}
        let g = make_rotation(2, 1, 2, 0.0).unwrap();
        let mut l = DMatrix::identity(4, 4);
        l[(0, 0)] = -1.0;
        l[(2, 2)] = -1.0;
        let g = g.mul(&GroupElement::from_parts(Matrix2::identity(), l).unwrap()).unwrap();
        let g = g.mul(&make_nminus(0.0, &[0.3, 0.1])).unwrap();
        let f = iwasawa_factor(&g).unwrap();
        assert!(f.residual(&g).unwrap() < 1e-12);
        assert!(is_in_k(&f.k_part));
    }
}
