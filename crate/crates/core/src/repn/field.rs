use std::fmt;
use std::sync::Arc;

use super::CharacterParams;
use crate::decomp::{bruhat_factor, delta, gamma, SINGULAR_TOL};
use crate::error::{Error, Result};
use crate::exact_poly::MultiPoly;
use crate::matgroup::{
    make_h, make_n, make_nminus, make_rotation, make_sl2_lower, make_sl2_upper, GroupElement,
};

type Evaluator = Arc<dyn Fn(f64, &[f64]) -> Option<f64> + Send + Sync>;

/// One group element applied to a field, stored by family so that the
/// closed-form pullback can be used.
#[derive(Clone, Debug)]
pub enum Transform {
    Sl2Upper { a: f64, b: f64 },
    Sl2Lower { c: f64 },
    Rotation { i: usize, j: usize, theta: f64 },
    Translation { t: f64, x: Vec<f64> },
    Dilation { eps: f64 },
    /// `exp(eps nu_i^-) = n^-_{0, -eps e_i}`
    Conformal { i: usize, eps: f64 },
    Generic { g: GroupElement, g_inv: GroupElement },
}

impl Transform {
    pub fn generic(g: GroupElement) -> Self {
        let g_inv = g.inverse();
        Transform::Generic { g, g_inv }
    }

    /// The group element this transform acts by.
    pub fn group_element(&self, n: usize) -> Result<GroupElement> {
        match self {
            Transform::Sl2Upper { a, b } => make_sl2_upper(*a, *b, n),
            Transform::Sl2Lower { c } => Ok(make_sl2_lower(*c, n)),
            Transform::Rotation { i, j, theta } => make_rotation(n, *i, *j, *theta),
            Transform::Translation { t, x } => {
                check_len(n, x.len())?;
                Ok(make_n(*t, x))
            }
            Transform::Dilation { eps } => make_h(1.0, *eps, n),
            Transform::Conformal { i, eps } => {
                check_axis(n, *i)?;
                let mut e = vec![0.0; n];
                e[i - 1] = -eps;
                Ok(make_nminus(0.0, &e))
            }
            Transform::Generic { g, .. } => {
                check_len(n, g.n())?;
                Ok(g.clone())
            }
        }
    }

    /// Replaces `(t, x)` by the pulled-back point and returns the character factor.
    fn pull_back(&self, params: &CharacterParams, t: &mut f64, x: &mut Vec<f64>) -> Result<f64> {
        match self {
            Transform::Sl2Upper { a, b } => {
                *t = (*t - a * b) / (a * a);
                let sign = if params.p == 1 && *a < 0.0 { -1.0 } else { 1.0 };
                Ok(sign * a.abs().powf(params.r))
            }
            Transform::Rotation { i, j, theta } => {
                let (c, s) = (theta.cos(), theta.sin());
                let (xi, xj) = (x[i - 1], x[j - 1]);
                x[i - 1] = c * xi - s * xj;
                x[j - 1] = s * xi + c * xj;
                Ok(1.0)
            }
            Transform::Translation { t: t0, x: x0 } => {
                *t -= t0;
                for (v, s) in x.iter_mut().zip(x0) {
                    *v -= s;
                }
                Ok(1.0)
            }
            Transform::Dilation { eps } => {
                let k = (-eps).exp();
                x.iter_mut().for_each(|v| *v *= k);
                Ok((params.s * eps).exp())
            }
            Transform::Conformal { i, eps } => {
                let scaled: Vec<f64> = x.iter().map(|v| -eps * v).collect();
                let d = delta(*i, &scaled)?;
                if d <= SINGULAR_TOL {
                    return Err(Error::SingularPoint(format!("delta_{i}(-eps x) = {d:e} at x = {x:?}")));
                }
                *x = gamma(*i, -eps, x)?;
                Ok(d.powf(params.s))
            }
            Transform::Sl2Lower { c } => {
                let g = make_sl2_lower(*c, x.len());
                generic_pull_back(&g.inverse(), params, t, x)
            }
            Transform::Generic { g_inv, .. } => generic_pull_back(g_inv, params, t, x),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        self.group_element(n).map(|_| ())
    }
}

/// `g^{-1} n_{t,x} = n_{t',x'} q^-`; returns `chi(q^-)^{-1}`.
fn generic_pull_back(g_inv: &GroupElement, params: &CharacterParams, t: &mut f64, x: &mut Vec<f64>) -> Result<f64> {
    let f = bruhat_factor(&g_inv.mul_unchecked(&make_n(*t, x))?)?;
    *t = f.params.t;
    *x = f.params.x;
    Ok(1.0 / params.value(f.params.j, f.params.a, f.params.y))
}

fn check_len(n: usize, found: usize) -> Result<()> {
    if n != found {
        return Err(Error::ArityMismatch { expected: n, found });
    }
    Ok(())
}

fn check_axis(n: usize, i: usize) -> Result<()> {
    if !(1..=n).contains(&i) {
        return Err(Error::InvalidParameter(format!("axis {i} outside 1..={n}")));
    }
    Ok(())
}

/// A function on N = R^{1,n} in the induced space with parameters `params`:
/// a base evaluator (returning `None` off its domain) and a stack of group
/// actions applied lazily at evaluation time.
#[derive(Clone)]
pub struct Field {
    n: usize,
    params: CharacterParams,
    base: Evaluator,
    transforms: Vec<Transform>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("n", &self.n)
            .field("params", &self.params)
            .field("transforms", &self.transforms)
            .finish()
    }
}

impl Field {
    pub fn new<F>(n: usize, params: CharacterParams, f: F) -> Self
    where
        F: Fn(f64, &[f64]) -> Option<f64> + Send + Sync + 'static,
    {
        Field { n, params, base: Arc::new(f), transforms: Vec::new() }
    }

    /// Polynomial in `(t, x)` (evaluated with `u = 0`), defined everywhere.
    pub fn from_poly(p: &MultiPoly, params: CharacterParams) -> Self {
        let p = p.clone();
        let n = p.nvars();
        Field::new(n, params, move |t, x| p.eval_txu(t, x, 0.0).ok())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> &CharacterParams {
        &self.params
    }

    pub fn transforms(&self) -> &[Transform] {
        &self.transforms
    }

    /// Same base and transforms with different character parameters.
    pub fn with_params(&self, params: CharacterParams) -> Self {
        Field { params, ..self.clone() }
    }

    /// `g.f` for the transform `g`.
    pub fn act(&self, tr: Transform) -> Result<Self> {
        tr.validate(self.n)?;
        let mut out = self.clone();
        out.transforms.push(tr);
        Ok(out)
    }

    pub fn eval(&self, t: f64, x: &[f64]) -> Result<f64> {
        check_len(self.n, x.len())?;
        let mut t = t;
        let mut x = x.to_vec();
        let mut factor = 1.0;
        for tr in self.transforms.iter().rev() {
            factor *= tr.pull_back(&self.params, &mut t, &mut x)?;
        }
        match (self.base)(t, &x) {
            Some(v) => Ok(factor * v),
            None => Err(Error::DomainViolation(format!("base field undefined at t = {t}, x = {x:?}"))),
        }
    }

    pub fn in_domain(&self, t: f64, x: &[f64]) -> bool {
        self.eval(t, x).is_ok()
    }
}

pub fn act_sl2_upper(a: f64, b: f64, f: &Field) -> Result<Field> {
    f.act(Transform::Sl2Upper { a, b })
}

/// Lower-triangular SL(2) direction, evaluated through the Bruhat factorization.
pub fn act_sl2_lower(c: f64, f: &Field) -> Result<Field> {
    f.act(Transform::Sl2Lower { c })
}

pub fn act_rotation(i: usize, j: usize, theta: f64, f: &Field) -> Result<Field> {
    f.act(Transform::Rotation { i, j, theta })
}

pub fn act_translation(t: f64, x: &[f64], f: &Field) -> Result<Field> {
    f.act(Transform::Translation { t, x: x.to_vec() })
}

/// Action of `h_{1,eps}`.
pub fn act_dilation(eps: f64, f: &Field) -> Result<Field> {
    f.act(Transform::Dilation { eps })
}

/// Action of `exp(eps nu_i^-)`.
pub fn act_conformal(i: usize, eps: f64, f: &Field) -> Result<Field> {
    f.act(Transform::Conformal { i, eps })
}

pub fn act_generic(g: &GroupElement, f: &Field) -> Result<Field> {
    f.act(Transform::generic(g.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroup::{AlgebraElement, BasisKey};

    fn params(p: u8, r: f64, s: f64) -> CharacterParams {
        CharacterParams::new(p, r, s).unwrap()
    }

    fn sample(n: usize) -> Field {
        Field::new(n, params(1, 0.8, -0.6), |t, x| {
            Some((0.3 * t).sin() + x.iter().enumerate().map(|(k, v)| (k as f64 + 1.0) * v).sum::<f64>().cos() + 2.0)
        })
    }

    #[test]
    fn sl2_upper_formula() {
        let f = sample(1);
        let g = act_sl2_upper(1.0, 0.0, &f).unwrap();
        assert_eq!(g.eval(0.4, &[0.2]).unwrap(), f.eval(0.4, &[0.2]).unwrap());
        let g = act_sl2_upper(-1.0, 0.0, &f).unwrap();
        assert_eq!(g.eval(0.4, &[0.2]).unwrap(), -f.eval(0.4, &[0.2]).unwrap());
        let f2 = f.with_params(params(0, 2.0, 0.0));
        let g = act_sl2_upper(2.0, 0.0, &f2).unwrap();
        assert!((g.eval(0.4, &[0.2]).unwrap() - 4.0 * f2.eval(0.1, &[0.2]).unwrap()).abs() < 1e-14);
        assert!(act_sl2_upper(0.0, 1.0, &f).is_err());
    }

    #[test]
    fn translation_shifts() {
        let p = MultiPoly::t(2) + MultiPoly::x(2, 1);
        let f = Field::from_poly(&p, params(0, 1.0, 1.0));
        let g = act_translation(1.0, &[1.0, 0.0], &f).unwrap();
        for (t, x) in [(0.0, [0.0, 0.0]), (2.5, [-1.0, 3.0])] {
            assert_eq!(g.eval(t, &x).unwrap(), t + x[0] - 2.0);
        }
    }

    #[test]
    fn identity_actions() {
        let f = sample(2);
        let pt = (0.3, [0.5, -0.2]);
        let v = f.eval(pt.0, &pt.1).unwrap();
        for g in [
            act_rotation(1, 2, 0.0, &f).unwrap(),
            act_translation(0.0, &[0.0, 0.0], &f).unwrap(),
            act_dilation(0.0, &f).unwrap(),
            act_conformal(2, 0.0, &f).unwrap(),
            act_generic(&GroupElement::identity(2), &f).unwrap(),
        ] {
            assert!((g.eval(pt.0, &pt.1).unwrap() - v).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_forms_match_generic() {
        let n = 3;
        let f = sample(n);
        let trs = [
            Transform::Sl2Upper { a: -1.7, b: 0.4 },
            Transform::Rotation { i: 1, j: 3, theta: 0.9 },
            Transform::Translation { t: 0.5, x: vec![0.1, -0.3, 0.7] },
            Transform::Dilation { eps: -0.45 },
            Transform::Conformal { i: 2, eps: 0.35 },
        ];
        for tr in trs {
            let closed = f.act(tr.clone()).unwrap();
            let generic = act_generic(&tr.group_element(n).unwrap(), &f).unwrap();
            for (t, x) in [(0.2, [0.3, -0.4, 0.5]), (-1.0, [1.2, 0.8, -0.1])] {
                let a = closed.eval(t, &x).unwrap();
                let b = generic.eval(t, &x).unwrap();
                assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()), "{tr:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn conformal_is_exp_of_nu_minus() {
        let g = AlgebraElement::basis(2, BasisKey::NuMinus(1)).unwrap().exp(0.3).unwrap();
        let tr = Transform::Conformal { i: 1, eps: 0.3 };
        assert!(tr.group_element(2).unwrap().max_abs_diff(&g) < 1e-15);
    }

    #[test]
    fn conformal_singularity_surfaces_at_evaluation() {
        let f = sample(1);
        let g = act_conformal(1, 0.5, &f).unwrap();
        assert!(matches!(g.eval(0.0, &[-2.0]), Err(Error::SingularPoint(_))));
        let g = act_generic(&Transform::Conformal { i: 1, eps: 0.5 }.group_element(1).unwrap(), &f).unwrap();
        assert!(matches!(g.eval(0.0, &[-2.0]), Err(Error::OutsideCell(_))));
    }

    #[test]
    fn domain_is_pulled_back() {
        let f = Field::new(1, params(0, 0.0, 0.0), |_, x| if x[0] > 0.0 { Some(x[0].sqrt()) } else { None });
        let g = act_translation(0.0, &[1.0], &f).unwrap();
        assert!(g.in_domain(0.0, &[1.5]));
        assert!(!g.in_domain(0.0, &[0.5]));
        assert!(matches!(g.eval(0.0, &[0.5]), Err(Error::DomainViolation(_))));
    }
}
