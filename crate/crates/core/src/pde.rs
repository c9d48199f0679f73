//! Porous medium equation `u_t = Δ(u^m)`: finite-difference residuals,
//! harmonic polynomials, stationary and separable solutions, and the check
//! that group actions map solutions to solutions.

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::decomp::bruhat_factor;
use crate::error::{Error, Result};
use crate::exact_poly::{rational_to_f64, MultiPoly, Rational};
use crate::matgroup::{make_n, GroupElement};
use crate::repn::{CharacterParams, Field, Transform};
use crate::sample::seeded_rng;
use crate::vecfields::is_special;

/// `u_t = Δ(u^m)` in n space dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PmeInstance {
    n: usize,
    m: Rational,
    special: bool,
}

impl PmeInstance {
    pub fn new(n: usize, m: Rational) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if m.is_zero() || m.is_one() {
            return Err(Error::InvalidParameter(format!("m must avoid 0 and 1, got {m}")));
        }
        let special = is_special(n, &m);
        Ok(PmeInstance { n, m, special })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> &Rational {
        &self.m
    }

    /// `m = (n-2)/(n+2)`, where the conformal directions are symmetries.
    pub fn special(&self) -> bool {
        self.special
    }

    pub fn m_f64(&self) -> f64 {
        rational_to_f64(&self.m)
    }

    /// `2/(m-1)`.
    pub fn symmetric_exponent(&self) -> f64 {
        rational_to_f64(&(Rational::from_integer(2.into()) / (&self.m - Rational::one())))
    }

    pub fn params(&self, p: u8) -> Result<CharacterParams> {
        CharacterParams::symmetric(p, &self.m)
    }

    /// `v^m`; fractional exponents need `v > 0` (or `v = 0` with `m > 0`).
    pub fn power(&self, v: f64) -> Option<f64> {
        if self.m.is_integer() {
            let k = self.m.to_integer().to_i32()?;
            if k < 0 && v == 0.0 {
                return None;
            }
            return Some(v.powi(k));
        }
        if v > 0.0 || (v == 0.0 && self.m.is_positive()) {
            Some(v.powf(self.m_f64()))
        } else {
            None
        }
    }
}

/// Where and how finely residuals are sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub t: (f64, f64),
    pub x: Vec<(f64, f64)>,
    pub count: usize,
    pub h: f64,
    #[serde(default)]
    pub seed: u64,
}

impl SampleSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) {
            return Err(Error::InvalidParameter(format!("stencil spacing must be positive, got {}", self.h)));
        }
        for &(lo, hi) in std::iter::once(&self.t).chain(self.x.iter()) {
            if !(hi - lo > 4.0 * self.h) {
                return Err(Error::InvalidParameter(format!(
                    "interval [{lo}, {hi}] is degenerate after shrinking by 2h = {}",
                    2.0 * self.h
                )));
            }
        }
        if self.count == 0 {
            return Err(Error::InvalidParameter("sample count must be positive".into()));
        }
        Ok(())
    }

    /// Stencil centers drawn uniformly from the box shrunk by 2h.
    pub fn centers(&self) -> Result<Vec<(f64, Vec<f64>)>> {
        self.validate()?;
        let mut rng = seeded_rng(self.seed);
        let s = 2.0 * self.h;
        Ok((0..self.count)
            .map(|_| {
                let t = rng.gen_range(self.t.0 + s..self.t.1 - s);
                let x = self.x.iter().map(|&(lo, hi)| rng.gen_range(lo + s..hi - s)).collect();
                (t, x)
            })
            .collect())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualPoint {
    pub t: f64,
    pub x: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub max_abs: f64,
    pub mean_abs: f64,
    pub h: f64,
    pub count: usize,
    pub skipped: usize,
    pub seed: u64,
    pub points: Vec<ResidualPoint>,
}

impl ResidualReport {
    fn from_points(points: Vec<ResidualPoint>, skipped: usize, h: f64, seed: u64) -> Self {
        let count = points.len();
        let max_abs = points.iter().fold(0.0_f64, |a, p| a.max(p.value.abs()));
        let mean_abs = if count > 0 { points.iter().map(|p| p.value.abs()).sum::<f64>() / count as f64 } else { 0.0 };
        ResidualReport { max_abs, mean_abs, h, count, skipped, seed, points }
    }
}

/// Second-order central-difference residual `u_t - Δ(u^m)` at one center.
fn stencil_residual(f: &Field, inst: &PmeInstance, t: f64, x: &[f64], h: f64) -> std::result::Result<f64, String> {
    let ev = |tt: f64, xx: &[f64]| -> std::result::Result<f64, String> {
        f.eval(tt, xx).map_err(|e| format!("({tt}, {xx:?}): {e}"))
    };
    let pow = |v: f64, tt: f64, xx: &[f64]| -> std::result::Result<f64, String> {
        inst.power(v).ok_or_else(|| format!("({tt}, {xx:?}): power of {v:e} undefined"))
    };
    let ut = (ev(t + h, x)? - ev(t - h, x)?) / (2.0 * h);
    let c = pow(ev(t, x)?, t, x)?;
    let mut lap = 0.0;
    let mut xs = x.to_vec();
    for i in 0..x.len() {
        xs[i] = x[i] + h;
        let p = pow(ev(t, &xs)?, t, &xs)?;
        xs[i] = x[i] - h;
        let q = pow(ev(t, &xs)?, t, &xs)?;
        xs[i] = x[i];
        lap += (p - 2.0 * c + q) / (h * h);
    }
    Ok(ut - lap)
}

fn residual_at(
    f: &Field,
    inst: &PmeInstance,
    centers: &[(f64, Vec<f64>)],
    h: f64,
    seed: u64,
    strict: bool,
) -> Result<ResidualReport> {
    check_dims(f, inst)?;
    let mut points = Vec::with_capacity(centers.len());
    let mut bad = Vec::new();
    for (t, x) in centers {
        match stencil_residual(f, inst, *t, x, h) {
            Ok(value) => points.push(ResidualPoint { t: *t, x: x.clone(), value }),
            Err(e) => bad.push(e),
        }
    }
    if strict && !bad.is_empty() {
        let shown: Vec<&String> = bad.iter().take(5).collect();
        return Err(Error::DomainViolation(format!("{} stencils leave the domain, e.g. {shown:?}", bad.len())));
    }
    Ok(ResidualReport::from_points(points, bad.len(), h, seed))
}

fn check_dims(f: &Field, inst: &PmeInstance) -> Result<()> {
    if f.n() != inst.n {
        return Err(Error::ArityMismatch { expected: inst.n, found: f.n() });
    }
    Ok(())
}

/// `|u_t - Δ(u^m)|` at random stencil centers; every stencil must lie in the domain.
pub fn residual(f: &Field, inst: &PmeInstance, spec: &SampleSpec) -> Result<ResidualReport> {
    residual_at(f, inst, &spec.centers()?, spec.h, spec.seed, true)
}

/// Like [`residual`] but stencils leaving the domain are skipped and counted.
pub fn residual_lenient(f: &Field, inst: &PmeInstance, spec: &SampleSpec) -> Result<ResidualReport> {
    residual_at(f, inst, &spec.centers()?, spec.h, spec.seed, false)
}

/// `|Δ(F^m) + F|` for a profile `F` on R^n (the time argument is ignored).
pub fn profile_residual(profile: &Field, inst: &PmeInstance, spec: &SampleSpec) -> Result<ResidualReport> {
    check_dims(profile, inst)?;
    let h = spec.h;
    let mut points = Vec::new();
    let mut bad = Vec::new();
    for (t, x) in spec.centers()? {
        let ev = |xx: &[f64]| -> std::result::Result<f64, String> {
            let v = profile.eval(t, xx).map_err(|e| format!("{xx:?}: {e}"))?;
            Ok(v)
        };
        let pw = |v: f64, xx: &[f64]| inst.power(v).ok_or_else(|| format!("{xx:?}: power of {v:e} undefined"));
        let value = (|| -> std::result::Result<f64, String> {
            let f0 = ev(&x)?;
            let c = pw(f0, &x)?;
            let mut lap = 0.0;
            let mut xs = x.clone();
            for i in 0..x.len() {
                xs[i] = x[i] + h;
                let p = pw(ev(&xs)?, &xs)?;
                xs[i] = x[i] - h;
                let q = pw(ev(&xs)?, &xs)?;
                xs[i] = x[i];
                lap += (p - 2.0 * c + q) / (h * h);
            }
            Ok(lap + f0)
        })();
        match value {
            Ok(v) => points.push(ResidualPoint { t, x, value: v }),
            Err(e) => bad.push(e),
        }
    }
    if !bad.is_empty() {
        return Err(Error::DomainViolation(format!("{} stencils leave the domain, e.g. {:?}", bad.len(), &bad[..1])));
    }
    Ok(ResidualReport::from_points(points, 0, h, spec.seed))
}

/// Exact basis of the harmonic polynomials on R^n homogeneous of degree `d`.
pub fn harmonic_basis(n: usize, d: u32) -> Vec<MultiPoly> {
    let cols = monomials(n, d);
    let as_poly = |e: &[u32], c: Rational| {
        let mut full = vec![0; n + 2];
        full[1..=n].copy_from_slice(e);
        MultiPoly::monomial(n, full, c).expect("arity n + 2")
    };
    if d < 2 {
        return cols.iter().map(|e| as_poly(e, Rational::one())).collect();
    }
    let rows = monomials(n, d - 2);
    let mut a: Vec<Vec<Rational>> = vec![vec![Rational::zero(); cols.len()]; rows.len()];
    for (j, e) in cols.iter().enumerate() {
        let lap = as_poly(e, Rational::one()).laplacian();
        for (exp, c) in lap.terms() {
            let i = rows.iter().position(|r| r[..] == exp[1..=n]).expect("degree d - 2 monomial");
            a[i][j] = c.clone();
        }
    }
    nullspace(a, cols.len())
        .into_iter()
        .map(|v| {
            let mut p = MultiPoly::zero(n);
            for (e, c) in cols.iter().zip(v) {
                if !c.is_zero() {
                    p = &p + &as_poly(e, c);
                }
            }
            p
        })
        .collect()
}

fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for k in (0..=d).rev() {
        for mut rest in monomials(n - 1, d - k) {
            rest.insert(0, k);
            out.push(rest);
        }
    }
    out
}

/// Nullspace basis of `a` (rows x ncols) by reduced row echelon form over Q.
fn nullspace(mut a: Vec<Vec<Rational>>, ncols: usize) -> Vec<Vec<Rational>> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(p) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(row, p);
        let inv = Rational::one() / &a[row][col];
        for v in a[row].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot = a[row].clone();
        for (r, line) in a.iter_mut().enumerate() {
            if r != row && !line[col].is_zero() {
                let k = line[col].clone();
                for (v, p) in line.iter_mut().zip(&pivot) {
                    *v -= &k * p;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == a.len() {
            break;
        }
    }
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); ncols];
            v[free] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[r][free].clone();
            }
            v
        })
        .collect()
}

/// `k(x)^{1/m}` on `{k > 0}`, with character parameters `(0, 2/(m-1), 2/(m-1))`.
pub fn stationary_solution(k: &MultiPoly, inst: &PmeInstance) -> Result<Field> {
    if k.nvars() != inst.n {
        return Err(Error::ArityMismatch { expected: inst.n, found: k.nvars() });
    }
    if !k.is_spatial() || !k.laplacian().is_zero() {
        return Err(Error::NotHarmonic);
    }
    let e = 1.0 / inst.m_f64();
    let k = k.clone();
    Ok(Field::new(inst.n, inst.params(0)?, move |t, x| {
        let v = k.eval_txu(t, x, 0.0).ok()?;
        (v > 0.0).then(|| v.powf(e))
    }))
}

/// `((m-1)(t - t0))^{-1/(m-1)} F(x)` on `(m-1)(t - t0) > 0`.
pub fn separable_solution(profile: &Field, t0: f64, inst: &PmeInstance) -> Result<Field> {
    if profile.n() != inst.n {
        return Err(Error::ArityMismatch { expected: inst.n, found: profile.n() });
    }
    let m1 = inst.m_f64() - 1.0;
    let e = -1.0 / m1;
    let profile = profile.clone();
    Ok(Field::new(inst.n, *profile.params(), move |t, x| {
        let base = m1 * (t - t0);
        if !(base > 0.0) {
            return None;
        }
        Some(base.powf(e) * profile.eval(t, x).ok()?)
    }))
}

/// One element of a symmetry word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymmetryStep {
    Sl2Upper { a: f64, b: f64 },
    Rotation { i: usize, j: usize, theta: f64 },
    Translation { t: f64, x: Vec<f64> },
    Dilation { eps: f64 },
    Conformal { i: usize, eps: f64 },
    /// Not a symmetry; accepted only with the override flag.
    Sl2Lower { c: f64 },
}

impl SymmetryStep {
    pub fn transform(&self) -> Transform {
        match self.clone() {
            SymmetryStep::Sl2Upper { a, b } => Transform::Sl2Upper { a, b },
            SymmetryStep::Rotation { i, j, theta } => Transform::Rotation { i, j, theta },
            SymmetryStep::Translation { t, x } => Transform::Translation { t, x },
            SymmetryStep::Dilation { eps } => Transform::Dilation { eps },
            SymmetryStep::Conformal { i, eps } => Transform::Conformal { i, eps },
            SymmetryStep::Sl2Lower { c } => Transform::Sl2Lower { c },
        }
    }
}

/// A word `g = s_1 s_2 .. s_k` or an explicit element.
#[derive(Debug, Clone)]
pub enum SymmetryInput {
    Word(Vec<SymmetryStep>),
    Element(GroupElement),
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    pub residual_before: f64,
    pub residual_after: f64,
    pub mean_before: f64,
    pub mean_after: f64,
    pub evaluated_before: usize,
    pub evaluated_after: usize,
    pub skipped_before: usize,
    pub skipped_after: usize,
    pub h: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Residuals of the transformed field at the pushed-forward centers.
    #[serde(skip)]
    pub points_after: Vec<ResidualPoint>,
}

fn is_parabolic_lorentz(g: &GroupElement) -> bool {
    // M A N fixes the line through e_{n+1} + e_{n+2}
    let n = g.n();
    let l = g.lorentz();
    let w = l.column(n) + l.column(n + 1);
    let scale = l.abs().max().max(1.0);
    (0..n).all(|i| w[i].abs() <= 1e-9 * scale) && (w[n] - w[n + 1]).abs() <= 1e-9 * scale
}

fn screen(input: &SymmetryInput, inst: &PmeInstance, allow_lower: bool) -> Result<GroupElement> {
    let n = inst.n;
    match input {
        SymmetryInput::Word(steps) => {
            let mut g = GroupElement::identity(n);
            for s in steps {
                match s {
                    SymmetryStep::Sl2Lower { .. } if !allow_lower => {
                        return Err(Error::RejectedElement("lower-triangular SL(2) direction is not a symmetry".into()))
                    }
                    SymmetryStep::Conformal { .. } if !inst.special => {
                        return Err(Error::RejectedElement(format!(
                            "conformal directions are symmetries only for m = (n-2)/(n+2), got m = {}",
                            inst.m
                        )))
                    }
                    _ => {}
                }
                g = g.mul_unchecked(&s.transform().group_element(n)?)?;
            }
            g.validate(crate::matgroup::PRODUCT_TOL)?;
            Ok(g)
        }
        SymmetryInput::Element(g) => {
            if g.n() != n {
                return Err(Error::ArityMismatch { expected: n, found: g.n() });
            }
            let s = g.sl2();
            if !allow_lower && s[(1, 0)].abs() > 1e-12 * s.abs().max() {
                return Err(Error::RejectedElement("SL(2) factor is not upper triangular".into()));
            }
            if !inst.special && !is_parabolic_lorentz(g) {
                return Err(Error::RejectedElement(
                    "Lorentz factor leaves the parabolic subgroup and m is not (n-2)/(n+2)".into(),
                ));
            }
            Ok(g.clone())
        }
    }
}

/// Applies a symmetry to `f` and compares residuals on the original sample
/// region and on its image under the group.
pub fn symmetry_check(
    input: &SymmetryInput,
    f: &Field,
    inst: &PmeInstance,
    spec: &SampleSpec,
    allow_lower: bool,
) -> Result<SymmetryReport> {
    check_dims(f, inst)?;
    let e = inst.symmetric_exponent();
    let p = f.params();
    if (p.r - e).abs() > 1e-12 * e.abs().max(1.0) || (p.s - e).abs() > 1e-12 * e.abs().max(1.0) {
        return Err(Error::InvalidParameter(format!("field parameters must be r = s = 2/(m-1) = {e}, got r = {}, s = {}", p.r, p.s)));
    }
    let g = screen(input, inst, allow_lower)?;
    let moved = match input {
        SymmetryInput::Word(steps) => {
            let mut out = f.clone();
            for s in steps.iter().rev() {
                out = out.act(s.transform())?;
            }
            out
        }
        SymmetryInput::Element(g) => out_generic(f, g)?,
    };
    let centers = spec.centers()?;
    let before = residual_at(f, inst, &centers, spec.h, spec.seed, false)?;
    let pushed: Vec<(f64, Vec<f64>)> = centers
        .iter()
        .filter_map(|(t, x)| {
            let b = bruhat_factor(&g.mul_unchecked(&make_n(*t, x)).ok()?).ok()?;
            Some((b.params.t, b.params.x))
        })
        .collect();
    let lost = centers.len() - pushed.len();
    let after = residual_at(&moved, inst, &pushed, spec.h, spec.seed, false)?;
    if before.count == 0 || after.count == 0 {
        return Err(Error::DomainViolation("no stencil inside the domain".into()));
    }
    let tolerance = (10.0 * before.max_abs).max(1e-5);
    Ok(SymmetryReport {
        residual_before: before.max_abs,
        residual_after: after.max_abs,
        mean_before: before.mean_abs,
        mean_after: after.mean_abs,
        evaluated_before: before.count,
        evaluated_after: after.count,
        skipped_before: before.skipped,
        skipped_after: after.skipped + lost,
        h: spec.h,
        tolerance,
        passed: after.max_abs <= tolerance,
        points_after: after.points,
    })
}

fn out_generic(f: &Field, g: &GroupElement) -> Result<Field> {
    f.act(Transform::generic(g.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_poly::rat;
    use crate::repn::act_sl2_upper;

    fn spec1(lo: f64, hi: f64, h: f64) -> SampleSpec {
        SampleSpec { t: (0.0, 1.0), x: vec![(lo, hi)], count: 50, h, seed: 7 }
    }

    #[test]
    fn instance_validation() {
        assert!(PmeInstance::new(1, rat(1, 1)).is_err());
        assert!(PmeInstance::new(1, rat(0, 1)).is_err());
        assert!(PmeInstance::new(1, rat(-1, 3)).unwrap().special());
        assert!(!PmeInstance::new(2, rat(3, 1)).unwrap().special());
    }

    #[test]
    fn residual_examples() {
        let inst = PmeInstance::new(1, rat(3, 1)).unwrap();
        let f = stationary_solution(&MultiPoly::x(1, 1), &inst).unwrap();
        let r = residual(&f, &inst, &spec1(0.5, 1.5, 1e-3)).unwrap();
        assert!(r.max_abs <= 1e-6, "{}", r.max_abs);
        let t = Field::new(1, inst.params(0).unwrap(), |t, _| Some(t));
        let r = residual(&t, &inst, &spec1(0.5, 1.5, 1e-3)).unwrap();
        assert!(r.points.iter().all(|p| (p.value - 1.0).abs() < 1e-9));
        let inst2 = PmeInstance::new(2, rat(3, 1)).unwrap();
        let k = &MultiPoly::x(2, 1) * &MultiPoly::x(2, 1) - &MultiPoly::x(2, 2) * &MultiPoly::x(2, 2);
        let f = stationary_solution(&k, &inst2).unwrap();
        let spec = SampleSpec { t: (0.0, 1.0), x: vec![(1.0, 2.0), (-0.5, 0.5)], count: 50, h: 1e-3, seed: 3 };
        assert!(residual(&f, &inst2, &spec).unwrap().max_abs <= 1e-6);
    }

    #[test]
    fn residual_domain_violation() {
        let inst = PmeInstance::new(1, rat(3, 1)).unwrap();
        let f = stationary_solution(&MultiPoly::x(1, 1), &inst).unwrap();
        assert!(matches!(residual(&f, &inst, &spec1(-1.0, 1.0, 1e-3)), Err(Error::DomainViolation(_))));
        let r = residual_lenient(&f, &inst, &spec1(-1.0, 1.0, 1e-3)).unwrap();
        assert!(r.skipped > 0 && r.count > 0);
    }

    #[test]
    fn harmonic_bases() {
        let b = harmonic_basis(1, 1);
        assert_eq!(b, vec![MultiPoly::x(1, 1)]);
        let b = harmonic_basis(2, 2);
        assert_eq!(b.len(), 2);
        let x1x2 = &MultiPoly::x(2, 1) * &MultiPoly::x(2, 2);
        let diff = &MultiPoly::x(2, 1) * &MultiPoly::x(2, 1) - &MultiPoly::x(2, 2) * &MultiPoly::x(2, 2);
        assert!(b.contains(&x1x2));
        assert!(b.contains(&diff) || b.contains(&-diff));
        assert_eq!(harmonic_basis(3, 2).len(), 5);
        for (n, d) in [(3, 3), (4, 4), (2, 5)] {
            let b = harmonic_basis(n, d);
            // dimension of degree-d harmonics: C(n+d-1, d) - C(n+d-3, d-2)
            let binom = |a: u64, b: u64| (0..b).fold(1u64, |acc, k| acc * (a - k) / (k + 1));
            let expected = binom((n as u64) + d as u64 - 1, d as u64) - binom(n as u64 + d as u64 - 3, d as u64 - 2);
            assert_eq!(b.len() as u64, expected);
            assert!(b.iter().all(|k| k.laplacian().is_zero()));
        }
    }

    #[test]
    fn stationary_rejects_non_harmonic() {
        let inst = PmeInstance::new(2, rat(3, 1)).unwrap();
        let k = &MultiPoly::x(2, 1) * &MultiPoly::x(2, 1) + &MultiPoly::x(2, 2) * &MultiPoly::x(2, 2);
        assert!(matches!(stationary_solution(&k, &inst), Err(Error::NotHarmonic)));
    }

    #[test]
    fn separable_zero_and_domain() {
        let inst = PmeInstance::new(1, rat(2, 1)).unwrap();
        let zero = Field::new(1, inst.params(0).unwrap(), |_, _| Some(0.0));
        let u = separable_solution(&zero, 0.0, &inst).unwrap();
        let r = residual(&u, &inst, &spec1(0.0, 1.0, 1e-3)).unwrap();
        assert_eq!(r.max_abs, 0.0);
        assert!(matches!(u.eval(-1.0, &[0.5]), Err(Error::DomainViolation(_))));
        assert!(matches!(profile_residual(&zero, &inst, &spec1(0.0, 1.0, 1e-3)).map(|r| r.max_abs), Ok(v) if v == 0.0));
    }

    #[test]
    fn symmetry_screening() {
        let inst = PmeInstance::new(1, rat(3, 1)).unwrap();
        let f = stationary_solution(&MultiPoly::x(1, 1), &inst).unwrap();
        let spec = spec1(0.5, 1.5, 1e-3);
        let lower = SymmetryInput::Word(vec![SymmetryStep::Sl2Lower { c: 0.5 }]);
        assert!(matches!(symmetry_check(&lower, &f, &inst, &spec, false), Err(Error::RejectedElement(_))));
        let conf = SymmetryInput::Word(vec![SymmetryStep::Conformal { i: 1, eps: 0.1 }]);
        assert!(matches!(symmetry_check(&conf, &f, &inst, &spec, false), Err(Error::RejectedElement(_))));
        let id = symmetry_check(&SymmetryInput::Word(vec![]), &f, &inst, &spec, false).unwrap();
        assert_eq!(id.residual_after, id.residual_before);
        let dil = SymmetryInput::Word(vec![SymmetryStep::Dilation { eps: 0.3 }]);
        let rep = symmetry_check(&dil, &f, &inst, &spec, false).unwrap();
        assert!(rep.residual_after <= 1e-6 && rep.passed);
        let rep = symmetry_check(&lower, &f, &inst, &spec, true).unwrap();
        assert!(rep.residual_after > 1e-2);
    }

    /// The SL(2) factor preserves time-dependent solutions only with r = -2/(m-1).
    #[test]
    fn sl2_character_sign_on_separable_seed() {
        let inst = PmeInstance::new(1, rat(2, 1)).unwrap();
        // (F^2)'' = -F for F = -x^2/12
        let profile = Field::new(1, inst.params(0).unwrap(), |_, x| Some(-x[0] * x[0] / 12.0));
        let f = separable_solution(&profile, 0.0, &inst).unwrap();
        assert!(profile_residual(&profile, &inst, &spec1(0.0, 1.0, 1e-3)).unwrap().max_abs < 1e-6);
        let spec = SampleSpec { t: (0.5, 1.5), x: vec![(0.0, 1.0)], count: 20, h: 1e-3, seed: 1 };
        let base = residual(&f, &inst, &spec).unwrap();
        let good = act_sl2_upper(1.5, 0.0, &f.with_params(CharacterParams::new(0, -2.0, 2.0).unwrap())).unwrap();
        let bad = act_sl2_upper(1.5, 0.0, &f).unwrap();
        let spec_after = SampleSpec { t: (0.5 * 2.25, 1.5 * 2.25), ..spec.clone() };
        let rg = residual(&good, &inst, &spec_after).unwrap();
        let rb = residual(&bad, &inst, &spec_after).unwrap();
        assert!(base.max_abs < 1e-6, "{}", base.max_abs);
        assert!(rg.max_abs < 1e-6, "{}", rg.max_abs);
        assert!(rb.max_abs > 1e-2, "{}", rb.max_abs);
    }
}
