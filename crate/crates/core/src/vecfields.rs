//! First-order differential operators on `(t, x, u)` with exact polynomial
//! coefficients: the point-symmetry generators of the porous medium equation,
//! the operators by which the Lie algebra acts on the induced space, their
//! brackets, and the correspondence with matrices.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_poly::{rational_from_f64, rational_to_f64, MultiPoly, Rational, Var};
use crate::matgroup::{AlgebraElement, BasisKey};
use crate::repn::Field;

/// `xi_t d_t + sum xi_i d_i + eta d_u`.
#[derive(Clone, PartialEq, Eq)]
pub struct VectorField {
    n: usize,
    xi_t: MultiPoly,
    xi: Vec<MultiPoly>,
    eta: MultiPoly,
}

impl VectorField {
    pub fn zero(n: usize) -> Self {
        VectorField { n, xi_t: MultiPoly::zero(n), xi: vec![MultiPoly::zero(n); n], eta: MultiPoly::zero(n) }
    }

    pub fn new(xi_t: MultiPoly, xi: Vec<MultiPoly>, eta: MultiPoly) -> Result<Self> {
        let n = xi_t.nvars();
        if xi.len() != n {
            return Err(Error::ArityMismatch { expected: n, found: xi.len() });
        }
        for p in xi.iter().chain(std::iter::once(&eta)) {
            if p.nvars() != n {
                return Err(Error::ArityMismatch { expected: n, found: p.nvars() });
            }
        }
        Ok(VectorField { n, xi_t, xi, eta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn xi_t(&self) -> &MultiPoly {
        &self.xi_t
    }

    pub fn xi(&self) -> &[MultiPoly] {
        &self.xi
    }

    pub fn eta(&self) -> &MultiPoly {
        &self.eta
    }

    pub fn is_zero(&self) -> bool {
        self.xi_t.is_zero() && self.eta.is_zero() && self.xi.iter().all(MultiPoly::is_zero)
    }

    fn components(&self) -> impl Iterator<Item = &MultiPoly> {
        std::iter::once(&self.xi_t).chain(self.xi.iter()).chain(std::iter::once(&self.eta))
    }

    fn from_components(n: usize, mut c: Vec<MultiPoly>) -> Self {
        let eta = c.pop().expect("n + 2 components");
        let xi_t = c.remove(0);
        VectorField { n, xi_t, xi: c, eta }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ArityMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let c = self.components().zip(other.components()).map(|(a, b)| a + b).collect();
        Ok(Self::from_components(self.n, c))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_components(self.n, self.components().map(|p| p.scale(c)).collect())
    }

    /// The derivation `V(p)`.
    pub fn derive(&self, p: &MultiPoly) -> Result<MultiPoly> {
        if p.nvars() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, found: p.nvars() });
        }
        let mut acc = MultiPoly::zero(self.n);
        for (idx, c) in self.components().enumerate() {
            if !c.is_zero() {
                acc = &acc + &(c * &p.diff_index(idx)?);
            }
        }
        Ok(acc)
    }

    /// `[V, W]`, the commutator as derivations.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Vec::with_capacity(self.n + 2);
        for (a, b) in self.components().zip(other.components()) {
            out.push(&self.derive(b)? - &other.derive(a)?);
        }
        Ok(Self::from_components(self.n, out))
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let mut push = |c: &MultiPoly, d: String| {
            if !c.is_zero() {
                parts.push(format!("({c})*{d}"));
            }
        };
        push(&self.xi_t, "d_t".into());
        for (i, c) in self.xi.iter().enumerate() {
            push(c, format!("d_x{}", i + 1));
        }
        push(&self.eta, "d_u".into());
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Names of the point-symmetry generators; spatial indices 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GenKey {
    X1,
    X2,
    X3,
    Y(usize),
    Z(usize, usize),
    /// Only for the exponent `m = (n-2)/(n+2)`.
    W(usize),
}

impl fmt::Display for GenKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenKey::X1 => write!(f, "X1"),
            GenKey::X2 => write!(f, "X2"),
            GenKey::X3 => write!(f, "X3"),
            GenKey::Y(i) => write!(f, "Y{i}"),
            GenKey::Z(i, j) => write!(f, "Z{i},{j}"),
            GenKey::W(i) => write!(f, "W{i}"),
        }
    }
}

impl FromStr for GenKey {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidKey(s.to_string());
        let idx = |r: &str| r.trim().parse::<usize>().map_err(|_| bad());
        let s = s.trim();
        Ok(match s {
            "X1" => GenKey::X1,
            "X2" => GenKey::X2,
            "X3" => GenKey::X3,
            _ if s.starts_with('Y') => GenKey::Y(idx(&s[1..])?),
            _ if s.starts_with('W') => GenKey::W(idx(&s[1..])?),
            _ if s.starts_with('Z') => {
                let (a, b) = s[1..].split_once(',').ok_or_else(bad)?;
                GenKey::Z(idx(a)?, idx(b)?)
            }
            _ => return Err(bad()),
        })
    }
}

fn check_m(m: &Rational) -> Result<()> {
    if m.is_zero() || m.is_one() {
        return Err(Error::InvalidParameter(format!("m must avoid 0 and 1, got {m}")));
    }
    Ok(())
}

/// True when `m = (n-2)/(n+2)` with `n != 2`, where the conformal generators W_i exist.
pub fn is_special(n: usize, m: &Rational) -> bool {
    n != 2 && *m == Rational::new((n as i64 - 2).into(), (n as i64 + 2).into())
}

fn x(n: usize, i: usize) -> MultiPoly {
    MultiPoly::x(n, i)
}

fn konst(n: usize, c: Rational) -> MultiPoly {
    MultiPoly::constant(n, c)
}

fn field(xi_t: MultiPoly, xi: Vec<MultiPoly>, eta: MultiPoly) -> VectorField {
    VectorField::new(xi_t, xi, eta).expect("consistent arity")
}

fn unit_dir(n: usize, i: usize, c: Rational) -> Vec<MultiPoly> {
    (1..=n).map(|k| if k == i { konst(n, c.clone()) } else { MultiPoly::zero(n) }).collect()
}

fn euler(n: usize) -> Vec<MultiPoly> {
    (1..=n).map(|i| x(n, i)).collect()
}

/// `(x_i^2 - sum_{j != i} x_j^2) d_i + sum_{j != i} 2 x_i x_j d_j`, the spatial part of W_i.
fn conformal_spatial(n: usize, i: usize) -> Vec<MultiPoly> {
    let two = Rational::from_integer(2.into());
    (1..=n)
        .map(|j| {
            if j == i {
                let mut p = &x(n, i) * &x(n, i);
                for k in (1..=n).filter(|&k| k != i) {
                    p = &p - &(&x(n, k) * &x(n, k));
                }
                p
            } else {
                (&x(n, i) * &x(n, j)).scale(&two)
            }
        })
        .collect()
}

fn check_axis(n: usize, i: usize) -> Result<()> {
    if !(1..=n).contains(&i) {
        return Err(Error::InvalidKey(format!("axis {i} for n = {n}")));
    }
    Ok(())
}

/// Point-symmetry generators of `u_t = Δ(u^m)`.
pub fn generator(key: GenKey, n: usize, m: &Rational) -> Result<VectorField> {
    check_m(m)?;
    let one = Rational::one();
    let k = &one / (m - &one);
    let two = Rational::from_integer(2.into());
    let u = MultiPoly::u(n);
    let z = || MultiPoly::zero(n);
    Ok(match key {
        GenKey::X1 => field(MultiPoly::one(n), vec![z(); n], z()),
        GenKey::X2 => field(z(), euler(n), u.scale(&(&two * &k))),
        GenKey::X3 => field(-MultiPoly::t(n), vec![z(); n], u.scale(&k)),
        GenKey::Y(i) => {
            check_axis(n, i)?;
            field(z(), unit_dir(n, i, one), z())
        }
        GenKey::Z(i, j) => {
            if !(1 <= i && i < j && j <= n) {
                return Err(Error::InvalidKey(format!("{key} for n = {n}")));
            }
            let mut xi = vec![z(); n];
            xi[i - 1] = -x(n, j);
            xi[j - 1] = x(n, i);
            field(z(), xi, z())
        }
        GenKey::W(i) => {
            check_axis(n, i)?;
            if !is_special(n, m) {
                return Err(Error::InvalidKey(format!("W{i} needs m = (n-2)/(n+2) with n != 2, got n = {n}, m = {m}")));
            }
            let four = Rational::from_integer(4.into());
            field(z(), conformal_spatial(n, i), (&x(n, i) * &u).scale(&(&four * &k)))
        }
    })
}

/// Generators realized at `(n, m)`: X1, X2, X3, Y_i, Z_ij, and W_i when special.
pub fn generator_keys(n: usize, m: &Rational) -> Vec<GenKey> {
    let mut v = vec![GenKey::X1, GenKey::X2, GenKey::X3];
    v.extend((1..=n).map(GenKey::Y));
    for i in 1..=n {
        for j in i + 1..=n {
            v.push(GenKey::Z(i, j));
        }
    }
    if is_special(n, m) {
        v.extend((1..=n).map(GenKey::W));
    }
    v
}

/// `d/d eps exp(eps X).f` written as a vector field: `apply` of the result
/// gives `xi . grad f + eta(u = f)`. Linear in the character parameters.
pub fn flow_operator(key: BasisKey, n: usize, r: &Rational, s: &Rational) -> Result<VectorField> {
    key.validate(n)?;
    let one = Rational::one();
    let two = Rational::from_integer(2.into());
    let t = MultiPoly::t(n);
    let u = MultiPoly::u(n);
    let z = || MultiPoly::zero(n);
    Ok(match key {
        BasisKey::SlE => field(konst(n, -one), vec![z(); n], z()),
        BasisKey::SlH => field(t.scale(&-two), vec![z(); n], u.scale(r)),
        BasisKey::SlF => field(&t * &t, vec![z(); n], (&t * &u).scale(&-r.clone())),
        BasisKey::Cartan => field(z(), euler(n), u.scale(&-s.clone())),
        BasisKey::NuPlus(i) => field(z(), unit_dir(n, i, -one), z()),
        BasisKey::NuMinus(i) => {
            let xi = conformal_spatial(n, i).into_iter().map(|p| -p).collect();
            field(z(), xi, (&x(n, i) * &u).scale(&(&two * s)))
        }
        BasisKey::Rot(i, j) => {
            let mut xi = vec![z(); n];
            xi[i - 1] = -x(n, j);
            xi[j - 1] = x(n, i);
            field(z(), xi, z())
        }
    })
}

/// Operators in the form they are usually stated for the induced space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StatedOperator {
    /// `d_t`
    E,
    /// `-2t d_t + r u d_u`
    H,
    /// `sum x_i d_i + s u d_u`
    Dilation,
    /// `d_i`
    Translation(usize),
    /// `(x_i^2 - sum_{j!=i} x_j^2) d_i + sum_{j!=i} 2 x_i x_j d_j + 2 x_i s u d_u`
    Conformal(usize),
}

pub fn stated_operator(op: StatedOperator, n: usize, r: &Rational, s: &Rational) -> Result<VectorField> {
    let two = Rational::from_integer(2.into());
    let z = || MultiPoly::zero(n);
    let u = MultiPoly::u(n);
    Ok(match op {
        StatedOperator::E => field(MultiPoly::one(n), vec![z(); n], z()),
        StatedOperator::H => field(MultiPoly::t(n).scale(&-two), vec![z(); n], u.scale(r)),
        StatedOperator::Dilation => field(z(), euler(n), u.scale(s)),
        StatedOperator::Translation(i) => {
            check_axis(n, i)?;
            field(z(), unit_dir(n, i, Rational::one()), z())
        }
        StatedOperator::Conformal(i) => {
            check_axis(n, i)?;
            field(z(), conformal_spatial(n, i), (&x(n, i) * &u).scale(&(&two * s)))
        }
    })
}

/// Image of a catalogue basis element under the algebra correspondence.
pub fn iso_map_key(key: BasisKey, n: usize, m: &Rational) -> Result<VectorField> {
    key.validate(n)?;
    let neg = |v: VectorField| v.scale(&-Rational::one());
    Ok(match key {
        BasisKey::SlE => neg(generator(GenKey::X1, n, m)?),
        BasisKey::SlH => generator(GenKey::X3, n, m)?.scale(&Rational::from_integer(2.into())),
        BasisKey::SlF => return Err(Error::OutsideSpan("lower-triangular sl(2) direction has no point-symmetry image".into())),
        BasisKey::Cartan => generator(GenKey::X2, n, m)?,
        BasisKey::NuPlus(i) => neg(generator(GenKey::Y(i), n, m)?),
        BasisKey::NuMinus(i) => {
            if !is_special(n, m) {
                return Err(Error::OutsideSpan(format!("nu-{i} needs m = (n-2)/(n+2)")));
            }
            neg(generator(GenKey::W(i), n, m)?)
        }
        BasisKey::Rot(i, j) => generator(GenKey::Z(i, j), n, m)?,
    })
}

/// Linear extension of `iso_map_key` to an algebra element.
pub fn iso_map(x: &AlgebraElement, m: &Rational) -> Result<VectorField> {
    let n = x.n();
    let mut acc = VectorField::zero(n);
    for (key, c) in x.coordinates()? {
        acc = acc.try_add(&iso_map_key(key, n, m)?.scale(&rational_from_f64(c)?))?;
    }
    Ok(acc)
}

/// The correspondence exactly as tabulated before sign resolution
/// (`(W_i + Y_i)/2 -> E_{n+1,i} - E_{i,n+1}`, `(W_i - Y_i)/2 -> E_{n+2,i} + E_{i,n+2}`).
fn tabulated_key(key: BasisKey, n: usize, m: &Rational) -> Result<VectorField> {
    Ok(match key {
        BasisKey::NuPlus(i) => generator(GenKey::W(i), n, m)?,
        BasisKey::NuMinus(i) => generator(GenKey::Y(i), n, m)?,
        _ => iso_map_key(key, n, m)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Full,
    Parabolic,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairFailure {
    pub left: String,
    pub right: String,
    pub bracket_of_images: String,
    pub image_of_bracket: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableCheck {
    pub pairs_checked: usize,
    pub failing_pairs: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OperatorIdentity {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HomomorphismReport {
    pub n: usize,
    pub m: String,
    pub mode: CheckMode,
    pub special_exponent: bool,
    pub basis: Vec<String>,
    pub pairs_checked: usize,
    pub failures: Vec<PairFailure>,
    pub sign_adjustments: Vec<String>,
    /// The unadjusted tabulated correspondence, checked the same way (full mode only).
    pub tabulated_correspondence: Option<TableCheck>,
    pub operator_identities: Vec<OperatorIdentity>,
    pub passed: bool,
}

/// Sign conventions fixed by the implementation, reported verbatim.
pub fn sign_adjustments() -> Vec<String> {
    vec![
        "algebra acts by pi(X)f = d/de exp(eX).f (left translation); E acts by -d_t, not +d_t".into(),
        "correspondence: E -> -X1, H -> 2 X3, H01 -> X2, nu+_i -> -Y_i, nu-_i -> -W_i, R_ij -> Z_ij".into(),
        "relative to the tabulated correspondence, (W_i + Y_i)/2 maps to -(E_{n+1,i} - E_{i,n+1}) (sign flipped); X2, (W_i - Y_i)/2 and Z_ij rows unchanged".into(),
        "the correspondence equals the flow operators at r = 2/(m-1), s = -2/(m-1)".into(),
        "the lower-triangular sl(2) direction F has no point-symmetry image and is excluded".into(),
    ]
}

/// Exact coefficient identities between stated operators and the generators.
pub fn operator_identities(n: usize, m: &Rational) -> Result<Vec<OperatorIdentity>> {
    check_m(m)?;
    let one = Rational::one();
    let sym = Rational::from_integer(2.into()) / (m - &one);
    let half = Rational::new(1.into(), 2.into());
    let mut out = vec![
        OperatorIdentity {
            name: "H operator at r = 2/(m-1), halved, equals X3".into(),
            holds: stated_operator(StatedOperator::H, n, &sym, &sym)?.scale(&half) == generator(GenKey::X3, n, m)?,
        },
        OperatorIdentity {
            name: "dilation operator at s = 2/(m-1) equals X2".into(),
            holds: stated_operator(StatedOperator::Dilation, n, &sym, &sym)? == generator(GenKey::X2, n, m)?,
        },
        OperatorIdentity {
            name: "E operator equals X1".into(),
            holds: stated_operator(StatedOperator::E, n, &sym, &sym)? == generator(GenKey::X1, n, m)?,
        },
    ];
    for i in 1..=n {
        out.push(OperatorIdentity {
            name: format!("translation operator {i} equals Y{i}"),
            holds: stated_operator(StatedOperator::Translation(i), n, &sym, &sym)? == generator(GenKey::Y(i), n, m)?,
        });
        if is_special(n, m) {
            out.push(OperatorIdentity {
                name: format!("conformal operator {i} at s = 2/(m-1) equals W{i}"),
                holds: stated_operator(StatedOperator::Conformal(i), n, &sym, &sym)? == generator(GenKey::W(i), n, m)?,
            });
        }
    }
    let anti = -sym.clone();
    for key in BasisKey::full(n) {
        if key == BasisKey::SlF || (matches!(key, BasisKey::NuMinus(_)) && !is_special(n, m)) {
            continue;
        }
        out.push(OperatorIdentity {
            name: format!("flow operator of {key} at (r, s) = (2/(m-1), -2/(m-1)) equals its image"),
            holds: flow_operator(key, n, &sym, &anti)? == iso_map_key(key, n, m)?,
        });
    }
    Ok(out)
}

fn check_pairs<F>(n: usize, keys: &[BasisKey], image: F) -> Result<(usize, Vec<PairFailure>)>
where
    F: Fn(BasisKey) -> Result<VectorField>,
{
    let mut failures = Vec::new();
    let mut count = 0;
    let m = |k: BasisKey| -> Result<VectorField> { image(k) };
    for (a, &ka) in keys.iter().enumerate() {
        for &kb in &keys[a..] {
            count += 1;
            let xa = AlgebraElement::basis(n, ka)?;
            let xb = AlgebraElement::basis(n, kb)?;
            let br = xa.bracket(&xb)?;
            let mut rhs = VectorField::zero(n);
            let mut outside = false;
            for (key, c) in br.coordinates()? {
                match m(key) {
                    Ok(v) => rhs = rhs.try_add(&v.scale(&rational_from_f64(c)?))?,
                    Err(_) => outside = true,
                }
            }
            let lhs = m(ka)?.bracket(&m(kb)?)?;
            if outside || lhs != rhs {
                failures.push(PairFailure {
                    left: ka.to_string(),
                    right: kb.to_string(),
                    bracket_of_images: lhs.to_string(),
                    image_of_bracket: if outside { "outside span".into() } else { rhs.to_string() },
                });
            }
        }
    }
    Ok((count, failures))
}

/// Compares `[phi(X), phi(Y)]` with `phi([X, Y])` exactly for all basis pairs.
pub fn check_homomorphism(n: usize, m: &Rational, mode: CheckMode) -> Result<HomomorphismReport> {
    check_m(m)?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let special = is_special(n, m);
    let keys: Vec<BasisKey> = match mode {
        CheckMode::Full => {
            if !special {
                return Err(Error::InvalidParameter(format!(
                    "full algebra needs m = (n-2)/(n+2) with n != 2, got n = {n}, m = {m}"
                )));
            }
            BasisKey::full(n).into_iter().filter(|k| *k != BasisKey::SlF).collect()
        }
        CheckMode::Parabolic => BasisKey::parabolic(n),
    };
    let (pairs_checked, failures) = check_pairs(n, &keys, |k| iso_map_key(k, n, m))?;
    let tabulated = if mode == CheckMode::Full {
        let (c, f) = check_pairs(n, &keys, |k| tabulated_key(k, n, m))?;
        Some(TableCheck { pairs_checked: c, failing_pairs: f.iter().map(|p| format!("[{}, {}]", p.left, p.right)).collect() })
    } else {
        None
    };
    let operator_identities = operator_identities(n, m)?;
    let passed = failures.is_empty() && operator_identities.iter().all(|o| o.holds);
    Ok(HomomorphismReport {
        n,
        m: m.to_string(),
        mode,
        special_exponent: special,
        basis: keys.iter().map(|k| k.to_string()).collect(),
        pairs_checked,
        failures,
        sign_adjustments: sign_adjustments(),
        tabulated_correspondence: tabulated,
        operator_identities,
        passed,
    })
}

/// Finite-difference step for `apply`.
pub const APPLY_STEP: f64 = 1e-5;

fn central(f: &Field, t: f64, x: &[f64], idx: usize, h: f64) -> Result<f64> {
    let shift = |d: f64| -> Result<f64> {
        let mut xs = x.to_vec();
        let mut ts = t;
        if idx == 0 {
            ts += d;
        } else {
            xs[idx - 1] += d;
        }
        f.eval(ts, &xs)
    };
    Ok((shift(h)? - shift(-h)?) / (2.0 * h))
}

/// `xi . grad f + eta` at `(t, x)`, with `u := f(t, x)` in the coefficients.
/// Derivatives by central differences with one Richardson step.
pub fn apply(v: &VectorField, f: &Field, t: f64, x: &[f64]) -> Result<f64> {
    if v.n != f.n() || x.len() != v.n {
        return Err(Error::ArityMismatch { expected: v.n, found: if x.len() != v.n { x.len() } else { f.n() } });
    }
    let u = f.eval(t, x)?;
    let mut acc = v.eta.eval_txu(t, x, u)?;
    for (idx, c) in std::iter::once(&v.xi_t).chain(v.xi.iter()).enumerate() {
        if c.is_zero() {
            continue;
        }
        let h = APPLY_STEP;
        let d = (4.0 * central(f, t, x, idx, h / 2.0)? - central(f, t, x, idx, h)?) / 3.0;
        acc += c.eval_txu(t, x, u)? * d;
    }
    Ok(acc)
}

/// Coefficient of `d_var` in a vector field, for inspection.
pub fn coefficient(v: &VectorField, var: Var) -> Result<&MultiPoly> {
    let idx = var.index(v.n)?;
    Ok(v.components().nth(idx).expect("index in range"))
}

/// Float value of a rational, used when moving between exact and numeric layers.
pub fn to_f64(q: &Rational) -> f64 {
    rational_to_f64(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_poly::rat;
    use crate::repn::CharacterParams;

    fn g(key: &str, n: usize, m: &Rational) -> VectorField {
        generator(key.parse().unwrap(), n, m).unwrap()
    }

    #[test]
    fn generator_examples() {
        let m = rat(3, 1);
        let x1 = g("X1", 2, &m);
        assert_eq!(*x1.xi_t(), MultiPoly::one(2));
        assert!(x1.eta().is_zero());
        let x2 = g("X2", 1, &m);
        assert_eq!(*x2.eta(), MultiPoly::u(1));
        let m = rat(-1, 3);
        let w = g("W1", 1, &m);
        assert_eq!(w.xi()[0], &MultiPoly::x(1, 1) * &MultiPoly::x(1, 1));
        assert_eq!(*w.eta(), (&MultiPoly::x(1, 1) * &MultiPoly::u(1)).scale(&rat(-3, 1)));
        assert!(generator(GenKey::W(1), 2, &rat(3, 1)).is_err());
        assert!(generator(GenKey::W(1), 2, &rat(0, 1)).is_err());
        assert!(generator(GenKey::Y(3), 2, &rat(3, 1)).is_err());
    }

    #[test]
    fn bracket_examples() {
        let m = rat(3, 1);
        let x1 = g("X1", 2, &m);
        let x3 = g("X3", 2, &m);
        assert!(x1.bracket(&x1).unwrap().is_zero());
        assert_eq!(x1.bracket(&x3).unwrap(), x1.scale(&rat(-1, 1)));
        let z = g("Z1,2", 2, &m);
        let y1 = g("Y1", 2, &m);
        let y2 = g("Y2", 2, &m);
        assert_eq!(z.bracket(&y1).unwrap(), y2.scale(&rat(-1, 1)));
        assert!(x1.bracket(&g("X1", 1, &m)).is_err());
    }

    #[test]
    fn antisymmetry_and_jacobi() {
        let m = rat(1, 5);
        let n = 3;
        let gens: Vec<VectorField> = generator_keys(n, &m).into_iter().map(|k| generator(k, n, &m).unwrap()).collect();
        for a in &gens {
            for b in &gens {
                let ab = a.bracket(b).unwrap();
                let ba = b.bracket(a).unwrap();
                assert!(ab.try_add(&ba).unwrap().is_zero());
            }
        }
        for a in gens.iter().step_by(2) {
            for b in gens.iter().skip(1).step_by(2) {
                for c in &gens {
                    let j1 = a.bracket(&b.bracket(c).unwrap()).unwrap();
                    let j2 = b.bracket(&c.bracket(a).unwrap()).unwrap();
                    let j3 = c.bracket(&a.bracket(b).unwrap()).unwrap();
                    assert!(j1.try_add(&j2).unwrap().try_add(&j3).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn iso_map_examples() {
        let m = rat(1, 5);
        let n = 3;
        let cartan = AlgebraElement::basis(n, BasisKey::Cartan).unwrap();
        assert_eq!(iso_map(&cartan, &m).unwrap(), g("X2", n, &m));
        let r = AlgebraElement::basis(n, BasisKey::Rot(1, 2)).unwrap();
        assert_eq!(iso_map(&r, &m).unwrap(), g("Z1,2", n, &m));
        assert!(iso_map(&AlgebraElement::zero(n), &m).unwrap().is_zero());
        let f = AlgebraElement::basis(n, BasisKey::SlF).unwrap();
        assert!(matches!(iso_map(&f, &m), Err(Error::OutsideSpan(_))));
        let nu = AlgebraElement::basis(2, BasisKey::NuMinus(1)).unwrap();
        assert!(matches!(iso_map(&nu, &rat(3, 1)), Err(Error::OutsideSpan(_))));
    }

    #[test]
    fn homomorphism_full_and_parabolic() {
        for (n, m) in [(1, rat(-1, 3)), (3, rat(1, 5)), (4, rat(1, 3))] {
            let rep = check_homomorphism(n, &m, CheckMode::Full).unwrap();
            assert!(rep.passed, "{n} {m}: {:?}", rep.failures);
            assert!(!rep.tabulated_correspondence.unwrap().failing_pairs.is_empty());
        }
        for (n, m) in [(2, rat(3, 1)), (1, rat(2, 1)), (3, rat(-1, 1))] {
            let rep = check_homomorphism(n, &m, CheckMode::Parabolic).unwrap();
            assert!(rep.passed, "{n} {m}: {:?}", rep.failures);
        }
        assert!(check_homomorphism(2, &rat(3, 1), CheckMode::Full).is_err());
        assert!(check_homomorphism(2, &rat(0, 1), CheckMode::Full).is_err());
    }

    #[test]
    fn tabulated_map_fails_on_x2_y() {
        let rep = check_homomorphism(1, &rat(-1, 3), CheckMode::Full).unwrap();
        let t = rep.tabulated_correspondence.unwrap();
        assert!(t.failing_pairs.iter().any(|p| p == "[H01, nu+1]" || p == "[H01, nu-1]"), "{:?}", t.failing_pairs);
    }

    #[test]
    fn apply_examples() {
        let m = rat(3, 1);
        let p = CharacterParams::symmetric(0, &m).unwrap();
        let f = Field::new(1, p, |t, _| Some(t * t));
        assert!((apply(&g("X1", 1, &m), &f, 1.0, &[0.3]).unwrap() - 2.0).abs() < 1e-8);
        let f = Field::new(1, p, |_, x| Some(x[0]));
        assert!((apply(&g("X2", 1, &m), &f, 0.0, &[2.0]).unwrap() - 4.0).abs() < 1e-8);
    }
}
