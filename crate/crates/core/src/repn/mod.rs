//! The non-compact picture of the induced representation: characters of the
//! minimal parabolic, fields on N and the actions of G on them, closed-form
//! induced sections, and restriction to K.

mod field;
mod infinitesimal;
mod section;

pub use field::{
    act_conformal, act_dilation, act_generic, act_rotation, act_sl2_lower, act_sl2_upper, act_translation, Field,
    Transform,
};
pub use infinitesimal::{flow_derivative, infinitesimal_error, one_parameter_transform, InfinitesimalCheck, FLOW_STEP};
pub use section::{
    compact_lift, compact_lift_with, compact_restrict, stationary_1d_bases_exact, stationary_phi_1d, stationary_phi_2d, CompactPoint,
    FieldSection, InducedSection, StationarySection1d, StationarySection2d,
};

use serde::{Deserialize, Serialize};

use crate::decomp::{is_in_a, is_in_m, is_in_nminus};
use crate::error::{Error, Result};
use crate::exact_poly::{rational_to_f64, Rational};
use crate::matgroup::GroupElement;

/// Parameters `(p, r, s)` of the character `chi_{p,r,s}` of the minimal parabolic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacterParams {
    pub p: u8,
    pub r: f64,
    pub s: f64,
}

impl CharacterParams {
    pub fn new(p: u8, r: f64, s: f64) -> Result<Self> {
        if p > 1 {
            return Err(Error::InvalidParameter(format!("parity p must be 0 or 1, got {p}")));
        }
        if !r.is_finite() || !s.is_finite() {
            return Err(Error::InvalidParameter("r and s must be finite".into()));
        }
        Ok(CharacterParams { p, r, s })
    }

    /// `r = s = 2/(m-1)`, the instance attached to the porous medium equation.
    pub fn symmetric(p: u8, m: &Rational) -> Result<Self> {
        let e = rational_to_f64(&(Rational::from_integer(2.into()) / (m - Rational::from_integer(1.into()))));
        Self::new(p, e, e)
    }

    /// `(-1)^{jp} a^r e^{sy}`.
    pub fn value(&self, j: u8, a: f64, y: f64) -> f64 {
        let sign = if j * self.p % 2 == 1 { -1.0 } else { 1.0 };
        sign * a.powf(self.r) * (self.s * y).exp()
    }
}

/// `chi(m a n^-)`; each factor must lie in its subgroup.
pub fn char_eval(
    params: &CharacterParams,
    m_part: &GroupElement,
    a_part: &GroupElement,
    nminus_part: &GroupElement,
) -> Result<f64> {
    if !is_in_m(m_part) {
        return Err(Error::NotInSubgroup("M"));
    }
    if !is_in_a(a_part) {
        return Err(Error::NotInSubgroup("A"));
    }
    if !is_in_nminus(nminus_part) {
        return Err(Error::NotInSubgroup("N^-"));
    }
    let n = a_part.n();
    let j = if m_part.sl2()[(0, 0)] < 0.0 { 1 } else { 0 };
    let a = a_part.sl2()[(0, 0)];
    let y = a_part.lorentz()[(n, n + 1)].asinh();
    Ok(params.value(j, a, y))
}
