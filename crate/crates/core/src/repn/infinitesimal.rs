use serde::Serialize;

use super::{Field, Transform};
use crate::error::Result;
use crate::exact_poly::rational_from_f64;
use crate::matgroup::BasisKey;
use crate::vecfields::{apply, flow_operator};

/// Default flow step; the Richardson pair uses `eps` and `eps / 2`.
pub const FLOW_STEP: f64 = 1e-3;

/// `exp(eps X)` for a catalogue basis element, as a closed-form transform.
pub fn one_parameter_transform(key: BasisKey, eps: f64, n: usize) -> Result<Transform> {
    key.validate(n)?;
    Ok(match key {
        BasisKey::SlE => Transform::Sl2Upper { a: 1.0, b: eps },
        BasisKey::SlH => Transform::Sl2Upper { a: eps.exp(), b: 0.0 },
        BasisKey::SlF => Transform::Sl2Lower { c: eps },
        BasisKey::Cartan => Transform::Dilation { eps: -eps },
        BasisKey::NuPlus(i) => {
            let mut x = vec![0.0; n];
            x[i - 1] = eps;
            Transform::Translation { t: 0.0, x }
        }
        BasisKey::NuMinus(i) => Transform::Conformal { i, eps },
        BasisKey::Rot(i, j) => Transform::Rotation { i, j, theta: eps },
    })
}

/// `d/d eps (exp(eps X).f)(t, x)` at 0: central differences in eps with one Richardson step.
pub fn flow_derivative(key: BasisKey, f: &Field, t: f64, x: &[f64], eps: f64) -> Result<f64> {
    let n = f.n();
    let at = |e: f64| -> Result<f64> { f.act(one_parameter_transform(key, e, n)?)?.eval(t, x) };
    let d = |e: f64| -> Result<f64> { Ok((at(e)? - at(-e)?) / (2.0 * e)) };
    Ok((4.0 * d(eps / 2.0)? - d(eps)?) / 3.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct InfinitesimalCheck {
    pub family: String,
    pub flow: f64,
    pub operator: f64,
    pub error: f64,
}

/// Flow derivative against the flow operator applied to `f`.
pub fn infinitesimal_error(key: BasisKey, f: &Field, t: f64, x: &[f64]) -> Result<InfinitesimalCheck> {
    let p = f.params();
    let op = flow_operator(key, f.n(), &rational_from_f64(p.r)?, &rational_from_f64(p.s)?)?;
    let flow = flow_derivative(key, f, t, x, FLOW_STEP)?;
    let operator = apply(&op, f, t, x)?;
    Ok(InfinitesimalCheck { family: key.to_string(), flow, operator, error: (flow - operator).abs() })
}
