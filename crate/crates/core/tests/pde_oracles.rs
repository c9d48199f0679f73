//! Independent oracles for separable and stationary solutions.

use pme_core::exact_poly::{rat, MultiPoly};
use pme_core::pde::{
    harmonic_basis, profile_residual, residual, separable_solution, stationary_solution, PmeInstance, SampleSpec,
};
use pme_core::repn::Field;

/// `G = F^m` solves `G'' = -G^{1/m}`, `G(0) = 1`, `G'(0) = 0`; RK4 with a fixed
/// step count so the result is smooth in `x`.
fn shoot(m: f64, x: f64) -> Option<f64> {
    let steps = 400;
    let h = x / steps as f64;
    let rhs = |g: f64| if g > 0.0 { Some(-g.powf(1.0 / m)) } else { None };
    let (mut g, mut v) = (1.0_f64, 0.0_f64);
    for _ in 0..steps {
        let k1 = (v, rhs(g)?);
        let k2 = (v + 0.5 * h * k1.1, rhs(g + 0.5 * h * k1.0)?);
        let k3 = (v + 0.5 * h * k2.1, rhs(g + 0.5 * h * k2.0)?);
        let k4 = (v + h * k3.1, rhs(g + h * k3.0)?);
        g += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        v += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    (g > 0.0).then(|| g.powf(1.0 / m))
}

fn spec(t: (f64, f64), x: (f64, f64)) -> SampleSpec {
    SampleSpec { t, x: vec![x], count: 60, h: 1e-3, seed: 11 }
}

#[test]
fn separable_from_shooting_profile() {
    for (m, t0, t) in [(rat(3, 1), 0.0, (0.5, 1.5)), (rat(1, 2), 2.0, (0.0, 1.0)), (rat(2, 1), -1.0, (0.0, 1.0))] {
        let inst = PmeInstance::new(1, m.clone()).unwrap();
        let mf = inst.m_f64();
        let profile = Field::new(1, inst.params(0).unwrap(), move |_, x| shoot(mf, x[0]));
        let pr = profile_residual(&profile, &inst, &spec(t, (0.1, 0.9))).unwrap();
        assert!(pr.max_abs < 1e-6, "m = {m}: profile {}", pr.max_abs);
        let u = separable_solution(&profile, t0, &inst).unwrap();
        // time stencil error h^2/6 u_ttt dominates near the start of the interval
        let r = residual(&u, &inst, &spec(t, (0.1, 0.9))).unwrap();
        assert!(r.max_abs < 1e-5, "m = {m}: separable {}", r.max_abs);
        let coarse = residual(&u, &inst, &SampleSpec { h: 2e-2, ..spec(t, (0.1, 0.9)) }).unwrap().max_abs;
        let fine = residual(&u, &inst, &SampleSpec { h: 1e-2, ..spec(t, (0.1, 0.9)) }).unwrap().max_abs;
        assert!((3.0..5.0).contains(&(coarse / fine)), "m = {m}: ratio {}", coarse / fine);
        // off the time domain the solution is undefined
        assert!(u.eval(t0 - (mf - 1.0).signum(), &[0.5]).is_err());
    }
}

#[test]
fn profile_mismatch_is_detected() {
    let inst = PmeInstance::new(1, rat(3, 1)).unwrap();
    let profile = Field::new(1, inst.params(0).unwrap(), |_, x| shoot(2.0, x[0]));
    let pr = profile_residual(&profile, &inst, &spec((0.0, 1.0), (0.1, 0.9))).unwrap();
    assert!(pr.max_abs > 1e-3);
}

#[test]
fn stationary_oracle_values() {
    // k = x1^2 - x2^2 + 3 in the plane, m = 1/2: u = k^2
    let inst = PmeInstance::new(2, rat(1, 2)).unwrap();
    let x1 = MultiPoly::x(2, 1);
    let x2 = MultiPoly::x(2, 2);
    let k = &(&(&x1 * &x1) - &(&x2 * &x2)) + &MultiPoly::constant(2, rat(3, 1));
    let u = stationary_solution(&k, &inst).unwrap();
    let v = u.eval(0.7, &[0.5, 1.5]).unwrap();
    assert!((v - 1.0).abs() < 1e-12);
    let spec = SampleSpec { t: (0.0, 1.0), x: vec![(-1.0, 1.0), (-1.0, 1.0)], count: 80, h: 1e-3, seed: 2 };
    assert!(residual(&u, &inst, &spec).unwrap().max_abs < 1e-6);
}

#[test]
fn nonsolution_has_large_residual() {
    let inst = PmeInstance::new(1, rat(3, 1)).unwrap();
    let f = Field::new(1, inst.params(0).unwrap(), |_, x| Some(x[0] * x[0] + 1.0));
    // (u^3)'' = 6(x^2+1)(5x^2+1) while u_t = 0
    let r = residual(&f, &inst, &spec((0.0, 1.0), (0.0, 1.0))).unwrap();
    assert!(r.max_abs > 1.0);
}

#[test]
fn harmonic_basis_spans_known_polynomials() {
    let b = harmonic_basis(3, 2);
    assert_eq!(b.len(), 5);
    // x1 x2 x3 has no partner monomial under the Laplacian, so it is a basis vector itself
    let target = &(&MultiPoly::x(3, 1) * &MultiPoly::x(3, 2)) * &MultiPoly::x(3, 3);
    let b3 = harmonic_basis(3, 3);
    assert!(b3.contains(&target));
}
