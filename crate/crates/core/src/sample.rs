//! Seeded random group elements, words and points.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matgroup::{
    make_h, make_m, make_n, make_nminus, make_rotation, make_sl2_lower, make_sl2_upper, plane_rotation, AlgebraElement,
    BasisKey, GroupElement,
};
use crate::pde::SymmetryStep;

pub type SampleRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut SampleRng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Product of a random plane rotation in every coordinate plane.
pub fn random_rotation_matrix(rng: &mut SampleRng, n: usize) -> DMatrix<f64> {
    let mut r = DMatrix::identity(n, n);
    for i in 1..=n {
        for j in i + 1..=n {
            let th = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            r *= plane_rotation(n, i, j, th).expect("valid axes");
        }
    }
    r
}

/// `n_{t,x} m_{j,B} h_{a,y} n^-_{t',x'}` with moderate random parameters.
pub fn random_cell_element(rng: &mut SampleRng, n: usize) -> GroupElement {
    let t = rng.gen_range(-2.0..2.0);
    let x = random_vec(rng, n, -1.5, 1.5);
    let j = rng.gen_range(0..2u8);
    let b = random_rotation_matrix(rng, n);
    let a = rng.gen_range(0.5..2.0);
    let y = rng.gen_range(-1.0..1.0);
    let tm = rng.gen_range(-1.0..1.0);
    let xm = random_vec(rng, n, -0.8, 0.8);
    let parts = [
        make_n(t, &x),
        make_m(j, &b).expect("rotation is orthogonal"),
        make_h(a, y, n).expect("a > 0"),
        make_nminus(tm, &xm),
    ];
    GroupElement::product(n, parts.iter()).expect("product of group elements")
}

/// One element from a random family of the catalogue.
pub fn random_catalogue_element(rng: &mut SampleRng, n: usize) -> GroupElement {
    match rng.gen_range(0..8) {
        0 => make_h(rng.gen_range(0.7..1.4), rng.gen_range(-0.5..0.5), n).expect("a > 0"),
        1 => make_m(rng.gen_range(0..2u8), &random_rotation_matrix(rng, n)).expect("rotation"),
        2 => make_n(rng.gen_range(-1.0..1.0), &random_vec(rng, n, -0.5, 0.5)),
        3 => make_nminus(rng.gen_range(-1.0..1.0), &random_vec(rng, n, -0.5, 0.5)),
        4 if n >= 2 => {
            let i = rng.gen_range(1..n);
            let j = rng.gen_range(i + 1..=n);
            make_rotation(n, i, j, rng.gen_range(-3.0..3.0)).expect("valid axes")
        }
        5 => make_sl2_upper(rng.gen_range(0.7..1.4) * sign(rng), rng.gen_range(-1.0..1.0), n).expect("a != 0"),
        6 => make_sl2_lower(rng.gen_range(-1.0..1.0), n),
        _ => {
            let keys = BasisKey::full(n);
            let key = keys[rng.gen_range(0..keys.len())];
            AlgebraElement::basis(n, key).and_then(|x| x.exp(rng.gen_range(-0.5..0.5))).expect("basis element")
        }
    }
}

fn sign(rng: &mut SampleRng) -> f64 {
    if rng.gen_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

pub fn random_word(rng: &mut SampleRng, n: usize, len: usize) -> Vec<GroupElement> {
    (0..len).map(|_| random_catalogue_element(rng, n)).collect()
}

/// Random combination of all basis elements with coefficients in `[-1, 1)`.
pub fn random_algebra_element(rng: &mut SampleRng, n: usize) -> AlgebraElement {
    BasisKey::full(n).into_iter().fold(AlgebraElement::zero(n), |acc, k| {
        let c = rng.gen_range(-1.0..1.0);
        acc.add(&AlgebraElement::basis(n, k).expect("valid key").scale(c)).expect("same n")
    })
}

/// Random word in the symmetry generators; conformal steps only when allowed.
pub fn random_symmetry_word(rng: &mut SampleRng, n: usize, len: usize, conformal: bool) -> Vec<SymmetryStep> {
    let kinds = if conformal { 5 } else { 4 };
    (0..len)
        .map(|_| match rng.gen_range(0..kinds) {
            0 => SymmetryStep::Sl2Upper { a: rng.gen_range(0.7..1.4) * sign(rng), b: rng.gen_range(-0.5..0.5) },
            1 if n >= 2 => {
                let i = rng.gen_range(1..n);
                let j = rng.gen_range(i + 1..=n);
                SymmetryStep::Rotation { i, j, theta: rng.gen_range(-0.5..0.5) }
            }
            1 | 2 => SymmetryStep::Translation { t: rng.gen_range(-0.3..0.3), x: random_vec(rng, n, -0.2, 0.2) },
            3 => SymmetryStep::Dilation { eps: rng.gen_range(-0.3..0.3) },
            _ => SymmetryStep::Conformal { i: rng.gen_range(1..=n), eps: rng.gen_range(-0.15..0.15) },
        })
        .collect()
}
