#![allow(dead_code)]

use std::sync::Arc;

use dyndeg::degrees::EmbeddedModel;
use dyndeg::endomorphism::PullbackMap;
use dyndeg::gromov::Realizability;
use dyndeg::linalg::{kronecker, Matrix};
use dyndeg::models::{
    abelian_variety, multiprojective, pn_power_map, product_map, projective_space, surface_lattice,
};
use dyndeg::rational::{int, Rational};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fib() -> Matrix {
    Matrix::from_i64_rows(&[&[1, 1], &[1, 0]])
}

/// H^1 action `A ⊗ I_2` on `E x E`.
pub fn exe_h1(a: &Matrix) -> Matrix {
    kronecker(a, &Matrix::identity(2))
}

pub fn random_int_matrix(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64) -> Matrix {
    let rows: Vec<Vec<Rational>> = (0..n)
        .map(|_| (0..n).map(|_| int(rng.gen_range(lo..=hi))).collect())
        .collect();
    Matrix::from_rows(rows).unwrap()
}

pub fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(-5i64..=5).into(), rng.gen_range(1i64..=3).into())
}

/// All permutations of `0..k` with `ns[i] == ns[σ(i)]`.
pub fn shape_permutations(ns: &[usize]) -> Vec<Vec<usize>> {
    fn go(ns: &[usize], prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let i = prefix.len();
        if i == ns.len() {
            out.push(prefix.clone());
            return;
        }
        for s in 0..ns.len() {
            if !prefix.contains(&s) && ns[s] == ns[i] {
                prefix.push(s);
                go(ns, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(ns, &mut Vec::new(), &mut out);
    out
}

pub struct Case {
    pub name: String,
    pub model: EmbeddedModel,
    pub map: PullbackMap,
}

/// Builder models with realizable maps.
pub fn builder_cases() -> Vec<Case> {
    let mut out = Vec::new();
    for n in 1..=3 {
        let p = projective_space(n).unwrap();
        for d in [0, 2, 3] {
            out.push(Case {
                name: format!("P^{n} d={d}"),
                map: pn_power_map(&p, d).unwrap(),
                model: p.clone(),
            });
        }
    }
    for (ns, d, perm) in [
        (vec![1, 1], vec![2, 3], vec![1, 0]),
        (vec![1, 2], vec![3, 2], vec![0, 1]),
        (vec![1, 1, 1], vec![2, 1, 3], vec![1, 2, 0]),
    ] {
        let m = multiprojective(&ns).unwrap();
        out.push(Case {
            name: format!("{ns:?} d={d:?} perm={perm:?}"),
            map: product_map(&m, &d, &perm).unwrap(),
            model: m,
        });
    }
    for (name, a) in [
        ("ExE fibonacci", fib()),
        ("ExE rotation", Matrix::from_i64_rows(&[&[0, -1], &[1, 0]])),
        ("ExE shear", Matrix::from_i64_rows(&[&[1, 1], &[0, 1]])),
    ] {
        let (model, map) = abelian_variety(2, &exe_h1(&a), None, Realizability::builder("abelian_variety")).unwrap();
        out.push(Case { name: name.into(), model, map });
    }
    let (model, map) = abelian_variety(1, &Matrix::scalar(2, int(2)), None, Realizability::builder("abelian_variety")).unwrap();
    out.push(Case { name: "E mult 2".into(), model, map });
    let (model, map) = surface_lattice(
        &Matrix::from_i64_rows(&[&[1, 0], &[0, -2]]),
        &Matrix::from_i64_rows(&[&[3, 4], &[2, 3]]),
        &[int(1), int(0)],
    )
    .unwrap();
    out.push(Case { name: "lattice pell".into(), model, map });
    out
}

pub fn identity_on(model: &EmbeddedModel) -> PullbackMap {
    PullbackMap::identity(Arc::clone(model.algebra()))
}
