//! Acceptance checks. Each test is one criterion and prints a PASS/FAIL line
//! with details.

mod common;

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use num::complex::Complex64;
use num::{BigInt, One, Signed, Zero};
use rand::Rng;

use common::*;
use dyndeg::algebra::{BasisIndex, Element};
use dyndeg::degrees::{
    bound_constant, check_intersection_bound, delta_table, moving_ledger, segre_graph_degree, EmbeddedModel,
};
use dyndeg::endomorphism::{MapError, PullbackMap};
use dyndeg::gromov::{gromov_closure, spectral_chain, spectral_chain_with, Realizability};
use dyndeg::linalg::Matrix;
use dyndeg::models::{
    abelian_variety, monomial_map, multiprojective, pn_power_map, pn_scalar_map, product_map, projective_space,
    surface_lattice,
};
use dyndeg::rational::{int, Rational};
use dyndeg::spectral::{combined_limsup_bound, gelfand_sequence, spectral_radius, trace_sequence};

const EQ_REL: f64 = 1e-6;
const CHAIN_REL: f64 = 1e-9;
const GELFAND_REL: f64 = 0.05;
const TRACE_REL: f64 = 0.10;
const LIMSUP_TOL: f64 = 1e-6;

// written straight to the stderr handle so the line survives output capture
fn report(name: &str, result: Result<String, String>) {
    let line = match &result {
        Ok(detail) => format!("[PRIMARY] {name}: PASS ({detail})\n"),
        Err(detail) => format!("[PRIMARY] {name}: FAIL ({detail})\n"),
    };
    let _ = std::io::stderr().write_all(line.as_bytes());
    if let Err(detail) = result {
        panic!("{name} failed: {detail}");
    }
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Checks `λ^Gr = max λ_i = max μ_j` from the recorded radii.
fn equality_gap(f: &PullbackMap, omega: &Element) -> Result<(f64, f64, f64), String> {
    let c = spectral_chain(f, omega, 1e-11).map_err(|e| e.to_string())?;
    Ok((c.lambda_gr.rho, c.max_lambda, c.max_mu))
}

#[test]
fn main_theorem_equality_on_builder_models() {
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut check = |name: String, f: &PullbackMap, omega: &Element| match equality_gap(f, omega) {
        Ok((gr, lam, mu)) => {
            checked += 1;
            if rel_gap(gr, mu) > EQ_REL || rel_gap(lam, mu) > EQ_REL {
                failures.push(format!("{name}: λGr={gr} maxλ={lam} maxμ={mu}"));
            }
        }
        Err(e) => failures.push(format!("{name}: {e}")),
    };

    for n in 1..=4 {
        let p = projective_space(n).unwrap();
        for d in 0..=3 {
            check(format!("P^{n} d={d}"), &pn_power_map(&p, d).unwrap(), p.h());
        }
    }
    for ns in [vec![1, 1], vec![1, 2], vec![2, 2], vec![1, 1, 1], vec![1, 1, 2]] {
        let m = multiprojective(&ns).unwrap();
        let k = ns.len();
        for perm in shape_permutations(&ns) {
            for code in 0..4usize.pow(k as u32) {
                let d: Vec<u64> = (0..k).map(|i| ((code / 4usize.pow(i as u32)) % 4) as u64).collect();
                check(format!("{ns:?} d={d:?} σ={perm:?}"), &product_map(&m, &d, &perm).unwrap(), m.h());
            }
        }
    }
    // every integer A with entries in [-2, 2], which includes the Fibonacci matrix
    let mut abelian = 0;
    for code in 0..625usize {
        let e: Vec<i64> = (0..4).map(|i| ((code / 5usize.pow(i)) % 5) as i64 - 2).collect();
        let a = Matrix::from_i64_rows(&[&[e[0], e[1]], &[e[2], e[3]]]);
        let (model, f) = abelian_variety(2, &exe_h1(&a), None, Realizability::builder("abelian_variety")).unwrap();
        check(format!("ExE A={e:?}"), &f, model.h());
        abelian += 1;
    }

    let (model, f) = abelian_variety(2, &exe_h1(&fib()), None, Realizability::builder("abelian_variety")).unwrap();
    let c = spectral_chain_with(&f, model.h(), 1e-11, model.realizability().clone(), model.mu_scope()).unwrap();
    let phi2 = 2.618_033_988_749_895;
    if (c.lambda_gr.rho - phi2).abs() > 1e-6 || (c.max_mu - phi2).abs() > 1e-6 || !c.equality_holds {
        failures.push(format!("fibonacci: λGr={} maxμ={}", c.lambda_gr.rho, c.max_mu));
    }

    let detail = format!("{checked} maps incl. {abelian} ExE samples; fibonacci λGr = {:.10}", c.lambda_gr.rho);
    report(
        "main theorem equality",
        if failures.is_empty() { Ok(detail) } else { Err(failures.join("; ")) },
    );
}

fn chain_violation(f: &PullbackMap, omega: &Element) -> Result<Option<String>, String> {
    let c = spectral_chain(f, omega, 1e-10).map_err(|e| e.to_string())?;
    let max_by = |rs: &[dyndeg::gromov::DegreeRadius]| {
        rs.iter()
            .map(|r| r.radius)
            .fold((0.0f64, 0.0f64), |(rho, err), r| (rho.max(r.rho), err.max(r.error_bound)))
    };
    let (lam, lam_err) = max_by(&c.lambda);
    let (mu, mu_err) = max_by(&c.mu);
    let gr = c.lambda_gr;
    let le = |a: f64, ea: f64, b: f64, eb: f64| a <= b + CHAIN_REL * b.max(1.0) + ea + eb;
    if le(gr.rho, gr.error_bound, lam, lam_err) && le(lam, lam_err, mu, mu_err) && c.chain_holds {
        Ok(None)
    } else {
        Ok(Some(format!("λGr={} maxλ={lam} maxμ={mu}", gr.rho)))
    }
}

#[test]
fn inequality_chain_on_random_valid_maps() {
    let mut rng = rng(0xC4A1);
    let mut maps: Vec<(String, PullbackMap, Element)> = Vec::new();

    for _ in 0..60 {
        let n = rng.gen_range(1..=4);
        let p = projective_space(n).unwrap();
        let c = random_rational(&mut rng);
        maps.push((format!("P^{n} x->{c}x"), pn_scalar_map(p.algebra(), n, &c).unwrap(), p.h().clone()));
    }
    let shapes = [vec![1, 1], vec![1, 2], vec![2, 2], vec![1, 1, 1]];
    for _ in 0..60 {
        let ns = &shapes[rng.gen_range(0..shapes.len())];
        let m = multiprojective(ns).unwrap();
        let perms = shape_permutations(ns);
        let perm = &perms[rng.gen_range(0..perms.len())];
        let coeffs: Vec<Rational> = ns.iter().map(|_| random_rational(&mut rng)).collect();
        let f = monomial_map(&m, &coeffs, perm).unwrap();
        // a random positive combination of the h_i as polarization
        let omega: Vec<Rational> = ns.iter().map(|_| int(rng.gen_range(1..=3))).collect();
        let omega = m.algebra().homogeneous(2, omega).unwrap();
        maps.push((format!("{ns:?} c={coeffs:?} σ={perm:?}"), f, omega));
    }
    for _ in 0..60 {
        let g = rng.gen_range(1..=2);
        let mat = random_int_matrix(&mut rng, 2 * g, -3, 3);
        let (model, f) = abelian_variety(g, &mat, None, Realizability::Unverified).unwrap();
        maps.push((format!("abelian g={g} M={:?}", mat.to_f64_rows()), f, model.h().clone()));
    }
    let gram = Matrix::from_i64_rows(&[&[1, 0], &[0, -2]]);
    let pell = Matrix::from_i64_rows(&[&[3, 4], &[2, 3]]);
    let pell_inv = Matrix::from_i64_rows(&[&[3, -4], &[-2, 3]]);
    for _ in 0..30 {
        let k = rng.gen_range(0..=4);
        let base = if rng.gen_bool(0.5) { &pell } else { &pell_inv };
        let mut iso = base.pow(k);
        if rng.gen_bool(0.5) {
            iso = iso.scale(&int(-1));
        }
        let (model, f) = surface_lattice(&gram, &iso, &[int(1), int(0)]).unwrap();
        // isometry plus an arbitrary rescaling of the point class is still a ring map
        let t = int(rng.gen_range(-3..=3));
        let mut blocks = f.blocks().to_vec();
        blocks[4] = Matrix::scalar(1, t.clone());
        blocks[2] = if t.is_zero() { Matrix::zeros(2, 2) } else { blocks[2].clone() };
        let f2 = PullbackMap::new(Arc::clone(model.algebra()), blocks).ok();
        maps.push((format!("lattice pell^{k}"), f, model.h().clone()));
        if let Some(f2) = f2 {
            maps.push((format!("lattice pell^{k} point x{t}"), f2, model.h().clone()));
        }
    }

    let mut failures = Vec::new();
    for (name, f, omega) in &maps {
        match chain_violation(f, omega) {
            Ok(None) => {}
            Ok(Some(msg)) => failures.push(format!("{name}: {msg}")),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    report(
        "inequality chain",
        if maps.len() >= 200 && failures.is_empty() {
            Ok(format!("{} valid maps, 0 violations", maps.len()))
        } else {
            Err(format!("{} maps; {}", maps.len(), failures.join("; ")))
        },
    );
}

#[test]
fn dynamical_degree_oracles() {
    let mut failures = Vec::new();
    let mut cells = 0;
    for n in 1..=3 {
        let p = projective_space(n).unwrap();
        for d in 0..=4u64 {
            let t = delta_table(&p, &pn_power_map(&p, d).unwrap(), 8).unwrap();
            for j in 0..=n {
                for m in 1..=8 {
                    cells += 1;
                    let expected = Rational::from_integer(num::pow(BigInt::from(d), j * m));
                    if t.get(j, m) != &expected {
                        failures.push(format!("P^{n} d={d} δ_{j}(f^{m}) = {}", t.get(j, m)));
                    }
                }
            }
        }
    }
    let q = multiprojective(&[1, 1]).unwrap();
    let f = product_map(&q, &[2, 3], &[1, 0]).unwrap();
    let t = delta_table(&q, &f, 4).unwrap();
    // (f^m)* ω . ω with f* = [[0,3],[2,0]] on (h1, h2) and ω = h1 + h2, h1.h2 = 1
    let l = Matrix::from_i64_rows(&[&[0, 3], &[2, 0]]);
    let mut oracle = Vec::new();
    for m in 1..=4 {
        let v = l.pow(m).mul_vec(&[int(1), int(1)]);
        oracle.push(&v[0] + &v[1]);
    }
    let expected = vec![int(5), int(12), int(30), int(72)];
    if t.row(1) != expected.as_slice() || oracle != expected {
        failures.push(format!("swap δ_1 = {:?}", t.row(1)));
    }
    report(
        "dynamical degree oracle",
        if failures.is_empty() {
            Ok(format!("{cells} P^n cells exact; swap δ_1 = 5, 12, 30, 72"))
        } else {
            Err(failures.join("; "))
        },
    );
}

#[test]
fn graph_class_segre_identity() {
    let mut failures = Vec::new();
    let mut checked = 0;
    for n in 1..=3 {
        let p = projective_space(n).unwrap();
        for d in 0..=4u64 {
            let f = pn_power_map(&p, d).unwrap();
            for m in 1..=5u64 {
                checked += 1;
                let s = segre_graph_degree(&p, &f, m).unwrap();
                let closed = num::pow(BigInt::one() + num::pow(BigInt::from(d), m as usize), n);
                if s.degree != Rational::from_integer(closed.clone()) || !s.consistent() {
                    failures.push(format!("P^{n} d={d} m={m}: {} vs {closed}", s.degree));
                }
            }
        }
    }
    report(
        "graph class / Segre identity",
        if failures.is_empty() { Ok(format!("{checked} cases exact")) } else { Err(failures.join("; ")) },
    );
}

fn all_builder_models() -> Vec<(String, EmbeddedModel)> {
    let mut out = Vec::new();
    for n in 1..=4 {
        out.push((format!("P^{n}"), projective_space(n).unwrap()));
    }
    for ns in [vec![1, 1], vec![1, 2], vec![2, 2], vec![1, 3], vec![1, 1, 1], vec![1, 1, 2]] {
        out.push((format!("{ns:?}"), multiprojective(&ns).unwrap()));
    }
    for g in 1..=3 {
        let (m, _) = abelian_variety(g, &Matrix::identity(2 * g), None, Realizability::Unverified).unwrap();
        out.push((format!("abelian g={g}"), m));
    }
    let (m, _) = surface_lattice(
        &Matrix::from_i64_rows(&[&[1, 0], &[0, -2]]),
        &Matrix::identity(2),
        &[int(1), int(0)],
    )
    .unwrap();
    out.push(("lattice x^2-2y^2".into(), m));
    let (m, _) = surface_lattice(
        &Matrix::from_i64_rows(&[&[0, 1], &[1, 0]]),
        &Matrix::identity(2),
        &[int(1), int(1)],
    )
    .unwrap();
    out.push(("lattice hyperbolic".into(), m));
    out
}

#[test]
fn intersection_bound_exhaustive() {
    let mut failures = Vec::new();
    let mut pairs = 0;
    let mut ledgers = 0;
    for (name, model) in all_builder_models() {
        let r = model.dim();
        let c = bound_constant(r, model.deg_x());
        let classes = model.effective_classes();
        for v in &classes {
            for w in &classes {
                if v.degree() + w.degree() != 2 * r {
                    continue;
                }
                pairs += 1;
                let verdict = check_intersection_bound(&model, v, w).unwrap();
                let expected_c = Rational::from_integer(BigInt::from(r + 2)) * num::pow(model.deg_x().clone(), r + 1);
                if !verdict.holds || verdict.constant != expected_c || verdict.pairing.abs() > verdict.bound {
                    failures.push(format!("{name}: |{}| > {}", verdict.pairing, verdict.bound));
                }
                let ledger = moving_ledger(model.deg_x(), &verdict.deg_v, &verdict.deg_w, r + 1, r).unwrap();
                ledgers += 1;
                if ledger.final_bound > &c * &verdict.deg_v * &verdict.deg_w {
                    failures.push(format!("{name}: ledger {} exceeds constant", ledger.final_bound));
                }
            }
        }
        // degree grid for the ledger alone
        for dv in 1..=4 {
            for dw in 1..=4 {
                ledgers += 1;
                let l = moving_ledger(model.deg_x(), &int(dv), &int(dw), r + 1, r).unwrap();
                if l.final_bound > &c * int(dv * dw) {
                    failures.push(format!("{name}: ledger grid ({dv},{dw})"));
                }
            }
        }
    }
    report(
        "intersection bound",
        if failures.is_empty() {
            Ok(format!("{pairs} effective pairs, {ledgers} ledgers, 0 violations"))
        } else {
            Err(failures.join("; "))
        },
    );
}

#[test]
fn estimator_convergence() {
    let mut failures = Vec::new();
    let (mut positive, mut nilpotent) = (0, 0);
    let mut worst = (0.0f64, 0.0f64);
    for case in builder_cases() {
        for (deg, block) in case.map.blocks().iter().enumerate() {
            if block.rows() == 0 {
                continue;
            }
            let rho = spectral_radius(block, 1e-12).unwrap().rho;
            let gelfand = gelfand_sequence(block, 10).last().copied().unwrap();
            let traces = trace_sequence(block, 64);
            if rho == 0.0 {
                nilpotent += 1;
                if gelfand.estimate != 0.0 || traces.tail_max != 0.0 {
                    failures.push(format!("{} degree {deg}: nilpotent gave {} / {}", case.name, gelfand.estimate, traces.tail_max));
                }
                continue;
            }
            positive += 1;
            let (g, t) = ((gelfand.estimate - rho).abs() / rho, (traces.tail_max - rho).abs() / rho);
            worst = (worst.0.max(g), worst.1.max(t));
            if g > GELFAND_REL || t > TRACE_REL {
                failures.push(format!("{} degree {deg}: ρ={rho} gelfand={} trace={}", case.name, gelfand.estimate, traces.tail_max));
            }
        }
    }
    report(
        "estimator convergence",
        if failures.is_empty() {
            Ok(format!(
                "{positive} blocks with ρ>0 (worst gelfand {:.4}, trace {:.4}), {nilpotent} nilpotent blocks exact 0",
                worst.0, worst.1
            ))
        } else {
            Err(failures.join("; "))
        },
    );
}

#[test]
fn combined_limsup_bound_property() {
    let mut rng = rng(0x11B5);
    let mut failures = 0;
    let len = 64;
    for _ in 0..1000 {
        let k = rng.gen_range(1..=4);
        let mut seqs = Vec::with_capacity(k);
        let mut weights = Vec::with_capacity(k);
        for _ in 0..k {
            let ratio = if rng.gen_bool(0.3) {
                Complex64::from_polar(rng.gen_range(0.1..3.0), rng.gen_range(0.0..std::f64::consts::TAU))
            } else {
                let r: f64 = rng.gen_range(0.1..3.0);
                Complex64::new(if rng.gen_bool(0.5) { -r } else { r }, 0.0)
            };
            let c = Complex64::new(rng.gen_range(-2.0..2.0), 0.0);
            seqs.push((1..=len).map(|m| c * ratio.powu(m as u32)).collect::<Vec<_>>());
            let b: f64 = rng.gen_range(0.1..5.0);
            weights.push(Complex64::new(if rng.gen_bool(0.5) { -b } else { b }, 0.0));
        }
        let v = combined_limsup_bound(&seqs, &weights, len / 2, LIMSUP_TOL).unwrap();
        if !v.holds {
            failures += 1;
        }
    }
    report(
        "combined limsup bound",
        if failures == 0 { Ok("1000 samples, all hold".into()) } else { Err(format!("{failures} of 1000 failed")) },
    );
}

// --- independent validity oracles for the mutation test

fn det(m: &[Vec<Rational>]) -> Rational {
    // Laplace expansion along the first row
    let n = m.len();
    if n == 0 {
        return Rational::one();
    }
    let mut acc = Rational::zero();
    for c in 0..n {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Rational>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = &m[0][c] * det(&minor);
        if c % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in k_subsets(n, k - 1) {
            if rest.iter().all(|&x| x > first) {
                let mut s = vec![first];
                s.extend(rest);
                out.push(s);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// On an exterior algebra a ring map is determined by degree 1: degree `k`
/// must hold the `k x k` minors of the degree-1 block.
fn exterior_oracle(blocks: &[Matrix]) -> bool {
    let b1 = &blocks[1];
    let n = b1.rows();
    (2..=n).all(|k| {
        let sets = k_subsets(n, k);
        sets.iter().enumerate().all(|(i, rs)| {
            sets.iter().enumerate().all(|(j, cs)| {
                let minor: Vec<Vec<Rational>> =
                    rs.iter().map(|&r| cs.iter().map(|&c| b1[(r, c)].clone()).collect()).collect();
                blocks[k][(i, j)] == det(&minor)
            })
        })
    })
}

fn pn_oracle(blocks: &[Matrix]) -> bool {
    let c = blocks[2][(0, 0)].clone();
    (1..blocks.len() / 2 + 1).all(|j| blocks[2 * j][(0, 0)] == num::pow(c.clone(), j))
}

type Poly = BTreeMap<Vec<usize>, Rational>;

fn poly_mul(a: &Poly, b: &Poly, ns: &[usize]) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<usize> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            if e.iter().zip(ns).any(|(x, n)| x > n) {
                continue;
            }
            *out.entry(e).or_insert_with(Rational::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Multiprojective ring: determined by the images of the `h_i`, which must
/// satisfy `h_i^{n_i+1} = 0`.
fn multiprojective_oracle(blocks: &[Matrix], ns: &[usize]) -> bool {
    let k = ns.len();
    let r: usize = ns.iter().sum();
    let mut by_degree: Vec<Vec<Vec<usize>>> = vec![Vec::new(); r + 1];
    let mut stack = vec![vec![]];
    while let Some(e) = stack.pop() {
        if e.len() == k {
            by_degree[e.iter().sum::<usize>()].push(e);
            continue;
        }
        for a in 0..=ns[e.len()] {
            let mut next = e.clone();
            next.push(a);
            stack.push(next);
        }
    }
    for g in &mut by_degree {
        g.sort_by(|a, b| b.cmp(a));
    }
    let images: Vec<Poly> = (0..k)
        .map(|i| {
            let mut p = Poly::new();
            for (row, mono) in by_degree[1].iter().enumerate() {
                let c = blocks[2][(row, i)].clone();
                if !c.is_zero() {
                    p.insert(mono.clone(), c);
                }
            }
            p
        })
        .collect();
    let one: Poly = [(vec![0; k], Rational::one())].into_iter().collect();
    let pow = |p: &Poly, e: usize| (0..e).fold(one.clone(), |acc, _| poly_mul(&acc, p, ns));
    if (0..k).any(|i| !pow(&images[i], ns[i] + 1).is_empty()) {
        return false;
    }
    for (deg, group) in by_degree.iter().enumerate() {
        for (col, mono) in group.iter().enumerate() {
            let img = (0..k).fold(one.clone(), |acc, i| poly_mul(&acc, &pow(&images[i], mono[i]), ns));
            for (row, target) in group.iter().enumerate() {
                let expected = img.get(target).cloned().unwrap_or_else(Rational::zero);
                if blocks[2 * deg][(row, col)] != expected {
                    return false;
                }
            }
        }
    }
    true
}

fn lattice_oracle(blocks: &[Matrix], gram: &Matrix) -> bool {
    let g = &blocks[2];
    let t = blocks[4][(0, 0)].clone();
    let n = gram.rows();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let mut s = Rational::zero();
            for a in 0..n {
                for b in 0..n {
                    s += &g[(a, i)] * &gram[(a, b)] * &g[(b, j)];
                }
            }
            s == &t * &gram[(i, j)]
        })
    })
}

/// Recomputes `f(e_a) f(e_b)` and `f(e_a e_b)` from raw blocks.
fn pair_really_fails(f_blocks: &[Matrix], model: &EmbeddedModel, a: BasisIndex, b: BasisIndex) -> bool {
    let alg = model.algebra();
    let image = |x: BasisIndex| {
        let col = f_blocks[x.degree].column(x.index);
        alg.homogeneous(x.degree, col).unwrap()
    };
    let lhs = alg.mul(&image(a), &image(b)).unwrap();
    let prod = alg.mul(&alg.basis_element(a), &alg.basis_element(b)).unwrap();
    let mut rhs = alg.zero();
    for (d, part) in prod.parts().iter().enumerate() {
        if part.is_empty() {
            continue;
        }
        let v = f_blocks[d].mul_vec(part);
        rhs = &rhs + &alg.homogeneous(d, v).unwrap();
    }
    lhs != rhs
}

#[test]
fn validation_soundness_mutation_fuzzing() {
    let mut rng = rng(0x5EED);
    let mut failures = Vec::new();
    let (mut mutants, mut rejected, mut accepted) = (0, 0, 0);

    for case in builder_cases() {
        if PullbackMap::new(Arc::clone(case.model.algebra()), case.map.blocks().to_vec()).is_err() {
            failures.push(format!("builder map {} rejected", case.name));
        }
    }

    type Oracle = Box<dyn Fn(&[Matrix]) -> bool>;
    let mut families: Vec<(String, EmbeddedModel, Vec<Matrix>, Oracle)> = Vec::new();
    for n in 1..=4 {
        let p = projective_space(n).unwrap();
        let f = pn_power_map(&p, 2).unwrap();
        families.push((format!("P^{n}"), p, f.blocks().to_vec(), Box::new(pn_oracle)));
    }
    for g in 1..=2 {
        let mat = random_int_matrix(&mut rng, 2 * g, -2, 2);
        let (model, f) = abelian_variety(g, &mat, None, Realizability::Unverified).unwrap();
        families.push((format!("abelian g={g}"), model, f.blocks().to_vec(), Box::new(exterior_oracle)));
    }
    for (ns, d, perm) in [(vec![1, 1], vec![2, 3], vec![1, 0]), (vec![1, 2], vec![2, 2], vec![0, 1])] {
        let m = multiprojective(&ns).unwrap();
        let f = product_map(&m, &d, &perm).unwrap();
        let ns2 = ns.clone();
        families.push((
            format!("{ns:?}"),
            m,
            f.blocks().to_vec(),
            Box::new(move |b: &[Matrix]| multiprojective_oracle(b, &ns2)),
        ));
    }
    let gram = Matrix::from_i64_rows(&[&[1, 0], &[0, -2]]);
    let (model, f) = surface_lattice(&gram, &Matrix::from_i64_rows(&[&[3, 4], &[2, 3]]), &[int(1), int(0)]).unwrap();
    families.push(("lattice".into(), model, f.blocks().to_vec(), Box::new(move |b: &[Matrix]| lattice_oracle(b, &gram))));

    for (name, model, blocks, oracle) in &families {
        if !oracle(blocks) {
            failures.push(format!("{name}: oracle rejects the unmutated map"));
        }
        let degrees: Vec<usize> = (1..blocks.len()).filter(|&d| blocks[d].rows() > 0).collect();
        for _ in 0..80 {
            let mut mutated = blocks.clone();
            let d = degrees[rng.gen_range(0..degrees.len())];
            let size = mutated[d].rows();
            let (r, c) = (rng.gen_range(0..size), rng.gen_range(0..size));
            let mut delta = 0;
            while delta == 0 {
                delta = rng.gen_range(-3..=3);
            }
            mutated[d][(r, c)] += int(delta);
            mutants += 1;
            let expected_valid = oracle(&mutated);
            match PullbackMap::new(Arc::clone(model.algebra()), mutated.clone()) {
                Ok(_) if expected_valid => accepted += 1,
                Ok(_) => failures.push(format!("{name}: invalid mutant of degree {d} accepted")),
                Err(MapError::MultiplicativityViolation { a, b }) if !expected_valid => {
                    if pair_really_fails(&mutated, model, a, b) {
                        rejected += 1;
                    } else {
                        failures.push(format!("{name}: named pair ({a}, {b}) does not fail"));
                    }
                }
                Err(e) => failures.push(format!("{name}: mutant (oracle valid = {expected_valid}) gave {e}")),
            }
        }
    }
    report(
        "validation soundness",
        if failures.is_empty() && mutants >= 500 {
            Ok(format!("{mutants} mutants: {rejected} rejected with a failing pair, {accepted} still valid and accepted"))
        } else {
            Err(format!("{mutants} mutants; {}", failures.join("; ")))
        },
    );
}

#[test]
fn closure_is_a_subalgebra_on_builder_models() {
    // sanity for the criteria above: every closure used is a genuine
    // f*-stable subalgebra with verifiable certificates
    for case in builder_cases() {
        let g = gromov_closure(&case.map, case.model.h()).unwrap();
        assert!(g.is_closed_under_products(), "{}", case.name);
        assert!(g.is_pullback_stable(), "{}", case.name);
        assert!(g.verify_certificates(), "{}", case.name);
        let id = identity_on(&case.model);
        let c = spectral_chain(&id, case.model.h(), 1e-9).unwrap();
        assert_eq!(c.lambda_gr.rho, 1.0, "{}", case.name);
    }
}
