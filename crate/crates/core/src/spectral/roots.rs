use num::complex::Complex64;
use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{char_poly, SpectralError};
use crate::linalg::Matrix;
use crate::poly::RatPoly;
use crate::rational;

const MAX_ITERATIONS: usize = 2000;

/// Spectral radius with a certified enclosure `[lower, upper]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralRadius {
    pub rho: f64,
    pub error_bound: f64,
    pub lower: f64,
    pub upper: f64,
}

impl SpectralRadius {
    fn exact(rho: f64) -> Self {
        SpectralRadius {
            rho,
            error_bound: 0.0,
            lower: rho,
            upper: rho,
        }
    }
}

/// Maximum modulus of the eigenvalues of `m`, with `|rho - true| <= error_bound`.
/// The bound is at most `tol`, or at the f64 rounding floor if `tol` is tighter.
pub fn spectral_radius(m: &Matrix, tol: f64) -> Result<SpectralRadius, SpectralError> {
    let coeffs = char_poly(m)?;
    max_root_modulus(&RatPoly::new(coeffs), tol)
}

/// Maximum root modulus of a nonzero polynomial.
///
/// Zero roots are stripped and repeated factors removed exactly, so the
/// remaining roots are simple. They are approximated by simultaneous
/// (Aberth) iteration starting on the Cauchy bound circle and polished with
/// Newton steps. Inclusion disks `D(z_i, n |q(z_i)| / |prod_{j!=i}(z_i - z_j)|)`
/// then bracket every root: the union holds all roots and a connected
/// component of `k` disks holds exactly `k`. The bracket on the maximum
/// modulus is read off those components.
pub fn max_root_modulus(p: &RatPoly, tol: f64) -> Result<SpectralRadius, SpectralError> {
    if !(tol > 0.0) {
        return Err(SpectralError::InvalidTolerance(tol));
    }
    if p.is_zero() {
        return Err(SpectralError::ShapeMismatch("zero polynomial".into()));
    }
    let (_, rest) = p.strip_zero_roots();
    let q = rest.squarefree_part();
    let degree = q.degree().unwrap_or(0);
    if degree == 0 {
        return Ok(SpectralRadius::exact(0.0));
    }
    if degree == 1 {
        let root = -q.0[0].clone();
        let rho = rational::to_f64(&root.abs());
        let err = rho * f64::EPSILON;
        return Ok(SpectralRadius {
            rho,
            error_bound: err,
            lower: rho - err,
            upper: rho + err,
        });
    }

    let coeffs: Vec<f64> = q.0.iter().map(rational::to_f64).collect();
    let cauchy = 1.0
        + coeffs[..degree]
            .iter()
            .fold(0.0f64, |acc, c| acc.max(c.abs()));

    let mut roots = aberth(&coeffs, cauchy);
    for z in roots.iter_mut() {
        for _ in 0..3 {
            let (v, d) = eval_with_derivative(&coeffs, *z);
            if d.norm() == 0.0 {
                break;
            }
            let step = v / d;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *z -= step;
        }
    }

    let (radii, floor) = inclusion_radii(&coeffs, &roots);
    let upper = roots
        .iter()
        .zip(&radii)
        .map(|(z, r)| z.norm() + r)
        .fold(0.0f64, f64::max)
        .min(cauchy);
    let lower = component_lower_bound(&roots, &radii).max(0.0);
    if !lower.is_finite() || !upper.is_finite() || lower > upper {
        return Err(SpectralError::Nonconvergence { lower: 0.0, upper: cauchy });
    }
    let rho = 0.5 * (lower + upper);
    let error_bound = 0.5 * (upper - lower);
    // a bracket already at the rounding floor of f64 evaluation is accepted
    // even when `tol` asks for more than double precision can give
    if error_bound > tol.max(2.0 * floor) {
        return Err(SpectralError::Nonconvergence { lower, upper });
    }
    Ok(SpectralRadius {
        rho,
        error_bound,
        lower,
        upper,
    })
}

/// Monic coefficients, lowest degree first.
fn eval_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::zero();
    let mut d = Complex64::zero();
    for &c in coeffs.iter().rev() {
        d = d * z + v;
        v = v * z + c;
    }
    (v, d)
}

fn aberth(coeffs: &[f64], radius: f64) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    for _ in 0..MAX_ITERATIONS {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (v, d) = eval_with_derivative(coeffs, z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1e-300));
            }
        }
        if max_step < 4.0 * f64::EPSILON {
            break;
        }
    }
    z
}

/// Inclusion radii, and the largest radius the rounding term alone would give.
fn inclusion_radii(coeffs: &[f64], roots: &[Complex64]) -> (Vec<f64>, f64) {
    let n = roots.len();
    let u = f64::EPSILON;
    let mut floor = 0.0f64;
    let radii = roots
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let (v, _) = eval_with_derivative(coeffs, z);
            // Horner rounding plus rounding of the coefficients themselves
            let abs_sum: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.abs() * z.norm().powi(k as i32))
                .sum();
            let rounding = (2 * n + 4) as f64 * u * abs_sum;
            let residual = v.norm() + rounding;
            let denom: f64 = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, w)| (z - w).norm())
                .product();
            if denom == 0.0 {
                f64::INFINITY
            } else {
                floor = floor.max(n as f64 * rounding / denom);
                n as f64 * residual / denom * (1.0 + 1e-12)
            }
        })
        .collect();
    (radii, floor)
}

/// Every root in a component of overlapping disks has modulus at least the
/// smallest `|z| - r` over that component; the largest of these minima is a
/// lower bound for the maximum modulus.
fn component_lower_bound(roots: &[Complex64], radii: &[f64]) -> f64 {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    // label propagation until stable; n is small
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if i != j
                    && (roots[i] - roots[j]).norm() <= radii[i] + radii[j]
                    && label[j] < label[i]
                {
                    label[i] = label[j];
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut best = f64::NEG_INFINITY;
    for &l in &label {
        let min_in_comp = (0..n)
            .filter(|&j| label[j] == l)
            .map(|j| roots[j].norm() - radii[j])
            .fold(f64::INFINITY, f64::min);
        best = best.max(min_in_comp);
    }
    best
}
