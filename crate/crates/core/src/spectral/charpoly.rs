use num::{BigInt, One, Zero};

use super::SpectralError;
use crate::linalg::Matrix;
use crate::poly::IntPoly;
use crate::rational::Rational;

/// Characteristic polynomial `det(xI - M)`, monic, coefficients lowest degree
/// first.
///
/// The matrix is cleared of denominators (`N = L*M` with integer entries) and
/// `det(yI - N)` is computed by Bareiss elimination over `Z[y]`. Every pivot is
/// a leading principal minor of `yI - N`, hence monic and never zero, so no
/// row exchanges are needed and every division is exact. The result is scaled
/// back with `det(xI - M) = L^{-n} det(LxI - N)`.
pub fn char_poly(m: &Matrix) -> Result<Vec<Rational>, SpectralError> {
    if !m.is_square() {
        return Err(SpectralError::ShapeMismatch(format!(
            "characteristic polynomial of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(vec![Rational::one()]);
    }
    let lcm = m.denominator_lcm();
    let scaled = m.scale(&Rational::from_integer(lcm.clone()));

    let mut a: Vec<Vec<IntPoly>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let v = scaled[(r, c)].numer().clone();
                    if r == c {
                        IntPoly::monic_linear(v)
                    } else {
                        IntPoly::constant(-v)
                    }
                })
                .collect()
        })
        .collect();

    let mut prev = IntPoly::constant(BigInt::one());
    for k in 0..n.saturating_sub(1) {
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[k][k].mul(&a[i][j]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = num.div_exact(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    let det = &a[n - 1][n - 1];
    debug_assert_eq!(det.degree(), Some(n));

    // coefficient of x^k is c_k / L^{n-k}
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let c = det.0.get(k).cloned().unwrap_or_else(BigInt::zero);
        let denom = num::pow(lcm.clone(), n - k);
        out.push(Rational::new(c, denom));
    }
    Ok(out)
}
