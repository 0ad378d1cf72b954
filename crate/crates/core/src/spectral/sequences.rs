use num::complex::Complex64;
use num::Zero;
use serde::{Deserialize, Serialize};

use super::SpectralError;
use crate::linalg::Matrix;
use crate::rational::{self, Rational};

/// Exact rational traces are used while `dim <= EXACT_DIM_LIMIT` and
/// `m <= EXACT_POWER_LIMIT`; larger runs switch to scaled floating point.
pub const EXACT_DIM_LIMIT: usize = 64;
pub const EXACT_POWER_LIMIT: usize = 256;

/// One Gelfand estimate `||M^m||^{1/m}` at `m = 2^doublings`, norm = max
/// absolute row sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GelfandEstimate {
    pub doublings: u32,
    pub estimate: f64,
    /// Estimate after removing the accumulated floating point error bound.
    pub certified_lower: f64,
    pub overflow: bool,
}

/// Scaled dense float matrix: the represented value is `data * 2^exponent`.
#[derive(Clone, Debug)]
struct ScaledMatrix {
    n: usize,
    data: Vec<f64>,
    exponent: i64,
}

impl ScaledMatrix {
    fn from_rational(m: &Matrix) -> Self {
        ScaledMatrix {
            n: m.rows(),
            data: m.to_f64_rows().into_iter().flatten().collect(),
            exponent: 0,
        }
    }

    fn norm(&self) -> f64 {
        (0..self.n)
            .map(|r| self.data[r * self.n..(r + 1) * self.n].iter().map(|v| v.abs()).sum())
            .fold(0.0, f64::max)
    }

    fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    /// Rescales by a power of two so the norm lies in `[1, 2)`. Exact.
    /// Returns the shift applied to the exponent.
    fn normalize(&mut self) -> i64 {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return 0;
        }
        let shift = binary_exponent(norm);
        let factor = 2f64.powi(-shift as i32);
        for v in &mut self.data {
            *v *= factor;
        }
        self.exponent += shift;
        shift
    }

    fn mul(&self, other: &ScaledMatrix) -> ScaledMatrix {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == 0.0 {
                    continue;
                }
                for c in 0..n {
                    data[r * n + c] += a * other.data[k * n + c];
                }
            }
        }
        ScaledMatrix {
            n,
            data,
            exponent: self.exponent + other.exponent,
        }
    }

    fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == 0.0)
    }

    fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Unbiased binary exponent of a positive normal float.
fn binary_exponent(x: f64) -> i64 {
    ((x.to_bits() >> 52) & 0x7ff) as i64 - 1023
}

/// `||M^{2^k}||^{1/2^k}` for `k = 0..=doublings`, by repeated squaring with
/// power-of-two rescaling; the scale factors accumulate exactly in an integer
/// exponent.
///
/// Alongside each estimate an absolute error bound on the computed power is
/// propagated (`||fl(AB) - AB|| <= n u ||A|| ||B||` for the max row sum norm),
/// giving `certified_lower`, a value that provably does not exceed the exact
/// norm root.
pub fn gelfand_sequence(m: &Matrix, doublings: u32) -> Vec<GelfandEstimate> {
    assert!(m.is_square(), "Gelfand sequence of a non-square matrix");
    let n = m.rows();
    let u = f64::EPSILON / 2.0;
    let gamma = (n as f64 * u) / (1.0 - n as f64 * u);

    let mut cur = ScaledMatrix::from_rational(m);
    // bound on ||computed - exact|| in the current scaling
    let mut err = 2.0 * u * cur.norm();
    let mut out = Vec::with_capacity(doublings as usize + 1);
    let mut overflow = false;

    for k in 0..=doublings {
        let power = 2f64.powi(k as i32);
        if overflow || !cur.is_finite() {
            overflow = true;
            out.push(GelfandEstimate {
                doublings: k,
                estimate: f64::NAN,
                certified_lower: f64::NAN,
                overflow: true,
            });
            continue;
        }
        let norm = cur.norm();
        let log2 = cur.exponent as f64;
        let (estimate, certified_lower) = if cur.is_zero() {
            (0.0, 0.0)
        } else {
            let est = ((norm.ln() + log2 * std::f64::consts::LN_2) / power).exp();
            let low_norm = (norm - err).max(0.0);
            let low = if low_norm == 0.0 {
                0.0
            } else {
                ((low_norm.ln() + log2 * std::f64::consts::LN_2) / power).exp()
            };
            (est, low)
        };
        out.push(GelfandEstimate {
            doublings: k,
            estimate,
            certified_lower,
            overflow: false,
        });
        if k == doublings {
            break;
        }

        let shift = cur.normalize();
        err *= 2f64.powi(-shift as i32);
        if cur.exponent.checked_mul(2).is_none() {
            overflow = true;
            continue;
        }
        let c_norm = cur.norm();
        err = 2.0 * c_norm * err + err * err + gamma * c_norm * c_norm;
        cur = cur.mul(&cur);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub m: usize,
    /// Exact trace when computed in rational arithmetic.
    #[serde(skip)]
    pub exact: Option<Rational>,
    /// `|Tr(M^m)|^{1/m}`, with `|0|^{1/m} = 0`.
    pub root: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSequence {
    pub entries: Vec<TraceEntry>,
    /// Maximum of `root` over `m` in `[max_power/2, max_power]`.
    pub tail_max: f64,
    pub exact: bool,
}

/// `|Tr(M^m)|^{1/m}` for `m = 1..=max_power` and the tail-window maximum as a
/// finite stand-in for the limsup.
pub fn trace_sequence(m: &Matrix, max_power: usize) -> TraceSequence {
    assert!(m.is_square(), "trace sequence of a non-square matrix");
    assert!(max_power >= 1, "max_power must be at least 1");
    let exact = m.rows() <= EXACT_DIM_LIMIT && max_power <= EXACT_POWER_LIMIT;
    let mut entries = Vec::with_capacity(max_power);
    if exact {
        let mut p = m.clone();
        for k in 1..=max_power {
            let t = p.trace();
            entries.push(TraceEntry {
                m: k,
                root: rational::root_abs(&t, k),
                exact: Some(t),
            });
            if k < max_power {
                p = p.mul(m);
            }
        }
    } else {
        let base = ScaledMatrix::from_rational(m);
        let mut p = base.clone();
        for k in 1..=max_power {
            let t = p.trace();
            let root = if t == 0.0 || !t.is_finite() {
                0.0
            } else {
                ((t.abs().ln() + p.exponent as f64 * std::f64::consts::LN_2) / k as f64).exp()
            };
            entries.push(TraceEntry { m: k, exact: None, root });
            p.normalize();
            p = p.mul(&base);
        }
    }
    let start = max_power / 2;
    let tail_max = entries
        .iter()
        .filter(|e| e.m >= start)
        .map(|e| e.root)
        .fold(0.0, f64::max);
    TraceSequence {
        entries,
        tail_max,
        exact,
    }
}

/// Anything with a magnitude whose `m`-th root can be taken.
pub trait Magnitude {
    /// `ln |self|`, or `None` for zero.
    fn ln_abs(&self) -> Option<f64>;
}

impl Magnitude for Rational {
    fn ln_abs(&self) -> Option<f64> {
        rational::ln_abs(self)
    }
}

impl Magnitude for f64 {
    fn ln_abs(&self) -> Option<f64> {
        (*self != 0.0).then(|| self.abs().ln())
    }
}

impl Magnitude for Complex64 {
    fn ln_abs(&self) -> Option<f64> {
        (!self.is_zero()).then(|| self.norm().ln())
    }
}

/// Maximum of `|a_m|^{1/m}` over the last `window` terms, the sequence being
/// indexed from `m = 1`. Zero terms contribute 0.
pub fn limsup_root<T: Magnitude>(seq: &[T], window: usize) -> f64 {
    let len = seq.len();
    let window = window.clamp(1, len.max(1));
    seq.iter()
        .enumerate()
        .skip(len.saturating_sub(window))
        .map(|(i, a)| a.ln_abs().map_or(0.0, |l| (l / (i + 1) as f64).exp()))
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombinedBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Finite check of `limsup |Σ a_{m,i} b_i|^{1/m} <= max_i limsup |a_{m,i}|^{1/m}`.
///
/// The combination is divided by `Σ|b_i|` before taking roots. That constant
/// disappears in the limit, and with it the inequality holds term by term:
/// `|Σ a b| / Σ|b| <= max_i |a_i|`.
pub fn combined_limsup_bound(
    sequences: &[Vec<Complex64>],
    weights: &[Complex64],
    window: usize,
    tol: f64,
) -> Result<CombinedBound, SpectralError> {
    if sequences.len() != weights.len() || sequences.is_empty() {
        return Err(SpectralError::ShapeMismatch(format!(
            "{} sequences with {} weights",
            sequences.len(),
            weights.len()
        )));
    }
    if let Some(i) = weights.iter().position(|b| b.is_zero()) {
        return Err(SpectralError::ZeroWeight { index: i });
    }
    let len = sequences[0].len();
    if sequences.iter().any(|s| s.len() != len) {
        return Err(SpectralError::ShapeMismatch("sequences differ in length".into()));
    }
    let total_weight: f64 = weights.iter().map(|b| b.norm()).sum();
    let combined: Vec<Complex64> = (0..len)
        .map(|m| {
            sequences
                .iter()
                .zip(weights)
                .map(|(s, b)| s[m] * b)
                .sum::<Complex64>()
                / total_weight
        })
        .collect();
    let lhs = limsup_root(&combined, window);
    let rhs = sequences
        .iter()
        .map(|s| limsup_root(s, window))
        .fold(0.0, f64::max);
    Ok(CombinedBound {
        lhs,
        rhs,
        holds: lhs <= rhs + tol * rhs.max(1.0),
    })
}
