//! Three routes to the spectral radius of a rational matrix: the exact
//! characteristic polynomial, Gelfand norm doubling, and trace roots, plus
//! the limsup utilities used on intersection-number sequences.

mod charpoly;
mod roots;
mod sequences;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::rational::{self, Rational};

pub use charpoly::char_poly;
pub use roots::{max_root_modulus, spectral_radius, SpectralRadius};
pub use sequences::{
    combined_limsup_bound, gelfand_sequence, limsup_root, trace_sequence, CombinedBound,
    GelfandEstimate, Magnitude, TraceEntry, TraceSequence, EXACT_DIM_LIMIT, EXACT_POWER_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("root bracketing did not converge, best bracket [{lower}, {upper}]")]
    Nonconvergence { lower: f64, upper: f64 },
    #[error("weight {index} is zero")]
    ZeroWeight { index: usize },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
}

/// Everything the three routes say about one matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    /// Monic characteristic polynomial, lowest degree first, as `num/den` text.
    pub char_poly: Vec<String>,
    pub radius: SpectralRadius,
    pub gelfand: Vec<GelfandEstimate>,
    pub traces: TraceSequence,
    pub notes: Vec<String>,
}

impl SpectralReport {
    pub fn analyze(
        m: &Matrix,
        tol: f64,
        doublings: u32,
        max_power: usize,
    ) -> Result<Self, SpectralError> {
        let coeffs: Vec<Rational> = char_poly(m)?;
        let radius = max_root_modulus(&crate::poly::RatPoly::new(coeffs.clone()), tol)?;
        let gelfand = gelfand_sequence(m, doublings);
        let traces = trace_sequence(m, max_power.max(1));
        let mut notes = vec!["norm: max absolute row sum".to_string()];
        if !traces.exact {
            notes.push("traces computed in scaled floating point".to_string());
        }
        Ok(SpectralReport {
            char_poly: coeffs.iter().map(rational::format_rational).collect(),
            radius,
            gelfand,
            traces,
            notes,
        })
    }
}
