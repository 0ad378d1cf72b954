//! Univariate polynomials, coefficients stored lowest degree first.

use num::{BigInt, Integer, One, Zero};

use crate::rational::Rational;

/// Polynomial over the integers; only what fraction-free elimination needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly(pub Vec<BigInt>);

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly(Vec::new())
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly(vec![c]).trimmed()
    }

    /// `x - c`
    pub fn monic_linear(c: BigInt) -> Self {
        IntPoly(vec![-c, BigInt::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly(out).trimmed()
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let n = self.0.len().max(other.0.len());
        let out = (0..n)
            .map(|i| {
                let a = self.0.get(i).cloned().unwrap_or_default();
                let b = other.0.get(i).cloned().unwrap_or_default();
                a - b
            })
            .collect();
        IntPoly(out).trimmed()
    }

    /// Exact quotient `self / divisor`; panics when the division is not exact.
    pub fn div_exact(&self, divisor: &IntPoly) -> IntPoly {
        let dlen = divisor.0.len();
        assert!(dlen > 0, "division by the zero polynomial");
        if self.is_zero() {
            return IntPoly::zero();
        }
        let lead = divisor.0.last().unwrap();
        let mut rem = self.0.clone();
        if rem.len() < dlen {
            panic!("inexact polynomial division");
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dlen + 1];
        for shift in (0..quot.len()).rev() {
            let top = &rem[shift + dlen - 1];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(lead);
            assert!(r.is_zero(), "inexact polynomial division");
            for (i, d) in divisor.0.iter().enumerate() {
                rem[shift + i] -= &q * d;
            }
            quot[shift] = q;
        }
        assert!(rem.iter().all(Zero::is_zero), "inexact polynomial division");
        IntPoly(quot).trimmed()
    }
}

/// Polynomial over the rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly(pub Vec<Rational>);

impl RatPoly {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        RatPoly(coeffs).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn monic(&self) -> RatPoly {
        match self.0.last() {
            None => self.clone(),
            Some(lead) => RatPoly(self.0.iter().map(|c| c / lead).collect()),
        }
    }

    pub fn derivative(&self) -> RatPoly {
        RatPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn div_rem(&self, divisor: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dlen = divisor.0.len();
        if self.0.len() < dlen {
            return (RatPoly(Vec::new()), self.clone());
        }
        let lead = divisor.0.last().unwrap();
        let mut rem = self.0.clone();
        let mut quot = vec![Rational::zero(); rem.len() - dlen + 1];
        for shift in (0..quot.len()).rev() {
            let top = &rem[shift + dlen - 1];
            if top.is_zero() {
                continue;
            }
            let q = top / lead;
            for (i, d) in divisor.0.iter().enumerate() {
                rem[shift + i] -= &q * d;
            }
            quot[shift] = q;
        }
        (RatPoly::new(quot), RatPoly::new(rem))
    }

    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Product of the distinct irreducible factors, made monic.
    pub fn squarefree_part(&self) -> RatPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Strips the factor `x^k` and returns `(k, rest)`.
    pub fn strip_zero_roots(&self) -> (usize, RatPoly) {
        let k = self.0.iter().take_while(|c| c.is_zero()).count();
        (k, RatPoly(self.0[k..].to_vec()))
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }
}
