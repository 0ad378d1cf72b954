//! Exact rational scalars and the few conversions the rest of the crate needs.

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used throughout the algebraic layer.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Natural log of `|n|` for arbitrarily large integers; `None` for zero.
pub fn ln_abs_int(n: &BigInt) -> Option<f64> {
    if n.is_zero() {
        return None;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().map(f64::ln);
    }
    // keep the top 64 bits, account for the shifted-out part in the exponent
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    let top = top.to_f64().unwrap_or(f64::MAX);
    Some(top.ln() + shift as f64 * std::f64::consts::LN_2)
}

/// Natural log of `|q|`; `None` for zero.
pub fn ln_abs(q: &Rational) -> Option<f64> {
    let n = ln_abs_int(q.numer())?;
    let d = ln_abs_int(q.denom())?;
    Some(n - d)
}

/// `|q|^{1/m}` evaluated through logarithms so huge values do not overflow.
/// The convention `|0|^{1/m} = 0` is used.
pub fn root_abs(q: &Rational, m: usize) -> f64 {
    match ln_abs(q) {
        None => 0.0,
        Some(l) => (l / m as f64).exp(),
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    match q.to_f64() {
        Some(v) if v.is_finite() => v,
        _ => match ln_abs(q) {
            None => 0.0,
            Some(l) => {
                let mag = l.exp();
                if q.numer().sign() == Sign::Minus {
                    -mag
                } else {
                    mag
                }
            }
        },
    }
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Parses `"7"`, `"-3/4"` or `"2.5"` style strings.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits: BigInt = format!("{whole}{frac}").parse().ok()?;
        let den = num::pow(BigInt::from(10), frac.len());
        return Some(Rational::new(digits, den));
    }
    let n: BigInt = s.parse().ok()?;
    Some(Rational::from_integer(n))
}

/// Canonical `num/den` text form.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Rounds to 12 significant digits; used wherever floats are reported.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_of_huge_integer_matches_bit_length() {
        let n = num::pow(BigInt::from(3), 2000);
        let l = ln_abs_int(&n).unwrap();
        assert!((l - 2000.0 * 3f64.ln()).abs() < 1e-9 * l);
    }

    #[test]
    fn root_abs_zero_convention() {
        assert_eq!(root_abs(&zero(), 5), 0.0);
        assert!((root_abs(&int(-32), 5) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("-3/6"), Some(ratio(-1, 2)));
        assert_eq!(parse_rational("2.50"), Some(ratio(5, 2)));
        assert_eq!(parse_rational("12"), Some(int(12)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(factorial(5), BigInt::from(120));
    }

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(2.618_033_988_749_895), 2.61803398875);
    }
}
