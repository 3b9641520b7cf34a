//! Exact rational helpers shared by every module.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number. Every mass, density and enclosure endpoint uses it.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

/// `2^{-k}`
pub fn dyadic(k: usize) -> Rat {
    Rat::new(BigInt::one(), BigInt::one() << k)
}

/// `num / 2^k`
pub fn dyadic_frac(num: &BigInt, k: usize) -> Rat {
    Rat::new(num.clone(), BigInt::one() << k)
}

pub fn pow(base: &Rat, exp: usize) -> Rat {
    // A reduced fraction stays reduced under powers, so skip the gcd.
    let e = u32::try_from(exp).expect("exponent fits in u32");
    Rat::new_raw(base.numer().pow(e), base.denom().pow(e))
}

pub fn is_positive(r: &Rat) -> bool {
    r.is_positive()
}

/// Parses `p/q`, `p` or a finite decimal such as `0.25`.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let s = s.trim();
    let bad = || ParseRatError(s.to_string());
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches('-'), frac);
        let n = BigInt::from_str(&digits).map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rat::new(n, den);
        return Ok(if neg { -r } else { r });
    }
    BigInt::from_str(s).map(Rat::from_integer).map_err(|_| bad())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational `{0}`")]
pub struct ParseRatError(pub String);

/// Formats a rational as `p/q`, always with an explicit denominator.
pub struct Frac<'a>(pub &'a Rat);

impl fmt::Display for Frac<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

pub fn frac(r: &Rat) -> String {
    Frac(r).to_string()
}

/// Lossy conversion, only used for human-facing summaries.
pub fn to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
