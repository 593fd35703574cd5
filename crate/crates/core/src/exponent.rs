//! Exact exponent bookkeeping for the prime geodesic error term.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `p/q` or an integer.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let parsed = match text.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {text:?}")))?;
            let q: BigInt = q.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {text:?}")))?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {text:?}")));
            }
            BigRational::new(p, q)
        }
        None => BigRational::from_integer(text.parse().map_err(|_| Error::Parse(format!("bad rational {text:?}")))?),
    };
    Ok(parsed)
}

/// `q` truncated (not rounded) to `digits` places, e.g. `1.5864978`.
pub fn decimal(q: &BigRational, digits: usize) -> String {
    let sign = if q.is_negative() { "-" } else { "" };
    let q = q.abs();
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (q.numer() * &scale).div_floor(q.denom());
    let (int, frac) = scaled.div_rem(&scale);
    if digits == 0 {
        return format!("{sign}{int}");
    }
    format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentInput {
    #[serde(with = "crate::kernel::rational_string")]
    pub theta: BigRational,
    #[serde(with = "crate::kernel::rational_string")]
    pub alpha: BigRational,
}

impl ExponentInput {
    pub fn new(theta: BigRational, alpha: BigRational) -> Result<Self> {
        if theta.is_negative() || theta > ratio(1, 4) {
            return Err(Error::Domain(format!("theta must lie in [0, 1/4], got {theta}")));
        }
        if !alpha.is_positive() {
            return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
        }
        Ok(ExponentInput { theta, alpha })
    }

    /// `theta = 1/6` with `alpha = 2 theta`.
    pub fn standard() -> Self {
        ExponentInput { theta: ratio(1, 6), alpha: ratio(1, 3) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentResult {
    #[serde(with = "crate::kernel::rational_string")]
    pub exponent: BigRational,
    #[serde(with = "crate::kernel::rational_string")]
    pub y_exponent: BigRational,
}

/// `3/2 + (alpha(2+16 theta) + 24 theta - 1)/(46 + 20 alpha)` with the balancing
/// `Y = X^{(10 alpha + 16(1 - theta))/(23 + 10 alpha)}`.
pub fn pgt_error_exponent(inp: &ExponentInput) -> ExponentResult {
    let (th, al) = (&inp.theta, &inp.alpha);
    let int = |n: i64| BigRational::from_integer(n.into());
    let num = al * (int(2) + int(16) * th) + int(24) * th - int(1);
    let den = int(46) + int(20) * al;
    let y_num = int(10) * al + int(16) * (int(1) - th);
    let y_den = int(23) + int(10) * al;
    ExponentResult { exponent: ratio(3, 2) + num / den, y_exponent: y_num / y_den }
}

/// `3/2 + 4 theta / 7`.
pub fn previous_exponent(theta: &BigRational) -> Result<BigRational> {
    if theta.is_negative() {
        return Err(Error::Domain(format!("theta must be non-negative, got {theta}")));
    }
    Ok(ratio(3, 2) + ratio(4, 7) * theta)
}

/// `3 + 4 theta`, the second-moment exponent; it supplies `alpha = 2 theta`.
pub fn second_moment_exponent_claim(theta: &BigRational) -> Result<BigRational> {
    if theta.is_negative() {
        return Err(Error::Domain(format!("theta must be non-negative, got {theta}")));
    }
    Ok(BigRational::from_integer(3.into()) + ratio(4, 1) * theta)
}

/// The earlier second-moment exponent, `4`.
pub fn prior_second_moment_exponent() -> BigRational {
    BigRational::from_integer(4.into())
}

/// `alpha` implied by a second-moment exponent `3 + 2 alpha`.
pub fn alpha_from_second_moment(exponent: &BigRational) -> BigRational {
    (exponent - BigRational::from_integer(3.into())) / BigRational::from_integer(2.into())
}
