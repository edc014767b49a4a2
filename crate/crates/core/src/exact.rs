//! Exact rational exponents and threshold arithmetic. Acceptance-critical
//! comparisons never go through floating point.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Signed;

use crate::error::{Error, Result};

/// A rational exponent `num/den` in `[0, 1]`, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Beta {
    num: u32,
    den: u32,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Beta {
    pub const HALF: Beta = Beta { num: 1, den: 2 };

    pub fn new(num: u32, den: u32) -> Result<Beta> {
        if den == 0 || num > den {
            return Err(Error::InvalidParameter(format!(
                "exponent {num}/{den} must be a rational in [0, 1]"
            )));
        }
        let g = gcd(num, den).max(1);
        Ok(Beta {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(self) -> u32 {
        self.num
    }

    pub fn den(self) -> u32 {
        self.den
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Beta {
    type Err = Error;

    /// Accepts `num/den` or a bare integer; decimal notation is rejected.
    fn from_str(s: &str) -> Result<Beta> {
        let bad = || Error::InvalidParameter(format!("exponent must look like num/den, got {s:?}"));
        let (num, den) = match s.trim().split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s.trim(), "1"),
        };
        let num = num.parse::<u32>().map_err(|_| bad())?;
        let den = den.parse::<u32>().map_err(|_| bad())?;
        Beta::new(num, den)
    }
}

pub fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

pub fn big_pow(v: u64, e: u32) -> BigUint {
    num_traits::pow(BigUint::from(v), e as usize)
}

/// Validates a positive finite real constant and returns it exactly.
pub fn exact_positive(k: f64) -> Result<BigRational> {
    let r = BigRational::from_float(k)
        .filter(|r| r.is_positive())
        .ok_or_else(|| {
            Error::InvalidParameter(format!("constant {k} must be positive and finite"))
        })?;
    Ok(r)
}

/// `ceil(k * q^beta)`, computed by integer root-and-compare on the exact
/// binary value of `k`.
pub fn ceil_scaled_power(k: f64, q: u64, beta: Beta) -> Result<u64> {
    let kr = exact_positive(k)?;
    let kn = kr.numer().to_biguint().expect("positive");
    let kd = kr.denom().to_biguint().expect("positive");
    let den = beta.den();
    let rhs = num_traits::pow(kn, den as usize) * big_pow(q, beta.num());
    let kd_pow = num_traits::pow(kd, den as usize);
    let holds = |c: u64| big_pow(c, den) * &kd_pow >= rhs;
    let estimate = (k * (q as f64).powf(beta.as_f64())).ceil();
    if !estimate.is_finite() || estimate > 1e15 {
        return Err(Error::UnsupportedScale(format!(
            "threshold {estimate} is too large"
        )));
    }
    let mut c = estimate.max(0.0) as u64;
    while !holds(c) {
        c += 1;
    }
    while c > 0 && holds(c - 1) {
        c -= 1;
    }
    Ok(c)
}

/// `ceil(sqrt(n))` without floating point.
pub fn ceil_sqrt(n: u64) -> u64 {
    let mut s = (n as f64).sqrt() as u64;
    while s * s < n {
        s += 1;
    }
    while s > 0 && (s - 1) * (s - 1) >= n {
        s -= 1;
    }
    s
}
