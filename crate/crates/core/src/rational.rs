//! Helpers around `BigRational`: parsing, formatting, and a few conversions
//! that the rest of the crate leans on.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"`, `"p"`, or a plain decimal like `"0.25"`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("cannot parse rational `{s}`"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches('-'), frac);
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

/// Canonical `"p/q"` form; integers are written as `"p"`.
pub fn format(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // enormous numerators/denominators: fall back to a log-scale estimate
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn gcd_int(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

pub fn lcm_int(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

pub fn floor(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

pub fn ceil(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// via the continued-fraction expansion.
pub fn reconstruct(x: f64, max_den: u64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let neg = x < 0.0;
    let mut y = x.abs();
    // convergents h/k
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let max_den = BigInt::from(max_den);
    for _ in 0..64 {
        let a = y.floor();
        let ai = BigInt::from(a as u64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > max_den {
            break;
        }
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = y - a;
        if frac < 1e-15 {
            break;
        }
        y = 1.0 / frac;
        if y > 1e15 {
            break;
        }
    }
    if k1.is_zero() {
        return None;
    }
    let r = Rational::new(h1, k1);
    Some(if neg { -r } else { r })
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse("-4").unwrap(), int(-4));
        assert_eq!(parse("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse("-1.5").unwrap(), ratio(-3, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert_eq!(format(&ratio(6, -4)), "-3/2");
        assert_eq!(format(&int(7)), "7");
    }

    #[test]
    fn continued_fraction_reconstruction() {
        assert_eq!(reconstruct(1.0 / 27.0, 1_000_000), Some(ratio(1, 27)));
        assert_eq!(reconstruct(-0.25, 10), Some(ratio(-1, 4)));
        assert_eq!(reconstruct(2.0 / 3.0 + 1e-13, 1_000_000), Some(ratio(2, 3)));
        assert_eq!(reconstruct(0.0, 10), Some(int(0)));
    }
}
