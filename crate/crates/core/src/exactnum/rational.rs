use alloc::string::{String, ToString};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::ExactError;

/// Arbitrary precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rational_sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Canonical text form: `"n"` for integers, `"n/d"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Parses `"a"` or `"a/b"` with integer `a`, nonzero integer `b`.
/// Decimal notation is rejected.
pub fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    let bad = || ExactError::ParseRational(s.to_string());
    let t = s.trim();
    let parse_int = |x: &str| -> Result<BigInt, ExactError> {
        let x = x.trim();
        let digits = x.strip_prefix(['-', '+']).unwrap_or(x);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        x.parse::<BigInt>().map_err(|_| bad())
    };
    match t.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(t)?)),
        Some((n, d)) => {
            let n = parse_int(n)?;
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("-10/256").unwrap(), rat(-5, 128));
        assert_eq!(format_rational(&rat(-5, 128)), "-5/128");
        assert_eq!(format_rational(&int(2)), "2");
        assert_eq!(parse_rational(" 3 ").unwrap(), int(3));
        assert_eq!(parse_rational("4/-6").unwrap(), rat(-2, 3));
    }

    #[test]
    fn parse_rejects_decimals_and_junk() {
        for s in ["0.5", "1e3", "", "/2", "1/0", "a/b", "1/2/3", "--1"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }
}
