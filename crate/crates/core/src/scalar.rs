//! Exact rational scalars.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Rationals in lowest terms with a positive denominator.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `n`, `-n`, `n/d` or `-n/d`.
pub fn parse(text: &str) -> Option<Scalar> {
    let text = text.trim();
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (n, d) = match body.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (body.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if d.is_zero() || n.is_negative() || d.is_negative() {
        return None;
    }
    let q = Scalar::new(n, d);
    Some(if neg { -q } else { q })
}

pub fn format(q: &Scalar) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("6/4"), Some(frac(3, 2)));
        assert_eq!(parse("-7"), Some(int(-7)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(format(&frac(-2, 4)), "-1/2");
        assert_eq!(format(&int(0)), "0");
        assert_eq!(frac(0, 5), Scalar::zero());
    }
}
