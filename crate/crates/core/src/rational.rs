//! Small helpers around arbitrary-precision rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used throughout the crate.
pub type Rational = BigRational;

/// Rational from an integer.
pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational from a numerator/denominator pair. Panics if `den == 0`.
pub fn qr(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `base^exp` for a rational base and signed integer exponent.
/// Returns `None` for `0^e` with `e < 0`.
pub fn pow_i(base: &Rational, exp: i64) -> Option<Rational> {
    if exp >= 0 {
        Some(pow_u(base, exp as u64))
    } else if base.is_zero() {
        None
    } else {
        Some(pow_u(base, (-exp) as u64).recip())
    }
}

fn pow_u(base: &Rational, mut exp: u64) -> Rational {
    let mut acc = Rational::one();
    let mut sq = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= &sq;
        }
        exp >>= 1;
        if exp > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

/// `2^-bits` as a rational, the radius target for a precision request.
pub fn two_pow_neg(bits: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << bits)
}

/// Smallest integer `k` with `q <= k`, as i64 (saturating).
pub fn ceil_to_i64(value: &Rational) -> i64 {
    let c = value.ceil();
    let n = c.numer();
    i64::try_from(n.clone()).unwrap_or(if n.is_negative() { i64::MIN } else { i64::MAX })
}

/// Sign of a rational as -1, 0 or +1.
pub fn sign_of(value: &Rational) -> i8 {
    if value.is_zero() {
        0
    } else if value.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_powers() {
        assert_eq!(pow_i(&qr(2, 3), 2), Some(qr(4, 9)));
        assert_eq!(pow_i(&qr(2, 3), -1), Some(qr(3, 2)));
        assert_eq!(pow_i(&q(0), -1), None);
        assert_eq!(pow_i(&q(5), 0), Some(q(1)));
    }

    #[test]
    fn ceiling() {
        assert_eq!(ceil_to_i64(&qr(7, 2)), 4);
        assert_eq!(ceil_to_i64(&qr(-7, 2)), -3);
        assert_eq!(ceil_to_i64(&q(3)), 3);
    }
}
