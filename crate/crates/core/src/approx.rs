//! Midpoint-radius enclosures for approximable reals.
//!
//! Opaque sequence generators produce values as `mid ± rad` pairs with
//! exact rational components. Arithmetic only ever widens the radius, so
//! an enclosure computed through any chain of operations still contains
//! the true value. Exact rationals are the special case `rad = 0`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::rational::Rational;

/// An enclosure `[mid - rad, mid + rad]` of a real number.
#[derive(Clone, Debug, PartialEq)]
pub struct MidRad {
    pub mid: Rational,
    pub rad: Rational,
}

impl MidRad {
    pub fn exact(mid: Rational) -> Self {
        MidRad {
            mid,
            rad: Rational::zero(),
        }
    }

    pub fn new(mid: Rational, rad: Rational) -> Self {
        debug_assert!(!rad.is_negative());
        MidRad { mid, rad }
    }

    /// Enclosure of the interval `[lo, hi]`.
    pub fn from_bounds(lo: Rational, hi: Rational) -> Self {
        let mid = (&lo + &hi) / Rational::from_integer(BigInt::from(2));
        let rad = (&hi - &lo) / Rational::from_integer(BigInt::from(2));
        MidRad::new(mid, rad.abs())
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn lower(&self) -> Rational {
        &self.mid - &self.rad
    }

    pub fn upper(&self) -> Rational {
        &self.mid + &self.rad
    }

    /// True when every point of the enclosure is nonzero.
    pub fn excludes_zero(&self) -> bool {
        self.mid.abs() > self.rad
    }

    /// Certified sign: `Some(±1)` when the enclosure excludes zero,
    /// `Some(0)` when it is exactly zero, `None` otherwise.
    pub fn certified_sign(&self) -> Option<i8> {
        if self.mid.is_zero() && self.rad.is_zero() {
            Some(0)
        } else if self.excludes_zero() {
            Some(if self.mid.is_positive() { 1 } else { -1 })
        } else {
            None
        }
    }

    pub fn add(&self, rhs: &MidRad) -> MidRad {
        MidRad::new(&self.mid + &rhs.mid, &self.rad + &rhs.rad)
    }

    pub fn sub(&self, rhs: &MidRad) -> MidRad {
        MidRad::new(&self.mid - &rhs.mid, &self.rad + &rhs.rad)
    }

    pub fn neg(&self) -> MidRad {
        MidRad::new(-self.mid.clone(), self.rad.clone())
    }

    pub fn mul(&self, rhs: &MidRad) -> MidRad {
        let rad =
            self.mid.abs() * &rhs.rad + rhs.mid.abs() * &self.rad + &self.rad * &rhs.rad;
        MidRad::new(&self.mid * &rhs.mid, rad)
    }

    /// `||x| - |mid|| <= |x - mid|`, so the same radius encloses the
    /// absolute value.
    pub fn abs(&self) -> MidRad {
        MidRad::new(self.mid.abs(), self.rad.clone())
    }

    /// Reciprocal; `None` when the enclosure may contain zero.
    pub fn recip(&self) -> Option<MidRad> {
        if !self.excludes_zero() {
            return None;
        }
        let lo = self.lower();
        let hi = self.upper();
        Some(MidRad::from_bounds(hi.recip(), lo.recip()))
    }

    pub fn div(&self, rhs: &MidRad) -> Option<MidRad> {
        rhs.recip().map(|r| self.mul(&r))
    }

    pub fn pow_i(&self, exp: i64) -> Option<MidRad> {
        let mut base = self.clone();
        let mut e = exp;
        if e < 0 {
            base = base.recip()?;
            e = -e;
        }
        let mut acc = MidRad::exact(Rational::from_integer(BigInt::from(1)));
        let mut sq = base;
        let mut k = e as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&sq);
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul(&sq);
            }
        }
        Some(acc)
    }

    /// Round the midpoint to a dyadic with `bits` fractional bits,
    /// folding the rounding error into the radius. Keeps intermediate
    /// rationals from growing without bound in long accumulations.
    pub fn compact(&self, bits: u32) -> MidRad {
        let scale = BigInt::one() << bits;
        let scaled = &self.mid * Rational::from_integer(scale.clone());
        let rounded = scaled.round();
        let mid = Rational::new(rounded.numer().clone(), scale.clone());
        let err = (&mid - &self.mid).abs();
        MidRad::new(mid, &self.rad + err)
    }
}

use num_traits::One;

impl fmt::Display for MidRad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.mid)
        } else {
            write!(f, "{} ± {}", self.mid, self.rad)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    #[test]
    fn arithmetic_encloses() {
        let a = MidRad::new(q(2), qr(1, 4));
        let b = MidRad::new(q(3), qr(1, 8));
        let p = a.mul(&b);
        // true products range over [1.75 * 2.875, 2.25 * 3.125]
        assert!(p.lower() <= qr(7, 4) * qr(23, 8));
        assert!(p.upper() >= qr(9, 4) * qr(25, 8));
    }

    #[test]
    fn reciprocal_requires_sign() {
        assert!(MidRad::new(q(0), q(1)).recip().is_none());
        let r = MidRad::new(q(2), qr(1, 2)).recip().unwrap();
        assert!(r.lower() <= qr(2, 5) && qr(2, 3) <= r.upper());
    }

    #[test]
    fn compact_keeps_enclosure() {
        let a = MidRad::new(qr(1, 3), q(0));
        let c = a.compact(16);
        assert!(c.lower() <= qr(1, 3) && qr(1, 3) <= c.upper());
        assert!(c.rad <= qr(1, 65536));
    }
}
