//! Rational functions of the index variable, kept reduced with a monic
//! denominator so structural equality is semantic equality.

use num_traits::{One, Zero};

use super::poly::Poly;
use crate::fluxion::ExtendedRational;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    /// Builds `num/den` in canonical form: gcd cancelled, denominator
    /// monic. Panics if `den` is the zero polynomial; callers must rule
    /// that out beforehand.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RationalFunction {
                num: Poly::zero(),
                den: Poly::one(),
            };
        }
        let g = num.gcd(&den);
        let (num, _) = num.divrem(&g);
        let (den, _) = den.divrem(&g);
        let lead = den.leading().unwrap().clone();
        let inv = lead.recip();
        RationalFunction {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFunction {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        RationalFunction::from_poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        RationalFunction::from_poly(Poly::zero())
    }

    pub fn index() -> Self {
        RationalFunction::from_poly(Poly::x())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        RationalFunction::new(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        RationalFunction::new(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }

    /// Reciprocal; `None` for the zero function.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(RationalFunction::new(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, rhs: &Self) -> Option<Self> {
        Some(self.mul(&rhs.recip()?))
    }

    pub fn pow(&self, exp: i64) -> Option<Self> {
        if exp == 0 {
            return Some(RationalFunction::constant(Rational::one()));
        }
        let base = if exp < 0 { self.recip()? } else { self.clone() };
        let mut acc = RationalFunction::constant(Rational::one());
        for _ in 0..exp.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Some(acc)
    }

    /// Value at index `n`; `None` when the denominator vanishes there.
    pub fn eval(&self, n: u64) -> Option<Rational> {
        let d = self.den.eval_at_index(n);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval_at_index(n) / d)
    }

    /// Substitutes `stride·x + offset` for the index.
    pub fn compose_affine(&self, stride: u64, offset: u64) -> Self {
        RationalFunction::new(
            self.num.compose_affine(stride, offset),
            self.den.compose_affine(stride, offset),
        )
    }

    /// Nonnegative integer points where the (reduced) denominator
    /// vanishes, i.e. where evaluation is undefined.
    pub fn undefined_points(&self) -> Vec<u64> {
        self.den.nonneg_integer_roots()
    }

    /// Limit as the index grows without bound, read off degrees and
    /// leading coefficients.
    pub fn limit_at_infinity(&self) -> ExtendedRational {
        if self.num.is_zero() {
            return ExtendedRational::Finite(Rational::zero());
        }
        let dn = self.num.degree().unwrap();
        let dd = self.den.degree().unwrap();
        if dn < dd {
            ExtendedRational::Finite(Rational::zero())
        } else if dn == dd {
            // Denominator is monic, so the ratio of leading
            // coefficients is just the numerator's lead.
            ExtendedRational::Finite(self.num.leading().unwrap().clone())
        } else if self.num.leading().unwrap() > &Rational::zero() {
            ExtendedRational::PosInfinity
        } else {
            ExtendedRational::NegInfinity
        }
    }

    /// Whether the limit at infinity is finite.
    pub fn is_bounded(&self) -> bool {
        matches!(self.limit_at_infinity(), ExtendedRational::Finite(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    fn poly(cs: &[i64]) -> Poly {
        Poly::new(cs.iter().map(|&c| q(c)).collect())
    }

    #[test]
    fn reduction_is_canonical() {
        // (2x^2 - 2) / (4x - 4) reduces to (x + 1)/2 with monic den.
        let f = RationalFunction::new(poly(&[-2, 0, 2]), poly(&[-4, 4]));
        assert_eq!(f.num(), &Poly::new(vec![qr(1, 2), qr(1, 2)]));
        assert_eq!(f.den(), &Poly::one());
    }

    #[test]
    fn arithmetic_matches_pointwise() {
        let a = RationalFunction::new(poly(&[1]), poly(&[0, 1])); // 1/x
        let b = RationalFunction::index();
        let sum = a.add(&b); // (x^2 + 1)/x
        for n in 1..20u64 {
            let expect = qr(1, n as i64) + q(n as i64);
            assert_eq!(sum.eval(n).unwrap(), expect);
        }
    }

    #[test]
    fn eval_undefined_at_denominator_roots() {
        let f = RationalFunction::new(poly(&[1]), poly(&[-3, 1])); // 1/(x-3)
        assert_eq!(f.eval(3), None);
        assert_eq!(f.undefined_points(), vec![3]);
        assert_eq!(f.eval(4), Some(q(1)));
    }

    #[test]
    fn limits_by_degree() {
        let decays = RationalFunction::new(poly(&[1]), poly(&[0, 1]));
        assert_eq!(
            decays.limit_at_infinity(),
            ExtendedRational::Finite(q(0))
        );
        let ratio = RationalFunction::new(poly(&[0, 3]), poly(&[5, 2]));
        assert_eq!(
            ratio.limit_at_infinity(),
            ExtendedRational::Finite(qr(3, 2))
        );
        let grows = RationalFunction::new(poly(&[0, 0, 1]), poly(&[0, 1]));
        assert_eq!(grows.limit_at_infinity(), ExtendedRational::PosInfinity);
        let sinks = RationalFunction::new(poly(&[0, 0, -1]), poly(&[0, 1]));
        assert_eq!(sinks.limit_at_infinity(), ExtendedRational::NegInfinity);
    }

    #[test]
    fn affine_composition_commutes_with_eval() {
        let f = RationalFunction::new(poly(&[1, 1]), poly(&[0, 0, 1]));
        let g = f.compose_affine(3, 2);
        for n in 1..10u64 {
            assert_eq!(g.eval(n), f.eval(3 * n + 2));
        }
    }

    #[test]
    fn negative_powers() {
        let x = RationalFunction::index();
        let inv_sq = x.pow(-2).unwrap();
        assert_eq!(inv_sq.eval(4).unwrap(), qr(1, 16));
        assert!(RationalFunction::zero().pow(-1).is_none());
    }
}
