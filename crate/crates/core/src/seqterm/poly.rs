//! Dense univariate polynomials over exact rationals, ascending degree.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{ceil_to_i64, Rational};

/// Polynomial with ascending coefficients; the zero polynomial is the
/// empty coefficient list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Poly::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree, with `deg 0 = None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn constant_term(&self) -> Rational {
        self.coeffs.first().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_at_index(&self, n: u64) -> Rational {
        self.eval(&Rational::from_integer(BigInt::from(n)))
    }

    pub fn add(&self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(len);
        for i in 0..len {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
            let b = rhs.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
            out.push(a + b);
        }
        Poly::new(out)
    }

    pub fn sub(&self, rhs: &Poly) -> Poly {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Euclidean division; panics if `rhs` is zero.
    pub fn divrem(&self, rhs: &Poly) -> (Poly, Poly) {
        assert!(!rhs.is_zero(), "polynomial division by zero");
        let dlead = rhs.leading().unwrap().clone();
        let ddeg = rhs.degree().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); self.coeffs.len().saturating_sub(ddeg)];
        while rem.len() > ddeg || (rem.len() == ddeg + 1 && ddeg == 0) {
            if rem.iter().all(Zero::is_zero) {
                break;
            }
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
            if rem.len() <= ddeg {
                break;
            }
            let shift = rem.len() - 1 - ddeg;
            let factor = rem.last().unwrap() / &dlead;
            quot[shift] = factor.clone();
            for (i, b) in rhs.coeffs.iter().enumerate() {
                let idx = shift + i;
                let delta = &factor * b;
                rem[idx] -= delta;
            }
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// Monic gcd (constant 1 when the polynomials are coprime).
    pub fn gcd(&self, rhs: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.leading().unwrap().clone();
        a.scale(&lead.recip())
    }

    /// Coefficient-wise formal derivative.
    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i as u64 + 1)))
                .collect(),
        )
    }

    /// `p(stride·x + offset)` by Horner over polynomial arguments.
    pub fn compose_affine(&self, stride: u64, offset: u64) -> Poly {
        let arg = Poly::new(vec![
            Rational::from_integer(BigInt::from(offset)),
            Rational::from_integer(BigInt::from(stride)),
        ]);
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&arg).add(&Poly::constant(c.clone()));
        }
        acc
    }

    /// Cauchy bound: every real root has absolute value at most
    /// `1 + max_i |a_i / a_d|`. Zero for constants.
    pub fn cauchy_root_bound(&self) -> Rational {
        match self.degree() {
            None | Some(0) => Rational::zero(),
            Some(d) => {
                let lead = self.coeffs[d].abs();
                let mut m = Rational::zero();
                for c in &self.coeffs[..d] {
                    let r = c.abs() / &lead;
                    if r > m {
                        m = r;
                    }
                }
                m + Rational::one()
            }
        }
    }

    /// Nonnegative integer roots. Scans the Cauchy range when it is
    /// small, otherwise falls back to the rational root theorem on the
    /// integer-scaled polynomial.
    pub fn nonneg_integer_roots(&self) -> Vec<u64> {
        if self.is_zero() || self.is_constant() {
            return Vec::new();
        }
        let bound = ceil_to_i64(&self.cauchy_root_bound()).max(0) as u64;
        let mut roots = Vec::new();
        const SCAN_CAP: u64 = 65_536;
        if bound <= SCAN_CAP {
            let scanner = SignScanner::new(self);
            for n in 0..=bound {
                if scanner.sign_at(n) == 0 {
                    roots.push(n);
                }
            }
            return roots;
        }
        // p(n) = 0 with integer n requires n to divide the trailing
        // integer coefficient (after clearing denominators and powers
        // of x).
        let mut coeffs = self.coeffs.clone();
        let mut skipped = 0usize;
        while coeffs.first().is_some_and(Zero::is_zero) {
            coeffs.remove(0);
            skipped += 1;
        }
        if skipped > 0 {
            roots.push(0);
        }
        let mut denom_lcm = BigInt::one();
        for c in &coeffs {
            denom_lcm = denom_lcm.lcm(c.denom());
        }
        let trailing = (&coeffs[0] * Rational::from_integer(denom_lcm)).to_integer();
        let trailing = trailing.abs();
        if trailing.is_zero() {
            return roots;
        }
        if let Ok(t) = u128::try_from(&trailing) {
            // Candidates stop at the root bound: any divisor beyond it
            // cannot be a root, and a divisor below it either shows up
            // directly or as the cofactor of one that does.
            let mut d: u128 = 1;
            while d * d <= t && d <= bound as u128 {
                if t % d == 0 {
                    let mut cands = [Some(d as u64), None];
                    if let Ok(co) = u64::try_from(t / d) {
                        cands[1] = Some(co);
                    }
                    for n in cands.into_iter().flatten() {
                        if n >= 1
                            && n <= bound
                            && self.eval_at_index(n).is_zero()
                            && !roots.contains(&n)
                        {
                            roots.push(n);
                        }
                    }
                }
                d += 1;
            }
        } else {
            // Trailing coefficient too large to factor over: fall back
            // to a certified scan of the whole candidate range.
            let scanner = SignScanner::new(self);
            for n in 1..=bound {
                if scanner.sign_at(n) == 0 {
                    roots.push(n);
                }
            }
        }
        roots.sort_unstable();
        roots
    }
}

/// Exact sign queries at integer points, fast: one rounded f64 Horner
/// pass with a running magnitude envelope certifies the sign whenever
/// the value clears the worst-case rounding error; anything closer to
/// zero (or overflowing) falls back to exact arithmetic. Every sign
/// returned is therefore exact.
pub(crate) struct SignScanner<'a> {
    poly: &'a Poly,
    rounded: Vec<f64>,
    magnitude: Vec<f64>,
    slack: f64,
}

impl<'a> SignScanner<'a> {
    pub(crate) fn new(poly: &'a Poly) -> Self {
        use num_traits::ToPrimitive;
        let rounded: Vec<f64> = poly
            .coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::INFINITY))
            .collect();
        let magnitude: Vec<f64> = rounded.iter().map(|c| c.abs()).collect();
        // Covers the Horner accumulation, coefficient rounding and the
        // envelope's own rounding, with room to spare.
        let slack = (2 * poly.coeffs.len() + 8) as f64 * f64::EPSILON;
        SignScanner {
            poly,
            rounded,
            magnitude,
            slack,
        }
    }

    pub(crate) fn sign_at(&self, n: u64) -> i8 {
        let x = n as f64;
        let mut v = 0.0_f64;
        let mut m = 0.0_f64;
        for (c, a) in self.rounded.iter().zip(self.magnitude.iter()).rev() {
            v = v.mul_add(x, *c);
            m = m.mul_add(x, *a);
        }
        let err = m * self.slack;
        if v.is_finite() && err.is_finite() && v.abs() > err {
            if v > 0.0 {
                1
            } else {
                -1
            }
        } else {
            crate::rational::sign_of(&self.poly.eval_at_index(n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    fn p(cs: &[i64]) -> Poly {
        Poly::new(cs.iter().map(|&c| q(c)).collect())
    }

    #[test]
    fn mul_and_divrem_roundtrip() {
        let a = p(&[1, 2, 3]);
        let b = p(&[-4, 1]);
        let prod = a.mul(&b);
        let (quot, rem) = prod.divrem(&b);
        assert_eq!(quot, a);
        assert!(rem.is_zero());
    }

    #[test]
    fn gcd_of_common_factor() {
        let f = p(&[-1, 1]); // x - 1
        let a = f.mul(&p(&[1, 1]));
        let b = f.mul(&p(&[2, 0, 1]));
        assert_eq!(a.gcd(&b), f);
    }

    #[test]
    fn derivative_rule() {
        assert_eq!(p(&[5, 3, 0, 2]).derivative(), p(&[3, 0, 6]));
        assert!(p(&[7]).derivative().is_zero());
    }

    #[test]
    fn affine_composition() {
        // (2x+1)^2 = 4x^2 + 4x + 1 from p(x) = x^2
        let sq = p(&[0, 0, 1]);
        assert_eq!(sq.compose_affine(2, 1), p(&[1, 4, 4]));
    }

    #[test]
    fn cauchy_bound_covers_roots() {
        let f = p(&[-100, 0, 1]); // roots ±10
        assert!(f.cauchy_root_bound() >= q(10));
    }

    #[test]
    fn integer_roots_small_scan() {
        let f = p(&[0, -100, 1]); // n(n - 100)
        assert_eq!(f.nonneg_integer_roots(), vec![0, 100]);
    }

    #[test]
    fn integer_roots_with_rational_coefficients() {
        let f = Poly::new(vec![qr(-3, 2), qr(1, 2)]); // (n - 3)/2
        assert_eq!(f.nonneg_integer_roots(), vec![3]);
    }
}
