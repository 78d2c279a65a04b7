//! Real-valued functions of one real variable: an exact expression
//! language closed under rational arithmetic, absolute value, integer
//! powers and piecewise definitions, plus enclosure-valued evaluators
//! for maps (such as n-th roots) that have no exact rational form.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::approx::MidRad;
use crate::rational::Rational;
use crate::seqterm::SequenceTerm;
use crate::topology::IntervalSet;

/// Expression in one variable `t`, exact over the rationals.
#[derive(Clone, Debug, PartialEq)]
pub enum FnExpr {
    Const(Rational),
    Var,
    Add(Arc<FnExpr>, Arc<FnExpr>),
    Sub(Arc<FnExpr>, Arc<FnExpr>),
    Mul(Arc<FnExpr>, Arc<FnExpr>),
    Div(Arc<FnExpr>, Arc<FnExpr>),
    IntPow(Arc<FnExpr>, i64),
    Abs(Arc<FnExpr>),
    /// First piece whose set contains the input wins.
    Piecewise(Vec<(IntervalSet, Arc<FnExpr>)>),
}

impl FnExpr {
    pub fn constant(c: Rational) -> Self {
        FnExpr::Const(c)
    }

    pub fn var() -> Self {
        FnExpr::Var
    }

    pub fn add(self, rhs: FnExpr) -> Self {
        FnExpr::Add(Arc::new(self), Arc::new(rhs))
    }

    pub fn sub(self, rhs: FnExpr) -> Self {
        FnExpr::Sub(Arc::new(self), Arc::new(rhs))
    }

    pub fn mul(self, rhs: FnExpr) -> Self {
        FnExpr::Mul(Arc::new(self), Arc::new(rhs))
    }

    pub fn div(self, rhs: FnExpr) -> Self {
        FnExpr::Div(Arc::new(self), Arc::new(rhs))
    }

    pub fn int_pow(self, exp: i64) -> Self {
        FnExpr::IntPow(Arc::new(self), exp)
    }

    pub fn abs(self) -> Self {
        FnExpr::Abs(Arc::new(self))
    }

    pub fn piecewise(pieces: Vec<(IntervalSet, FnExpr)>) -> Self {
        FnExpr::Piecewise(
            pieces
                .into_iter()
                .map(|(set, e)| (set, Arc::new(e)))
                .collect(),
        )
    }

    /// Polynomial with ascending coefficients: c0 + c1 t + c2 t² + ...
    pub fn poly(coeffs: &[Rational]) -> Self {
        let mut expr = FnExpr::Const(Rational::zero());
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let monomial = if i == 0 {
                FnExpr::Const(c.clone())
            } else {
                FnExpr::Const(c.clone()).mul(FnExpr::Var.int_pow(i as i64))
            };
            expr = expr.add(monomial);
        }
        expr
    }

    pub fn contains_piecewise(&self) -> bool {
        match self {
            FnExpr::Const(_) | FnExpr::Var => false,
            FnExpr::Add(a, b) | FnExpr::Sub(a, b) | FnExpr::Mul(a, b) | FnExpr::Div(a, b) => {
                a.contains_piecewise() || b.contains_piecewise()
            }
            FnExpr::IntPow(a, _) | FnExpr::Abs(a) => a.contains_piecewise(),
            FnExpr::Piecewise(_) => true,
        }
    }

    /// Exact value at a rational point; None at a pole, at 0 raised to
    /// a negative power, or when no piece matches.
    pub fn eval_exact(&self, t: &Rational) -> Option<Rational> {
        match self {
            FnExpr::Const(c) => Some(c.clone()),
            FnExpr::Var => Some(t.clone()),
            FnExpr::Add(a, b) => Some(a.eval_exact(t)? + b.eval_exact(t)?),
            FnExpr::Sub(a, b) => Some(a.eval_exact(t)? - b.eval_exact(t)?),
            FnExpr::Mul(a, b) => Some(a.eval_exact(t)? * b.eval_exact(t)?),
            FnExpr::Div(a, b) => {
                let d = b.eval_exact(t)?;
                if d.is_zero() {
                    return None;
                }
                Some(a.eval_exact(t)? / d)
            }
            FnExpr::IntPow(a, exp) => crate::rational::pow_i(&a.eval_exact(t)?, *exp),
            FnExpr::Abs(a) => Some(a.eval_exact(t)?.abs()),
            FnExpr::Piecewise(pieces) => pieces
                .iter()
                .find(|(set, _)| set.contains_point(t))
                .and_then(|(_, e)| e.eval_exact(t)),
        }
    }

    /// Interval extension over an input enclosure; None when the result
    /// cannot be certified (division through zero, ambiguous piece).
    pub fn eval_enclosure(&self, v: &MidRad) -> Option<MidRad> {
        match self {
            FnExpr::Const(c) => Some(MidRad::exact(c.clone())),
            FnExpr::Var => Some(v.clone()),
            FnExpr::Add(a, b) => Some(a.eval_enclosure(v)?.add(&b.eval_enclosure(v)?)),
            FnExpr::Sub(a, b) => Some(a.eval_enclosure(v)?.sub(&b.eval_enclosure(v)?)),
            FnExpr::Mul(a, b) => Some(a.eval_enclosure(v)?.mul(&b.eval_enclosure(v)?)),
            FnExpr::Div(a, b) => a.eval_enclosure(v)?.div(&b.eval_enclosure(v)?),
            FnExpr::IntPow(a, exp) => a.eval_enclosure(v)?.pow_i(*exp),
            FnExpr::Abs(a) => Some(a.eval_enclosure(v)?.abs()),
            FnExpr::Piecewise(pieces) => pieces
                .iter()
                .find(|(set, _)| set.contains_enclosure(v) == Some(true))
                .and_then(|(_, e)| e.eval_enclosure(v)),
        }
    }

    /// Substitutes a sequence term for the variable. The expression
    /// must be piece-free; piecewise definitions are resolved per
    /// residue class before substitution.
    pub fn substitute(&self, x: &SequenceTerm) -> SequenceTerm {
        match self {
            FnExpr::Const(c) => SequenceTerm::constant(c.clone()),
            FnExpr::Var => x.clone(),
            FnExpr::Add(a, b) => a.substitute(x).add(b.substitute(x)),
            FnExpr::Sub(a, b) => a.substitute(x).sub(b.substitute(x)),
            FnExpr::Mul(a, b) => a.substitute(x).mul(b.substitute(x)),
            FnExpr::Div(a, b) => a.substitute(x).div(b.substitute(x)),
            FnExpr::IntPow(a, exp) => a.substitute(x).int_pow(*exp),
            FnExpr::Abs(a) => a.substitute(x).abs(),
            FnExpr::Piecewise(_) => {
                unreachable!("piecewise must be resolved before substitution")
            }
        }
    }
}

/// Enclosure-valued evaluator for a real map without an exact rational
/// form. The evaluator returns a midpoint-radius enclosure of the true
/// value at any requested precision.
#[derive(Clone)]
pub struct ApproxMap {
    label: String,
    /// Monotone maps admit sound enclosure propagation through inexact
    /// inputs by evaluating at both interval endpoints.
    monotone: bool,
    eval: Arc<dyn Fn(&Rational, u32) -> Option<MidRad> + Send + Sync>,
}

impl fmt::Debug for ApproxMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ApproxMap")
            .field("label", &self.label)
            .field("monotone", &self.monotone)
            .finish()
    }
}

impl ApproxMap {
    pub fn new(
        label: impl Into<String>,
        monotone: bool,
        eval: Arc<dyn Fn(&Rational, u32) -> Option<MidRad> + Send + Sync>,
    ) -> Self {
        ApproxMap {
            label: label.into(),
            monotone,
            eval,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval_point(&self, t: &Rational, bits: u32) -> Option<MidRad> {
        (self.eval)(t, bits)
    }

    pub fn eval_enclosure(&self, v: &MidRad, bits: u32) -> Option<MidRad> {
        if v.is_exact() {
            return self.eval_point(&v.mid, bits);
        }
        if !self.monotone {
            return None;
        }
        let at_lo = self.eval_point(&v.lower(), bits)?;
        let at_hi = self.eval_point(&v.upper(), bits)?;
        let lo = at_lo.lower().min(at_hi.lower());
        let hi = at_lo.upper().max(at_hi.upper());
        Some(MidRad::from_bounds(lo, hi))
    }

    /// The k-th root, enclosed to within 2^-bits via integer k-th roots
    /// of scaled numerators. Odd k accepts negative inputs.
    pub fn nth_root(k: u32) -> Self {
        assert!(k >= 2, "root order must be at least 2");
        let rule = move |t: &Rational, bits: u32| -> Option<MidRad> {
            let negative = t.is_negative();
            if negative && k % 2 == 0 {
                return None;
            }
            let t = if negative { -t } else { t.clone() };
            // t = A / den^k with A = numer * den^(k-1), so the k-th
            // root of t is the k-th root of A divided by den.
            let num = t.numer().clone();
            let den = t.denom().clone();
            let scaled = (&num * den.pow(k - 1)) << (k * bits);
            let m = scaled.nth_root(k);
            let denom = den << bits;
            let lo = Rational::new(m.clone(), denom.clone());
            let hi = Rational::new(m + 1, denom);
            let enc = MidRad::from_bounds(lo, hi);
            Some(if negative {
                MidRad::from_bounds(-enc.upper(), -enc.lower())
            } else {
                enc
            })
        };
        ApproxMap::new(format!("root{k}"), true, Arc::new(rule))
    }
}

/// How a function's values are produced.
#[derive(Clone, Debug)]
pub enum Evaluator {
    Exact(FnExpr),
    Approx(ApproxMap),
}

/// A real function together with its domain.
#[derive(Clone, Debug)]
pub struct RealFunction {
    evaluator: Evaluator,
    domain: IntervalSet,
}

impl RealFunction {
    pub fn exact(expr: FnExpr, domain: IntervalSet) -> Self {
        RealFunction {
            evaluator: Evaluator::Exact(expr),
            domain,
        }
    }

    pub fn approx(map: ApproxMap, domain: IntervalSet) -> Self {
        RealFunction {
            evaluator: Evaluator::Approx(map),
            domain,
        }
    }

    pub fn identity() -> Self {
        RealFunction::exact(FnExpr::Var, IntervalSet::real_line())
    }

    pub fn constant(c: Rational) -> Self {
        RealFunction::exact(FnExpr::Const(c), IntervalSet::real_line())
    }

    pub fn poly(coeffs: &[Rational]) -> Self {
        RealFunction::exact(FnExpr::poly(coeffs), IntervalSet::real_line())
    }

    pub fn abs_value() -> Self {
        RealFunction::exact(FnExpr::Var.abs(), IntervalSet::real_line())
    }

    /// The unit step: 0 below the origin, 1 from the origin up.
    pub fn step() -> Self {
        let below = IntervalSet::from_intervals(vec![crate::topology::Interval::new(
            crate::fluxion::ExtendedRational::NegInfinity,
            false,
            crate::fluxion::ExtendedRational::Finite(Rational::zero()),
            false,
        )]);
        let above = below.complement();
        RealFunction::exact(
            FnExpr::piecewise(vec![
                (below, FnExpr::Const(Rational::zero())),
                (above, FnExpr::Const(Rational::from_integer(1.into()))),
            ]),
            IntervalSet::real_line(),
        )
    }

    pub fn sqrt() -> Self {
        RealFunction::nth_root(2)
    }

    pub fn cbrt() -> Self {
        RealFunction::nth_root(3)
    }

    pub fn nth_root(k: u32) -> Self {
        let domain = if k % 2 == 0 {
            IntervalSet::from_intervals(vec![crate::topology::Interval::new(
                crate::fluxion::ExtendedRational::Finite(Rational::zero()),
                true,
                crate::fluxion::ExtendedRational::PosInfinity,
                false,
            )])
        } else {
            IntervalSet::real_line()
        };
        RealFunction::approx(ApproxMap::nth_root(k), domain)
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }

    pub fn domain(&self) -> &IntervalSet {
        &self.domain
    }

    pub fn with_domain(mut self, domain: IntervalSet) -> Self {
        self.domain = domain;
        self
    }

    /// Exact value at a point; only exact evaluators produce one.
    pub fn value_exact(&self, t: &Rational) -> Option<Rational> {
        match &self.evaluator {
            Evaluator::Exact(expr) => expr.eval_exact(t),
            Evaluator::Approx(_) => None,
        }
    }

    /// Enclosure of the value at an exact point.
    pub fn value_enclosure(&self, t: &Rational, bits: u32) -> Option<MidRad> {
        match &self.evaluator {
            Evaluator::Exact(expr) => expr.eval_exact(t).map(MidRad::exact),
            Evaluator::Approx(map) => map.eval_point(t, bits),
        }
    }

    /// Certified sign of the value at a point. For enclosure evaluators
    /// the precision is doubled until the sign separates from zero or
    /// the cap is reached; None means the sign stayed uncertified.
    pub fn certified_sign_at(&self, t: &Rational, bits: u32, bit_cap: u32) -> Option<i8> {
        match &self.evaluator {
            Evaluator::Exact(expr) => {
                let v = expr.eval_exact(t)?;
                Some(crate::rational::sign_of(&v))
            }
            Evaluator::Approx(map) => {
                let mut p = bits.max(8);
                loop {
                    let v = map.eval_point(t, p)?;
                    if let Some(s) = v.certified_sign() {
                        return Some(s);
                    }
                    if p >= bit_cap {
                        return None;
                    }
                    p = (p * 2).min(bit_cap);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr, two_pow_neg};

    #[test]
    fn polynomial_evaluation_matches_horner() {
        // 2 - 3t + t^3
        let p = FnExpr::poly(&[q(2), q(-3), q(0), q(1)]);
        assert_eq!(p.eval_exact(&q(2)), Some(q(4)));
        assert_eq!(p.eval_exact(&qr(1, 2)), Some(qr(5, 8)));
    }

    #[test]
    fn division_by_zero_is_none() {
        let f = FnExpr::Const(q(1)).div(FnExpr::Var);
        assert_eq!(f.eval_exact(&q(0)), None);
        assert_eq!(f.eval_exact(&q(4)), Some(qr(1, 4)));
    }

    #[test]
    fn step_pieces_select_by_sign() {
        let s = RealFunction::step();
        assert_eq!(s.value_exact(&q(-3)), Some(q(0)));
        assert_eq!(s.value_exact(&q(0)), Some(q(1)));
        assert_eq!(s.value_exact(&q(7)), Some(q(1)));
    }

    #[test]
    fn square_root_enclosure_brackets_truth() {
        let root = ApproxMap::nth_root(2);
        let v = root.eval_point(&q(2), 64).unwrap();
        // 2 must lie inside the square of the enclosure.
        assert!(v.lower().pow(2) <= q(2));
        assert!(v.upper().pow(2) >= q(2));
        assert!(&v.rad * q(2) <= two_pow_neg(63));
        let exact = root.eval_point(&qr(9, 4), 32).unwrap();
        assert!(exact.lower() <= qr(3, 2) && qr(3, 2) <= exact.upper());
    }

    #[test]
    fn cube_root_of_negative_input() {
        let root = ApproxMap::nth_root(3);
        let v = root.eval_point(&q(-8), 48).unwrap();
        assert!(v.lower() <= q(-2) && q(-2) <= v.upper());
        assert_eq!(ApproxMap::nth_root(2).eval_point(&q(-1), 16), None);
    }

    #[test]
    fn monotone_enclosure_propagation() {
        let root = ApproxMap::nth_root(2);
        let input = MidRad::from_bounds(q(1), q(4));
        let out = root.eval_enclosure(&input, 32).unwrap();
        assert!(out.lower() <= q(1) && out.upper() >= q(2));
        assert!(out.lower() > qr(9, 10));
    }

    #[test]
    fn certified_sign_with_doubling_precision() {
        let f = RealFunction::sqrt();
        assert_eq!(f.certified_sign_at(&qr(1, 1000), 8, 256), Some(1));
        assert_eq!(f.certified_sign_at(&q(0), 8, 64), None);
        let g = RealFunction::poly(&[q(-2), q(0), q(1)]);
        assert_eq!(g.certified_sign_at(&q(1), 8, 64), Some(-1));
        assert_eq!(g.certified_sign_at(&q(2), 8, 64), Some(1));
    }
}
