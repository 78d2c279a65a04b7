//! The symbolic sequence-term language: an expression tree denoting a
//! real sequence indexed by n = 1, 2, 3, ..., with exact evaluation for
//! symbolic terms and enclosure evaluation when opaque generators are
//! present.

pub mod normal;
pub mod poly;
pub mod ratfunc;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

pub use normal::{EventualSign, NormalizeError, PeriodicRationalForm};

use crate::approx::MidRad;
use crate::rational::{pow_i, Rational};

/// Evaluation rule for an opaque sequence: given an index and a target
/// precision in bits, produce an enclosure of the value.
pub type OpaqueRule = Arc<dyn Fn(u64, u32) -> Result<MidRad, EvalError> + Send + Sync>;

/// A sequence given only by an evaluation rule, opaque to the symbolic
/// normalizer. The label identifies it in diagnostics.
#[derive(Clone)]
pub struct OpaqueSeq {
    label: String,
    rule: OpaqueRule,
}

impl OpaqueSeq {
    pub fn new(label: impl Into<String>, rule: OpaqueRule) -> Self {
        OpaqueSeq {
            label: label.into(),
            rule,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, n: u64, bits: u32) -> Result<MidRad, EvalError> {
        (self.rule)(n, bits)
    }
}

impl fmt::Debug for OpaqueSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OpaqueSeq").field("label", &self.label).finish()
    }
}

impl PartialEq for OpaqueSeq {
    /// Equality is identity of the evaluation rule; labels are
    /// diagnostic only and may collide.
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.rule, &other.rule)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SequenceTerm {
    /// Constant sequence.
    Const(Rational),
    /// The index variable n itself (n ≥ 1).
    Index,
    Add(Arc<SequenceTerm>, Arc<SequenceTerm>),
    Sub(Arc<SequenceTerm>, Arc<SequenceTerm>),
    Mul(Arc<SequenceTerm>, Arc<SequenceTerm>),
    Div(Arc<SequenceTerm>, Arc<SequenceTerm>),
    IntPow(Arc<SequenceTerm>, i64),
    Abs(Arc<SequenceTerm>),
    /// Cyclic coefficients: at index n the value is cycle[(n-1) mod m].
    Periodic(Vec<Rational>),
    /// Finitely many index overrides taking priority over the inner term.
    Patch(Arc<SequenceTerm>, BTreeMap<u64, Rational>),
    /// n ↦ inner(stride·n + offset) with stride ≥ 1, offset ≥ 0.
    AffineSubseq(Arc<SequenceTerm>, u64, u64),
    Opaque(OpaqueSeq),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalError {
    /// Division by zero, or zero base raised to a negative power.
    UndefinedAt(u64),
    /// Exact evaluation reached an opaque node with this label.
    ExactUnavailable(String),
    /// An enclosure became too wide to certify an operation (division
    /// through an interval containing zero) at this index.
    Indeterminate(u64),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::UndefinedAt(n) => write!(f, "undefined at index {n}"),
            EvalError::ExactUnavailable(label) => {
                write!(f, "exact evaluation unavailable: opaque sequence '{label}'")
            }
            EvalError::Indeterminate(n) => {
                write!(f, "enclosure too wide to evaluate at index {n}")
            }
        }
    }
}

impl std::error::Error for EvalError {}

impl SequenceTerm {
    pub fn constant(value: Rational) -> Self {
        SequenceTerm::Const(value)
    }

    pub fn from_int(value: i64) -> Self {
        SequenceTerm::Const(Rational::from_integer(BigInt::from(value)))
    }

    pub fn index() -> Self {
        SequenceTerm::Index
    }

    pub fn add(self, rhs: SequenceTerm) -> Self {
        SequenceTerm::Add(Arc::new(self), Arc::new(rhs))
    }

    pub fn sub(self, rhs: SequenceTerm) -> Self {
        SequenceTerm::Sub(Arc::new(self), Arc::new(rhs))
    }

    pub fn mul(self, rhs: SequenceTerm) -> Self {
        SequenceTerm::Mul(Arc::new(self), Arc::new(rhs))
    }

    pub fn div(self, rhs: SequenceTerm) -> Self {
        SequenceTerm::Div(Arc::new(self), Arc::new(rhs))
    }

    pub fn int_pow(self, exp: i64) -> Self {
        SequenceTerm::IntPow(Arc::new(self), exp)
    }

    pub fn abs(self) -> Self {
        SequenceTerm::Abs(Arc::new(self))
    }

    pub fn neg(self) -> Self {
        SequenceTerm::from_int(-1).mul(self)
    }

    /// Panics if the cycle is empty.
    pub fn periodic(cycle: Vec<Rational>) -> Self {
        assert!(!cycle.is_empty(), "periodic cycle must be nonempty");
        SequenceTerm::Periodic(cycle)
    }

    /// The alternating sign sequence -1, 1, -1, 1, ...
    pub fn alternating() -> Self {
        SequenceTerm::Periodic(vec![crate::rational::q(-1), crate::rational::q(1)])
    }

    /// Panics if any override index is zero.
    pub fn patch(self, overrides: BTreeMap<u64, Rational>) -> Self {
        assert!(
            overrides.keys().all(|&k| k >= 1),
            "patch indices are 1-based"
        );
        SequenceTerm::Patch(Arc::new(self), overrides)
    }

    /// Panics if stride is zero.
    pub fn subseq(self, stride: u64, offset: u64) -> Self {
        assert!(stride >= 1, "subsequence stride must be positive");
        SequenceTerm::AffineSubseq(Arc::new(self), stride, offset)
    }

    pub fn opaque(
        label: impl Into<String>,
        rule: impl Fn(u64, u32) -> Result<MidRad, EvalError> + Send + Sync + 'static,
    ) -> Self {
        SequenceTerm::Opaque(OpaqueSeq::new(label, Arc::new(rule)))
    }

    pub fn contains_opaque(&self) -> bool {
        match self {
            SequenceTerm::Const(_) | SequenceTerm::Index | SequenceTerm::Periodic(_) => false,
            SequenceTerm::Add(a, b)
            | SequenceTerm::Sub(a, b)
            | SequenceTerm::Mul(a, b)
            | SequenceTerm::Div(a, b) => a.contains_opaque() || b.contains_opaque(),
            SequenceTerm::IntPow(a, _) | SequenceTerm::Abs(a) => a.contains_opaque(),
            SequenceTerm::Patch(a, _) => a.contains_opaque(),
            SequenceTerm::AffineSubseq(a, _, _) => a.contains_opaque(),
            SequenceTerm::Opaque(_) => true,
        }
    }

    /// Exact value at index n. Fails on opaque nodes and at indices
    /// where a division or negative power is undefined.
    pub fn eval_exact(&self, n: u64) -> Result<Rational, EvalError> {
        debug_assert!(n >= 1, "sequence indices are 1-based");
        match self {
            SequenceTerm::Const(c) => Ok(c.clone()),
            SequenceTerm::Index => Ok(Rational::from_integer(BigInt::from(n))),
            SequenceTerm::Add(a, b) => Ok(a.eval_exact(n)? + b.eval_exact(n)?),
            SequenceTerm::Sub(a, b) => Ok(a.eval_exact(n)? - b.eval_exact(n)?),
            SequenceTerm::Mul(a, b) => Ok(a.eval_exact(n)? * b.eval_exact(n)?),
            SequenceTerm::Div(a, b) => {
                let d = b.eval_exact(n)?;
                if d.is_zero() {
                    return Err(EvalError::UndefinedAt(n));
                }
                Ok(a.eval_exact(n)? / d)
            }
            SequenceTerm::IntPow(a, e) => {
                let base = a.eval_exact(n)?;
                pow_i(&base, *e).ok_or(EvalError::UndefinedAt(n))
            }
            SequenceTerm::Abs(a) => Ok(num_traits::Signed::abs(&a.eval_exact(n)?)),
            SequenceTerm::Periodic(cycle) => {
                let m = cycle.len() as u64;
                Ok(cycle[((n - 1) % m) as usize].clone())
            }
            SequenceTerm::Patch(inner, overrides) => match overrides.get(&n) {
                Some(v) => Ok(v.clone()),
                None => inner.eval_exact(n),
            },
            SequenceTerm::AffineSubseq(inner, stride, offset) => {
                inner.eval_exact(stride * n + offset)
            }
            SequenceTerm::Opaque(seq) => Err(EvalError::ExactUnavailable(seq.label().to_string())),
        }
    }

    /// Enclosure of the value at index n, targeting roughly `bits` bits
    /// of precision. Exact subterms stay exact; opaque generators and
    /// rounding contribute radius.
    pub fn eval_approx(&self, n: u64, bits: u32) -> Result<MidRad, EvalError> {
        debug_assert!(n >= 1, "sequence indices are 1-based");
        let compacted = |v: MidRad| if v.is_exact() { v } else { v.compact(bits) };
        match self {
            SequenceTerm::Const(c) => Ok(MidRad::exact(c.clone())),
            SequenceTerm::Index => Ok(MidRad::exact(Rational::from_integer(BigInt::from(n)))),
            SequenceTerm::Add(a, b) => {
                Ok(compacted(a.eval_approx(n, bits)?.add(&b.eval_approx(n, bits)?)))
            }
            SequenceTerm::Sub(a, b) => {
                Ok(compacted(a.eval_approx(n, bits)?.sub(&b.eval_approx(n, bits)?)))
            }
            SequenceTerm::Mul(a, b) => {
                Ok(compacted(a.eval_approx(n, bits)?.mul(&b.eval_approx(n, bits)?)))
            }
            SequenceTerm::Div(a, b) => {
                let d = b.eval_approx(n, bits)?;
                match a.eval_approx(n, bits)?.div(&d) {
                    Some(v) => Ok(compacted(v)),
                    None if d.is_exact() => Err(EvalError::UndefinedAt(n)),
                    None => Err(EvalError::Indeterminate(n)),
                }
            }
            SequenceTerm::IntPow(a, e) => {
                let base = a.eval_approx(n, bits)?;
                match base.pow_i(*e) {
                    Some(v) => Ok(compacted(v)),
                    None if base.is_exact() => Err(EvalError::UndefinedAt(n)),
                    None => Err(EvalError::Indeterminate(n)),
                }
            }
            SequenceTerm::Abs(a) => Ok(a.eval_approx(n, bits)?.abs()),
            SequenceTerm::Periodic(_) | SequenceTerm::Patch(_, _) => {
                match self.eval_exact(n) {
                    Ok(v) => Ok(MidRad::exact(v)),
                    Err(EvalError::ExactUnavailable(_)) => {
                        // A patched opaque: override indices are exact,
                        // the rest delegates.
                        if let SequenceTerm::Patch(inner, _) = self {
                            inner.eval_approx(n, bits)
                        } else {
                            unreachable!("periodic terms always evaluate exactly")
                        }
                    }
                    Err(e) => Err(e),
                }
            }
            SequenceTerm::AffineSubseq(inner, stride, offset) => {
                inner.eval_approx(stride * n + offset, bits)
            }
            SequenceTerm::Opaque(seq) => seq.eval(n, bits),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    #[test]
    fn reciprocal_index_at_four() {
        let t = SequenceTerm::from_int(1).div(SequenceTerm::index());
        assert_eq!(t.eval_exact(4).unwrap(), qr(1, 4));
    }

    #[test]
    fn patch_override_takes_priority() {
        let t = SequenceTerm::from_int(1)
            .div(SequenceTerm::index())
            .patch(BTreeMap::from([(1, q(5))]));
        assert_eq!(t.eval_exact(1).unwrap(), q(5));
        assert_eq!(t.eval_exact(2).unwrap(), qr(1, 2));
    }

    #[test]
    fn one_plus_alternating_is_zero_two_cycle() {
        let t = SequenceTerm::from_int(1).add(SequenceTerm::alternating());
        let got: Vec<Rational> = (1..=6).map(|n| t.eval_exact(n).unwrap()).collect();
        assert_eq!(got, vec![q(0), q(2), q(0), q(2), q(0), q(2)]);
    }

    #[test]
    fn division_by_zero_is_undefined() {
        let t = SequenceTerm::from_int(1).div(SequenceTerm::index().sub(SequenceTerm::from_int(3)));
        assert_eq!(t.eval_exact(3), Err(EvalError::UndefinedAt(3)));
        assert_eq!(t.eval_exact(5).unwrap(), qr(1, 2));
    }

    #[test]
    fn zero_base_negative_power_is_undefined() {
        let t = SequenceTerm::index().sub(SequenceTerm::from_int(2)).int_pow(-1);
        assert_eq!(t.eval_exact(2), Err(EvalError::UndefinedAt(2)));
        assert_eq!(t.eval_exact(4).unwrap(), qr(1, 2));
    }

    #[test]
    fn negative_base_negative_power_is_fine() {
        let t = SequenceTerm::from_int(-2).int_pow(-2);
        assert_eq!(t.eval_exact(1).unwrap(), qr(1, 4));
    }

    #[test]
    fn affine_subsequence_reindexes() {
        // n ↦ inner(2n + 1) on inner = n^2
        let t = SequenceTerm::index().int_pow(2).subseq(2, 1);
        assert_eq!(t.eval_exact(3).unwrap(), q(49));
    }

    #[test]
    fn exact_eval_rejects_opaque() {
        let t = SequenceTerm::opaque("mystery", |_, _| Ok(MidRad::exact(q(7))));
        assert!(matches!(
            t.eval_exact(1),
            Err(EvalError::ExactUnavailable(_))
        ));
        assert_eq!(t.eval_approx(1, 64).unwrap().mid, q(7));
    }

    #[test]
    fn approx_agrees_with_exact_on_symbolic_terms() {
        let t = SequenceTerm::index()
            .int_pow(2)
            .add(SequenceTerm::from_int(3))
            .div(SequenceTerm::index().add(SequenceTerm::from_int(1)))
            .abs();
        for n in 1..=30 {
            let e = t.eval_exact(n).unwrap();
            let a = t.eval_approx(n, 128).unwrap();
            assert!(a.is_exact());
            assert_eq!(a.mid, e);
        }
    }

    #[test]
    fn patched_opaque_uses_override_exactly() {
        let t = SequenceTerm::opaque("gen", |n, _| Ok(MidRad::exact(q(n as i64))))
            .patch(BTreeMap::from([(2, q(-9))]));
        assert_eq!(t.eval_approx(2, 32).unwrap().mid, q(-9));
        assert_eq!(t.eval_approx(5, 32).unwrap().mid, q(5));
    }
}
