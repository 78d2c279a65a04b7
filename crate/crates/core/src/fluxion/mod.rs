//! The quotient-ring API over sequence terms: two terms denote the same
//! fluxion when they agree at all but finitely many indices, and every
//! operation here respects that identification.

pub mod bw;
pub(crate) mod empirical;
pub mod verdict;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

pub use bw::{BwBranch, BwError, BwResult};
pub use verdict::{
    Classification, ExtendedRational, ExtremalLimits, LimitResult, Monotonicity, Outcome,
    Provenance, Verdict, Witness,
};

use crate::approx::MidRad;
use crate::rational::{q, Rational};
use crate::seqterm::normal::{normalize, NormalizeError, PeriodicRationalForm};
use crate::seqterm::{EvalError, SequenceTerm};

pub const DEFAULT_FUEL: u64 = 10_000;
pub const DEFAULT_BITS: u32 = 128;

/// Resource bounds for decision procedures: sampling fuel, working
/// precision, and whether to bypass the symbolic path entirely.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub fuel: u64,
    pub bits: u32,
    pub empirical_only: bool,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            fuel: DEFAULT_FUEL,
            bits: DEFAULT_BITS,
            empirical_only: false,
        }
    }
}

impl Budget {
    pub fn with_fuel(fuel: u64) -> Self {
        Budget {
            fuel,
            ..Budget::default()
        }
    }
}

/// An element of the quotient ring: a sequence up to eventual equality.
/// Equality of fluxions is the `eventual_eq` verdict, never structural
/// identity of terms.
#[derive(Clone, Debug)]
pub struct Fluxion {
    term: SequenceTerm,
    form: OnceLock<Result<PeriodicRationalForm, NormalizeError>>,
}

#[derive(Clone, Debug)]
pub enum InvertError {
    /// Avoidance of zero was refuted or could not be established; the
    /// verdict says which.
    NotInvertible(Verdict),
}

impl fmt::Display for InvertError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let InvertError::NotInvertible(v) = self;
        match v.outcome {
            Outcome::Refuted => write!(f, "not invertible: fails to avoid zero ({v})"),
            _ => write!(f, "not invertible: avoidance of zero undecided ({v})"),
        }
    }
}

impl std::error::Error for InvertError {}

#[derive(Clone, Debug)]
pub enum MonotoneError {
    /// The sequence is not (or could not be certified) monotone.
    NotMonotone(Monotonicity),
}

impl fmt::Display for MonotoneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let MonotoneError::NotMonotone(m) = self;
        match m {
            Monotonicity::Unknown => write!(f, "monotonicity could not be certified"),
            _ => write!(f, "sequence is not monotone"),
        }
    }
}

impl std::error::Error for MonotoneError {}

fn class_limits(form: &PeriodicRationalForm) -> Vec<ExtendedRational> {
    form.classes()
        .iter()
        .map(|c| c.limit_at_infinity())
        .collect()
}

impl Fluxion {
    pub fn from_term(term: SequenceTerm) -> Self {
        Fluxion {
            term,
            form: OnceLock::new(),
        }
    }

    /// The constant fluxion at a rational; the canonical ring embedding
    /// of the scalars.
    pub fn embed(a: Rational) -> Self {
        Fluxion::from_term(SequenceTerm::Const(a))
    }

    pub fn embed_int(a: i64) -> Self {
        Fluxion::embed(q(a))
    }

    pub fn term(&self) -> &SequenceTerm {
        &self.term
    }

    /// Normal form of the underlying term, computed once and cached.
    pub fn form_result(&self) -> &Result<PeriodicRationalForm, NormalizeError> {
        self.form.get_or_init(|| normalize(&self.term))
    }

    pub fn form(&self) -> Option<&PeriodicRationalForm> {
        self.form_result().as_ref().ok()
    }

    fn symbolic_form(&self, budget: Budget) -> Option<&PeriodicRationalForm> {
        if budget.empirical_only {
            None
        } else {
            self.form()
        }
    }

    pub fn eval_exact(&self, n: u64) -> Result<Rational, EvalError> {
        if let Some(form) = self.form() {
            if n >= form.threshold() {
                if let Some(v) = form.eval(n) {
                    return Ok(v);
                }
            }
        }
        self.term.eval_exact(n)
    }

    pub fn eval_approx(&self, n: u64, bits: u32) -> Result<MidRad, EvalError> {
        self.term.eval_approx(n, bits)
    }

    // Ring structure.

    pub fn add(&self, rhs: &Fluxion) -> Fluxion {
        Fluxion::from_term(self.term.clone().add(rhs.term.clone()))
    }

    pub fn sub(&self, rhs: &Fluxion) -> Fluxion {
        Fluxion::from_term(self.term.clone().sub(rhs.term.clone()))
    }

    pub fn mul(&self, rhs: &Fluxion) -> Fluxion {
        Fluxion::from_term(self.term.clone().mul(rhs.term.clone()))
    }

    pub fn neg(&self) -> Fluxion {
        Fluxion::from_term(self.term.clone().neg())
    }

    /// Componentwise magnitude |x|.
    pub fn abs(&self) -> Fluxion {
        Fluxion::from_term(self.term.clone().abs())
    }

    /// Identifies the underlying term with finitely many overrides
    /// applied; semantically the same fluxion.
    pub fn patched(&self, overrides: BTreeMap<u64, Rational>) -> Fluxion {
        Fluxion::from_term(self.term.clone().patch(overrides))
    }

    // Eventual comparisons.

    pub fn eventual_eq(&self, rhs: &Fluxion) -> Verdict {
        self.eventual_eq_with(rhs, Budget::default())
    }

    pub fn eventual_eq_with(&self, rhs: &Fluxion, budget: Budget) -> Verdict {
        let diff = self.sub(rhs);
        if let Some(form) = diff.symbolic_form(budget) {
            for (r, class) in form.classes().iter().enumerate() {
                if !class.is_zero() {
                    let es = form.class_sign(r);
                    return Verdict::refuted_class(r as u64, form.period(), es.witness)
                        .with_detail("difference is eventually nonzero on this class");
                }
            }
            return Verdict::proven_from(form.threshold());
        }
        empirical::check_property(budget.fuel, |n| {
            let v = empirical::eval_sample(&diff.term, n, budget.bits)?;
            if v.is_exact() && v.mid.is_zero() {
                Some(true)
            } else if v.excludes_zero() {
                Some(false)
            } else {
                None
            }
        })
    }

    pub fn le(&self, rhs: &Fluxion) -> Verdict {
        self.le_with(rhs, Budget::default())
    }

    /// x ≤ y: componentwise x_n ≤ y_n at all but finitely many n.
    pub fn le_with(&self, rhs: &Fluxion, budget: Budget) -> Verdict {
        let diff = rhs.sub(self);
        if let Some(form) = diff.symbolic_form(budget) {
            let mut witness = form.threshold();
            for (r, es) in form.eventual_signs().iter().enumerate() {
                if es.sign < 0 {
                    return Verdict::refuted_class(r as u64, form.period(), es.witness)
                        .with_detail("difference is eventually negative on this class");
                }
                witness = witness.max(es.witness);
            }
            return Verdict::proven_from(witness);
        }
        empirical::check_property(budget.fuel, |n| {
            let v = empirical::eval_sample(&diff.term, n, budget.bits)?;
            if v.lower() >= Rational::zero() {
                Some(true)
            } else if v.upper() < Rational::zero() {
                Some(false)
            } else {
                None
            }
        })
    }

    pub fn lt(&self, rhs: &Fluxion) -> Verdict {
        self.lt_with(rhs, Budget::default())
    }

    /// x < y: componentwise strict inequality at all but finitely many n.
    pub fn lt_with(&self, rhs: &Fluxion, budget: Budget) -> Verdict {
        let diff = rhs.sub(self);
        if let Some(form) = diff.symbolic_form(budget) {
            let mut witness = form.threshold();
            for (r, es) in form.eventual_signs().iter().enumerate() {
                if es.sign < 0 {
                    return Verdict::refuted_class(r as u64, form.period(), es.witness)
                        .with_detail("difference is eventually negative on this class");
                }
                if es.sign == 0 {
                    return Verdict::refuted_class(r as u64, form.period(), es.witness)
                        .with_detail("difference vanishes identically on this class");
                }
                witness = witness.max(es.witness);
            }
            return Verdict::proven_from(witness);
        }
        empirical::check_property(budget.fuel, |n| {
            let v = empirical::eval_sample(&diff.term, n, budget.bits)?;
            if v.lower() > Rational::zero() {
                Some(true)
            } else if v.upper() <= Rational::zero() {
                Some(false)
            } else {
                None
            }
        })
    }

    pub fn ge(&self, rhs: &Fluxion) -> Verdict {
        rhs.le(self)
    }

    pub fn ge_with(&self, rhs: &Fluxion, budget: Budget) -> Verdict {
        rhs.le_with(self, budget)
    }

    pub fn gt(&self, rhs: &Fluxion) -> Verdict {
        rhs.lt(self)
    }

    pub fn gt_with(&self, rhs: &Fluxion, budget: Budget) -> Verdict {
        rhs.lt_with(self, budget)
    }

    pub fn avoids(&self, rhs: &Fluxion) -> Verdict {
        self.avoids_with(rhs, Budget::default())
    }

    /// x avoids y: x_n ≠ y_n for all n past some index. Exactly the
    /// condition under which x − y is invertible.
    pub fn avoids_with(&self, rhs: &Fluxion, budget: Budget) -> Verdict {
        let diff = self.sub(rhs);
        if let Some(form) = diff.symbolic_form(budget) {
            let mut witness = form.threshold();
            for (r, class) in form.classes().iter().enumerate() {
                if class.is_zero() {
                    return Verdict::refuted_class(r as u64, form.period(), form.threshold())
                        .with_detail("values coincide along this class");
                }
                witness = witness.max(form.class_sign(r).witness);
            }
            return Verdict::proven_from(witness);
        }
        empirical::check_property(budget.fuel, |n| {
            let v = empirical::eval_sample(&diff.term, n, budget.bits)?;
            if v.excludes_zero() {
                Some(true)
            } else if v.is_exact() && v.mid.is_zero() {
                Some(false)
            } else {
                None
            }
        })
    }

    pub fn invert(&self) -> Result<Fluxion, InvertError> {
        self.invert_with(Budget::default())
    }

    /// Multiplicative inverse. The finitely many indices where the
    /// sequence vanishes (all below the avoidance witness) are patched
    /// to 1 before forming the reciprocal, which does not change the
    /// fluxion the result denotes.
    pub fn invert_with(&self, budget: Budget) -> Result<Fluxion, InvertError> {
        let verdict = self.avoids_with(&Fluxion::embed_int(0), budget);
        if !verdict.is_proven() {
            return Err(InvertError::NotInvertible(verdict));
        }
        let scan_to = match verdict.witness {
            Some(Witness::Index(n)) => n,
            // Stabilized empirical avoidance has no index bound; patch
            // certified zeros in a fixed initial stretch.
            _ => empirical::FINAL_WINDOW,
        };
        let mut overrides = BTreeMap::new();
        for n in 1..scan_to {
            let vanishes = match self.term.eval_exact(n) {
                Ok(v) => v.is_zero(),
                Err(EvalError::UndefinedAt(_)) => true,
                Err(_) => match self.term.eval_approx(n, budget.bits) {
                    Ok(v) => v.is_exact() && v.mid.is_zero(),
                    Err(_) => true,
                },
            };
            if vanishes {
                overrides.insert(n, Rational::one());
            }
        }
        let base = if overrides.is_empty() {
            self.term.clone()
        } else {
            self.term.clone().patch(overrides)
        };
        Ok(Fluxion::from_term(SequenceTerm::from_int(1).div(base)))
    }

    pub fn divide(&self, rhs: &Fluxion) -> Result<Fluxion, InvertError> {
        self.divide_with(rhs, Budget::default())
    }

    pub fn divide_with(&self, rhs: &Fluxion, budget: Budget) -> Result<Fluxion, InvertError> {
        Ok(self.mul(&rhs.invert_with(budget)?))
    }

    // Asymptotic classification.

    pub fn classify(&self) -> Classification {
        self.classify_with(Budget::default())
    }

    pub fn classify_with(&self, budget: Budget) -> Classification {
        let Some(form) = self.symbolic_form(budget) else {
            return empirical::classify_empirical(&self.term, budget.fuel, budget.bits);
        };
        let limits = class_limits(form);
        let thr = form.threshold();
        let period = form.period();
        let zero = ExtendedRational::Finite(Rational::zero());

        let infinitesimal = match limits.iter().position(|l| *l != zero) {
            None => Verdict::proven_from(thr),
            Some(r) => Verdict::refuted_class(r as u64, period, thr)
                .with_detail("class limit is not zero"),
        };
        let finite = match form.classes().iter().position(|c| !c.is_bounded()) {
            None => Verdict::proven_from(thr),
            Some(r) => Verdict::refuted_class(r as u64, period, thr)
                .with_detail("class is unbounded"),
        };
        let (convergent, limit_value) = {
            let first = &limits[0];
            if limits.iter().any(|l| l != first) {
                let r = limits.iter().position(|l| l != first).unwrap();
                (
                    Verdict::refuted_class(r as u64, period, thr)
                        .with_detail("class limits differ"),
                    None,
                )
            } else {
                match first.finite() {
                    Some(v) => (Verdict::proven_from(thr), Some(v.clone())),
                    None => (
                        Verdict::refuted_class(0, period, thr)
                            .with_detail("common class limit is infinite"),
                        None,
                    ),
                }
            }
        };
        let to_plus = match limits
            .iter()
            .position(|l| *l != ExtendedRational::PosInfinity)
        {
            None => Verdict::proven_from(thr),
            Some(r) => Verdict::refuted_class(r as u64, period, thr)
                .with_detail("class does not grow without bound"),
        };
        let to_minus = match limits
            .iter()
            .position(|l| *l != ExtendedRational::NegInfinity)
        {
            None => Verdict::proven_from(thr),
            Some(r) => Verdict::refuted_class(r as u64, period, thr)
                .with_detail("class does not descend without bound"),
        };

        Classification {
            infinitesimal,
            finite,
            convergent,
            limit: limit_value,
            to_plus_infinity: to_plus,
            to_minus_infinity: to_minus,
            avoids_zero: self.avoids_with(&Fluxion::embed_int(0), budget),
            monotone: self.monotonicity_with(budget),
        }
    }

    /// Eventual monotonicity, decided from the sign of the step
    /// x_{n+1} − x_n (kept symbolic through an affine reindexing).
    pub fn monotonicity_with(&self, budget: Budget) -> Monotonicity {
        let step = Fluxion::from_term(
            self.term
                .clone()
                .subseq(1, 1)
                .sub(self.term.clone()),
        );
        if let Some(form) = step.symbolic_form(budget) {
            let signs = form.eventual_signs();
            if signs.iter().all(|s| s.sign >= 0) {
                return Monotonicity::Increasing;
            }
            if signs.iter().all(|s| s.sign <= 0) {
                return Monotonicity::Decreasing;
            }
            return Monotonicity::No;
        }
        empirical::empirical_monotonicity(&self.term, budget.fuel, budget.bits)
    }

    pub fn limit(&self) -> LimitResult {
        self.limit_with(Budget::default())
    }

    pub fn limit_with(&self, budget: Budget) -> LimitResult {
        if let Some(form) = self.symbolic_form(budget) {
            let limits = class_limits(form);
            let first = limits[0].clone();
            if limits.iter().all(|l| *l == first) {
                return LimitResult::Exact(first);
            }
            let limsup = limits.iter().max().unwrap().clone();
            let liminf = limits.iter().min().unwrap().clone();
            return LimitResult::DivergentOscillating { limsup, liminf };
        }
        empirical::empirical_limit(&self.term, budget.fuel, budget.bits)
    }

    pub fn limsup_liminf(&self) -> ExtremalLimits {
        self.limsup_liminf_with(Budget::default())
    }

    /// Largest and smallest subsequential limits. On the fragment the
    /// set of subsequential limits is exactly the set of per-class
    /// limits, so these are the extremes of that finite set.
    pub fn limsup_liminf_with(&self, budget: Budget) -> ExtremalLimits {
        if let Some(form) = self.symbolic_form(budget) {
            let limits = class_limits(form);
            return ExtremalLimits {
                limsup: limits.iter().max().unwrap().clone(),
                liminf: limits.iter().min().unwrap().clone(),
                provenance: Provenance::Symbolic,
            };
        }
        match empirical::empirical_extremes(&self.term, budget.fuel, budget.bits) {
            Some((hi, lo)) => ExtremalLimits {
                limsup: ExtendedRational::Finite(hi),
                liminf: ExtendedRational::Finite(lo),
                provenance: Provenance::Empirical { fuel: budget.fuel },
            },
            None => ExtremalLimits {
                limsup: ExtendedRational::PosInfinity,
                liminf: ExtendedRational::NegInfinity,
                provenance: Provenance::Empirical { fuel: budget.fuel },
            },
        }
    }

    pub fn infinitely_close(&self, rhs: &Fluxion) -> Verdict {
        self.infinitely_close_with(rhs, Budget::default())
    }

    /// x ≈ y: the difference is infinitesimal.
    pub fn infinitely_close_with(&self, rhs: &Fluxion, budget: Budget) -> Verdict {
        let diff = self.sub(rhs);
        let verdict = diff.classify_with(budget).infinitesimal;
        if verdict.is_proven() || verdict.provenance.is_symbolic() {
            return verdict;
        }
        // The plain tail estimate both misses slow power-law decay and,
        // worse, understates its radius, so an empirical refutation
        // from it may be an artifact. The contraction test arbitrates
        // either way: its refutations require a window separated from
        // zero that has stopped shrinking.
        empirical::empirical_vanishing(diff.term(), budget.fuel, budget.bits)
    }

    // Subsequences.

    /// Affine subfluxion n ↦ x(stride·n + offset); stays symbolic.
    pub fn subfluxion(&self, stride: u64, offset: u64) -> Fluxion {
        Fluxion::from_term(self.term.clone().subseq(stride, offset))
    }

    /// Subfluxion along an arbitrary strictly increasing index map;
    /// opaque, so all downstream analysis is empirical.
    pub fn subfluxion_general(
        &self,
        indexmap: Arc<dyn Fn(u64) -> u64 + Send + Sync>,
    ) -> Fluxion {
        debug_assert!(
            (1..16).all(|k| indexmap(k) < indexmap(k + 1)),
            "index map must be strictly increasing"
        );
        let term = self.term.clone();
        Fluxion::from_term(SequenceTerm::opaque("subsequence", move |n, bits| {
            term.eval_approx(indexmap(n), bits)
        }))
    }

    /// The series view: n ↦ x_1 + ... + x_n, with memoized prefix sums.
    /// Requires x to be evaluable at every index from 1 on.
    pub fn partial_sums(&self) -> Fluxion {
        let term = self.term.clone();
        let state = Mutex::new(SumState {
            exact: Some(Vec::new()),
            approx: Vec::new(),
            approx_bits: 0,
        });
        Fluxion::from_term(SequenceTerm::opaque("partial_sums", move |n, bits| {
            let mut st = state.lock().unwrap();
            st.sum_to(&term, n, bits)
        }))
    }

    /// Limit of a monotone sequence: its supremum or infimum, or the
    /// appropriate infinity when unbounded.
    pub fn monotone_limit(&self, budget: Budget) -> Result<LimitResult, MonotoneError> {
        let mono = self.monotonicity_with(budget);
        match mono {
            Monotonicity::Increasing | Monotonicity::Decreasing => {}
            other => return Err(MonotoneError::NotMonotone(other)),
        }
        Ok(self.limit_with(budget))
    }

    pub fn bw_extract(&self, budget: Budget) -> Result<BwResult, BwError> {
        bw::extract(self, budget)
    }
}

/// Grows a denominator this large (in bits) and the exact prefix-sum
/// path hands over to enclosure arithmetic.
const SUM_EXACT_BIT_CAP: u64 = 1 << 20;

struct SumState {
    exact: Option<Vec<Rational>>,
    approx: Vec<MidRad>,
    approx_bits: u32,
}

impl SumState {
    fn sum_to(&mut self, term: &SequenceTerm, n: u64, bits: u32) -> Result<MidRad, EvalError> {
        if let Some(exact) = &mut self.exact {
            let mut fell_back = false;
            while (exact.len() as u64) < n {
                let k = exact.len() as u64 + 1;
                match term.eval_exact(k) {
                    Ok(v) => {
                        let prev = exact.last().cloned().unwrap_or_else(Rational::zero);
                        let next = prev + v;
                        if denominator_bits(&next) > SUM_EXACT_BIT_CAP {
                            fell_back = true;
                            break;
                        }
                        exact.push(next);
                    }
                    Err(EvalError::ExactUnavailable(_)) => {
                        fell_back = true;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if !fell_back {
                return Ok(MidRad::exact(exact[(n - 1) as usize].clone()));
            }
            self.exact = None;
        }
        // Guard bits cover the accumulation of per-term radii.
        let inner_bits = bits + 64;
        if self.approx_bits < inner_bits {
            self.approx.clear();
            self.approx_bits = inner_bits;
        }
        while (self.approx.len() as u64) < n {
            let k = self.approx.len() as u64 + 1;
            let v = term.eval_approx(k, inner_bits)?;
            let prev = self
                .approx
                .last()
                .cloned()
                .unwrap_or_else(|| MidRad::exact(Rational::zero()));
            let next = prev.add(&v);
            let next = if next.is_exact() {
                next
            } else {
                next.compact(inner_bits)
            };
            self.approx.push(next);
        }
        Ok(self.approx[(n - 1) as usize].clone())
    }
}

fn denominator_bits(v: &Rational) -> u64 {
    v.denom().bits()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;
    use num_traits::Signed;

    fn inv_n() -> Fluxion {
        Fluxion::from_term(SequenceTerm::from_int(1).div(SequenceTerm::index()))
    }

    fn one_plus_alt() -> Fluxion {
        Fluxion::from_term(SequenceTerm::from_int(1).add(SequenceTerm::alternating()))
    }

    fn one_minus_alt() -> Fluxion {
        Fluxion::from_term(SequenceTerm::from_int(1).sub(SequenceTerm::alternating()))
    }

    #[test]
    fn embedding_constants_preserves_order() {
        let v = Fluxion::embed_int(2).le(&Fluxion::embed_int(3));
        assert!(v.is_proven());
        assert_eq!(v.witness, Some(Witness::Index(1)));
    }

    #[test]
    fn zero_divisor_pair_multiplies_to_zero() {
        let x = one_plus_alt();
        let y = one_minus_alt();
        let zero = Fluxion::embed_int(0);
        assert!(x.mul(&y).eventual_eq(&zero).is_proven());
        assert!(x.eventual_eq(&zero).is_refuted());
        assert!(y.eventual_eq(&zero).is_refuted());
    }

    #[test]
    fn patched_term_is_the_same_fluxion() {
        let x = inv_n();
        let y = x.patched(BTreeMap::from([(1, q(99)), (7, q(-4))]));
        assert!(x.eventual_eq(&y).is_proven());
    }

    #[test]
    fn one_plus_alternating_is_not_two() {
        let v = one_plus_alt().eventual_eq(&Fluxion::embed_int(2));
        assert!(v.is_refuted());
        assert!(matches!(v.witness, Some(Witness::Class { class: 0, .. })));
    }

    #[test]
    fn bounded_above_by_two_but_not_strictly() {
        let x = one_plus_alt();
        let two = Fluxion::embed_int(2);
        assert!(x.le(&two).is_proven());
        assert!(x.lt(&two).is_refuted());
    }

    #[test]
    fn alternating_pair_is_incomparable() {
        let x = one_plus_alt();
        let y = one_minus_alt();
        assert!(x.le(&y).is_refuted());
        assert!(y.le(&x).is_refuted());
    }

    #[test]
    fn strictly_positive_reciprocal() {
        let v = Fluxion::embed_int(0).lt(&inv_n());
        assert!(v.is_proven());
        assert_eq!(v.witness, Some(Witness::Index(1)));
    }

    #[test]
    fn avoidance_examples() {
        let zero = Fluxion::embed_int(0);
        assert!(zero.avoids(&one_plus_alt()).is_refuted());
        assert!(zero.avoids(&inv_n()).is_proven());
    }

    #[test]
    fn inversion_of_index_gives_reciprocal() {
        let n = Fluxion::from_term(SequenceTerm::index());
        let inv = n.invert().unwrap();
        assert!(inv.eventual_eq(&inv_n()).is_proven());
        assert!(n.mul(&inv).eventual_eq(&Fluxion::embed_int(1)).is_proven());
    }

    #[test]
    fn zero_divisor_is_not_invertible() {
        match one_plus_alt().invert() {
            Err(InvertError::NotInvertible(v)) => assert!(v.is_refuted()),
            Ok(_) => panic!("zero divisor must not invert"),
        }
    }

    #[test]
    fn inversion_patches_initial_zeros() {
        // x_n = n - 3 vanishes at n = 3 yet avoids zero.
        let x = Fluxion::from_term(SequenceTerm::index().sub(SequenceTerm::from_int(3)));
        let inv = x.invert().unwrap();
        assert!(inv.eval_exact(3).is_ok());
        assert!(x.mul(&inv).eventual_eq(&Fluxion::embed_int(1)).is_proven());
    }

    #[test]
    fn classify_reciprocal_is_infinitesimal() {
        let c = inv_n().classify();
        assert!(c.infinitesimal.is_proven());
        assert!(c.convergent.is_proven());
        assert_eq!(c.limit, Some(q(0)));
        assert!(c.finite.is_proven());
        assert_eq!(c.monotone, Monotonicity::Decreasing);
        assert!(c.infinitesimal.provenance.is_symbolic());
        assert_eq!(c.infinitesimal.witness, Some(Witness::Index(1)));
    }

    #[test]
    fn classify_index_goes_to_infinity() {
        let c = Fluxion::from_term(SequenceTerm::index()).classify();
        assert!(c.to_plus_infinity.is_proven());
        assert!(c.finite.is_refuted());
        assert!(c.avoids_zero.is_proven());
        assert_eq!(c.monotone, Monotonicity::Increasing);
    }

    #[test]
    fn classify_signed_index_diverges_both_ways() {
        let t = SequenceTerm::alternating().mul(SequenceTerm::index());
        let c = Fluxion::from_term(t).classify();
        assert!(c.convergent.is_refuted());
        assert!(c.to_plus_infinity.is_refuted());
        assert!(c.to_minus_infinity.is_refuted());
        assert!(c.finite.is_refuted());
    }

    #[test]
    fn limit_of_rational_ratio() {
        // (3n^2 + 1)/(n^2 + n) -> 3
        let num = SequenceTerm::from_int(3)
            .mul(SequenceTerm::index().int_pow(2))
            .add(SequenceTerm::from_int(1));
        let den = SequenceTerm::index()
            .int_pow(2)
            .add(SequenceTerm::index());
        let x = Fluxion::from_term(num.div(den));
        assert_eq!(
            x.limit(),
            LimitResult::Exact(ExtendedRational::Finite(q(3)))
        );
        let big = x.eval_exact(1_000_000).unwrap();
        assert!((big - q(3)).abs() < qr(1, 100_000));
    }

    #[test]
    fn limit_of_alternating_oscillates() {
        let x = Fluxion::from_term(SequenceTerm::alternating());
        match x.limit() {
            LimitResult::DivergentOscillating { limsup, liminf } => {
                assert_eq!(limsup, ExtendedRational::Finite(q(1)));
                assert_eq!(liminf, ExtendedRational::Finite(q(-1)));
            }
            other => panic!("expected oscillation, got {other}"),
        }
    }

    #[test]
    fn extremal_limits_examples() {
        let alt = Fluxion::from_term(SequenceTerm::alternating());
        let e = alt.limsup_liminf();
        assert_eq!(e.limsup, ExtendedRational::Finite(q(1)));
        assert_eq!(e.liminf, ExtendedRational::Finite(q(-1)));
        assert!(e.provenance.is_symbolic());

        let e = inv_n().limsup_liminf();
        assert_eq!(e.limsup, ExtendedRational::Finite(q(0)));
        assert_eq!(e.liminf, ExtendedRational::Finite(q(0)));

        let t = SequenceTerm::alternating().mul(SequenceTerm::index());
        let e = Fluxion::from_term(t).limsup_liminf();
        assert_eq!(e.limsup, ExtendedRational::PosInfinity);
        assert_eq!(e.liminf, ExtendedRational::NegInfinity);
    }

    #[test]
    fn infinitely_close_examples() {
        let n = Fluxion::from_term(SequenceTerm::index());
        let n_plus = Fluxion::from_term(SequenceTerm::index().add(
            SequenceTerm::from_int(1).div(SequenceTerm::index()),
        ));
        assert!(n.infinitely_close(&n_plus).is_proven());

        let nsq = Fluxion::from_term(SequenceTerm::index().int_pow(2));
        let shifted = Fluxion::from_term(
            SequenceTerm::index()
                .int_pow(2)
                .add(SequenceTerm::from_int(2))
                .add(SequenceTerm::from_int(1).div(SequenceTerm::index().int_pow(2))),
        );
        assert!(nsq.infinitely_close(&shifted).is_refuted());
    }

    #[test]
    fn affine_subfluxions_stay_symbolic() {
        let alt = Fluxion::from_term(SequenceTerm::alternating());
        let evens = alt.subfluxion(2, 0);
        assert!(evens.eventual_eq(&Fluxion::embed_int(1)).is_proven());

        let sub = inv_n().subfluxion(3, 1);
        let direct = Fluxion::from_term(SequenceTerm::from_int(1).div(
            SequenceTerm::from_int(3)
                .mul(SequenceTerm::index())
                .add(SequenceTerm::from_int(1)),
        ));
        assert!(sub.eventual_eq(&direct).is_proven());
    }

    #[test]
    fn general_subfluxion_keeps_the_limit_empirically() {
        let x = Fluxion::from_term(
            SequenceTerm::from_int(2).sub(SequenceTerm::from_int(1).div(SequenceTerm::index())),
        );
        let y = x.subfluxion_general(Arc::new(|n| n * n + 3));
        match y.limit_with(Budget::with_fuel(2_000)) {
            LimitResult::Approx { mid, rad, .. } => {
                assert!((mid - q(2)).abs() <= rad);
            }
            other => panic!("expected an estimate, got {other}"),
        }
    }

    #[test]
    fn geometric_partial_sums_approach_one() {
        let half_pow = Fluxion::from_term(
            SequenceTerm::from_int(1).div(SequenceTerm::from_int(2).int_pow(1).int_pow(1))
        );
        // 1/2^n as Div(1, IntPow-of-constant) is constant 1/2; build
        // the true geometric term instead via n-th powers.
        let _ = half_pow;
        let geo = Fluxion::from_term(SequenceTerm::opaque("geometric", |n, _| {
            let mut p = Rational::one();
            for _ in 0..n {
                p /= Rational::from_integer(2.into());
            }
            Ok(MidRad::exact(p))
        }));
        let sums = geo.partial_sums();
        match sums.limit_with(Budget::with_fuel(1_000)) {
            LimitResult::Approx { mid, rad, .. } => {
                assert!((mid - q(1)).abs() <= rad + qr(1, 1_000_000));
            }
            other => panic!("expected an estimate, got {other}"),
        }
    }

    #[test]
    fn zero_and_constant_partial_sums() {
        let zero_sums = Fluxion::embed_int(0).partial_sums();
        assert!(zero_sums
            .eventual_eq_with(&Fluxion::embed_int(0), Budget::with_fuel(500))
            .is_proven());

        let one_sums = Fluxion::embed_int(1).partial_sums();
        let c = one_sums.classify_with(Budget::default());
        assert!(c.to_plus_infinity.is_proven());
        assert!(!c.to_plus_infinity.provenance.is_symbolic());
    }

    #[test]
    fn monotone_limits() {
        let x = Fluxion::from_term(
            SequenceTerm::index()
                .sub(SequenceTerm::from_int(1))
                .div(SequenceTerm::index()),
        );
        assert_eq!(
            x.monotone_limit(Budget::default()).unwrap(),
            LimitResult::Exact(ExtendedRational::Finite(q(1)))
        );

        let n = Fluxion::from_term(SequenceTerm::index());
        assert_eq!(
            n.monotone_limit(Budget::default()).unwrap(),
            LimitResult::Exact(ExtendedRational::PosInfinity)
        );

        let alt = Fluxion::from_term(SequenceTerm::alternating());
        assert!(matches!(
            alt.monotone_limit(Budget::default()),
            Err(MonotoneError::NotMonotone(Monotonicity::No))
        ));
    }

    #[test]
    fn triangle_inequality_for_magnitudes() {
        let x = one_plus_alt();
        let y = inv_n().neg();
        let lhs = x.add(&y).abs();
        let rhs = x.abs().add(&y.abs());
        assert!(lhs.le(&rhs).is_proven());
    }

    #[test]
    fn magnitude_of_signed_reciprocal() {
        let signed = Fluxion::from_term(
            SequenceTerm::alternating().mul(SequenceTerm::from_int(1).div(SequenceTerm::index())),
        );
        assert!(signed.abs().eventual_eq(&inv_n()).is_proven());
        assert!(Fluxion::embed_int(-3)
            .abs()
            .eventual_eq(&Fluxion::embed_int(3))
            .is_proven());
    }
}
