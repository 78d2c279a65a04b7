//! Decidable point-set topology over finite unions of rational-endpoint
//! intervals, together with the sequence-facing predicates: eventual
//! membership, accumulation and isolated points, and a sequential
//! compactness probe built on subsequence extraction.

use std::fmt;

use num_traits::Zero;

use crate::approx::MidRad;
use crate::fluxion::{Budget, BwError, ExtendedRational, Fluxion, LimitResult, Verdict};
use crate::rational::{qr, Rational};
use crate::seqterm::SequenceTerm;

/// One interval with rational or infinite endpoints. Infinite endpoints
/// are always open; a degenerate `[q, q]` is the singleton {q}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: ExtendedRational,
    pub lo_closed: bool,
    pub hi: ExtendedRational,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: ExtendedRational, lo_closed: bool, hi: ExtendedRational, hi_closed: bool) -> Self {
        let lo_closed = lo_closed && lo.is_finite();
        let hi_closed = hi_closed && hi.is_finite();
        Interval {
            lo,
            lo_closed,
            hi,
            hi_closed,
        }
    }

    pub fn closed(a: Rational, b: Rational) -> Self {
        Interval::new(
            ExtendedRational::Finite(a),
            true,
            ExtendedRational::Finite(b),
            true,
        )
    }

    pub fn open(a: ExtendedRational, b: ExtendedRational) -> Self {
        Interval::new(a, false, b, false)
    }

    pub fn singleton(q: Rational) -> Self {
        Interval::closed(q.clone(), q)
    }

    pub fn is_empty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Equal => !(self.lo_closed && self.hi_closed),
            std::cmp::Ordering::Less => false,
        }
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi && self.lo_closed && self.hi_closed
    }

    pub fn contains_point(&self, q: &Rational) -> bool {
        let v = ExtendedRational::Finite(q.clone());
        let above = match v.cmp(&self.lo) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Equal => self.lo_closed,
            std::cmp::Ordering::Less => false,
        };
        let below = match v.cmp(&self.hi) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => self.hi_closed,
            std::cmp::Ordering::Greater => false,
        };
        above && below
    }

    /// Whether the whole closed block [lo, hi] lies inside.
    fn contains_block(&self, lo: &Rational, hi: &Rational) -> bool {
        let above = match ExtendedRational::Finite(lo.clone()).cmp(&self.lo) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Equal => self.lo_closed,
            std::cmp::Ordering::Less => false,
        };
        let below = match ExtendedRational::Finite(hi.clone()).cmp(&self.hi) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => self.hi_closed,
            std::cmp::Ordering::Greater => false,
        };
        above && below
    }

    /// Whether the closed block [lo, hi] misses this interval entirely.
    fn disjoint_from_block(&self, lo: &Rational, hi: &Rational) -> bool {
        let hi = ExtendedRational::Finite(hi.clone());
        let lo = ExtendedRational::Finite(lo.clone());
        match hi.cmp(&self.lo) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Equal if !self.lo_closed => return true,
            _ => {}
        }
        match lo.cmp(&self.hi) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Equal if !self.hi_closed => true,
            _ => false,
        }
    }

    fn intersect(&self, rhs: &Interval) -> Interval {
        let (lo, lo_closed) = match self.lo.cmp(&rhs.lo) {
            std::cmp::Ordering::Greater => (self.lo.clone(), self.lo_closed),
            std::cmp::Ordering::Less => (rhs.lo.clone(), rhs.lo_closed),
            std::cmp::Ordering::Equal => (self.lo.clone(), self.lo_closed && rhs.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&rhs.hi) {
            std::cmp::Ordering::Less => (self.hi.clone(), self.hi_closed),
            std::cmp::Ordering::Greater => (rhs.hi.clone(), rhs.hi_closed),
            std::cmp::Ordering::Equal => (self.hi.clone(), self.hi_closed && rhs.hi_closed),
        };
        Interval::new(lo, lo_closed, hi, hi_closed)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_singleton() {
            return write!(f, "{{{}}}", self.lo);
        }
        let lb = if self.lo_closed { '[' } else { '(' };
        let rb = if self.hi_closed { ']' } else { ')' };
        write!(f, "{lb}{}, {}{rb}", self.lo, self.hi)
    }
}

/// A finite union of intervals in canonical form: components sorted,
/// pairwise disjoint and non-adjacent (no two merge into one interval).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalSet {
    components: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet {
            components: Vec::new(),
        }
    }

    pub fn real_line() -> Self {
        IntervalSet::from_intervals(vec![Interval::open(
            ExtendedRational::NegInfinity,
            ExtendedRational::PosInfinity,
        )])
    }

    pub fn singleton(q: Rational) -> Self {
        IntervalSet::from_intervals(vec![Interval::singleton(q)])
    }

    pub fn closed(a: Rational, b: Rational) -> Self {
        IntervalSet::from_intervals(vec![Interval::closed(a, b)])
    }

    pub fn open(a: Rational, b: Rational) -> Self {
        IntervalSet::from_intervals(vec![Interval::open(
            ExtendedRational::Finite(a),
            ExtendedRational::Finite(b),
        )])
    }

    /// Canonicalizes: drops empty intervals, sorts, merges overlapping
    /// or touching components.
    pub fn from_intervals(intervals: Vec<Interval>) -> Self {
        let mut parts: Vec<Interval> = intervals.into_iter().filter(|i| !i.is_empty()).collect();
        parts.sort_by(|a, b| {
            a.lo
                .cmp(&b.lo)
                .then_with(|| b.lo_closed.cmp(&a.lo_closed))
        });
        let mut components: Vec<Interval> = Vec::with_capacity(parts.len());
        for next in parts {
            match components.last_mut() {
                Some(prev) => {
                    let overlaps = match next.lo.cmp(&prev.hi) {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Equal => prev.hi_closed || next.lo_closed,
                        std::cmp::Ordering::Greater => false,
                    };
                    if overlaps {
                        let extend = match next.hi.cmp(&prev.hi) {
                            std::cmp::Ordering::Greater => true,
                            std::cmp::Ordering::Equal => next.hi_closed && !prev.hi_closed,
                            std::cmp::Ordering::Less => false,
                        };
                        if extend {
                            prev.hi = next.hi;
                            prev.hi_closed = next.hi_closed;
                        }
                    } else {
                        components.push(next);
                    }
                }
                None => components.push(next),
            }
        }
        IntervalSet { components }
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn contains_point(&self, q: &Rational) -> bool {
        self.components.iter().any(|c| c.contains_point(q))
    }

    /// Certified membership of an enclosure: `Some(true)` when the whole
    /// enclosure fits in one component, `Some(false)` when it misses the
    /// set entirely, `None` otherwise.
    pub fn contains_enclosure(&self, v: &MidRad) -> Option<bool> {
        let lo = v.lower();
        let hi = v.upper();
        if self.components.iter().any(|c| c.contains_block(&lo, &hi)) {
            return Some(true);
        }
        if self
            .components
            .iter()
            .all(|c| c.disjoint_from_block(&lo, &hi))
        {
            return Some(false);
        }
        None
    }

    pub fn union(&self, rhs: &IntervalSet) -> IntervalSet {
        let mut all = self.components.clone();
        all.extend(rhs.components.iter().cloned());
        IntervalSet::from_intervals(all)
    }

    pub fn intersect(&self, rhs: &IntervalSet) -> IntervalSet {
        let mut parts = Vec::new();
        for a in &self.components {
            for b in &rhs.components {
                parts.push(a.intersect(b));
            }
        }
        IntervalSet::from_intervals(parts)
    }

    pub fn complement(&self) -> IntervalSet {
        let mut parts = Vec::new();
        let mut cursor = (ExtendedRational::NegInfinity, false);
        for c in &self.components {
            parts.push(Interval::new(
                cursor.0,
                cursor.1,
                c.lo.clone(),
                !c.lo_closed,
            ));
            cursor = (c.hi.clone(), !c.hi_closed);
        }
        parts.push(Interval::new(
            cursor.0,
            cursor.1,
            ExtendedRational::PosInfinity,
            false,
        ));
        IntervalSet::from_intervals(parts)
    }

    pub fn is_subset_of(&self, rhs: &IntervalSet) -> bool {
        &self.intersect(rhs) == self
    }

    /// Open iff every finite endpoint is excluded and no component is a
    /// single point.
    pub fn is_open(&self) -> bool {
        self.components.iter().all(|c| {
            !c.is_singleton()
                && (!c.lo.is_finite() || !c.lo_closed)
                && (!c.hi.is_finite() || !c.hi_closed)
        })
    }

    /// Closed iff every finite endpoint is included.
    pub fn is_closed(&self) -> bool {
        self.components.iter().all(|c| {
            (!c.lo.is_finite() || c.lo_closed) && (!c.hi.is_finite() || c.hi_closed)
        })
    }

    pub fn is_bounded(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.lo.is_finite() && c.hi.is_finite())
    }

    /// Compactness through the closed-and-bounded characterization,
    /// which on this carrier is decidable.
    pub fn is_compact(&self) -> bool {
        self.is_closed() && self.is_bounded()
    }

    /// Smallest closed superset: all finite endpoints become included.
    pub fn closure(&self) -> IntervalSet {
        IntervalSet::from_intervals(
            self.components
                .iter()
                .map(|c| {
                    Interval::new(c.lo.clone(), c.lo.is_finite(), c.hi.clone(), c.hi.is_finite())
                })
                .collect(),
        )
    }

    /// Largest open subset: endpoints opened, singletons dropped.
    pub fn interior(&self) -> IntervalSet {
        IntervalSet::from_intervals(
            self.components
                .iter()
                .filter(|c| !c.is_singleton())
                .map(|c| Interval::new(c.lo.clone(), false, c.hi.clone(), false))
                .collect(),
        )
    }

    /// Some rational point of the set, when nonempty.
    pub fn sample_point(&self) -> Option<Rational> {
        let c = self.components.first()?;
        Some(match (&c.lo, &c.hi) {
            (ExtendedRational::Finite(l), ExtendedRational::Finite(h)) => {
                (l + h) / Rational::from_integer(2.into())
            }
            (ExtendedRational::Finite(l), _) => l + Rational::from_integer(1.into()),
            (_, ExtendedRational::Finite(h)) => h - Rational::from_integer(1.into()),
            _ => Rational::zero(),
        })
    }

    /// The degenerate singleton components; in canonical form these are
    /// exactly the isolated points.
    pub fn isolated_points(&self) -> Vec<Rational> {
        self.components
            .iter()
            .filter(|c| c.is_singleton())
            .filter_map(|c| c.lo.finite().cloned())
            .collect()
    }

    /// a is an accumulation point iff it lies in the closure of the set
    /// with its isolated points removed.
    pub fn is_accumulation_point(&self, a: &Rational) -> bool {
        let without_isolated = IntervalSet::from_intervals(
            self.components
                .iter()
                .filter(|c| !c.is_singleton())
                .cloned()
                .collect(),
        );
        without_isolated.closure().contains_point(a)
    }

    /// An explicit sequence witnessing accumulation at a: values of the
    /// form a ± 1/(n+k), shifted so every term lies inside the set, which
    /// avoids a and converges to it.
    pub fn accumulation_witness(&self, a: &Rational) -> Option<Fluxion> {
        if !self.is_accumulation_point(a) {
            return None;
        }
        for c in &self.components {
            if c.is_singleton() {
                continue;
            }
            if !c.closure_contains(a) {
                continue;
            }
            // Approach from the right when room exists above a.
            if ExtendedRational::Finite(a.clone()) < c.hi {
                let shift = match &c.hi {
                    ExtendedRational::Finite(h) => shift_for_gap(&(h - a)),
                    _ => 0,
                };
                return Some(approach_term(a, shift, true));
            }
            if c.lo < ExtendedRational::Finite(a.clone()) {
                let shift = match &c.lo {
                    ExtendedRational::Finite(l) => shift_for_gap(&(a - l)),
                    _ => 0,
                };
                return Some(approach_term(a, shift, false));
            }
        }
        None
    }
}

impl Interval {
    fn closure_contains(&self, q: &Rational) -> bool {
        let v = ExtendedRational::Finite(q.clone());
        v >= self.lo && v <= self.hi
    }
}

/// Smallest k with 1/(1+k) strictly below the available gap.
fn shift_for_gap(gap: &Rational) -> u64 {
    let inv = gap.recip();
    crate::rational::ceil_to_i64(&inv).max(0) as u64 + 1
}

fn approach_term(a: &Rational, shift: u64, from_above: bool) -> Fluxion {
    let step = SequenceTerm::from_int(1).div(
        SequenceTerm::index().add(SequenceTerm::constant(Rational::from_integer(shift.into()))),
    );
    let base = SequenceTerm::constant(a.clone());
    let term = if from_above {
        base.add(step)
    } else {
        base.sub(step)
    };
    Fluxion::from_term(term)
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "empty");
        }
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, " U ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Per-residue-class eventual membership of a fragment sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassMembership {
    pub class: u64,
    pub inside: bool,
    /// Index from which every class member is on the stated side.
    pub from: u64,
}

/// Membership verdict plus, for fragment sequences, the class-by-class
/// picture it was decided from.
#[derive(Clone, Debug)]
pub struct MembershipVerdict {
    pub verdict: Verdict,
    pub classes: Vec<ClassMembership>,
}

pub fn eventually_in(x: &Fluxion, set: &IntervalSet) -> MembershipVerdict {
    eventually_in_with(x, set, Budget::default())
}

/// Decides whether x_n ∈ E for all but finitely many n. On the fragment
/// every residue class eventually settles on one side of each endpoint,
/// so the question is fully decidable.
pub fn eventually_in_with(x: &Fluxion, set: &IntervalSet, budget: Budget) -> MembershipVerdict {
    let form = if budget.empirical_only {
        None
    } else {
        x.form()
    };
    let Some(form) = form else {
        let term = x.term().clone();
        let verdict = crate::fluxion::empirical::check_property(budget.fuel, |n| {
            crate::fluxion::empirical::eval_sample(&term, n, budget.bits)
                .and_then(|v| set.contains_enclosure(&v))
        });
        return MembershipVerdict {
            verdict,
            classes: Vec::new(),
        };
    };

    let mut classes = Vec::new();
    for r in 0..form.period() as usize {
        classes.push(class_membership(form, r, set));
    }
    let verdict = match classes.iter().find(|c| !c.inside) {
        Some(outside) => Verdict::refuted_class(outside.class, form.period(), outside.from)
            .with_detail("class is eventually outside the set"),
        None => {
            let from = classes.iter().map(|c| c.from).max().unwrap_or(1);
            Verdict::proven_from(from)
        }
    };
    MembershipVerdict { verdict, classes }
}

/// Eventual side of one class relative to one endpoint constraint:
/// returns (satisfied, witness).
fn endpoint_side(
    form: &crate::seqterm::PeriodicRationalForm,
    r: usize,
    bound: &ExtendedRational,
    closed: bool,
    is_lower: bool,
) -> (bool, u64) {
    match bound {
        ExtendedRational::NegInfinity => (is_lower, form.threshold()),
        ExtendedRational::PosInfinity => (!is_lower, form.threshold()),
        ExtendedRational::Finite(b) => {
            // Side of f - b on the class decides the constraint exactly.
            let shifted = form.classes()[r]
                .sub(&crate::seqterm::ratfunc::RationalFunction::constant(b.clone()));
            let probe = crate::seqterm::PeriodicRationalForm::new(
                form.period(),
                (0..form.period() as usize)
                    .map(|i| {
                        if i == r {
                            shifted.clone()
                        } else {
                            crate::seqterm::ratfunc::RationalFunction::zero()
                        }
                    })
                    .collect(),
                form.threshold(),
            );
            let side = if is_lower { 1 } else { -1 };
            probe.class_side(r, side, closed)
        }
    }
}

pub(crate) fn class_membership(
    form: &crate::seqterm::PeriodicRationalForm,
    r: usize,
    set: &IntervalSet,
) -> ClassMembership {
    let mut out_witness = form.threshold();
    for comp in set.components() {
        let (lo_ok, lo_w) = endpoint_side(form, r, &comp.lo, comp.lo_closed, true);
        let (hi_ok, hi_w) = endpoint_side(form, r, &comp.hi, comp.hi_closed, false);
        if lo_ok && hi_ok {
            return ClassMembership {
                class: r as u64,
                inside: true,
                from: lo_w.max(hi_w),
            };
        }
        // The class leaves this component past whichever constraint
        // fails; remember the witness.
        if !lo_ok {
            out_witness = out_witness.max(lo_w);
        }
        if !hi_ok {
            out_witness = out_witness.max(hi_w);
        }
    }
    ClassMembership {
        class: r as u64,
        inside: false,
        from: out_witness,
    }
}

/// Result of the sequential-compactness probe.
#[derive(Clone, Debug)]
pub struct CompactnessProbe {
    pub subsequence: Fluxion,
    pub limit: LimitResult,
    /// Whether the (possibly snapped) limit lies in the set; `None`
    /// when the limit itself stayed inconclusive.
    pub limit_in_set: Option<bool>,
}

/// Extracts a convergent subsequence from x (assumed eventually in E)
/// and checks whether its limit lands back in E. On a compact set the
/// answer must be yes; an escape witnesses non-compactness.
pub fn compactness_probe(
    set: &IntervalSet,
    x: &Fluxion,
    budget: Budget,
) -> Result<CompactnessProbe, BwError> {
    let extraction = x.bw_extract(budget)?;
    let sub = extraction.subsequence;
    let est = sub.limit_with(budget);

    // A subsequence of a fragment sequence converges to one of its
    // finitely many class limits; the sampled estimate only selects
    // which one, so snapping to a uniquely-compatible class limit is
    // sound.
    let limit = match (&est, x.form()) {
        (LimitResult::Approx { mid, rad, .. }, Some(form)) => {
            let tol = {
                let eight = Rational::from_integer(8.into());
                let wide = rad * eight;
                let floor = qr(1, 1_000_000);
                if wide > floor {
                    wide
                } else {
                    floor
                }
            };
            let mut candidates: Vec<Rational> = form
                .classes()
                .iter()
                .filter_map(|c| c.limit_at_infinity().finite().cloned())
                .collect();
            candidates.dedup();
            let mut near = candidates.iter().filter(|c| {
                let d = &**c - mid;
                (if d < Rational::zero() { -d } else { d }) <= tol
            });
            match (near.next(), near.next()) {
                (Some(c), None) => LimitResult::Exact(ExtendedRational::Finite(c.clone())),
                _ => est.clone(),
            }
        }
        _ => est.clone(),
    };

    let limit_in_set = match &limit {
        LimitResult::Exact(ExtendedRational::Finite(v)) => Some(set.contains_point(v)),
        LimitResult::Exact(_) => Some(false),
        LimitResult::Approx { mid, rad, .. } => {
            set.contains_enclosure(&MidRad::new(mid.clone(), rad.clone()))
        }
        _ => None,
    };

    Ok(CompactnessProbe {
        subsequence: sub,
        limit,
        limit_in_set,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluxion::Witness;
    use crate::rational::q;

    fn er(v: i64) -> ExtendedRational {
        ExtendedRational::Finite(q(v))
    }

    #[test]
    fn complement_of_closed_interval() {
        let e = IntervalSet::closed(q(0), q(1));
        let c = e.complement();
        assert_eq!(c.components().len(), 2);
        assert_eq!(c.to_string(), "(-inf, 0) U (1, +inf)");
        assert_eq!(c.complement(), e);
    }

    #[test]
    fn punctured_union_stays_split() {
        let left = IntervalSet::from_intervals(vec![Interval::new(er(0), true, er(1), false)]);
        let right = IntervalSet::from_intervals(vec![Interval::new(er(1), false, er(2), true)]);
        let u = left.union(&right);
        assert_eq!(u.components().len(), 2);
        assert!(!u.contains_point(&q(1)));
    }

    #[test]
    fn touching_union_merges() {
        let left = IntervalSet::from_intervals(vec![Interval::new(er(0), true, er(1), true)]);
        let right = IntervalSet::from_intervals(vec![Interval::new(er(1), false, er(2), true)]);
        let u = left.union(&right);
        assert_eq!(u.components().len(), 1);
        assert_eq!(u.to_string(), "[0, 2]");
    }

    #[test]
    fn intersection_of_overlapping_closed_intervals() {
        let a = IntervalSet::closed(q(0), q(2));
        let b = IntervalSet::closed(q(1), q(3));
        assert_eq!(a.intersect(&b), IntervalSet::closed(q(1), q(2)));
    }

    #[test]
    fn openness_and_closedness_predicates() {
        let open_pair = IntervalSet::open(q(0), q(1)).union(&IntervalSet::open(q(2), q(3)));
        assert!(open_pair.is_open());
        assert!(!open_pair.is_closed());

        let with_point = IntervalSet::closed(q(0), q(1)).union(&IntervalSet::singleton(q(2)));
        assert!(with_point.is_compact());

        let ray = IntervalSet::from_intervals(vec![Interval::new(
            er(0),
            true,
            ExtendedRational::PosInfinity,
            false,
        )]);
        assert!(ray.is_closed());
        assert!(!ray.is_compact());
    }

    #[test]
    fn empty_and_line_are_clopen() {
        for e in [IntervalSet::empty(), IntervalSet::real_line()] {
            assert!(e.is_open());
            assert!(e.is_closed());
        }
        assert!(IntervalSet::empty().is_compact());
        assert!(!IntervalSet::real_line().is_compact());
    }

    #[test]
    fn open_closed_duality() {
        let sets = [
            IntervalSet::open(q(0), q(1)),
            IntervalSet::closed(q(0), q(1)),
            IntervalSet::singleton(q(5)),
            IntervalSet::closed(q(0), q(1)).union(&IntervalSet::open(q(3), q(4))),
            IntervalSet::empty(),
            IntervalSet::real_line(),
        ];
        for e in &sets {
            assert_eq!(e.is_open(), e.complement().is_closed(), "set {e}");
            assert_eq!(e.is_closed(), e.complement().is_open(), "set {e}");
        }
    }

    #[test]
    fn membership_of_reciprocal_in_half_open() {
        let x = Fluxion::from_term(SequenceTerm::from_int(1).div(SequenceTerm::index()));
        let e = IntervalSet::from_intervals(vec![Interval::new(er(0), false, er(1), true)]);
        let m = eventually_in(&x, &e);
        assert!(m.verdict.is_proven());
        assert_eq!(m.verdict.witness, Some(Witness::Index(1)));
        assert_eq!(m.classes.len(), 1);
        assert!(m.classes[0].inside);
    }

    #[test]
    fn membership_of_alternating_in_unit_band() {
        let x = Fluxion::from_term(SequenceTerm::alternating());
        let e = IntervalSet::closed(q(0), q(2));
        let m = eventually_in(&x, &e);
        assert!(m.verdict.is_refuted());
        // The odd class sits at -1, outside [0, 2].
        let outside: Vec<_> = m.classes.iter().filter(|c| !c.inside).collect();
        assert_eq!(outside.len(), 1);
        assert_eq!(outside[0].class, 0);
    }

    #[test]
    fn membership_of_index_escapes_bounded_set() {
        let x = Fluxion::from_term(SequenceTerm::index());
        let e = IntervalSet::closed(q(0), q(5));
        let m = eventually_in(&x, &e);
        assert!(m.verdict.is_refuted());
        match m.verdict.witness {
            Some(Witness::Class { from, .. }) => assert_eq!(from, 6),
            other => panic!("expected class witness, got {other:?}"),
        }
    }

    #[test]
    fn accumulation_points_and_isolation() {
        let e = IntervalSet::open(q(0), q(1));
        assert!(e.is_accumulation_point(&q(0)));
        let w = e.accumulation_witness(&q(0)).unwrap();
        // Witness avoids 0, converges to 0, and stays inside (0, 1).
        assert!(Fluxion::embed_int(0).avoids(&w).is_proven());
        assert!(w.infinitely_close(&Fluxion::embed_int(0)).is_proven());
        assert!(eventually_in(&w, &e).verdict.is_proven());
        for n in 1..=20 {
            let v = w.eval_exact(n).unwrap();
            assert!(v > q(0) && v < q(1), "term {n} left the set");
        }

        let with_point = IntervalSet::closed(q(0), q(1)).union(&IntervalSet::singleton(q(5)));
        assert_eq!(with_point.isolated_points(), vec![q(5)]);
        assert!(!with_point.is_accumulation_point(&q(5)));
        assert!(with_point.is_accumulation_point(&q(1)));
    }

    #[test]
    fn closed_sets_contain_their_accumulation_points() {
        let closed = IntervalSet::closed(q(0), q(1)).union(&IntervalSet::singleton(q(3)));
        let open = IntervalSet::open(q(0), q(1));
        assert!(closed.is_closed());
        for p in [q(0), q(1), qr(1, 2)] {
            if closed.is_accumulation_point(&p) {
                assert!(closed.contains_point(&p));
            }
        }
        assert!(open.is_accumulation_point(&q(0)) && !open.contains_point(&q(0)));
    }

    #[test]
    fn compact_probe_on_two_valued_sequence() {
        let x = Fluxion::from_term(
            SequenceTerm::from_int(1)
                .add(SequenceTerm::alternating())
                .div(SequenceTerm::from_int(2)),
        );
        let e = IntervalSet::closed(q(0), q(1));
        let probe = compactness_probe(&e, &x, Budget::with_fuel(1_000)).unwrap();
        assert_eq!(
            probe.limit,
            LimitResult::Exact(ExtendedRational::Finite(q(1)))
        );
        assert_eq!(probe.limit_in_set, Some(true));
    }

    #[test]
    fn escape_witnesses_non_compactness_of_open_interval() {
        let x = Fluxion::from_term(SequenceTerm::from_int(1).div(SequenceTerm::index()));
        let e = IntervalSet::open(q(0), q(1));
        assert!(eventually_in(&x, &e).verdict.is_proven());
        let probe = compactness_probe(&e, &x, Budget::with_fuel(2_000)).unwrap();
        assert_eq!(
            probe.limit,
            LimitResult::Exact(ExtendedRational::Finite(q(0)))
        );
        assert_eq!(probe.limit_in_set, Some(false));
        assert!(!e.is_compact());
    }

    #[test]
    fn closed_subset_of_compact_is_compact() {
        let k = IntervalSet::closed(q(0), q(10));
        let f = IntervalSet::closed(q(1), q(2)).union(&IntervalSet::singleton(q(7)));
        assert!(k.is_compact() && f.is_closed() && f.is_subset_of(&k));
        assert!(f.is_compact());
    }
}
