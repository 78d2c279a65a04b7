//! Root finding by bisection with certified endpoint signs. The
//! returned endpoint sequences are genuine elements of the quotient
//! ring: index n holds the n-th bisection state, extended lazily and
//! shared between the lower and upper sequences.

use std::sync::{Arc, Mutex};

use crate::approx::MidRad;
use crate::calculus::{CalculusError, RealFunction};
use crate::fluxion::{Budget, Fluxion};
use crate::rational::Rational;
use crate::seqterm::SequenceTerm;
use crate::topology::IntervalSet;

/// Precision cap for certifying a sign from an enclosure evaluator.
pub(crate) const SIGN_BIT_CAP: u32 = 4096;

/// Beyond this many bisection steps the endpoint sequences continue
/// constant; the abandoned width (b-a)/2^4096 is far below every
/// sampling gate in the crate.
const BISECT_DEPTH_CAP: u64 = 4096;

/// Result of the bisection run.
#[derive(Clone, Debug)]
pub struct RootResult {
    /// The left endpoint sequence x_n.
    pub lower: Fluxion,
    /// The right endpoint sequence y_n.
    pub upper: Fluxion,
    pub midpoint_estimate: Rational,
    /// (b-a)/2^depth; the midpoint estimate is within this of a root.
    pub radius: Rational,
    /// Set when some midpoint value was certifiably zero.
    pub exact_hit: Option<Rational>,
    /// Sign of f at the left endpoints, kept invariant over depths.
    pub lower_sign: i8,
    pub upper_sign: i8,
    pub depth: u32,
}

struct BisectState {
    f: RealFunction,
    bits: u32,
    sa: i8,
    lo: Vec<Rational>,
    hi: Vec<Rational>,
    hit: Option<Rational>,
    uncertain: bool,
}

impl BisectState {
    fn step(&mut self) {
        let last_lo = self.lo.last().unwrap().clone();
        let last_hi = self.hi.last().unwrap().clone();
        if let Some(h) = &self.hit {
            self.lo.push(h.clone());
            self.hi.push(h.clone());
            return;
        }
        if self.uncertain {
            self.lo.push(last_lo);
            self.hi.push(last_hi);
            return;
        }
        let m = (&last_lo + &last_hi) / Rational::from_integer(2.into());
        match self.f.certified_sign_at(&m, self.bits, SIGN_BIT_CAP) {
            None => {
                self.uncertain = true;
                self.lo.push(last_lo);
                self.hi.push(last_hi);
            }
            Some(0) => {
                self.hit = Some(m.clone());
                self.lo.push(m.clone());
                self.hi.push(m);
            }
            Some(s) if s == self.sa => {
                self.lo.push(m);
                self.hi.push(last_hi);
            }
            Some(_) => {
                self.lo.push(last_lo);
                self.hi.push(m);
            }
        }
    }

    fn extend_to(&mut self, steps: u64) {
        while (self.lo.len() as u64) <= steps {
            self.step();
        }
    }
}

pub fn ivt_root(
    f: &RealFunction,
    a: &Rational,
    b: &Rational,
    depth: u32,
) -> Result<RootResult, CalculusError> {
    ivt_root_with(f, a, b, depth, Budget::default())
}

/// Bisects [a, b] to the requested depth. Requires certified opposite
/// signs at the endpoints. Each step certifies the midpoint sign (with
/// doubling precision for enclosure evaluators), stops with an exact
/// hit on a certified zero, and otherwise keeps the sign-change
/// bracket; widths halve exactly per depth.
pub fn ivt_root_with(
    f: &RealFunction,
    a: &Rational,
    b: &Rational,
    depth: u32,
    budget: Budget,
) -> Result<RootResult, CalculusError> {
    if a >= b {
        return Err(CalculusError::DomainViolation {
            detail: format!("need a < b, got a = {a}, b = {b}"),
        });
    }
    if depth == 0 {
        return Err(CalculusError::DomainViolation {
            detail: "bisection depth must be positive".to_string(),
        });
    }
    if !IntervalSet::closed(a.clone(), b.clone()).is_subset_of(f.domain()) {
        return Err(CalculusError::DomainViolation {
            detail: format!("[{a}, {b}] is not contained in the domain"),
        });
    }
    let sa = f
        .certified_sign_at(a, budget.bits, SIGN_BIT_CAP)
        .ok_or(CalculusError::NoSignChange)?;
    let sb = f
        .certified_sign_at(b, budget.bits, SIGN_BIT_CAP)
        .ok_or(CalculusError::NoSignChange)?;
    if sa == 0 || sb == 0 || sa == sb {
        return Err(CalculusError::NoSignChange);
    }

    let mut state = BisectState {
        f: f.clone(),
        bits: budget.bits,
        sa,
        lo: vec![a.clone()],
        hi: vec![b.clone()],
        hit: None,
        uncertain: false,
    };
    let mut achieved: u32 = 0;
    for _ in 0..depth {
        state.step();
        if state.uncertain {
            break;
        }
        achieved += 1;
        if state.hit.is_some() {
            // Constant continuation from here preserves every later
            // width and sign statement trivially.
            achieved = depth;
            break;
        }
    }
    let truncated = state.uncertain;
    let exact_hit = state.hit.clone();
    let last_lo = state.lo.last().unwrap().clone();
    let last_hi = state.hi.last().unwrap().clone();
    let midpoint_estimate = match &exact_hit {
        Some(h) => h.clone(),
        None => (&last_lo + &last_hi) / Rational::from_integer(2.into()),
    };
    let width = b - a;
    let radius = width / crate::rational::pow_i(&Rational::from_integer(2.into()), achieved as i64)
        .unwrap();

    let shared = Arc::new(Mutex::new(state));
    let endpoint = |low: bool| -> Fluxion {
        let shared = shared.clone();
        let label = if low { "bisection lower" } else { "bisection upper" };
        Fluxion::from_term(SequenceTerm::opaque(label, move |n, _bits| {
            let steps = n.min(BISECT_DEPTH_CAP);
            let mut st = shared.lock().unwrap();
            st.extend_to(steps);
            let v = if low {
                st.lo[steps as usize].clone()
            } else {
                st.hi[steps as usize].clone()
            };
            Ok(MidRad::exact(v))
        }))
    };
    let result = RootResult {
        lower: endpoint(true),
        upper: endpoint(false),
        midpoint_estimate,
        radius,
        exact_hit,
        lower_sign: sa,
        upper_sign: sb,
        depth: achieved,
    };
    if truncated {
        return Err(CalculusError::SignUncertain {
            achieved_depth: achieved,
            partial: Box::new(result),
        });
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::realfn::{ApproxMap, FnExpr};
    use crate::fluxion::ExtendedRational;
    use crate::rational::{q, qr};
    use num_bigint::BigInt;
    use num_traits::{Signed, Zero};

    fn poly(coeffs: &[Rational]) -> RealFunction {
        RealFunction::poly(coeffs)
    }

    fn endpoint_at(x: &Fluxion, n: u64) -> Rational {
        x.eval_approx(n, 32).unwrap().mid
    }

    #[test]
    fn bisection_approximates_the_square_root_of_two() {
        let f = poly(&[q(-2), q(0), q(1)]);
        let r = ivt_root(&f, &q(1), &q(2), 30).unwrap();
        assert_eq!(r.depth, 30);
        assert_eq!(r.radius, qr(1, 1 << 30));
        assert!(r.exact_hit.is_none());
        assert_eq!((r.lower_sign, r.upper_sign), (-1, 1));

        // Independent digits: floor(2^60 * sqrt(2)) via an integer
        // square root.
        let oracle = Rational::new((BigInt::from(2) << 120u32).sqrt(), BigInt::from(1) << 60u32);
        assert!((&r.midpoint_estimate - &oracle).abs() <= &r.radius + qr(1, 1 << 60));
    }

    #[test]
    fn bracket_shrinks_dyadically_and_keeps_the_sign_change() {
        let f = poly(&[q(-2), q(0), q(1)]);
        let r = ivt_root(&f, &q(1), &q(2), 30).unwrap();
        let value = |t: &Rational| f.value_exact(t).unwrap();
        for k in [1u64, 7, 19, 30, 40] {
            let lo = endpoint_at(&r.lower, k);
            let hi = endpoint_at(&r.upper, k);
            assert_eq!(&hi - &lo, qr(1, 1) / crate::rational::pow_i(&q(2), k as i64).unwrap());
            assert!(value(&lo).is_negative());
            assert!(value(&hi).is_positive());
        }
        // Both endpoint sequences converge on the same germ.
        assert!(r.lower.infinitely_close(&r.upper).is_proven());
    }

    #[test]
    fn identity_hits_zero_at_the_first_midpoint() {
        let r = ivt_root(&RealFunction::identity(), &q(-1), &q(1), 10).unwrap();
        assert_eq!(r.exact_hit, Some(q(0)));
        assert_eq!(r.midpoint_estimate, q(0));
        assert_eq!(r.depth, 10);
        assert_eq!(endpoint_at(&r.lower, 50), q(0));
        assert_eq!(endpoint_at(&r.upper, 50), q(0));
        match r.lower.limit() {
            crate::fluxion::LimitResult::Approx { mid, rad, .. } => {
                assert!(mid.is_zero());
                assert!(rad <= crate::rational::two_pow_neg(64));
            }
            other => panic!("expected a tight estimate at zero, got {other}"),
        }
    }

    #[test]
    fn cubic_bisection_agrees_with_a_deeper_run() {
        let f = poly(&[q(-2), q(-1), q(0), q(1)]);
        let r = ivt_root(&f, &q(1), &q(2), 20).unwrap();

        // Hand-rolled bisection at depth 60 as an independent check;
        // the cubic is strictly increasing on [1, 2].
        let value = |t: &Rational| {
            let t2 = t * t;
            &t2 * t - t - q(2)
        };
        let mut lo = q(1);
        let mut hi = q(2);
        for _ in 0..60 {
            let m = (&lo + &hi) / q(2);
            if value(&m).is_negative() {
                lo = m;
            } else {
                hi = m;
            }
        }
        let oracle = (&lo + &hi) / q(2);
        assert!((&r.midpoint_estimate - &oracle).abs() <= &r.radius + qr(1, 1 << 59));
        // The residual bracket still straddles the root.
        let left = &r.midpoint_estimate - &r.radius;
        let right = &r.midpoint_estimate + &r.radius;
        assert!(value(&left).is_negative() && value(&right).is_positive());
    }

    #[test]
    fn rejects_intervals_without_a_certified_sign_change() {
        let same_sign = poly(&[q(1), q(0), q(1)]);
        assert!(matches!(
            ivt_root(&same_sign, &q(0), &q(1), 8),
            Err(CalculusError::NoSignChange)
        ));
        let shifted = poly(&[q(-5), q(1)]);
        assert!(matches!(
            ivt_root(&shifted, &q(1), &q(2), 8),
            Err(CalculusError::NoSignChange)
        ));
        let zero_endpoint = RealFunction::identity();
        assert!(matches!(
            ivt_root(&zero_endpoint, &q(0), &q(1), 8),
            Err(CalculusError::NoSignChange)
        ));
    }

    #[test]
    fn rejects_degenerate_requests() {
        let f = poly(&[q(-2), q(0), q(1)]);
        assert!(matches!(
            ivt_root(&f, &q(2), &q(1), 8),
            Err(CalculusError::DomainViolation { .. })
        ));
        assert!(matches!(
            ivt_root(&f, &q(1), &q(2), 0),
            Err(CalculusError::DomainViolation { .. })
        ));
        let restricted = RealFunction::exact(
            FnExpr::poly(&[q(-2), q(0), q(1)]),
            IntervalSet::closed(q(0), qr(3, 2)),
        );
        assert!(matches!(
            ivt_root(&restricted, &q(1), &q(2), 8),
            Err(CalculusError::DomainViolation { .. })
        ));
    }

    fn sqrt_minus_one() -> RealFunction {
        let root = ApproxMap::nth_root(2);
        let map = ApproxMap::new(
            "sqrt(t) - 1",
            true,
            Arc::new(move |t: &Rational, bits: u32| {
                root.eval_point(t, bits).map(|v| v.sub(&MidRad::exact(q(1))))
            }),
        );
        RealFunction::approx(
            map,
            IntervalSet::from_intervals(vec![crate::topology::Interval::new(
                ExtendedRational::Finite(q(0)),
                true,
                ExtendedRational::PosInfinity,
                false,
            )]),
        )
    }

    #[test]
    fn enclosure_evaluator_brackets_an_irrational_midpoint_problem() {
        // Midpoints of [0, 3] are never exactly 1, so every sign
        // certifies and the bracket closes in on the root at 1.
        let f = sqrt_minus_one();
        let r = ivt_root(&f, &q(0), &q(3), 12).unwrap();
        assert_eq!(r.depth, 12);
        assert_eq!(r.radius, qr(3, 4096));
        assert!((&r.midpoint_estimate - q(1)).abs() <= r.radius);
    }

    #[test]
    fn uncertifiable_midpoint_sign_truncates_with_partial_result() {
        // On [0, 2] the first midpoint is the root itself; its
        // enclosure never excludes zero, so the run reports the sign
        // failure with the bracket it still holds.
        let f = sqrt_minus_one();
        let err = ivt_root(&f, &q(0), &q(2), 5).unwrap_err();
        let CalculusError::SignUncertain {
            achieved_depth,
            partial,
        } = err
        else {
            panic!("expected a truncated run");
        };
        assert_eq!(achieved_depth, 0);
        assert_eq!(partial.depth, 0);
        assert_eq!(partial.radius, q(2));
        assert_eq!(endpoint_at(&partial.lower, 9), q(0));
        assert_eq!(endpoint_at(&partial.upper, 9), q(2));
    }
}
