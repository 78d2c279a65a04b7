//! Sampling-based fallbacks for sequences outside the symbolic
//! fragment: a geometric index ladder plus a final consecutive window,
//! with stabilization heuristics that are labeled, never silent.

use num_traits::{Signed, Zero};

use super::verdict::{Classification, LimitResult, Monotonicity, Verdict};
use crate::approx::MidRad;
use crate::rational::{qr, two_pow_neg, Rational};
use crate::seqterm::SequenceTerm;

/// Length of the final consecutive sampling window.
pub(crate) const FINAL_WINDOW: u64 = 100;

/// Largest tail radius still reported as a stabilized approximation.
fn approx_gate() -> Rational {
    qr(1, 256)
}

/// Midpoint drift between half-fuel and full-fuel windows above which
/// the sequence is treated as escaping to an infinity.
fn growth_gate() -> Rational {
    Rational::from_integer(1024.into())
}

/// Sample indices: powers of two up to fuel, then the final window.
pub(crate) fn sample_indices(fuel: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 1u64;
    while p <= fuel {
        out.push(p);
        if p > fuel / 2 {
            break;
        }
        p *= 2;
    }
    out.extend(final_window(fuel));
    out.sort_unstable();
    out.dedup();
    out
}

pub(crate) fn final_window(fuel: u64) -> impl Iterator<Item = u64> {
    let lo = fuel.saturating_sub(FINAL_WINDOW - 1).max(1);
    lo..=fuel
}

/// Three-valued sample: holds, fails, or could not be certified.
pub(crate) type Sample = Option<bool>;

/// The shared stabilization rule: Proven iff the property certifiably
/// holds at every sampled index; Refuted iff it certifiably fails at
/// every index of the final window; otherwise Inconclusive.
pub(crate) fn check_property(fuel: u64, mut sample: impl FnMut(u64) -> Sample) -> Verdict {
    let mut all_hold = true;
    for n in sample_indices(fuel) {
        match sample(n) {
            Some(true) => {}
            _ => {
                all_hold = false;
                break;
            }
        }
    }
    if all_hold {
        return Verdict::stabilized(fuel);
    }
    let mut all_fail = true;
    let mut last_fail = None;
    for n in final_window(fuel) {
        match sample(n) {
            Some(false) => last_fail = Some(n),
            _ => {
                all_fail = false;
                break;
            }
        }
    }
    if all_fail {
        if let Some(n) = last_fail {
            return Verdict::refuted_sample(n, fuel);
        }
    }
    Verdict::inconclusive(fuel)
}

/// Summary of the sampled tail of a sequence.
pub(crate) struct TailEstimate {
    pub mid: Rational,
    /// Window half-width plus drift since half fuel; always positive.
    pub rad: Rational,
    pub lo: Rational,
    pub hi: Rational,
    pub grows_up: bool,
    pub grows_down: bool,
}

fn window_hull(
    eval: &mut impl FnMut(u64) -> Option<MidRad>,
    center: u64,
) -> Option<(Rational, Rational)> {
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    let mut defined = 0u64;
    for n in final_window(center) {
        if let Some(v) = eval(n) {
            defined += 1;
            let l = v.lower();
            let h = v.upper();
            if lo.as_ref().is_none_or(|x| l < *x) {
                lo = Some(l);
            }
            if hi.as_ref().is_none_or(|x| h > *x) {
                hi = Some(h);
            }
        }
    }
    // Require most of the window to evaluate; scattered undefined
    // indices are tolerated, a mostly-undefined tail is not.
    if defined * 2 < FINAL_WINDOW.min(center) {
        return None;
    }
    Some((lo?, hi?))
}

pub(crate) fn tail_estimate(
    fuel: u64,
    bits: u32,
    mut eval: impl FnMut(u64) -> Option<MidRad>,
) -> Option<TailEstimate> {
    let (lo, hi) = window_hull(&mut eval, fuel)?;
    let two = Rational::from_integer(2.into());
    let mid = (&lo + &hi) / &two;
    let mut rad = (&hi - &lo) / &two;
    let mut grows_up = false;
    let mut grows_down = false;
    if let Some((hlo, hhi)) = window_hull(&mut eval, (fuel / 2).max(1)) {
        let hmid = (&hlo + &hhi) / &two;
        let drift = (&mid - &hmid).abs();
        rad += &drift;
        if &mid - &hmid > growth_gate() {
            grows_up = true;
        }
        if &hmid - &mid > growth_gate() {
            grows_down = true;
        }
    }
    rad += two_pow_neg(bits);
    Some(TailEstimate {
        mid,
        rad,
        lo,
        hi,
        grows_up,
        grows_down,
    })
}

pub(crate) fn eval_sample(term: &SequenceTerm, n: u64, bits: u32) -> Option<MidRad> {
    term.eval_approx(n, bits).ok()
}

pub(crate) fn empirical_limit(term: &SequenceTerm, fuel: u64, bits: u32) -> LimitResult {
    match tail_estimate(fuel, bits, |n| eval_sample(term, n, bits)) {
        Some(est) if est.rad <= approx_gate() => LimitResult::Approx {
            mid: est.mid,
            rad: est.rad,
            fuel,
        },
        _ => LimitResult::Inconclusive { fuel },
    }
}

/// Whether |x_n| empirically vanishes. A tight tail estimate around
/// zero certifies it directly; slow power-law decay is covered by a
/// contraction test instead: the window magnitude must shrink by at
/// least a 3/4 factor per fourfold index step, twice in a row.
/// Refutation requires the final window to sit certifiably away from
/// zero while the magnitude has stopped shrinking.
pub(crate) fn empirical_vanishing(term: &SequenceTerm, fuel: u64, bits: u32) -> Verdict {
    let mut eval = |n: u64| eval_sample(term, n, bits);
    if let Some(est) = tail_estimate(fuel, bits, &mut eval) {
        if est.rad <= approx_gate() && est.mid.abs() <= est.rad {
            return Verdict::stabilized(fuel);
        }
    }
    let magnitude = |hull: Option<(Rational, Rational)>| -> Option<Rational> {
        hull.map(|(lo, hi)| lo.abs().max(hi.abs()))
    };
    let m3 = magnitude(window_hull(&mut eval, fuel));
    let m2 = magnitude(window_hull(&mut eval, (fuel / 4).max(1)));
    let m1 = magnitude(window_hull(&mut eval, (fuel / 16).max(1)));
    let contraction = qr(3, 4);
    if let (Some(m1), Some(m2), Some(m3)) = (&m1, &m2, &m3) {
        if *m3 <= &contraction * m2 && *m2 <= &contraction * m1 {
            return Verdict::stabilized(fuel)
                .with_detail("window magnitudes contract toward zero");
        }
    }
    if let Some((lo, hi)) = window_hull(&mut eval, fuel) {
        let separated = lo > Rational::zero() || hi < Rational::zero();
        let stalled = match (&m2, &m3) {
            (Some(m2), Some(m3)) => *m3 >= qr(7, 8) * m2,
            _ => false,
        };
        if separated && stalled {
            return Verdict::refuted_sample(fuel, fuel)
                .with_detail("final window is separated from zero and no longer shrinking");
        }
    }
    Verdict::inconclusive(fuel)
}

/// Estimated eventual extremes: max and min midpoints over the final
/// window. Estimates only; never a proof.
pub(crate) fn empirical_extremes(
    term: &SequenceTerm,
    fuel: u64,
    bits: u32,
) -> Option<(Rational, Rational)> {
    let mut hi: Option<Rational> = None;
    let mut lo: Option<Rational> = None;
    for n in final_window(fuel) {
        if let Some(v) = eval_sample(term, n, bits) {
            let m = v.mid;
            if hi.as_ref().is_none_or(|x| m > *x) {
                hi = Some(m.clone());
            }
            if lo.as_ref().is_none_or(|x| m < *x) {
                lo = Some(m);
            }
        }
    }
    Some((hi?, lo?))
}

/// Certified sign of the step x_{n+1} − x_n, when the enclosures allow.
fn step_sign(term: &SequenceTerm, n: u64, bits: u32) -> Option<i8> {
    let a = eval_sample(term, n, bits)?;
    let b = eval_sample(term, n + 1, bits)?;
    let d = b.sub(&a);
    if d.is_exact() {
        return Some(crate::rational::sign_of(&d.mid));
    }
    d.certified_sign()
}

/// Monotonicity over the final window: a definite call needs every
/// consecutive step there to certify.
pub(crate) fn empirical_monotonicity(term: &SequenceTerm, fuel: u64, bits: u32) -> Monotonicity {
    let mut up = true;
    let mut down = true;
    let mut saw_pos = false;
    let mut saw_neg = false;
    let mut all_certified = true;
    for n in final_window(fuel) {
        if n == fuel {
            break;
        }
        match step_sign(term, n, bits) {
            Some(s) => {
                if s > 0 {
                    saw_pos = true;
                    down = false;
                }
                if s < 0 {
                    saw_neg = true;
                    up = false;
                }
            }
            None => all_certified = false,
        }
    }
    if saw_pos && saw_neg {
        return Monotonicity::No;
    }
    if !all_certified {
        return Monotonicity::Unknown;
    }
    if up {
        Monotonicity::Increasing
    } else if down {
        Monotonicity::Decreasing
    } else {
        Monotonicity::Unknown
    }
}

pub(crate) fn empirical_avoids_zero(term: &SequenceTerm, fuel: u64, bits: u32) -> Verdict {
    check_property(fuel, |n| {
        let v = eval_sample(term, n, bits)?;
        if v.excludes_zero() {
            Some(true)
        } else if v.is_exact() && v.mid.is_zero() {
            Some(false)
        } else {
            None
        }
    })
}

pub(crate) fn classify_empirical(term: &SequenceTerm, fuel: u64, bits: u32) -> Classification {
    let est = tail_estimate(fuel, bits, |n| eval_sample(term, n, bits));
    let gate = approx_gate();

    let (finite, to_plus, to_minus) = match &est {
        Some(e) if e.grows_up => (
            Verdict::refuted_sample(fuel, fuel).with_detail("escaping upward"),
            Verdict::stabilized(fuel).with_detail("monotone growth past the gate"),
            Verdict::refuted_sample(fuel, fuel),
        ),
        Some(e) if e.grows_down => (
            Verdict::refuted_sample(fuel, fuel).with_detail("escaping downward"),
            Verdict::refuted_sample(fuel, fuel),
            Verdict::stabilized(fuel).with_detail("monotone descent past the gate"),
        ),
        Some(_) => (
            Verdict::stabilized(fuel).with_detail("no growth within fuel"),
            Verdict::inconclusive(fuel),
            Verdict::inconclusive(fuel),
        ),
        None => (
            Verdict::inconclusive(fuel),
            Verdict::inconclusive(fuel),
            Verdict::inconclusive(fuel),
        ),
    };

    let (convergent, limit, infinitesimal) = match &est {
        Some(e) if e.rad <= gate => {
            let conv = Verdict::stabilized(fuel);
            let inf = if e.mid.abs() <= e.rad {
                Verdict::stabilized(fuel)
            } else {
                Verdict::refuted_sample(fuel, fuel)
                    .with_detail("tail estimate stays away from zero")
            };
            (conv, Some(e.mid.clone()), inf)
        }
        Some(e) if e.grows_up || e.grows_down => (
            Verdict::refuted_sample(fuel, fuel),
            None,
            Verdict::refuted_sample(fuel, fuel),
        ),
        Some(e) if &e.hi - &e.lo > qr(1, 4) => {
            // Wide, non-drifting window: persistent oscillation.
            let osc = Verdict::refuted_sample(fuel, fuel).with_detail("oscillating window");
            let inf = osc.clone();
            (osc, None, inf)
        }
        _ => (
            Verdict::inconclusive(fuel),
            None,
            Verdict::inconclusive(fuel),
        ),
    };

    Classification {
        infinitesimal,
        finite,
        convergent,
        limit,
        to_plus_infinity: to_plus,
        to_minus_infinity: to_minus,
        avoids_zero: empirical_avoids_zero(term, fuel, bits),
        monotone: empirical_monotonicity(term, fuel, bits),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn opaque_of(f: impl Fn(u64) -> Rational + Send + Sync + 'static) -> SequenceTerm {
        SequenceTerm::opaque("test", move |n, _| Ok(MidRad::exact(f(n))))
    }

    #[test]
    fn ladder_contains_powers_and_final_window() {
        let s = sample_indices(10_000);
        assert!(s.contains(&1) && s.contains(&8192) && s.contains(&9901) && s.contains(&10_000));
        assert!(!s.contains(&8193) || s.iter().all(|&n| n <= 10_000));
    }

    #[test]
    fn constant_opaque_stabilizes() {
        let t = opaque_of(|_| q(7));
        let v = check_property(1000, |n| {
            let v = eval_sample(&t, n, 64)?;
            Some(v.mid == q(7))
        });
        assert!(v.is_proven());
        assert!(!v.provenance.is_symbolic());
    }

    #[test]
    fn alternating_opaque_is_inconclusive_for_positivity() {
        let t = opaque_of(|n| if n % 2 == 0 { q(1) } else { q(-1) });
        let v = check_property(1000, |n| {
            let v = eval_sample(&t, n, 64)?;
            Some(v.mid > q(0))
        });
        assert!(v.is_inconclusive());
    }

    #[test]
    fn uniformly_false_property_refutes() {
        let t = opaque_of(|_| q(-1));
        let v = check_property(1000, |n| {
            let v = eval_sample(&t, n, 64)?;
            Some(v.mid > q(0))
        });
        assert!(v.is_refuted());
    }

    #[test]
    fn decaying_opaque_classifies_infinitesimal() {
        let t = opaque_of(|n| qr(1, n as i64) * qr(1, n as i64));
        let c = classify_empirical(&t, 2_000, 96);
        assert!(c.infinitesimal.is_proven());
        assert!(c.finite.is_proven());
        assert!(c.convergent.is_proven());
    }

    #[test]
    fn growing_opaque_flags_plus_infinity() {
        let t = opaque_of(|n| q(n as i64));
        let c = classify_empirical(&t, 10_000, 96);
        assert!(c.to_plus_infinity.is_proven());
        assert!(c.finite.is_refuted());
        assert!(c.avoids_zero.is_proven());
        assert_eq!(c.monotone, Monotonicity::Increasing);
    }

    #[test]
    fn oscillating_opaque_refutes_convergence() {
        let t = opaque_of(|n| if n % 2 == 0 { q(1) } else { q(-1) });
        let c = classify_empirical(&t, 2_000, 96);
        assert!(c.convergent.is_refuted());
        assert_eq!(c.monotone, Monotonicity::No);
        assert!(matches!(
            empirical_limit(&t, 2_000, 96),
            LimitResult::Inconclusive { .. }
        ));
    }

    #[test]
    fn geometric_tail_yields_tight_approx() {
        let t = opaque_of(|n| {
            let mut p = Rational::from_integer(1.into());
            for _ in 0..n.min(64) {
                p /= Rational::from_integer(2.into());
            }
            q(1) - p
        });
        match empirical_limit(&t, 1_000, 96) {
            LimitResult::Approx { mid, rad, .. } => {
                assert!((mid - q(1)).abs() <= rad + qr(1, 1_000_000));
            }
            other => panic!("expected approx, got {other}"),
        }
    }
}
