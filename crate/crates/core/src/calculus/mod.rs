//! Calculus over the quotient ring: lifting real functions to act on
//! sequences, continuity and limit probes, difference-quotient
//! derivatives, bisection root finding and extreme-value search.
//!
//! Definitions that quantify over *every* convergent sequence
//! (continuity, function limits, differentiability) are not executable
//! as stated. Each probe-based operation here runs a fixed, documented
//! family of witness sequences instead, and labels its verdicts
//! accordingly: a result is Symbolic only when a genuine symbolic
//! argument applies (rational expressions at points where they are
//! defined), and stabilized-empirical otherwise.

pub mod extrema;
pub mod ivt;
pub mod realfn;

use std::fmt;

use num_traits::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::approx::MidRad;
use crate::fluxion::{Budget, ExtendedRational, Fluxion, LimitResult, Outcome, Provenance, Verdict};
use crate::rational::{q, qr, Rational};
use crate::seqterm::{EvalError, PeriodicRationalForm, SequenceTerm};
use crate::topology::{class_membership, eventually_in_with, IntervalSet};

pub use extrema::{extreme_values, ExtremeValues};
pub use ivt::{ivt_root, RootResult};
pub use realfn::{ApproxMap, Evaluator, FnExpr, RealFunction};

/// Errors across the calculus operations.
#[derive(Clone, Debug)]
pub enum CalculusError {
    /// A point or sequence is not (eventually) inside the function's
    /// domain, or a stated precondition on the domain fails.
    DomainViolation { detail: String },
    /// Limits require the point to be an accumulation point of the
    /// domain.
    NotAccumulationPoint,
    /// A supplied pair for the uniform-continuity probe is not
    /// infinitely close.
    PairNotClose { index: usize },
    /// Two difference-quotient probes settled on different limits.
    NotDifferentiable {
        probe_a: (String, LimitResult),
        probe_b: (String, LimitResult),
    },
    /// Bisection requires certified opposite signs at the endpoints.
    NoSignChange,
    /// An endpoint or midpoint sign could not be certified at the
    /// precision cap; the partial result is reported as achieved.
    SignUncertain {
        achieved_depth: u32,
        partial: Box<RootResult>,
    },
}

impl fmt::Display for CalculusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CalculusError::DomainViolation { detail } => {
                write!(f, "domain violation: {detail}")
            }
            CalculusError::NotAccumulationPoint => {
                write!(f, "the point is not an accumulation point of the domain")
            }
            CalculusError::PairNotClose { index } => {
                write!(f, "supplied pair {index} is not infinitely close")
            }
            CalculusError::NotDifferentiable { probe_a, probe_b } => write!(
                f,
                "not differentiable: probe '{}' gives {} but probe '{}' gives {}",
                probe_a.0, probe_a.1, probe_b.0, probe_b.1
            ),
            CalculusError::NoSignChange => {
                write!(f, "no certified sign change across the endpoints")
            }
            CalculusError::SignUncertain { achieved_depth, .. } => write!(
                f,
                "sign not certifiable at the precision cap; bisection truncated at depth {achieved_depth}"
            ),
        }
    }
}

impl std::error::Error for CalculusError {}

/// Applies a real function pointwise to a sequence: x ↦ [f(x_n)].
///
/// Requires the sequence to be eventually inside the function's domain.
/// Exact evaluators over symbolic sequences stay symbolic; piecewise
/// definitions are resolved one residue class at a time, which is exact
/// because every class eventually settles on one side of each
/// breakpoint. Everything else falls back to an opaque evaluation rule.
pub fn lift(f: &RealFunction, x: &Fluxion) -> Result<Fluxion, CalculusError> {
    lift_with(f, x, Budget::default())
}

pub fn lift_with(f: &RealFunction, x: &Fluxion, budget: Budget) -> Result<Fluxion, CalculusError> {
    let membership = eventually_in_with(x, f.domain(), budget);
    if !membership.verdict.is_proven() {
        return Err(CalculusError::DomainViolation {
            detail: format!("sequence is not eventually in the domain: {}", membership.verdict),
        });
    }
    match f.evaluator() {
        Evaluator::Exact(expr) => {
            if let Some(form) = x.form() {
                if !expr.contains_piecewise() {
                    return Ok(Fluxion::from_term(expr.substitute(x.term())));
                }
                if let Some(term) = lift_piecewise(expr, x, form) {
                    return Ok(Fluxion::from_term(term));
                }
            }
            let expr = expr.clone();
            let inner = x.term().clone();
            let rule = move |n: u64, bits: u32| -> Result<MidRad, EvalError> {
                if let Ok(v) = inner.eval_exact(n) {
                    return expr
                        .eval_exact(&v)
                        .map(MidRad::exact)
                        .ok_or(EvalError::UndefinedAt(n));
                }
                let v = inner.eval_approx(n, bits)?;
                expr.eval_enclosure(&v).ok_or(EvalError::Indeterminate(n))
            };
            Ok(Fluxion::from_term(SequenceTerm::opaque("lifted(x)", rule)))
        }
        Evaluator::Approx(map) => {
            let map = map.clone();
            let label = format!("{}(x)", map.label());
            let inner = x.term().clone();
            let rule = move |n: u64, bits: u32| -> Result<MidRad, EvalError> {
                if let Ok(v) = inner.eval_exact(n) {
                    return map
                        .eval_point(&v, bits)
                        .ok_or(EvalError::UndefinedAt(n));
                }
                let v = inner.eval_approx(n, bits)?;
                map.eval_enclosure(&v, bits)
                    .ok_or(EvalError::Indeterminate(n))
            };
            Ok(Fluxion::from_term(SequenceTerm::opaque(label, rule)))
        }
    }
}

/// Resolves every piecewise node of the expression separately for each
/// residue class of x, then recombines the per-class terms with
/// periodic 0/1 masks. Off-class slots substitute a constant sample
/// point of the selected piece so divisions stay defined everywhere.
fn lift_piecewise(
    expr: &FnExpr,
    x: &Fluxion,
    form: &PeriodicRationalForm,
) -> Option<SequenceTerm> {
    let period = form.period() as usize;
    let mut resolved = Vec::with_capacity(period);
    for r in 0..period {
        resolved.push(resolve_pieces(expr, form, r)?);
    }
    if resolved.iter().all(|(e, _)| *e == resolved[0].0) {
        return Some(resolved[0].0.substitute(x.term()));
    }
    let mut total: Option<SequenceTerm> = None;
    for (r, (piece_expr, piece_set)) in resolved.iter().enumerate() {
        let neutral = piece_set.sample_point()?;
        piece_expr.eval_exact(&neutral)?;
        let mask: Vec<Rational> = (0..period)
            .map(|i| if i == r { q(1) } else { q(0) })
            .collect();
        let anti: Vec<Rational> = (0..period)
            .map(|i| if i == r { q(0) } else { q(1) })
            .collect();
        let guarded = SequenceTerm::periodic(mask.clone())
            .mul(x.term().clone())
            .add(SequenceTerm::periodic(anti).mul(SequenceTerm::constant(neutral)));
        let contribution = SequenceTerm::periodic(mask).mul(piece_expr.substitute(&guarded));
        total = Some(match total {
            Some(t) => t.add(contribution),
            None => contribution,
        });
    }
    total
}

/// Per-class piecewise resolution: replaces each piecewise node by the
/// piece whose set eventually contains the class, together with that
/// set (used to pick a safe off-class constant).
fn resolve_pieces(
    expr: &FnExpr,
    form: &PeriodicRationalForm,
    r: usize,
) -> Option<(FnExpr, IntervalSet)> {
    fn walk(expr: &FnExpr, form: &PeriodicRationalForm, r: usize, chosen: &mut Option<IntervalSet>) -> Option<FnExpr> {
        Some(match expr {
            FnExpr::Const(c) => FnExpr::Const(c.clone()),
            FnExpr::Var => FnExpr::Var,
            FnExpr::Add(a, b) => walk(a, form, r, chosen)?.add(walk(b, form, r, chosen)?),
            FnExpr::Sub(a, b) => walk(a, form, r, chosen)?.sub(walk(b, form, r, chosen)?),
            FnExpr::Mul(a, b) => walk(a, form, r, chosen)?.mul(walk(b, form, r, chosen)?),
            FnExpr::Div(a, b) => walk(a, form, r, chosen)?.div(walk(b, form, r, chosen)?),
            FnExpr::IntPow(a, e) => walk(a, form, r, chosen)?.int_pow(*e),
            FnExpr::Abs(a) => walk(a, form, r, chosen)?.abs(),
            FnExpr::Piecewise(pieces) => {
                let (set, e) = pieces
                    .iter()
                    .find(|(set, _)| class_membership(form, r, set).inside)?;
                if chosen.is_none() {
                    *chosen = Some(set.clone());
                }
                walk(e, form, r, chosen)?
            }
        })
    }
    let mut chosen = None;
    let e = walk(expr, form, r, &mut chosen)?;
    let set = chosen.unwrap_or_else(IntervalSet::real_line);
    Some((e, set))
}

/// One witness sequence for a probe-based operation.
struct Probe {
    label: String,
    x: Fluxion,
    /// The increment term x - a, kept for difference quotients.
    h: SequenceTerm,
}

fn reciprocal_term() -> SequenceTerm {
    SequenceTerm::from_int(1).div(SequenceTerm::index())
}

/// The documented avoiding probe family at a finite point: the set's
/// own accumulation witness, a ± 1/n, a + (-1)^n/n, a + 1/n², and two
/// seeded rational-step decays. Probes that leave the domain are
/// dropped.
fn avoiding_probes(a: &Rational, domain: &IntervalSet, budget: Budget) -> Vec<Probe> {
    let mut probes = Vec::new();
    if let Some(w) = domain.accumulation_witness(a) {
        let h = w.term().clone().sub(SequenceTerm::constant(a.clone()));
        probes.push(Probe {
            label: "accumulation witness".to_string(),
            x: w,
            h,
        });
    }
    let mut push = |label: String, h: SequenceTerm| {
        let x = Fluxion::from_term(SequenceTerm::constant(a.clone()).add(h.clone()));
        probes.push(Probe { label, x, h });
    };
    push("a + 1/n".into(), reciprocal_term());
    push(
        "a - 1/n".into(),
        SequenceTerm::from_int(0).sub(reciprocal_term()),
    );
    push(
        "a + (-1)^n/n".into(),
        SequenceTerm::alternating().div(SequenceTerm::index()),
    );
    push(
        "a + 1/n^2".into(),
        SequenceTerm::from_int(1).div(SequenceTerm::index().int_pow(2)),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(0xCA1C);
    for sign in [1i64, -1] {
        let p = qr(rng.gen_range(1..=9), rng.gen_range(1..=9));
        let k = rng.gen_range(1..=3);
        let h = SequenceTerm::constant(p.clone() * q(sign))
            .div(SequenceTerm::index().int_pow(k));
        push(format!("a {} {p}/n^{k}", if sign > 0 { "+" } else { "-" }), h);
    }
    probes
        .into_iter()
        .filter(|p| eventually_in_with(&p.x, domain, budget).verdict.is_proven())
        .collect()
}

/// The non-avoiding probe from the continuity analysis: equal to a at
/// even indices and a + 1/n at odd ones.
fn non_avoiding_probe(a: &Rational, domain: &IntervalSet, budget: Budget) -> Option<Probe> {
    let h = SequenceTerm::periodic(vec![q(1), q(0)]).div(SequenceTerm::index());
    let x = Fluxion::from_term(SequenceTerm::constant(a.clone()).add(h.clone()));
    let probe = Probe {
        label: "a + periodic(1,0)/n".to_string(),
        x,
        h,
    };
    eventually_in_with(&probe.x, domain, budget)
        .verdict
        .is_proven()
        .then_some(probe)
}

fn symbolic_proven(detail: impl Into<String>) -> Verdict {
    Verdict {
        outcome: Outcome::Proven,
        witness: None,
        provenance: Provenance::Symbolic,
        detail: Some(detail.into()),
    }
}

fn refuted_probe(detail: impl Into<String>, fuel: u64, symbolic: bool) -> Verdict {
    Verdict {
        outcome: Outcome::Refuted,
        witness: None,
        provenance: if symbolic {
            Provenance::Symbolic
        } else {
            Provenance::Empirical { fuel }
        },
        detail: Some(detail.into()),
    }
}

/// Whether the lifted probe's distance to the target value vanishes,
/// by the contraction test that stays sound on slow power-law decay.
fn distance_vanishes(lifted: &Fluxion, target: &MidRad, budget: Budget) -> Verdict {
    let dist = lifted
        .term()
        .clone()
        .sub(SequenceTerm::constant(target.mid.clone()));
    crate::fluxion::empirical::empirical_vanishing(&dist, budget.fuel, budget.bits)
}

/// How one probe's lifted limit relates to the target value.
enum ProbeCheck {
    ExactMatch,
    EmpiricalMatch,
    Mismatch { symbolic: bool, detail: String },
    Unknown,
}

fn check_probe_against(
    label: &str,
    lifted: &LimitResult,
    target: &MidRad,
    target_exact: bool,
) -> ProbeCheck {
    match lifted {
        LimitResult::Exact(ExtendedRational::Finite(l)) => {
            if target_exact && *l == target.mid {
                ProbeCheck::ExactMatch
            } else if (l - &target.mid).abs() <= target.rad.clone() {
                ProbeCheck::EmpiricalMatch
            } else {
                ProbeCheck::Mismatch {
                    symbolic: target_exact,
                    detail: format!(
                        "probe '{label}' has limit {l}, the value there is {}",
                        if target_exact {
                            target.mid.to_string()
                        } else {
                            target.to_string()
                        }
                    ),
                }
            }
        }
        LimitResult::Exact(inf) => ProbeCheck::Mismatch {
            symbolic: target_exact,
            detail: format!("probe '{label}' diverges to {inf}"),
        },
        LimitResult::Approx { mid, rad, .. } => {
            if (mid - &target.mid).abs() <= rad + &target.rad {
                ProbeCheck::EmpiricalMatch
            } else {
                ProbeCheck::Mismatch {
                    symbolic: false,
                    detail: format!(
                        "probe '{label}' stabilizes near {mid}, away from the value"
                    ),
                }
            }
        }
        LimitResult::DivergentOscillating { limsup, liminf } => ProbeCheck::Mismatch {
            symbolic: true,
            detail: format!(
                "probe '{label}' oscillates between {liminf} and {limsup}"
            ),
        },
        LimitResult::Inconclusive { .. } => ProbeCheck::Unknown,
    }
}

/// Decides continuity of f at a by the documented probe family,
/// including one probe that does not avoid a.
///
/// Symbolic Proven is issued only when every probe limit is exact and
/// equals f(a), which for rational piece expressions is a genuine
/// continuity certificate; enclosure evaluators stabilize at best.
pub fn continuity_at(f: &RealFunction, a: &Rational, budget: Budget) -> Result<Verdict, CalculusError> {
    if !f.domain().contains_point(a) {
        return Err(CalculusError::DomainViolation {
            detail: format!("{a} is outside the domain"),
        });
    }
    let target_exact = matches!(f.evaluator(), Evaluator::Exact(_));
    let target = f
        .value_enclosure(a, budget.bits)
        .ok_or_else(|| CalculusError::DomainViolation {
            detail: format!("the function has no value at {a}"),
        })?;
    if !f.domain().is_accumulation_point(a) {
        return Ok(symbolic_proven(
            "isolated point of the domain: continuity holds vacuously",
        ));
    }
    let mut probes = avoiding_probes(a, f.domain(), budget);
    probes.extend(non_avoiding_probe(a, f.domain(), budget));

    let mut all_exact = true;
    let mut any_unknown = false;
    for probe in &probes {
        let lifted = lift_with(f, &probe.x, budget)?;
        let lim = lifted.limit_with(budget);
        match check_probe_against(&probe.label, &lim, &target, target_exact) {
            ProbeCheck::ExactMatch => {}
            ProbeCheck::EmpiricalMatch => all_exact = false,
            ProbeCheck::Mismatch { symbolic: true, detail } => {
                return Ok(refuted_probe(detail, budget.fuel, true));
            }
            ProbeCheck::Mismatch { symbolic: false, detail } => {
                // An empirical tail interval understates its radius on
                // slowly converging probes, so exclusion alone cannot
                // refute; only a confirmed non-vanishing distance can.
                all_exact = false;
                let v = distance_vanishes(&lifted, &target, budget);
                if v.is_refuted() {
                    return Ok(refuted_probe(detail, budget.fuel, false));
                }
                if !v.is_proven() {
                    any_unknown = true;
                }
            }
            ProbeCheck::Unknown => {
                // Slowly converging probes defeat the tail estimate;
                // ask directly whether the distance to the value
                // vanishes.
                all_exact = false;
                let v = distance_vanishes(&lifted, &target, budget);
                if v.is_refuted() {
                    return Ok(refuted_probe(
                        format!("probe '{}' stays away from the value", probe.label),
                        budget.fuel,
                        false,
                    ));
                }
                if !v.is_proven() {
                    any_unknown = true;
                }
            }
        }
    }
    if any_unknown {
        return Ok(Verdict::inconclusive(budget.fuel)
            .with_detail("some probe limits did not stabilize"));
    }
    if all_exact && target_exact {
        Ok(symbolic_proven(
            "every probe limit equals the value exactly; rational pieces are continuous where defined",
        ))
    } else {
        Ok(Verdict::stabilized(budget.fuel)
            .with_detail("all probe limits agree with the value within radius"))
    }
}

/// Probes uniform continuity of f over a set: every supplied pair of
/// infinitely close sequences inside the set must stay infinitely
/// close after lifting. The quantifier ranges over all pairs, so a
/// passing result is stabilized only, never symbolic.
pub fn uniform_continuity_probe(
    f: &RealFunction,
    set: &IntervalSet,
    pairs: &[(Fluxion, Fluxion)],
    budget: Budget,
) -> Result<Verdict, CalculusError> {
    let mut any_unknown = false;
    for (i, (x, y)) in pairs.iter().enumerate() {
        for side in [x, y] {
            let m = eventually_in_with(side, set, budget);
            if !m.verdict.is_proven() {
                return Err(CalculusError::DomainViolation {
                    detail: format!("pair {i} is not eventually in the set: {}", m.verdict),
                });
            }
        }
        let close = x.infinitely_close_with(y, budget);
        if !close.is_proven() {
            return Err(CalculusError::PairNotClose { index: i });
        }
        let fx = lift_with(f, x, budget)?;
        let fy = lift_with(f, y, budget)?;
        let lifted_close = fx.infinitely_close_with(&fy, budget);
        if lifted_close.is_refuted() {
            let mut detail = format!("pair {i}: lifted images are not infinitely close");
            if let LimitResult::Exact(gap) = fx.sub(&fy).limit_with(budget) {
                detail.push_str(&format!("; their difference tends to {gap}"));
            }
            return Ok(Verdict {
                outcome: Outcome::Refuted,
                witness: lifted_close.witness,
                provenance: lifted_close.provenance,
                detail: Some(detail),
            });
        }
        if !lifted_close.is_proven() {
            any_unknown = true;
        }
    }
    if any_unknown {
        Ok(Verdict::inconclusive(budget.fuel)
            .with_detail("some lifted pairs did not stabilize"))
    } else {
        Ok(Verdict::stabilized(budget.fuel)
            .with_detail("holds over the supplied pair families; the quantifier is not exhausted"))
    }
}

/// Standard pair families inside a set for the uniform-continuity
/// probe: nearby decays anchored at sample points, plus an escaping
/// pair when the set is unbounded above.
pub fn standard_pairs(set: &IntervalSet, seed: u64) -> Vec<(Fluxion, Fluxion)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for c in set.components().iter().take(3) {
        let piece = IntervalSet::from_intervals(vec![c.clone()]);
        let Some(base) = piece.sample_point() else {
            continue;
        };
        let Some(anchor) = piece.accumulation_witness(&base) else {
            continue;
        };
        let shift = qr(1, rng.gen_range(2..=9));
        let nudged = Fluxion::from_term(
            anchor.term().clone().add(
                SequenceTerm::constant(shift).div(SequenceTerm::index().int_pow(2)),
            ),
        );
        let second = if eventually_in_with(&nudged, set, Budget::default())
            .verdict
            .is_proven()
        {
            nudged
        } else {
            Fluxion::from_term(anchor.term().clone())
        };
        pairs.push((anchor, second));
    }
    let escaping = (
        Fluxion::from_term(SequenceTerm::index()),
        Fluxion::from_term(SequenceTerm::index().add(reciprocal_term())),
    );
    if eventually_in_with(&escaping.0, set, Budget::default())
        .verdict
        .is_proven()
        && eventually_in_with(&escaping.1, set, Budget::default())
            .verdict
            .is_proven()
    {
        pairs.push(escaping);
    }
    pairs
}

/// The limit of f(x) as x tends to `at` along avoiding probes, with
/// one-sided behavior combined: symbolic disagreement between probes
/// reports oscillation with exact extreme values.
pub fn function_limit(
    f: &RealFunction,
    at: &ExtendedRational,
    budget: Budget,
) -> Result<LimitResult, CalculusError> {
    let probes: Vec<Probe> = match at {
        ExtendedRational::Finite(a) => {
            if !f.domain().is_accumulation_point(a) {
                return Err(CalculusError::NotAccumulationPoint);
            }
            avoiding_probes(a, f.domain(), budget)
        }
        ExtendedRational::PosInfinity | ExtendedRational::NegInfinity => {
            let sign = if *at == ExtendedRational::PosInfinity {
                1
            } else {
                -1
            };
            let mk = |t: SequenceTerm| {
                Fluxion::from_term(SequenceTerm::from_int(sign).mul(t))
            };
            let raw = vec![
                ("n", mk(SequenceTerm::index())),
                ("2n", mk(SequenceTerm::from_int(2).mul(SequenceTerm::index()))),
                ("n^2", mk(SequenceTerm::index().int_pow(2))),
            ];
            let probes: Vec<Probe> = raw
                .into_iter()
                .filter(|(_, x)| {
                    eventually_in_with(x, f.domain(), budget).verdict.is_proven()
                })
                .map(|(label, x)| Probe {
                    h: x.term().clone(),
                    label: label.to_string(),
                    x,
                })
                .collect();
            if probes.is_empty() {
                return Err(CalculusError::NotAccumulationPoint);
            }
            probes
        }
    };
    if probes.is_empty() {
        return Err(CalculusError::NotAccumulationPoint);
    }
    let mut results = Vec::new();
    for probe in &probes {
        let lifted = lift_with(f, &probe.x, budget)?;
        results.push((probe.label.clone(), lifted.limit_with(budget)));
    }
    Ok(combine_probe_limits(&results, budget.fuel))
}

/// One-sided limit by restricting the domain to the requested side, as
/// an open ray intersection.
pub fn function_limit_one_sided(
    f: &RealFunction,
    a: &Rational,
    from_above: bool,
    budget: Budget,
) -> Result<LimitResult, CalculusError> {
    let ray = if from_above {
        IntervalSet::from_intervals(vec![crate::topology::Interval::new(
            ExtendedRational::Finite(a.clone()),
            false,
            ExtendedRational::PosInfinity,
            false,
        )])
    } else {
        IntervalSet::from_intervals(vec![crate::topology::Interval::new(
            ExtendedRational::NegInfinity,
            false,
            ExtendedRational::Finite(a.clone()),
            false,
        )])
    };
    let restricted = f.clone().with_domain(f.domain().intersect(&ray));
    function_limit(&restricted, &ExtendedRational::Finite(a.clone()), budget)
}

/// Merges per-probe limits: agreement propagates exactness, symbolic
/// disagreement becomes oscillation bounds, and unresolved sampling
/// stays inconclusive.
fn combine_probe_limits(results: &[(String, LimitResult)], fuel: u64) -> LimitResult {
    let mut exacts: Vec<ExtendedRational> = Vec::new();
    let mut oscillation: Vec<(ExtendedRational, ExtendedRational)> = Vec::new();
    let mut approxes: Vec<(Rational, Rational)> = Vec::new();
    for (_, r) in results {
        match r {
            LimitResult::Exact(v) => {
                if !exacts.contains(v) {
                    exacts.push(v.clone());
                }
            }
            LimitResult::Approx { mid, rad, .. } => approxes.push((mid.clone(), rad.clone())),
            LimitResult::DivergentOscillating { limsup, liminf } => {
                oscillation.push((limsup.clone(), liminf.clone()))
            }
            LimitResult::Inconclusive { .. } => return LimitResult::Inconclusive { fuel },
        }
    }
    if !oscillation.is_empty() || exacts.len() > 1 {
        let mut tops: Vec<ExtendedRational> = exacts.clone();
        let mut bottoms: Vec<ExtendedRational> = exacts;
        for (hi, lo) in oscillation {
            tops.push(hi);
            bottoms.push(lo);
        }
        let limsup = tops.into_iter().max().unwrap();
        let liminf = bottoms.into_iter().min().unwrap();
        return LimitResult::DivergentOscillating { limsup, liminf };
    }
    if let Some(e) = exacts.first() {
        let consistent = match e {
            ExtendedRational::Finite(v) => approxes
                .iter()
                .all(|(mid, rad)| (mid - v).abs() <= rad.clone()),
            _ => approxes.is_empty(),
        };
        return if consistent {
            LimitResult::Exact(e.clone())
        } else {
            LimitResult::Inconclusive { fuel }
        };
    }
    if approxes.is_empty() {
        return LimitResult::Inconclusive { fuel };
    }
    let consistent = approxes.iter().all(|(m1, r1)| {
        approxes
            .iter()
            .all(|(m2, r2)| (m1 - m2).abs() <= r1.clone() + r2)
    });
    if !consistent {
        return LimitResult::Inconclusive { fuel };
    }
    let lo = approxes
        .iter()
        .map(|(m, r)| m - r)
        .min()
        .unwrap();
    let hi = approxes
        .iter()
        .map(|(m, r)| m + r)
        .max()
        .unwrap();
    let hull = MidRad::from_bounds(lo, hi);
    LimitResult::Approx {
        mid: hull.mid,
        rad: hull.rad,
        fuel,
    }
}

/// The per-probe difference quotients and their combined limit.
#[derive(Clone, Debug)]
pub struct DerivativeReport {
    pub estimate: LimitResult,
    pub probes: Vec<(String, LimitResult)>,
    /// All probe limits coincide within their stated radii. Disagreeing
    /// probes are never averaged; symbolic disagreement is an error.
    pub agreement: bool,
}

/// The derivative of f at a via difference quotients along the
/// avoiding probe family. Polynomial and rational evaluators yield a
/// symbolic exact value; enclosure evaluators an estimate with an
/// agreement flag.
pub fn derivative(
    f: &RealFunction,
    a: &Rational,
    budget: Budget,
) -> Result<DerivativeReport, CalculusError> {
    if !f.domain().contains_point(a) {
        return Err(CalculusError::DomainViolation {
            detail: format!("{a} is outside the domain"),
        });
    }
    if !f.domain().is_accumulation_point(a) {
        return Err(CalculusError::DomainViolation {
            detail: format!("{a} is an isolated point; no difference quotient exists"),
        });
    }
    let probes = avoiding_probes(a, f.domain(), budget);
    if probes.is_empty() {
        return Err(CalculusError::NotAccumulationPoint);
    }
    let mut results: Vec<(String, LimitResult)> = Vec::new();
    let mut quotients: Vec<Fluxion> = Vec::new();
    match f.evaluator() {
        Evaluator::Exact(_) => {
            let fa = f
                .value_exact(a)
                .ok_or_else(|| CalculusError::DomainViolation {
                    detail: format!("the function has no value at {a}"),
                })?;
            for probe in &probes {
                let fx = lift_with(f, &probe.x, budget)?;
                let quotient = Fluxion::from_term(
                    fx.term()
                        .clone()
                        .sub(SequenceTerm::constant(fa.clone()))
                        .div(probe.h.clone()),
                );
                results.push((probe.label.clone(), quotient.limit_with(budget)));
                quotients.push(quotient);
            }
        }
        Evaluator::Approx(map) => {
            for probe in &probes {
                let map = map.clone();
                let h = probe.h.clone();
                let base = a.clone();
                let rule = move |n: u64, bits: u32| -> Result<MidRad, EvalError> {
                    let hv = h.eval_exact(n)?;
                    if hv.is_zero() {
                        return Err(EvalError::UndefinedAt(n));
                    }
                    let x = &base + &hv;
                    let fx = map.eval_point(&x, bits).ok_or(EvalError::UndefinedAt(n))?;
                    let fa = map
                        .eval_point(&base, bits)
                        .ok_or(EvalError::UndefinedAt(n))?;
                    Ok(fx.sub(&fa).mul(&MidRad::exact(hv.recip())))
                };
                let quotient = Fluxion::from_term(SequenceTerm::opaque(
                    format!("quotient[{}]", probe.label),
                    rule,
                ));
                results.push((probe.label.clone(), quotient.limit_with(budget)));
                quotients.push(quotient);
            }
        }
    }

    // Symbolic disagreement is a certified refutation of
    // differentiability and must surface as an error with both probes.
    let exact_pairs: Vec<(usize, &ExtendedRational)> = results
        .iter()
        .enumerate()
        .filter_map(|(i, (_, r))| r.exact().map(|e| (i, e)))
        .collect();
    for (i, vi) in &exact_pairs {
        for (j, vj) in &exact_pairs {
            if i < j && vi != vj {
                return Err(CalculusError::NotDifferentiable {
                    probe_a: results[*i].clone(),
                    probe_b: results[*j].clone(),
                });
            }
        }
    }
    for (i, (_, ri)) in results.iter().enumerate() {
        for (j, rj) in results.iter().enumerate().skip(i + 1).map(|(j, (_, r))| (j, r)) {
            if certified_separated(ri, rj) {
                // Two empirical windows can separate spuriously when
                // both quotients converge slower than 1/n, so the gap
                // between the quotients themselves must be confirmed
                // non-vanishing before declaring non-differentiability.
                let gap = quotients[i].sub(&quotients[j]);
                let v = crate::fluxion::empirical::empirical_vanishing(
                    gap.term(),
                    budget.fuel,
                    budget.bits,
                );
                if !v.is_proven() {
                    return Err(CalculusError::NotDifferentiable {
                        probe_a: results[i].clone(),
                        probe_b: results[j].clone(),
                    });
                }
            }
        }
    }
    let estimate = combine_probe_limits(&results, budget.fuel);
    let agreement = !matches!(
        estimate,
        LimitResult::Inconclusive { .. } | LimitResult::DivergentOscillating { .. }
    );
    Ok(DerivativeReport {
        estimate,
        probes: results,
        agreement,
    })
}

/// Two limit results whose supports certifiably cannot meet.
fn certified_separated(a: &LimitResult, b: &LimitResult) -> bool {
    let span = |r: &LimitResult| -> Option<(Rational, Rational)> {
        match r {
            LimitResult::Exact(ExtendedRational::Finite(v)) => Some((v.clone(), v.clone())),
            LimitResult::Approx { mid, rad, .. } => Some((mid - rad, mid + rad)),
            _ => None,
        }
    };
    match (span(a), span(b)) {
        (Some((lo1, hi1)), Some((lo2, hi2))) => hi1 < lo2 || hi2 < lo1,
        _ => false,
    }
}
