//! Bolzano–Weierstrass subsequence extraction via the peak algorithm:
//! an index n is a (lax) peak when x_n ≥ x_m for every m > n. Many
//! peaks give a nonincreasing subsequence along them; few peaks give a
//! nondecreasing subsequence built greedily past the last one.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_integer::Roots;

use super::verdict::Verdict;
use super::{Budget, Fluxion};
use crate::approx::MidRad;
use crate::rational::Rational;
use crate::seqterm::normal::PeriodicRationalForm;
use crate::seqterm::{EvalError, SequenceTerm};

/// Which case of the peak argument produced the subsequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BwBranch {
    /// At least √fuel peaks: the nonincreasing peak subsequence.
    Peaks,
    /// Few peaks: the nondecreasing greedy chain from past the last one.
    Ascent,
}

impl fmt::Display for BwBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BwBranch::Peaks => write!(f, "peaks"),
            BwBranch::Ascent => write!(f, "ascent"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum BwError {
    /// Neither enough peaks nor a long enough ascending chain was found
    /// within the fuel bound.
    FuelExhausted,
    /// The sequence is not known to be bounded, so extraction does not
    /// apply; carries the boundedness verdict.
    NotFinite(Box<Verdict>),
}

impl fmt::Display for BwError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BwError::FuelExhausted => {
                write!(f, "could not certify peak structure within the fuel bound")
            }
            BwError::NotFinite(v) => write!(f, "sequence not known bounded: {v}"),
        }
    }
}

impl std::error::Error for BwError {}

/// Extraction result: the explicit index prefix, the subsequence as a
/// fluxion (opaque-backed, extending the prefix lazily), and which
/// branch fired.
#[derive(Clone, Debug)]
pub struct BwResult {
    pub prefix: Vec<u64>,
    pub subsequence: Fluxion,
    pub branch: BwBranch,
    pub peaks_found: usize,
}

/// Eventual step direction and limit of one residue class.
#[derive(Clone, Debug)]
struct ClassTail {
    dir: i8,
    limit: Option<Rational>,
}

#[derive(Clone, Debug)]
struct FragmentTails {
    form: PeriodicRationalForm,
    tails: Vec<ClassTail>,
    /// Past this index, every class is monotone in its stated direction.
    wmax: u64,
}

fn class_tails(form: &PeriodicRationalForm) -> FragmentTails {
    let m = form.period();
    let step_classes: Vec<_> = form
        .classes()
        .iter()
        .map(|f| f.compose_affine(1, m).sub(f))
        .collect();
    let step_form = PeriodicRationalForm::new(m, step_classes, form.threshold());
    let mut wmax = form.threshold();
    let mut tails = Vec::with_capacity(m as usize);
    for r in 0..m as usize {
        let es = step_form.class_sign(r);
        wmax = wmax.max(es.witness);
        tails.push(ClassTail {
            dir: es.sign,
            limit: form.classes()[r].limit_at_infinity().finite().cloned(),
        });
    }
    FragmentTails {
        form: form.clone(),
        tails,
        wmax,
    }
}

/// Complete lax-peak test at j ≥ wmax: compares x_j against the exact
/// supremum of every class tail beyond j.
fn is_tail_peak(frag: &FragmentTails, j: u64, vj: &Rational) -> bool {
    let form = &frag.form;
    for (r, tail) in frag.tails.iter().enumerate() {
        let holds = if tail.dir > 0 {
            // Increasing toward its limit, never reaching it.
            match &tail.limit {
                Some(l) => vj >= l,
                None => false,
            }
        } else {
            // Nonincreasing: the next member is the tail maximum.
            let nr = form.first_member(r, j + 1);
            match form.classes()[r].eval(nr) {
                Some(v) => *vj >= v,
                None => false,
            }
        };
        if !holds {
            return false;
        }
    }
    true
}

struct Source {
    term: SequenceTerm,
    bits: u32,
    fragment: Option<FragmentTails>,
}

impl Source {
    fn value(&self, n: u64) -> Option<Rational> {
        if let Some(frag) = &self.fragment {
            if n >= frag.form.threshold() {
                return frag.form.eval(n);
            }
            return self.term.eval_exact(n).ok();
        }
        self.term.eval_approx(n, self.bits).ok().map(|v| v.mid)
    }

    fn enclosure(&self, n: u64) -> Result<MidRad, EvalError> {
        if self.fragment.is_some() {
            return self.term.eval_exact(n).map(MidRad::exact);
        }
        self.term.eval_approx(n, self.bits)
    }
}

fn ceil_sqrt(fuel: u64) -> u64 {
    let s = fuel.sqrt();
    if s * s < fuel {
        s + 1
    } else {
        s
    }
    .max(1)
}

/// How far past the current index the lazy extension will scan before
/// giving up and repeating the last value.
fn extension_cap(last: u64) -> u64 {
    2 * last + 4096
}

/// Opaque prefixes cannot be tail-certified, so candidates this close
/// to the end of the observed prefix are not trusted as peaks.
const OPAQUE_TAIL_GUARD: u64 = 64;

pub(super) fn extract(x: &Fluxion, budget: Budget) -> Result<BwResult, BwError> {
    let finite = x.classify_with(budget).finite;
    if !finite.is_proven() {
        return Err(BwError::NotFinite(Box::new(finite)));
    }
    let fuel = budget.fuel.max(4);
    let source = Arc::new(Source {
        term: x.term().clone(),
        bits: budget.bits,
        fragment: if budget.empirical_only {
            None
        } else {
            x.form().map(class_tails)
        },
    });

    let values: Vec<Option<Rational>> = (1..=fuel).map(|n| source.value(n)).collect();

    // Backward scan for prefix peaks, filtered by the exact tail test
    // where available.
    let mut peaks = Vec::new();
    let mut best: Option<Rational> = None;
    for n in (1..=fuel).rev() {
        if let Some(v) = &values[(n - 1) as usize] {
            let prefix_peak = best.as_ref().is_none_or(|b| v >= b);
            if prefix_peak {
                let certified = match &source.fragment {
                    Some(frag) if n >= frag.wmax => is_tail_peak(frag, n, v),
                    Some(_) => true,
                    None => n + OPAQUE_TAIL_GUARD <= fuel,
                };
                if certified {
                    peaks.push(n);
                }
            }
            if best.as_ref().is_none_or(|b| v > b) {
                best = Some(v.clone());
            }
        }
    }
    peaks.reverse();

    let need = ceil_sqrt(fuel) as usize;
    let (prefix, branch) = if peaks.len() >= need {
        (peaks.clone(), BwBranch::Peaks)
    } else {
        let start = peaks.last().map_or(1, |p| p + 1);
        let mut chain: Vec<u64> = Vec::new();
        let mut cur: Option<Rational> = None;
        for n in start..=fuel {
            if let Some(v) = &values[(n - 1) as usize] {
                if cur.as_ref().is_none_or(|c| v >= c) {
                    chain.push(n);
                    cur = Some(v.clone());
                }
            }
        }
        if chain.len() < need {
            return Err(BwError::FuelExhausted);
        }
        (chain, BwBranch::Ascent)
    };

    let peaks_found = peaks.len();
    let state = Mutex::new(ExtensionState {
        indices: prefix.clone(),
        exhausted: false,
    });
    let src = Arc::clone(&source);
    let label = format!("bw_{branch}");
    let subsequence = Fluxion::from_term(SequenceTerm::opaque(label, move |k, _bits| {
        let mut st = state.lock().unwrap();
        st.extend_to(&src, branch, k);
        let idx = st.index_for(k);
        src.enclosure(idx)
    }));

    Ok(BwResult {
        prefix,
        subsequence,
        branch,
        peaks_found,
    })
}

struct ExtensionState {
    indices: Vec<u64>,
    exhausted: bool,
}

impl ExtensionState {
    /// Index of the k-th subsequence entry; once extension is
    /// exhausted the last index repeats (constant continuation).
    fn index_for(&self, k: u64) -> u64 {
        let i = (k as usize).min(self.indices.len());
        self.indices[i - 1]
    }

    fn extend_to(&mut self, source: &Source, branch: BwBranch, k: u64) {
        while (self.indices.len() as u64) < k && !self.exhausted {
            let last = *self.indices.last().unwrap();
            let next = match branch {
                BwBranch::Peaks => self.next_peak(source, last),
                BwBranch::Ascent => self.next_ascent(source, last),
            };
            match next {
                Some(j) => self.indices.push(j),
                None => self.exhausted = true,
            }
        }
    }

    fn next_peak(&self, source: &Source, last: u64) -> Option<u64> {
        match &source.fragment {
            Some(frag) => {
                let lo = (last + 1).max(frag.wmax).max(frag.form.threshold());
                for j in lo..=extension_cap(last) {
                    if let Some(v) = source.value(j) {
                        if is_tail_peak(frag, j, &v) {
                            return Some(j);
                        }
                    }
                }
                None
            }
            None => {
                // Window argmax heuristic: no tail knowledge exists, so
                // take the largest observed value in a doubling window.
                let hi = 2 * last + OPAQUE_TAIL_GUARD;
                let mut best: Option<(u64, Rational)> = None;
                for j in (last + 1)..=hi {
                    if let Some(v) = source.value(j) {
                        if best.as_ref().is_none_or(|(_, b)| v > *b) {
                            best = Some((j, v));
                        }
                    }
                }
                best.map(|(j, _)| j)
            }
        }
    }

    fn next_ascent(&self, source: &Source, last: u64) -> Option<u64> {
        let cur = source.value(last)?;
        for j in (last + 1)..=extension_cap(last) {
            if let Some(v) = source.value(j) {
                if v >= cur {
                    return Some(j);
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluxion::verdict::LimitResult;
    use crate::rational::{q, qr};
    use num_traits::Signed;

    fn fx(term: SequenceTerm) -> Fluxion {
        Fluxion::from_term(term)
    }

    fn small_budget() -> Budget {
        Budget::with_fuel(400)
    }

    #[test]
    fn alternating_yields_even_constant_subsequence() {
        let r = fx(SequenceTerm::alternating()).bw_extract(small_budget()).unwrap();
        assert_eq!(r.branch, BwBranch::Peaks);
        assert!(r.prefix.len() >= 20);
        assert!(r.prefix.iter().all(|n| n % 2 == 0));
        for k in 1..=50u64 {
            assert_eq!(r.subsequence.eval_approx(k, 64).unwrap().mid, q(1));
        }
    }

    #[test]
    fn decreasing_sequence_is_its_own_extraction() {
        let r = fx(SequenceTerm::from_int(1).div(SequenceTerm::index()))
            .bw_extract(small_budget())
            .unwrap();
        assert_eq!(r.branch, BwBranch::Peaks);
        let expected: Vec<u64> = (1..=400).collect();
        assert_eq!(r.prefix, expected);
    }

    #[test]
    fn increasing_sequence_extracts_itself_by_ascent() {
        // -1/n has no peaks at all.
        let r = fx(SequenceTerm::from_int(-1).div(SequenceTerm::index()))
            .bw_extract(small_budget())
            .unwrap();
        assert_eq!(r.branch, BwBranch::Ascent);
        assert_eq!(r.peaks_found, 0);
        assert_eq!(r.prefix[0], 1);
        assert_eq!(r.prefix.len(), 400);
    }

    #[test]
    fn signed_decaying_envelope_takes_positive_side() {
        // (-1)^n (1 + 1/n): even indices are peaks, values 1 + 1/n.
        let t = SequenceTerm::alternating().mul(
            SequenceTerm::from_int(1)
                .add(SequenceTerm::from_int(1).div(SequenceTerm::index())),
        );
        let r = fx(t).bw_extract(small_budget()).unwrap();
        assert_eq!(r.branch, BwBranch::Peaks);
        assert!(r.prefix.iter().all(|n| n % 2 == 0));
        for (i, n) in r.prefix.iter().take(20).enumerate() {
            let v = r.subsequence.eval_approx(i as u64 + 1, 64).unwrap().mid;
            assert_eq!(v, q(1) + qr(1, *n as i64));
        }
        match r.subsequence.limit_with(Budget::with_fuel(2_000)) {
            LimitResult::Approx { mid, rad, .. } => {
                assert!((mid - q(1)).abs() <= rad + qr(1, 1_000));
            }
            other => panic!("expected estimate near 1, got {other}"),
        }
    }

    #[test]
    fn unbounded_sequence_is_rejected() {
        match fx(SequenceTerm::index()).bw_extract(small_budget()) {
            Err(BwError::NotFinite(v)) => assert!(v.is_refuted()),
            other => panic!("expected boundedness rejection, got {other:?}"),
        }
    }

    #[test]
    fn extension_continues_past_the_prefix() {
        let r = fx(SequenceTerm::alternating()).bw_extract(small_budget()).unwrap();
        let far = r.prefix.len() as u64 + 200;
        assert_eq!(r.subsequence.eval_approx(far, 64).unwrap().mid, q(1));
    }

    #[test]
    fn opaque_bounded_oscillation_still_extracts() {
        let t = SequenceTerm::opaque("osc", |n, _| {
            Ok(MidRad::exact(if n % 2 == 0 { q(1) } else { q(-1) }))
        });
        let r = fx(t).bw_extract(Budget::with_fuel(1_000)).unwrap();
        assert!(r.prefix.len() >= 30);
        // All chosen prefix values should be the high side.
        for (i, _) in r.prefix.iter().take(10).enumerate() {
            assert_eq!(r.subsequence.eval_approx(i as u64 + 1, 64).unwrap().mid, q(1));
        }
    }
}
