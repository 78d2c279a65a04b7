//! Normalization of sequence terms into a periodic family of rational
//! functions valid past an explicit threshold, plus the eventual-sign
//! kernel every comparison decision rests on.

use std::fmt;

use num_integer::Integer;

use super::ratfunc::RationalFunction;
use super::SequenceTerm;
use crate::rational::{ceil_to_i64, sign_of, Rational};

/// Periodic-rational normal form: `classes[r]` is the rational function
/// of n governing indices n ≡ r+1 (mod period), valid for n ≥ threshold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicRationalForm {
    period: u64,
    classes: Vec<RationalFunction>,
    threshold: u64,
}

/// Sign of one residue class for all sufficiently large indices, with a
/// certified witness: the sign holds at every class member n ≥ witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventualSign {
    pub sign: i8,
    pub witness: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalizeError {
    /// The term leaves the decidable fragment at the given node path.
    NotInFragment { path: String },
    /// A divisor (or base of a negative power) is identically zero on
    /// some residue class, so the quotient is undefined at infinitely
    /// many indices.
    DivisionNeverDefined { path: String },
}

impl fmt::Display for NormalizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalizeError::NotInFragment { path } => {
                write!(f, "term is outside the decidable fragment at {path}")
            }
            NormalizeError::DivisionNeverDefined { path } => {
                write!(f, "divisor at {path} is identically zero on a residue class")
            }
        }
    }
}

impl std::error::Error for NormalizeError {}

/// Largest number of class members scanned when hunting the minimal
/// sign witness; past this we fall back to the root-bound certificate.
const SIGN_SCAN_CAP: u64 = 4096;

impl PeriodicRationalForm {
    pub fn new(period: u64, classes: Vec<RationalFunction>, threshold: u64) -> Self {
        assert!(period >= 1 && classes.len() as u64 == period && threshold >= 1);
        PeriodicRationalForm {
            period,
            classes,
            threshold,
        }
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn classes(&self) -> &[RationalFunction] {
        &self.classes
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    /// Residue-class slot governing index n.
    pub fn class_index(&self, n: u64) -> usize {
        ((n - 1) % self.period) as usize
    }

    pub fn class_for_index(&self, n: u64) -> &RationalFunction {
        &self.classes[self.class_index(n)]
    }

    /// Evaluates the form at n; `None` only below the threshold where a
    /// class denominator may vanish.
    pub fn eval(&self, n: u64) -> Option<Rational> {
        self.class_for_index(n).eval(n)
    }

    /// Smallest class member of slot `r` that is ≥ `lo`.
    pub fn first_member(&self, r: usize, lo: u64) -> u64 {
        let base = r as u64 + 1;
        if base >= lo {
            base
        } else {
            base + self.period * ((lo - base).div_ceil(self.period))
        }
    }

    /// Re-expresses the form with a period that is a multiple of the
    /// current one; classes repeat accordingly.
    pub(crate) fn lift_period(&self, new_period: u64) -> PeriodicRationalForm {
        assert!(new_period % self.period == 0);
        let classes = (0..new_period)
            .map(|r| self.classes[(r % self.period) as usize].clone())
            .collect();
        PeriodicRationalForm::new(new_period, classes, self.threshold)
    }

    /// Classwise combination over the lcm period.
    pub(crate) fn zip(
        &self,
        rhs: &PeriodicRationalForm,
        op: impl Fn(&RationalFunction, &RationalFunction) -> RationalFunction,
    ) -> PeriodicRationalForm {
        let period = self.period.lcm(&rhs.period);
        let a = self.lift_period(period);
        let b = rhs.lift_period(period);
        let classes = a
            .classes
            .iter()
            .zip(&b.classes)
            .map(|(x, y)| op(x, y))
            .collect();
        PeriodicRationalForm::new(period, classes, self.threshold.max(rhs.threshold))
    }

    /// Smallest equivalent period: drops repetition when all classes
    /// agree across a divisor of the period.
    pub fn reduce_period(&self) -> PeriodicRationalForm {
        for d in 1..=self.period {
            if self.period % d != 0 {
                continue;
            }
            let ok = (0..self.period)
                .all(|r| self.classes[r as usize] == self.classes[(r % d) as usize]);
            if ok {
                return PeriodicRationalForm::new(
                    d,
                    self.classes[..d as usize].to_vec(),
                    self.threshold,
                );
            }
        }
        self.clone()
    }

    /// Raises the threshold, never lowers it.
    pub(crate) fn with_threshold(&self, threshold: u64) -> PeriodicRationalForm {
        PeriodicRationalForm::new(
            self.period,
            self.classes.clone(),
            self.threshold.max(threshold),
        )
    }

    /// Bumps the threshold past every undefined point of every class so
    /// the agreement invariant holds unconditionally.
    fn past_denominator_roots(self) -> PeriodicRationalForm {
        let mut thr = self.threshold;
        for class in &self.classes {
            for root in class.undefined_points() {
                thr = thr.max(root + 1);
            }
        }
        self.with_threshold(thr)
    }

    /// Eventual sign of every class, each with a certified witness.
    pub fn eventual_signs(&self) -> Vec<EventualSign> {
        (0..self.period as usize)
            .map(|r| self.class_sign(r))
            .collect()
    }

    /// Eventual sign of class slot `r`. The witness is minimal when the
    /// candidate range is small enough to scan, otherwise it is the
    /// first index certified sign-stable by the root bound.
    pub fn class_sign(&self, r: usize) -> EventualSign {
        let f = &self.classes[r];
        if f.is_zero() {
            return EventualSign {
                sign: 0,
                witness: self.threshold,
            };
        }
        let sign = sign_of(f.num().leading().unwrap());
        // Sign changes of num·den are confined to the root bound.
        let product = f.num().mul(f.den());
        let bound = ceil_to_i64(&product.cauchy_root_bound()).max(0) as u64;
        let first = self.first_member(r, self.threshold);
        if first > bound {
            return EventualSign {
                sign,
                witness: self.threshold,
            };
        }
        let members = (bound - first) / self.period + 1;
        if members > SIGN_SCAN_CAP {
            return EventualSign {
                sign,
                witness: 1 + self.threshold.max(bound),
            };
        }
        let scanner = crate::seqterm::poly::SignScanner::new(&product);
        let mut witness = self.threshold;
        let mut n = first;
        while n <= bound {
            if scanner.sign_at(n) != sign {
                witness = n + 1;
            }
            n += self.period;
        }
        EventualSign { sign, witness }
    }

    /// Decides whether class slot `r` eventually sits on the requested
    /// side of zero (`side` is +1 or -1; `weak` also accepts exact
    /// zeros), returning the decision and an index from which it is
    /// certified for every member. The index is minimal whenever the
    /// candidate range stays within the scan cap.
    pub fn class_side(&self, r: usize, side: i8, weak: bool) -> (bool, u64) {
        let es = self.class_sign(r);
        if es.sign == side {
            if !weak {
                return (true, es.witness);
            }
            return (true, self.weak_side_witness(r, side, es.witness));
        }
        if es.sign == 0 && weak {
            return (true, es.witness);
        }
        (false, es.witness)
    }

    /// The strict sign holds from `strict_from`; zeros before it do not
    /// break the weak constraint, so the weak witness can be earlier.
    fn weak_side_witness(&self, r: usize, side: i8, strict_from: u64) -> u64 {
        let f = &self.classes[r];
        let first = self.first_member(r, self.threshold);
        if first >= strict_from {
            return self.threshold;
        }
        let members = (strict_from - 1 - first) / self.period + 1;
        if members > SIGN_SCAN_CAP {
            return strict_from;
        }
        let num_scanner = crate::seqterm::poly::SignScanner::new(f.num());
        let den_scanner = crate::seqterm::poly::SignScanner::new(f.den());
        let mut witness = self.threshold;
        let mut n = first;
        while n < strict_from {
            let den_sign = den_scanner.sign_at(n);
            let bad = den_sign == 0 || num_scanner.sign_at(n) * den_sign == -side;
            if bad {
                witness = n + 1;
            }
            n += self.period;
        }
        witness
    }
}

/// Rewrites a symbolic term as a periodic-rational form that evaluates
/// identically past its threshold.
pub fn normalize(term: &SequenceTerm) -> Result<PeriodicRationalForm, NormalizeError> {
    let mut path = vec!["root"];
    let form = normalize_at(term, &mut path)?;
    Ok(form.past_denominator_roots())
}

fn path_string(path: &[&'static str]) -> String {
    path.join(".")
}

fn normalize_at(
    term: &SequenceTerm,
    path: &mut Vec<&'static str>,
) -> Result<PeriodicRationalForm, NormalizeError> {
    let child = |label: &'static str,
                     t: &SequenceTerm,
                     path: &mut Vec<&'static str>|
     -> Result<PeriodicRationalForm, NormalizeError> {
        path.push(label);
        let r = normalize_at(t, path);
        path.pop();
        r
    };
    match term {
        SequenceTerm::Const(c) => Ok(PeriodicRationalForm::new(
            1,
            vec![RationalFunction::constant(c.clone())],
            1,
        )),
        SequenceTerm::Index => Ok(PeriodicRationalForm::new(
            1,
            vec![RationalFunction::index()],
            1,
        )),
        SequenceTerm::Periodic(cycle) => Ok(PeriodicRationalForm::new(
            cycle.len() as u64,
            cycle
                .iter()
                .map(|c| RationalFunction::constant(c.clone()))
                .collect(),
            1,
        )),
        SequenceTerm::Add(a, b) => {
            let fa = child("left", a, path)?;
            let fb = child("right", b, path)?;
            Ok(fa.zip(&fb, RationalFunction::add))
        }
        SequenceTerm::Sub(a, b) => {
            let fa = child("left", a, path)?;
            let fb = child("right", b, path)?;
            Ok(fa.zip(&fb, RationalFunction::sub))
        }
        SequenceTerm::Mul(a, b) => {
            let fa = child("left", a, path)?;
            let fb = child("right", b, path)?;
            Ok(fa.zip(&fb, RationalFunction::mul))
        }
        SequenceTerm::Div(a, b) => {
            let fa = child("left", a, path)?;
            let fb = child("right", b, path)?;
            let period = fa.period().lcm(&fb.period());
            let fa = fa.lift_period(period);
            let fb = fb.lift_period(period);
            let mut thr = fa.threshold().max(fb.threshold());
            let mut classes = Vec::with_capacity(period as usize);
            for (x, y) in fa.classes().iter().zip(fb.classes()) {
                let Some(qf) = x.div(y) else {
                    return Err(NormalizeError::DivisionNeverDefined {
                        path: path_string(path),
                    });
                };
                // The quotient term is undefined wherever the divisor
                // evaluates to zero, even if reduction cancels it.
                for root in y.num().nonneg_integer_roots() {
                    thr = thr.max(root + 1);
                }
                classes.push(qf);
            }
            Ok(PeriodicRationalForm::new(period, classes, thr).past_denominator_roots())
        }
        SequenceTerm::IntPow(a, e) => {
            let fa = child("base", a, path)?;
            let mut thr = fa.threshold();
            let mut classes = Vec::with_capacity(fa.period() as usize);
            for x in fa.classes() {
                let Some(p) = x.pow(*e) else {
                    return Err(NormalizeError::DivisionNeverDefined {
                        path: path_string(path),
                    });
                };
                if *e < 0 {
                    for root in x.num().nonneg_integer_roots() {
                        thr = thr.max(root + 1);
                    }
                }
                classes.push(p);
            }
            Ok(PeriodicRationalForm::new(fa.period(), classes, thr).past_denominator_roots())
        }
        SequenceTerm::Abs(a) => {
            let fa = child("inner", a, path)?;
            let mut thr = fa.threshold();
            let mut classes = Vec::with_capacity(fa.period() as usize);
            for r in 0..fa.period() as usize {
                let es = fa.class_sign(r);
                thr = thr.max(es.witness);
                let x = &fa.classes()[r];
                classes.push(if es.sign < 0 { x.neg() } else { x.clone() });
            }
            Ok(PeriodicRationalForm::new(fa.period(), classes, thr))
        }
        SequenceTerm::Patch(inner, overrides) => {
            let fi = child("inner", inner, path)?;
            let past = overrides.keys().max().map_or(1, |k| k + 1);
            Ok(fi.with_threshold(past))
        }
        SequenceTerm::AffineSubseq(inner, stride, offset) => {
            let fi = child("inner", inner, path)?;
            let m = fi.period();
            let classes = (0..m)
                .map(|c| {
                    let r = ((stride * (c + 1) + offset - 1) % m) as usize;
                    fi.classes()[r].compose_affine(*stride, *offset)
                })
                .collect();
            let thr = if fi.threshold() > *offset {
                (fi.threshold() - offset).div_ceil(*stride).max(1)
            } else {
                1
            };
            Ok(PeriodicRationalForm::new(m, classes, thr).past_denominator_roots())
        }
        SequenceTerm::Opaque(_) => Err(NormalizeError::NotInFragment {
            path: path_string(path),
        }),
    }
}
