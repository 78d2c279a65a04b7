//! Verdicts, witnesses, extended values, and classification records:
//! the observable results of every decision procedure in the crate.

use std::cmp::Ordering;
use std::fmt;

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Proven,
    Refuted,
    Inconclusive,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Proven => write!(f, "Proven"),
            Outcome::Refuted => write!(f, "Refuted"),
            Outcome::Inconclusive => write!(f, "Inconclusive"),
        }
    }
}

/// Evidence accompanying a verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// The property holds at every index n ≥ N.
    Index(u64),
    /// An obstructing residue class: indices n ≡ class+1 (mod period)
    /// from `from` onward violate the property.
    Class { class: u64, period: u64, from: u64 },
    /// A concrete sampled index where the property fails.
    Sample(u64),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Index(n) => write!(f, "all n >= {n}"),
            Witness::Class {
                class,
                period,
                from,
            } => write!(
                f,
                "class n == {} (mod {period}) from n = {from}",
                class + 1
            ),
            Witness::Sample(n) => write!(f, "sample n = {n}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Decided exactly on the symbolic fragment.
    Symbolic,
    /// Concluded from sampling within the given fuel bound.
    Empirical { fuel: u64 },
}

impl Provenance {
    pub fn is_symbolic(&self) -> bool {
        matches!(self, Provenance::Symbolic)
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Symbolic => write!(f, "Symbolic"),
            Provenance::Empirical { fuel } => write!(f, "Empirical(fuel {fuel})"),
        }
    }
}

/// Result of a (semi-)decision procedure. Symbolic verdicts are never
/// `Inconclusive`; an empirical `Proven` means "stabilized under
/// sampling", a claim only about the sampled indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    pub provenance: Provenance,
    pub detail: Option<String>,
}

impl Verdict {
    pub fn proven_from(n: u64) -> Self {
        Verdict {
            outcome: Outcome::Proven,
            witness: Some(Witness::Index(n)),
            provenance: Provenance::Symbolic,
            detail: None,
        }
    }

    pub fn refuted_class(class: u64, period: u64, from: u64) -> Self {
        Verdict {
            outcome: Outcome::Refuted,
            witness: Some(Witness::Class {
                class,
                period,
                from,
            }),
            provenance: Provenance::Symbolic,
            detail: None,
        }
    }

    pub fn stabilized(fuel: u64) -> Self {
        Verdict {
            outcome: Outcome::Proven,
            witness: None,
            provenance: Provenance::Empirical { fuel },
            detail: Some("stabilized".to_string()),
        }
    }

    pub fn refuted_sample(n: u64, fuel: u64) -> Self {
        Verdict {
            outcome: Outcome::Refuted,
            witness: Some(Witness::Sample(n)),
            provenance: Provenance::Empirical { fuel },
            detail: None,
        }
    }

    pub fn inconclusive(fuel: u64) -> Self {
        Verdict {
            outcome: Outcome::Inconclusive,
            witness: None,
            provenance: Provenance::Empirical { fuel },
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn is_proven(&self) -> bool {
        self.outcome == Outcome::Proven
    }

    pub fn is_refuted(&self) -> bool {
        self.outcome == Outcome::Refuted
    }

    pub fn is_inconclusive(&self) -> bool {
        self.outcome == Outcome::Inconclusive
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.outcome, self.provenance)?;
        if let Some(w) = &self.witness {
            write!(f, ", witness: {w}")?;
        }
        if let Some(d) = &self.detail {
            write!(f, " [{d}]")?;
        }
        Ok(())
    }
}

/// A rational or a signed infinity, totally ordered with
/// -∞ < every rational < +∞.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtendedRational {
    NegInfinity,
    Finite(Rational),
    PosInfinity,
}

impl ExtendedRational {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtendedRational::Finite(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedRational::Finite(_))
    }

    /// Sum, undefined for ∞ + (−∞).
    pub fn try_add(&self, rhs: &Self) -> Option<Self> {
        use ExtendedRational::*;
        match (self, rhs) {
            (Finite(a), Finite(b)) => Some(Finite(a + b)),
            (PosInfinity, NegInfinity) | (NegInfinity, PosInfinity) => None,
            (PosInfinity, _) | (_, PosInfinity) => Some(PosInfinity),
            (NegInfinity, _) | (_, NegInfinity) => Some(NegInfinity),
        }
    }

    /// Product, undefined for 0 · ∞.
    pub fn try_mul(&self, rhs: &Self) -> Option<Self> {
        use num_traits::Zero;
        use ExtendedRational::*;
        let sign = |x: &ExtendedRational| match x {
            PosInfinity => 1i8,
            NegInfinity => -1,
            Finite(q) => crate::rational::sign_of(q),
        };
        match (self, rhs) {
            (Finite(a), Finite(b)) => Some(Finite(a * b)),
            (a, b) => {
                if matches!(a, Finite(q) if q.is_zero())
                    || matches!(b, Finite(q) if q.is_zero())
                {
                    None
                } else if sign(a) * sign(b) > 0 {
                    Some(PosInfinity)
                } else {
                    Some(NegInfinity)
                }
            }
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            ExtendedRational::NegInfinity => ExtendedRational::PosInfinity,
            ExtendedRational::PosInfinity => ExtendedRational::NegInfinity,
            ExtendedRational::Finite(q) => ExtendedRational::Finite(-q.clone()),
        }
    }
}

impl PartialOrd for ExtendedRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedRational {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtendedRational::*;
        match (self, other) {
            (NegInfinity, NegInfinity) | (PosInfinity, PosInfinity) => Ordering::Equal,
            (NegInfinity, _) | (_, PosInfinity) => Ordering::Less,
            (_, NegInfinity) | (PosInfinity, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedRational::NegInfinity => write!(f, "-inf"),
            ExtendedRational::PosInfinity => write!(f, "+inf"),
            ExtendedRational::Finite(q) => write!(f, "{q}"),
        }
    }
}

/// Outcome of a limit computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitResult {
    /// Exact limit, possibly infinite; only produced symbolically.
    Exact(ExtendedRational),
    /// Sampled estimate of the tail position: midpoint plus a radius
    /// covering both sample spread and observed drift. An estimate,
    /// not a certified enclosure of the limit.
    Approx {
        mid: Rational,
        rad: Rational,
        fuel: u64,
    },
    /// The sequence splits into subsequences with different limits.
    DivergentOscillating {
        limsup: ExtendedRational,
        liminf: ExtendedRational,
    },
    Inconclusive {
        fuel: u64,
    },
}

impl LimitResult {
    pub fn exact(&self) -> Option<&ExtendedRational> {
        match self {
            LimitResult::Exact(v) => Some(v),
            _ => None,
        }
    }

    pub fn exact_finite(&self) -> Option<&Rational> {
        self.exact().and_then(|e| e.finite())
    }
}

impl fmt::Display for LimitResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitResult::Exact(v) => write!(f, "Exact({v})"),
            LimitResult::Approx { mid, rad, fuel } => {
                write!(f, "Approx(mid {mid}, rad {rad}, fuel {fuel})")
            }
            LimitResult::DivergentOscillating { limsup, liminf } => {
                write!(f, "DivergentOscillating(limsup {limsup}, liminf {liminf})")
            }
            LimitResult::Inconclusive { fuel } => write!(f, "Inconclusive(fuel {fuel})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    No,
    Unknown,
}

impl fmt::Display for Monotonicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Monotonicity::Increasing => write!(f, "Increasing"),
            Monotonicity::Decreasing => write!(f, "Decreasing"),
            Monotonicity::No => write!(f, "No"),
            Monotonicity::Unknown => write!(f, "Unknown"),
        }
    }
}

/// Full classification of a sequence's asymptotic behavior.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub infinitesimal: Verdict,
    pub finite: Verdict,
    pub convergent: Verdict,
    /// Finite limit value (exact or estimated) when convergence holds.
    pub limit: Option<Rational>,
    pub to_plus_infinity: Verdict,
    pub to_minus_infinity: Verdict,
    pub avoids_zero: Verdict,
    pub monotone: Monotonicity,
}

/// Eventual extremes over all subsequential limits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalLimits {
    pub limsup: ExtendedRational,
    pub liminf: ExtendedRational,
    pub provenance: Provenance,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    #[test]
    fn extended_order_is_total() {
        let vals = [
            ExtendedRational::NegInfinity,
            ExtendedRational::Finite(q(-3)),
            ExtendedRational::Finite(qr(1, 2)),
            ExtendedRational::PosInfinity,
        ];
        for w in vals.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn extended_arithmetic_partiality() {
        use ExtendedRational::*;
        assert_eq!(PosInfinity.try_add(&NegInfinity), None);
        assert_eq!(PosInfinity.try_add(&Finite(q(5))), Some(PosInfinity));
        assert_eq!(Finite(q(0)).try_mul(&PosInfinity), None);
        assert_eq!(Finite(q(-2)).try_mul(&PosInfinity), Some(NegInfinity));
        assert_eq!(
            Finite(q(2)).try_mul(&Finite(q(3))),
            Some(Finite(q(6)))
        );
    }

    #[test]
    fn verdict_display_mentions_witness() {
        let v = Verdict::proven_from(7);
        let s = v.to_string();
        assert!(s.contains("Proven") && s.contains("n >= 7"));
    }
}
