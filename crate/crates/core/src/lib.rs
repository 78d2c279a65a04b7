//! Exact arithmetic on the ring of fluxions: germs of real sequences at
//! infinity under eventual equality.
//!
//! A fluxion is an equivalence class of sequences `ℕ → ℝ`, where two
//! sequences are identified when they agree at all but finitely many
//! indices. The quotient is a commutative ring containing the reals as
//! constant sequences, together with genuine infinitesimals such as
//! `[1/n]` and infinitely large elements such as `[n]`.
//!
//! The crate is organised around a *decidable fragment*: sequence terms
//! built from rational constants, the index `n`, ring operations,
//! division, integer powers, absolute value, periodic coefficients,
//! finite patches and affine subsequences. Every such term normalizes to
//! a family of rational functions of `n`, one per residue class modulo a
//! period, valid past an explicit threshold. On that normal form,
//! eventual equality, eventual order, avoidance, classification
//! (infinitesimal / finite / convergent / divergent to ±∞), limits and
//! limsup/liminf are all decided exactly, with certified witness
//! indices. Everything else (opaque generators, general subsequences,
//! partial sums) is handled by fuel-bounded sampling whose results are
//! explicitly labelled as empirical.
//!
//! Modules:
//! - [`seqterm`]: the symbolic term language, exact evaluation and the
//!   normalizer for the periodic-rational fragment.
//! - [`fluxion`]: the quotient-ring API: arithmetic, order, avoidance,
//!   inversion, classification, limits, subfluxions, monotone limits and
//!   the Bolzano–Weierstrass extractor.
//! - [`calculus`]: lifted real functions, continuity and limit probes,
//!   derivatives, bisection root finding and extreme-value search.
//! - [`topology`]: finite unions of rational-endpoint intervals with
//!   decidable open/closed/compact predicates and fluxion membership.
//! - [`parser`]: the text front end for sequence expressions and
//!   interval-set literals.
//! - [`suites`]: seeded property suites exercised by the CLI and the
//!   acceptance tests.

pub mod approx;
pub mod calculus;
pub mod fluxion;
pub mod parser;
pub mod rational;
pub mod seqterm;
pub mod suites;
pub mod topology;

pub use approx::MidRad;
pub use fluxion::{
    Budget, Classification, ExtendedRational, Fluxion, LimitResult, Monotonicity, Outcome,
    Provenance, Verdict, Witness,
};
pub use parser::{format_set, format_term, parse_set, parse_term, ParseError, SourceSpan};
pub use rational::Rational;
pub use seqterm::{EvalError, NormalizeError, PeriodicRationalForm, SequenceTerm};
pub use topology::IntervalSet;
