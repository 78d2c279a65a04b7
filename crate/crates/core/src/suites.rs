//! Named, seeded property suites: executable checks for the library's
//! propositions plus randomized law, invariance, oracle and round-trip
//! runs. The CLI `suite` subcommand and the acceptance tests both drive
//! these; identical seed and fuel reproduce identical reports.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::{
    continuity_at, derivative, extreme_values, ivt_root, lift, CalculusError, FnExpr, RealFunction,
};
use crate::fluxion::{
    Budget, ExtendedRational, Fluxion, LimitResult, Monotonicity, Outcome, Verdict, Witness,
};
use crate::parser::{format_set, format_term, parse_set, parse_term};
use crate::rational::{ceil_to_i64, q, qr, Rational};
use crate::seqterm::ratfunc::RationalFunction;
use crate::seqterm::{PeriodicRationalForm, SequenceTerm};
use crate::topology::{
    compactness_probe, eventually_in_with, Interval, IntervalSet,
};

/// Every runnable suite name, in the order `all` executes them.
pub const SUITE_NAMES: &[&str] = &[
    "propositions",
    "ring",
    "order",
    "absval",
    "subring",
    "invert",
    "quotient",
    "oracle",
    "convergence",
    "ivt",
    "deriv",
    "topology",
    "bw",
    "parser",
];

/// Outcome of one suite run: how many cases executed and which failed.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: String,
    pub seed: u64,
    pub fuel: u64,
    pub cases: usize,
    /// Sorted case identifiers with failure details; empty means pass.
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Run {
    cases: usize,
    failures: Vec<String>,
}

impl Run {
    fn new() -> Self {
        Run {
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, id: &str, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(format!("{id}: {}", detail()));
        }
    }

    fn pass(&mut self) {
        self.cases += 1;
    }
}

/// Runs one named suite; `None` for an unknown name.
pub fn run_suite(name: &str, seed: u64, fuel: u64) -> Option<SuiteReport> {
    let start = Instant::now();
    let mut run = Run::new();
    match name {
        "propositions" => suite_propositions(&mut run, fuel),
        "ring" => suite_ring(&mut run, seed),
        "order" => suite_order(&mut run, seed),
        "absval" => suite_absval(&mut run, seed),
        "subring" => suite_subring(&mut run, seed),
        "invert" => suite_invert(&mut run, seed),
        "quotient" => suite_quotient(&mut run, seed, fuel),
        "oracle" => suite_oracle(&mut run, seed, fuel),
        "convergence" => suite_convergence(&mut run, seed, fuel),
        "ivt" => suite_ivt(&mut run, seed),
        "deriv" => suite_deriv(&mut run, seed, fuel),
        "topology" => suite_topology(&mut run, seed, fuel),
        "bw" => suite_bw(&mut run, seed, fuel),
        "parser" => suite_parser(&mut run, seed),
        _ => return None,
    }
    let mut failures = run.failures;
    failures.sort();
    Some(SuiteReport {
        name: name.to_string(),
        seed,
        fuel,
        cases: run.cases,
        failures,
        elapsed: start.elapsed(),
    })
}

/// Runs every suite in declaration order with the same seed and fuel.
pub fn run_all(seed: u64, fuel: u64) -> Vec<SuiteReport> {
    SUITE_NAMES
        .iter()
        .map(|n| run_suite(n, seed, fuel).expect("known suite name"))
        .collect()
}

// ---------------------------------------------------------------------
// Seeded generators.

/// Deterministic generator for fragment terms, interval sets and parse
/// trees. `StdRng` seeded from a u64 is stable across runs on the same
/// build, and every suite derives all randomness from it.
pub struct TermGen {
    rng: ChaCha8Rng,
}

impl TermGen {
    pub fn new(seed: u64) -> Self {
        TermGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn rational(&mut self) -> Rational {
        qr(self.int(-9, 9), self.int(1, 9))
    }

    fn nonzero_rational(&mut self) -> Rational {
        loop {
            let v = self.rational();
            if !v.is_zero() {
                return v;
            }
        }
    }

    fn cycle(&mut self) -> Vec<Rational> {
        let len = self.int(1, 3);
        (0..len).map(|_| self.rational()).collect()
    }

    pub fn overrides(&mut self) -> BTreeMap<u64, Rational> {
        let len = self.int(1, 3);
        (0..len)
            .map(|_| (self.int(1, 40) as u64, self.rational()))
            .collect()
    }

    fn atom(&mut self) -> SequenceTerm {
        match self.int(0, 4) {
            0 => SequenceTerm::constant(self.rational()),
            1 | 2 => SequenceTerm::index(),
            3 => SequenceTerm::alternating(),
            _ => SequenceTerm::periodic(self.cycle()),
        }
    }

    fn raw_fragment(&mut self, depth: u32) -> SequenceTerm {
        if depth == 0 {
            return self.atom();
        }
        let d = depth - 1;
        match self.int(0, 9) {
            0 | 1 => self.raw_fragment(d).add(self.raw_fragment(d)),
            2 => self.raw_fragment(d).sub(self.raw_fragment(d)),
            3 | 4 => self.raw_fragment(d).mul(self.raw_fragment(d)),
            5 => self.raw_fragment(d).div(self.raw_fragment(d)),
            6 => self.raw_fragment(d).int_pow(self.int(-2, 3)),
            7 => self.raw_fragment(d).abs(),
            8 => self.raw_fragment(d).patch(self.overrides()),
            _ => {
                let stride = self.int(1, 3) as u64;
                let offset = self.int(0, 3) as u64;
                self.raw_fragment(d).subseq(stride, offset)
            }
        }
    }

    /// A random normalizable fragment term with small period and
    /// degree, so combined terms stay cheap; retries drafts whose
    /// division is undefined on a class or whose normal form is large.
    pub fn fragment(&mut self) -> SequenceTerm {
        for _ in 0..64 {
            let t = self.raw_fragment(3);
            let x = Fluxion::from_term(t.clone());
            if let Some(form) = x.form() {
                let small = form.period() <= 6
                    && form.classes().iter().all(|c| {
                        c.num().degree().unwrap_or(0) <= 8 && c.den().degree().unwrap_or(0) <= 8
                    });
                if small {
                    return t;
                }
            }
        }
        self.atom()
    }

    fn poly_coeffs(&mut self, max_deg: usize) -> Vec<Rational> {
        let deg = self.int(0, max_deg as i64) as usize;
        let mut cs: Vec<Rational> = (0..=deg).map(|_| self.rational()).collect();
        if cs[deg].is_zero() {
            cs[deg] = q(1);
        }
        cs
    }

    /// Numerator degree never exceeds the (pole-free) denominator
    /// degree, so the term is eventually bounded; decorations preserve
    /// that.
    pub fn bounded(&mut self) -> SequenceTerm {
        let d = self.int(1, 3);
        let num = self.poly_coeffs(d as usize);
        let den = SequenceTerm::index()
            .int_pow(d)
            .add(SequenceTerm::constant(self.rational().abs() + q(1)));
        let mut t = poly_term(&num).div(den);
        if self.chance(0.3) {
            t = t.mul(SequenceTerm::periodic(self.cycle()));
        }
        if self.chance(0.2) {
            t = t.abs();
        }
        if self.chance(0.5) {
            t = t.add(SequenceTerm::constant(self.rational()));
        }
        if self.chance(0.2) {
            t = t.patch(self.overrides());
        }
        t
    }

    /// Strictly smaller numerator degree: the term tends to zero.
    pub fn vanishing(&mut self) -> SequenceTerm {
        let t = self.vanishing_plain();
        let mut t = if self.chance(0.3) {
            t.mul(SequenceTerm::periodic(self.cycle()))
        } else {
            t
        };
        if self.chance(0.2) {
            t = t.abs();
        }
        if self.chance(0.2) {
            t = t.patch(self.overrides());
        }
        t
    }

    /// Single-class vanishing term (no periodic decoration).
    pub fn vanishing_plain(&mut self) -> SequenceTerm {
        let d = self.int(1, 3);
        let num = self.poly_coeffs((d - 1) as usize);
        let den = SequenceTerm::index()
            .int_pow(d)
            .add(SequenceTerm::constant(self.rational().abs() + q(1)));
        poly_term(&num).div(den)
    }

    /// A term together with its exact limit.
    pub fn convergent(&mut self) -> (SequenceTerm, Rational) {
        let a = self.rational();
        let mut t = SequenceTerm::constant(a.clone()).add(self.vanishing());
        if self.chance(0.2) {
            t = t.patch(self.overrides());
        }
        (t, a)
    }

    /// Positive leading coefficient and degree at least one: tends to
    /// +infinity.
    pub fn divergent_up(&mut self) -> SequenceTerm {
        let deg = self.int(1, 3) as usize;
        let mut cs: Vec<Rational> = (0..=deg).map(|_| self.rational()).collect();
        cs[deg] = self.nonzero_rational().abs();
        let mut t = poly_term(&cs);
        if self.chance(0.5) {
            t = t.add(self.bounded());
        }
        t
    }

    fn endpoint_pair(&mut self) -> (Rational, Rational) {
        let a = self.rational();
        let b = self.rational();
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    fn interval(&mut self) -> Interval {
        match self.int(0, 9) {
            0 => Interval::singleton(self.rational()),
            1 => Interval::new(
                ExtendedRational::NegInfinity,
                false,
                ExtendedRational::Finite(self.rational()),
                self.chance(0.5),
            ),
            2 => Interval::new(
                ExtendedRational::Finite(self.rational()),
                self.chance(0.5),
                ExtendedRational::PosInfinity,
                false,
            ),
            _ => {
                let (a, b) = self.endpoint_pair();
                if a == b {
                    Interval::singleton(a)
                } else {
                    Interval::new(
                        ExtendedRational::Finite(a),
                        self.chance(0.5),
                        ExtendedRational::Finite(b),
                        self.chance(0.5),
                    )
                }
            }
        }
    }

    /// Canonical set with at most four components.
    pub fn set(&mut self) -> IntervalSet {
        let k = self.int(1, 4);
        IntervalSet::from_intervals((0..k).map(|_| self.interval()).collect())
    }

    /// Arbitrary parse tree (no opaque nodes); not required to be
    /// normalizable, only representable in the grammar.
    pub fn ast(&mut self, depth: u32) -> SequenceTerm {
        if depth == 0 {
            return self.atom_ast();
        }
        let d = depth - 1;
        match self.int(0, 8) {
            0 => self.ast(d).add(self.ast(d)),
            1 => self.ast(d).sub(self.ast(d)),
            2 => self.ast(d).mul(self.ast(d)),
            3 => self.ast(d).div(self.ast(d)),
            4 => self.ast(d).int_pow(self.int(-3, 3)),
            5 => self.ast(d).abs(),
            6 => self.ast(d).patch(self.overrides()),
            7 => {
                let stride = self.int(1, 3) as u64;
                let offset = self.int(0, 3) as u64;
                self.ast(d).subseq(stride, offset)
            }
            _ => self.atom_ast(),
        }
    }

    fn atom_ast(&mut self) -> SequenceTerm {
        match self.int(0, 4) {
            0 => SequenceTerm::constant(self.rational()),
            1 | 2 => SequenceTerm::index(),
            3 => SequenceTerm::alternating(),
            _ => SequenceTerm::periodic(self.cycle()),
        }
    }
}

/// Dense polynomial in the index, coefficients by ascending degree.
pub fn poly_term(coeffs: &[Rational]) -> SequenceTerm {
    let mut t = SequenceTerm::constant(coeffs.first().cloned().unwrap_or_else(Rational::zero));
    for (k, c) in coeffs.iter().enumerate().skip(1) {
        if c.is_zero() {
            continue;
        }
        t = t.add(SequenceTerm::constant(c.clone()).mul(SequenceTerm::index().int_pow(k as i64)));
    }
    t
}

fn fx(t: SequenceTerm) -> Fluxion {
    Fluxion::from_term(t)
}

fn index() -> SequenceTerm {
    SequenceTerm::index()
}

// ---------------------------------------------------------------------
// Proposition suite: the worked examples, each decided symbolically.

fn suite_propositions(run: &mut Run, fuel: u64) {
    let budget = Budget::with_fuel(fuel);
    let zero = Fluxion::embed_int(0);
    let two = Fluxion::embed_int(2);
    let x = fx(SequenceTerm::from_int(1).add(SequenceTerm::alternating()));
    let y = fx(SequenceTerm::from_int(1).sub(SequenceTerm::alternating()));

    let sym = |id: &str, run: &mut Run, v: &Verdict, want: Outcome| {
        run.check(id, v.outcome == want && v.provenance.is_symbolic(), || {
            format!("got {} ({})", v.outcome, v.provenance)
        });
    };

    let prod = x.mul(&y).eventual_eq_with(&zero, budget);
    sym("propositions/zero_divisor/product", run, &prod, Outcome::Proven);
    sym(
        "propositions/zero_divisor/left_nonzero",
        run,
        &x.eventual_eq_with(&zero, budget),
        Outcome::Refuted,
    );
    sym(
        "propositions/zero_divisor/right_nonzero",
        run,
        &y.eventual_eq_with(&zero, budget),
        Outcome::Refuted,
    );

    sym(
        "propositions/incomparable/le_xy",
        run,
        &x.le_with(&y, budget),
        Outcome::Refuted,
    );
    sym(
        "propositions/incomparable/le_yx",
        run,
        &y.le_with(&x, budget),
        Outcome::Refuted,
    );

    sym("propositions/le_two", run, &x.le_with(&two, budget), Outcome::Proven);
    sym("propositions/not_lt_two", run, &x.lt_with(&two, budget), Outcome::Refuted);
    sym(
        "propositions/avoids_zero_fails",
        run,
        &x.avoids_with(&zero, budget),
        Outcome::Refuted,
    );

    let h = fx(SequenceTerm::from_int(1).div(index()));
    let hc = h.classify_with(budget);
    sym("propositions/reciprocal_infinitesimal", run, &hc.infinitesimal, Outcome::Proven);

    let n = fx(index());
    run.check(
        "propositions/index_to_plus_infinity",
        n.limit_with(budget) == LimitResult::Exact(ExtendedRational::PosInfinity),
        || format!("got {}", n.limit_with(budget)),
    );
    let neg_n = n.neg();
    run.check(
        "propositions/negated_index_to_minus_infinity",
        neg_n.limit_with(budget) == LimitResult::Exact(ExtendedRational::NegInfinity),
        || format!("got {}", neg_n.limit_with(budget)),
    );

    let osc_big = fx(SequenceTerm::alternating().mul(index()));
    run.check(
        "propositions/signed_index_oscillates",
        osc_big.limit_with(budget)
            == LimitResult::DivergentOscillating {
                limsup: ExtendedRational::PosInfinity,
                liminf: ExtendedRational::NegInfinity,
            },
        || format!("got {}", osc_big.limit_with(budget)),
    );
    let cb = osc_big.classify_with(budget);
    sym("propositions/signed_index_not_up", run, &cb.to_plus_infinity, Outcome::Refuted);
    sym("propositions/signed_index_not_down", run, &cb.to_minus_infinity, Outcome::Refuted);

    let osc = fx(SequenceTerm::alternating());
    run.check(
        "propositions/alternation_oscillates",
        osc.limit_with(budget)
            == LimitResult::DivergentOscillating {
                limsup: ExtendedRational::Finite(q(1)),
                liminf: ExtendedRational::Finite(q(-1)),
            },
        || format!("got {}", osc.limit_with(budget)),
    );
    let co = osc.classify_with(budget);
    sym("propositions/alternation_not_convergent", run, &co.convergent, Outcome::Refuted);
    sym("propositions/alternation_finite", run, &co.finite, Outcome::Proven);

    match n.invert_with(budget) {
        Ok(inv) => {
            let ci = inv.classify_with(budget);
            sym("propositions/invert_index_infinitesimal", run, &ci.infinitesimal, Outcome::Proven);
            sym(
                "propositions/invert_index_positive",
                run,
                &inv.gt_with(&zero, budget),
                Outcome::Proven,
            );
        }
        Err(e) => {
            run.check("propositions/invert_index_infinitesimal", false, || format!("{e}"));
            run.check("propositions/invert_index_positive", false, || format!("{e}"));
        }
    }

    let u = fx(index());
    let v = fx(index().add(SequenceTerm::from_int(1).div(index())));
    sym(
        "propositions/close_pair",
        run,
        &u.infinitely_close_with(&v, budget),
        Outcome::Proven,
    );
    let u2 = u.mul(&u);
    let v2 = v.mul(&v);
    sym(
        "propositions/squares_not_close",
        run,
        &u2.infinitely_close_with(&v2, budget),
        Outcome::Refuted,
    );
    let gap = v2.sub(&u2);
    run.check(
        "propositions/square_gap_limit_two",
        gap.limit_with(budget) == LimitResult::Exact(ExtendedRational::Finite(q(2))),
        || format!("got {}", gap.limit_with(budget)),
    );
}

// ---------------------------------------------------------------------
// Ring axioms.

fn suite_ring(run: &mut Run, seed: u64) {
    let mut g = TermGen::new(seed);
    let zero = Fluxion::embed_int(0);
    let one = Fluxion::embed_int(1);
    for i in 0..350 {
        let x = fx(g.fragment());
        let y = fx(g.fragment());
        let z = fx(g.fragment());

        let laws: [(&str, Fluxion, Fluxion); 8] = [
            ("assoc_add", x.add(&y).add(&z), x.add(&y.add(&z))),
            ("comm_add", x.add(&y), y.add(&x)),
            ("assoc_mul", x.mul(&y).mul(&z), x.mul(&y.mul(&z))),
            ("comm_mul", x.mul(&y), y.mul(&x)),
            ("distrib", x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z))),
            ("add_identity", x.add(&zero), x.clone()),
            ("mul_identity", x.mul(&one), x.clone()),
            ("add_inverse", x.add(&x.neg()), zero.clone()),
        ];
        for (name, lhs, rhs) in laws {
            let v = lhs.eventual_eq(&rhs);
            run.check(
                &format!("ring/{name}/{i}"),
                v.is_proven() && v.provenance.is_symbolic(),
                || format!("{} ({})", v.outcome, v.provenance),
            );
        }
    }
}

// ---------------------------------------------------------------------
// Order properties.

fn suite_order(run: &mut Run, seed: u64) {
    let mut g = TermGen::new(seed);
    let zero = Fluxion::embed_int(0);
    for i in 0..400 {
        // Half arbitrary triples, half constructed ascending chains so
        // the conditional laws fire non-vacuously.
        let (x, y, z) = if i % 2 == 0 {
            (fx(g.fragment()), fx(g.fragment()), fx(g.fragment()))
        } else {
            let x = fx(g.fragment());
            let y = x.add(&fx(g.fragment().abs()));
            let z = y.add(&fx(g.fragment().abs()));
            (x, y, z)
        };

        let v = x.le(&x);
        run.check(&format!("order/reflexive/{i}"), v.is_proven(), || {
            format!("{}", v.outcome)
        });

        if x.le(&y).is_proven() && y.le(&x).is_proven() {
            let eq = x.eventual_eq(&y);
            run.check(&format!("order/antisymmetric/{i}"), eq.is_proven(), || {
                format!("{}", eq.outcome)
            });
        } else {
            run.pass();
        }

        if x.le(&y).is_proven() && y.le(&z).is_proven() {
            let le = x.le(&z);
            run.check(&format!("order/transitive_le/{i}"), le.is_proven(), || {
                format!("{}", le.outcome)
            });
        } else {
            run.pass();
        }

        if x.lt(&y).is_proven() && y.lt(&z).is_proven() {
            let lt = x.lt(&z);
            run.check(&format!("order/transitive_lt/{i}"), lt.is_proven(), || {
                format!("{}", lt.outcome)
            });
        } else {
            run.pass();
        }

        let direct = x.le(&y);
        let shifted = x.sub(&y).le(&zero);
        run.check(
            &format!("order/le_iff_diff_nonpos/{i}"),
            direct.outcome == shifted.outcome,
            || format!("{} vs {}", direct.outcome, shifted.outcome),
        );
    }
}

// ---------------------------------------------------------------------
// Absolute value.

fn suite_absval(run: &mut Run, seed: u64) {
    let mut g = TermGen::new(seed);
    let zero = Fluxion::embed_int(0);
    for i in 0..350 {
        let x = fx(g.fragment());
        let y = fx(g.fragment());
        let dist = x.sub(&y).abs();

        let nonneg = zero.le(&dist);
        run.check(&format!("absval/nonnegative/{i}"), nonneg.is_proven(), || {
            format!("{}", nonneg.outcome)
        });

        let dz = dist.eventual_eq(&zero);
        let eq = x.eventual_eq(&y);
        run.check(
            &format!("absval/zero_iff_equal/{i}"),
            dz.outcome == eq.outcome,
            || format!("{} vs {}", dz.outcome, eq.outcome),
        );

        let sym = dist.eventual_eq(&y.sub(&x).abs());
        run.check(&format!("absval/symmetric/{i}"), sym.is_proven(), || {
            format!("{}", sym.outcome)
        });

        let tri = x.add(&y).abs().le(&x.abs().add(&y.abs()));
        run.check(&format!("absval/triangle/{i}"), tri.is_proven(), || {
            format!("{}", tri.outcome)
        });

        // |x| <= y with y >= 0, against the two-sided characterization.
        let bound = fx(g.fragment().abs());
        let lhs = x.abs().le(&bound);
        let below = bound.neg().le(&x);
        let above = x.le(&bound);
        let ok = if lhs.is_proven() {
            below.is_proven() && above.is_proven()
        } else if lhs.is_refuted() {
            below.is_refuted() || above.is_refuted()
        } else {
            true
        };
        run.check(&format!("absval/two_sided/{i}"), ok, || {
            format!(
                "|x|<=y {} but -y<=x {} and x<=y {}",
                lhs.outcome, below.outcome, above.outcome
            )
        });
    }
}

// ---------------------------------------------------------------------
// Subring and ideal structure, and the finite = real + infinitesimal
// decomposition.

fn suite_subring(run: &mut Run, seed: u64) {
    let mut g = TermGen::new(seed);
    for i in 0..250 {
        let f1 = fx(g.bounded());
        let f2 = fx(g.bounded());
        let h1 = fx(g.vanishing());
        let h2 = fx(g.vanishing());

        let cases: [(&str, Fluxion, bool); 6] = [
            ("finite_sum", f1.add(&f2), false),
            ("finite_product", f1.mul(&f2), false),
            ("small_sum", h1.add(&h2), true),
            ("small_diff", h1.sub(&h2), true),
            ("finite_times_small", f1.mul(&h1), true),
            ("finite_diff", f1.sub(&f2), false),
        ];
        for (name, val, want_small) in cases {
            let c = val.classify();
            let v = if want_small { &c.infinitesimal } else { &c.finite };
            run.check(
                &format!("subring/{name}/{i}"),
                v.is_proven() && v.provenance.is_symbolic(),
                || format!("{} ({})", v.outcome, v.provenance),
            );
        }

        // Convergent = embedded real + infinitesimal, with the real
        // part pinned by the limit and no other real working.
        let (t, a) = g.convergent();
        let x = fx(t);
        let small = x.sub(&Fluxion::embed(a.clone()));
        let cs = small.classify();
        run.check(
            &format!("subring/decompose_small_part/{i}"),
            cs.infinitesimal.is_proven(),
            || format!("{}", cs.infinitesimal.outcome),
        );
        run.check(
            &format!("subring/decompose_limit/{i}"),
            x.limit() == LimitResult::Exact(ExtendedRational::Finite(a.clone())),
            || format!("limit {} want {}", x.limit(), a),
        );
        let other = x.sub(&Fluxion::embed(&a + q(1)));
        run.check(
            &format!("subring/decompose_unique/{i}"),
            other.classify().infinitesimal.is_refuted(),
            || format!("{}", other.classify().infinitesimal.outcome),
        );
    }
}

// ---------------------------------------------------------------------
// Inversion: reciprocal proposition and avoidance = invertibility.

fn suite_invert(run: &mut Run, seed: u64) {
    let mut g = TermGen::new(seed);
    let zero = Fluxion::embed_int(0);
    for i in 0..500 {
        let up = fx(g.divergent_up());
        let cu = up.classify();
        run.check(
            &format!("invert/diverges_up/{i}"),
            cu.to_plus_infinity.is_proven(),
            || format!("{}", cu.to_plus_infinity.outcome),
        );
        match up.invert() {
            Ok(r) => {
                let cr = r.classify();
                run.check(
                    &format!("invert/reciprocal_small/{i}"),
                    cr.infinitesimal.is_proven(),
                    || format!("{}", cr.infinitesimal.outcome),
                );
                let pos = r.gt(&zero);
                run.check(&format!("invert/reciprocal_positive/{i}"), pos.is_proven(), || {
                    format!("{}", pos.outcome)
                });
            }
            Err(e) => {
                run.check(&format!("invert/reciprocal_small/{i}"), false, || format!("{e}"));
                run.check(&format!("invert/reciprocal_positive/{i}"), false, || format!("{e}"));
            }
        }

        let down = up.neg();
        match down.invert() {
            Ok(r) => {
                let cr = r.classify();
                let neg = r.lt(&zero);
                run.check(
                    &format!("invert/mirrored_small_negative/{i}"),
                    cr.infinitesimal.is_proven() && neg.is_proven(),
                    || format!("{} / {}", cr.infinitesimal.outcome, neg.outcome),
                );
            }
            Err(e) => {
                run.check(&format!("invert/mirrored_small_negative/{i}"), false, || format!("{e}"));
            }
        }

        // Avoidance of zero is exactly invertibility.
        let x = fx(g.fragment());
        let avoids = x.avoids(&zero);
        let inverse = x.invert();
        run.check(
            &format!("invert/avoids_iff_invertible/{i}"),
            avoids.is_proven() == inverse.is_ok(),
            || format!("avoids {} invert_ok {}", avoids.outcome, inverse.is_ok()),
        );
        if let Ok(r) = inverse {
            let unit = x.mul(&r).eventual_eq(&Fluxion::embed_int(1));
            run.check(&format!("invert/product_is_one/{i}"), unit.is_proven(), || {
                format!("{}", unit.outcome)
            });
        } else {
            run.pass();
        }
    }
}

// ---------------------------------------------------------------------
// Quotient correctness: verdicts and limits are patch-invariant.

fn suite_quotient(run: &mut Run, seed: u64, fuel: u64) {
    let mut g = TermGen::new(seed);
    let budget = Budget::with_fuel(fuel);
    for i in 0..500 {
        let xt = g.fragment();
        let yt = g.fragment();
        let x = fx(xt.clone());
        let y = fx(yt.clone());
        let xp = fx(xt.patch(g.overrides()));
        let yp = fx(yt.patch(g.overrides()));

        let pairs: [(&str, Outcome, Outcome); 5] = [
            (
                "eventual_eq",
                x.eventual_eq_with(&y, budget).outcome,
                xp.eventual_eq_with(&yp, budget).outcome,
            ),
            ("le", x.le_with(&y, budget).outcome, xp.le_with(&yp, budget).outcome),
            ("lt", x.lt_with(&y, budget).outcome, xp.lt_with(&yp, budget).outcome),
            (
                "avoids",
                x.avoids_with(&y, budget).outcome,
                xp.avoids_with(&yp, budget).outcome,
            ),
            (
                "infinitely_close",
                x.infinitely_close_with(&y, budget).outcome,
                xp.infinitely_close_with(&yp, budget).outcome,
            ),
        ];
        for (name, plain, patched) in pairs {
            run.check(&format!("quotient/{name}/{i}"), plain == patched, || {
                format!("{plain} vs {patched}")
            });
        }

        let c = x.classify_with(budget);
        let cp = xp.classify_with(budget);
        let class_ok = c.infinitesimal.outcome == cp.infinitesimal.outcome
            && c.finite.outcome == cp.finite.outcome
            && c.convergent.outcome == cp.convergent.outcome
            && c.limit == cp.limit
            && c.to_plus_infinity.outcome == cp.to_plus_infinity.outcome
            && c.to_minus_infinity.outcome == cp.to_minus_infinity.outcome
            && c.avoids_zero.outcome == cp.avoids_zero.outcome;
        run.check(&format!("quotient/classify/{i}"), class_ok, || {
            "classification changed under patching".to_string()
        });

        run.check(
            &format!("quotient/limit/{i}"),
            x.limit_with(budget) == xp.limit_with(budget),
            || format!("{} vs {}", x.limit_with(budget), xp.limit_with(budget)),
        );

        let e = x.limsup_liminf_with(budget);
        let ep = xp.limsup_liminf_with(budget);
        run.check(
            &format!("quotient/extremal_limits/{i}"),
            e.limsup == ep.limsup && e.liminf == ep.liminf,
            || "limsup/liminf changed under patching".to_string(),
        );
    }
}

// ---------------------------------------------------------------------
// Symbolic verdicts against a brute-force prefix oracle.

/// Certified tail rate: for every class member n >= start,
/// |f(n) - l| <= b / n. Returns None when f does not approach l at a
/// 1/n rate (which for rational functions means it does not approach l
/// at all, unless identically equal).
fn tail_rate(f: &RationalFunction, l: &Rational) -> Option<(Rational, u64)> {
    let diff = f.num().sub(&f.den().scale(l));
    if diff.is_zero() {
        return Some((Rational::zero(), 1));
    }
    let dd = diff.degree()?;
    let dq = f.den().degree()?;
    if dd + 1 > dq {
        return None;
    }
    let lead = f.den().leading()?.abs();
    let mut csum = Rational::zero();
    for c in diff.coeffs() {
        csum += c.abs();
    }
    let mut qsum = Rational::zero();
    for c in &f.den().coeffs()[..dq] {
        qsum += c.abs();
    }
    let b = q(2) * csum / lead.clone();
    let start = ceil_to_i64(&(q(2) * qsum / lead)).max(0) as u64 + 1;
    Some((b, start))
}

/// Indices to scan for a claim certified from `from`: a dense window,
/// then geometric fill, always ending at 10x the witness.
fn oracle_indices(from: u64) -> Vec<u64> {
    let from = from.max(1);
    let far = from.saturating_mul(10);
    let mut out: Vec<u64> = (from..=far.min(from + 600)).collect();
    let mut k = from + 600;
    while k < far {
        out.push(k);
        k += k / 8 + 1;
    }
    out.push(far);
    out.sort_unstable();
    out.dedup();
    out
}

/// Class members n ≡ class+1 (mod period), n >= from.
fn class_members(class: u64, period: u64, from: u64, count: usize) -> Vec<u64> {
    let rem = (class + 1) % period;
    let mut n = from + ((rem + period - from % period) % period);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        out.push(n);
        n += period;
    }
    out
}

fn cmp_ok(rel: &str, a: &Rational, b: &Rational) -> bool {
    match rel {
        "eq" => a == b,
        "le" => a <= b,
        "lt" => a < b,
        "avoids" => a != b,
        _ => unreachable!(),
    }
}

fn oracle_relation(run: &mut Run, id: &str, x: &Fluxion, y: &Fluxion, rel: &str, v: &Verdict) {
    if !v.provenance.is_symbolic() {
        run.check(id, false, || "fragment verdict was not symbolic".to_string());
        return;
    }
    match (&v.outcome, &v.witness) {
        (Outcome::Proven, Some(Witness::Index(n))) => {
            for k in oracle_indices(*n) {
                let (a, b) = match (x.eval_exact(k), y.eval_exact(k)) {
                    (Ok(a), Ok(b)) => (a, b),
                    _ => {
                        run.check(id, false, || format!("evaluation failed at {k}"));
                        return;
                    }
                };
                if !cmp_ok(rel, &a, &b) {
                    run.check(id, false, || format!("claim fails at index {k}"));
                    return;
                }
            }
            run.pass();
        }
        (Outcome::Refuted, Some(Witness::Class { class, period, from })) => {
            if rel == "avoids" {
                // A class refutes avoidance when the difference tends
                // to zero along it, not by pointwise coincidence.
                let diff = x.sub(y);
                let member = class_members(*class, *period, *from, 1)[0];
                let ok = diff
                    .form()
                    .map(|df| {
                        df.class_for_index(member).limit_at_infinity()
                            == ExtendedRational::Finite(Rational::zero())
                    })
                    .unwrap_or(false);
                run.check(id, ok, || {
                    "refuting class difference does not vanish".to_string()
                });
                return;
            }
            for k in class_members(*class, *period, *from, 120) {
                let (a, b) = match (x.eval_exact(k), y.eval_exact(k)) {
                    (Ok(a), Ok(b)) => (a, b),
                    _ => {
                        run.check(id, false, || format!("evaluation failed at {k}"));
                        return;
                    }
                };
                if cmp_ok(rel, &a, &b) {
                    run.check(id, false, || {
                        format!("refutation class satisfies the relation at {k}")
                    });
                    return;
                }
            }
            run.pass();
        }
        (Outcome::Refuted, Some(Witness::Sample(k))) => {
            let ok = match (x.eval_exact(*k), y.eval_exact(*k)) {
                (Ok(a), Ok(b)) => !cmp_ok(rel, &a, &b),
                _ => false,
            };
            run.check(id, ok, || format!("sample witness {k} does not refute"));
        }
        _ => run.check(id, false, || {
            format!("unexpected verdict shape: {} with {:?}", v.outcome, v.witness)
        }),
    }
}

/// Validates a finite-class limit claim by the certified 1/n tail bound.
fn oracle_class_limit(form: &PeriodicRationalForm, r: usize, l: &Rational) -> Result<(), String> {
    let f = &form.classes()[r];
    let Some((b, start)) = tail_rate(f, l) else {
        return Err(format!("class {r} does not approach {l}"));
    };
    let lo = form.first_member(r, start.max(form.threshold()).max(1));
    let far = lo.saturating_mul(10);
    let mut n = lo;
    let mut step = form.period();
    for checked in 0..160 {
        if n > far {
            break;
        }
        let Some(v) = form.eval(n) else {
            return Err(format!("class value undefined at {n}"));
        };
        if (v - l).abs() > &b / q(n as i64) {
            return Err(format!("tail bound violated at {n}"));
        }
        if checked >= 120 {
            // Widen geometrically but stay inside the residue class.
            step = step.saturating_mul(2);
        }
        n = n.saturating_add(step);
    }
    Ok(())
}

/// First index from which a polynomial keeps the sign of its leading
/// coefficient: one past twice the coefficient mass over the lead.
fn sign_stable_from(p: &crate::seqterm::poly::Poly) -> u64 {
    let Some(d) = p.degree() else { return 1 };
    let lead = p.leading().expect("nonzero degree has a lead").abs();
    let mut mass = Rational::zero();
    for c in &p.coeffs()[..d] {
        mass += c.abs();
    }
    ceil_to_i64(&(q(2) * mass / lead)).max(0) as u64 + 1
}

/// Validates an infinite-class limit claim: the numerator must outgrow
/// the denominator, the leading signs must point the right way, and an
/// evaluation past both sign-stability bounds must confirm.
fn oracle_class_escape(form: &PeriodicRationalForm, r: usize, up: bool) -> Result<(), String> {
    let f = &form.classes()[r];
    let dn = f.num().degree().unwrap_or(0);
    let dq = f.den().degree().unwrap_or(0);
    if dn <= dq {
        return Err(format!("class {r} cannot escape: degrees {dn} vs {dq}"));
    }
    let ln = f.num().leading().expect("positive degree");
    let ld = f.den().leading().expect("rational function denominator");
    let lead_up = ln.is_positive() == ld.is_positive();
    if lead_up != up {
        return Err(format!("leading signs point the wrong way in class {r}"));
    }
    let n0 = sign_stable_from(f.num())
        .max(sign_stable_from(f.den()))
        .max(form.threshold())
        .max(1);
    let n = form.first_member(r, n0);
    let Some(v) = form.eval(n) else {
        return Err(format!("class value undefined at {n}"));
    };
    if up && !v.is_positive() || !up && !v.is_negative() {
        return Err(format!("wrong sign at {n}"));
    }
    Ok(())
}

fn oracle_limit(run: &mut Run, id: &str, x: &Fluxion) {
    let Some(form) = x.form() else {
        run.check(id, false, || "fragment term failed to normalize".to_string());
        return;
    };
    let lim = x.limit();
    let outcome: Result<(), String> = match &lim {
        LimitResult::Exact(ExtendedRational::Finite(l)) => (0..form.classes().len())
            .try_for_each(|r| oracle_class_limit(form, r, l)),
        LimitResult::Exact(ExtendedRational::PosInfinity) => {
            (0..form.classes().len()).try_for_each(|r| oracle_class_escape(form, r, true))
        }
        LimitResult::Exact(ExtendedRational::NegInfinity) => {
            (0..form.classes().len()).try_for_each(|r| oracle_class_escape(form, r, false))
        }
        LimitResult::DivergentOscillating { limsup, liminf } => {
            let mut per_class: Vec<ExtendedRational> = Vec::new();
            let mut res = Ok(());
            for (r, f) in form.classes().iter().enumerate() {
                let cl = f.limit_at_infinity();
                res = res.and_then(|()| match &cl {
                    ExtendedRational::Finite(l) => oracle_class_limit(form, r, l),
                    ExtendedRational::PosInfinity => oracle_class_escape(form, r, true),
                    ExtendedRational::NegInfinity => oracle_class_escape(form, r, false),
                });
                per_class.push(cl);
            }
            res.and_then(|()| {
                let hi = per_class.iter().max().cloned();
                let lo = per_class.iter().min().cloned();
                if hi.as_ref() == Some(limsup) && lo.as_ref() == Some(liminf) && limsup != liminf {
                    Ok(())
                } else {
                    Err("stated extremes do not match the class limits".to_string())
                }
            })
        }
        other => Err(format!("fragment limit was not symbolic: {other}")),
    };
    run.check(id, outcome.is_ok(), || outcome.unwrap_err());
}

fn suite_oracle(run: &mut Run, seed: u64, fuel: u64) {
    let mut g = TermGen::new(seed);
    let budget = Budget::with_fuel(fuel);
    for i in 0..550 {
        // Alternate arbitrary pairs with constructed ones so that both
        // proven and refuted branches are exercised.
        let (x, y) = match i % 4 {
            0 => {
                let t = g.fragment();
                let p = t.clone().patch(g.overrides());
                (fx(t), fx(p))
            }
            1 => {
                let x = fx(g.fragment());
                let y = x.add(&fx(g.fragment().abs()));
                (x, y)
            }
            2 => {
                let x = fx(g.fragment());
                let y = x.add(&Fluxion::embed(g.nonzero_rational()));
                (x, y)
            }
            _ => (fx(g.fragment()), fx(g.fragment())),
        };

        oracle_relation(
            run,
            &format!("oracle/eventual_eq/{i}"),
            &x,
            &y,
            "eq",
            &x.eventual_eq_with(&y, budget),
        );
        oracle_relation(run, &format!("oracle/le/{i}"), &x, &y, "le", &x.le_with(&y, budget));
        oracle_relation(run, &format!("oracle/lt/{i}"), &x, &y, "lt", &x.lt_with(&y, budget));
        oracle_relation(
            run,
            &format!("oracle/avoids/{i}"),
            &x,
            &y,
            "avoids",
            &x.avoids_with(&y, budget),
        );
        oracle_limit(run, &format!("oracle/limit/{i}"), &x);
    }
}

// ---------------------------------------------------------------------
// Convergence theorems.

fn suite_convergence(run: &mut Run, seed: u64, fuel: u64) {
    let mut g = TermGen::new(seed);
    let budget = Budget::with_fuel(fuel);

    for i in 0..500 {
        let (xt, a) = g.convergent();
        let (yt, b) = g.convergent();
        let x = fx(xt);
        let y = fx(yt);
        let want = |v: Rational| LimitResult::Exact(ExtendedRational::Finite(v));

        run.check(
            &format!("convergence/sum/{i}"),
            x.add(&y).limit_with(budget) == want(&a + &b),
            || format!("got {}", x.add(&y).limit_with(budget)),
        );
        run.check(
            &format!("convergence/difference/{i}"),
            x.sub(&y).limit_with(budget) == want(&a - &b),
            || format!("got {}", x.sub(&y).limit_with(budget)),
        );
        run.check(
            &format!("convergence/product/{i}"),
            x.mul(&y).limit_with(budget) == want(&a * &b),
            || format!("got {}", x.mul(&y).limit_with(budget)),
        );
        if b.is_zero() {
            run.pass();
        } else {
            match x.divide_with(&y, budget) {
                Ok(quot) => run.check(
                    &format!("convergence/quotient/{i}"),
                    quot.limit_with(budget) == want(&a / &b),
                    || format!("got {}", quot.limit_with(budget)),
                ),
                Err(e) => run.check(&format!("convergence/quotient/{i}"), false, || format!("{e}")),
            }
        }
    }

    // Limits preserve weak order.
    for i in 0..200 {
        let (xt, a) = g.convergent();
        let x = fx(xt);
        let pad = g.rational().abs();
        let y = x.add(&fx(g.vanishing().abs())).add(&Fluxion::embed(pad.clone()));
        let le = x.le_with(&y, budget);
        let lb = y.limit_with(budget);
        let ok = le.is_proven()
            && match lb {
                LimitResult::Exact(ExtendedRational::Finite(ref l)) => a <= *l,
                _ => false,
            };
        run.check(&format!("convergence/order_limit/{i}"), ok, || {
            format!("le {} limit {}", le.outcome, lb)
        });
    }

    // Squeeze: both fences converge to the same value, so the middle
    // sequence must as well.
    for i in 0..200 {
        let (bt, a) = g.convergent();
        let base = fx(bt);
        let u = fx(g.vanishing().abs());
        let v = fx(g.vanishing().abs());
        let p = qr(g.int(0, 3), 3);
        let qfrac = qr(g.int(0, 3), 3);
        let x = base.sub(&u);
        let z = base.add(&v);
        let mid = base.add(
            &v.mul(&Fluxion::embed(p)).sub(&u.mul(&Fluxion::embed(qfrac))),
        );
        let lo = x.le_with(&mid, budget);
        let hi = mid.le_with(&z, budget);
        let lim = mid.limit_with(budget);
        let ok = lo.is_proven()
            && hi.is_proven()
            && lim == LimitResult::Exact(ExtendedRational::Finite(a.clone()));
        run.check(&format!("convergence/squeeze/{i}"), ok, || {
            format!("lo {} hi {} limit {}", lo.outcome, hi.outcome, lim)
        });
    }

    // Strict inequality does not survive the limit: a pinned witness.
    {
        let zero = Fluxion::embed_int(0);
        let h = fx(SequenceTerm::from_int(1).div(index()));
        let lt = zero.lt_with(&h, budget);
        let ok = lt.is_proven()
            && zero.limit_with(budget) == h.limit_with(budget);
        run.check("convergence/strict_collapses", ok, || {
            format!("lt {} limits {} vs {}", lt.outcome, zero.limit_with(budget), h.limit_with(budget))
        });
    }

    // Monotone terms: finite exactly when the limit is a real.
    for i in 0..200 {
        let t = match g.int(0, 2) {
            0 => poly_term(&g.poly_coeffs(2)),
            1 => SequenceTerm::constant(g.rational()).add(g.vanishing_plain()),
            _ => SequenceTerm::constant(g.rational()).sub(g.vanishing_plain().abs()),
        };
        let x = fx(t);
        let mono = x.monotonicity_with(budget);
        if !matches!(mono, Monotonicity::Increasing | Monotonicity::Decreasing) {
            run.check(&format!("convergence/monotone_detect/{i}"), false, || {
                format!("single-class term reported {mono}")
            });
            continue;
        }
        run.pass();
        let c = x.classify_with(budget);
        let lim = x.limit_with(budget);
        let has_real_limit = matches!(lim, LimitResult::Exact(ExtendedRational::Finite(_)));
        run.check(
            &format!("convergence/monotone_finite_iff_real_limit/{i}"),
            c.finite.is_proven() == has_real_limit,
            || format!("finite {} limit {}", c.finite.outcome, lim),
        );
        match x.monotone_limit(budget) {
            Ok(ml) => run.check(
                &format!("convergence/monotone_limit_agrees/{i}"),
                ml == lim,
                || format!("{ml} vs {lim}"),
            ),
            Err(e) => run.check(&format!("convergence/monotone_limit_agrees/{i}"), false, || {
                format!("{e}")
            }),
        }
    }

    // limsup = liminf exactly when the limit is exact (or an infinity).
    for i in 0..500 {
        let x = fx(g.fragment());
        let e = x.limsup_liminf_with(budget);
        let lim = x.limit_with(budget);
        let ok = if e.limsup == e.liminf {
            lim == LimitResult::Exact(e.limsup.clone())
        } else {
            lim == LimitResult::DivergentOscillating {
                limsup: e.limsup.clone(),
                liminf: e.liminf.clone(),
            }
        };
        run.check(&format!("convergence/extremes_characterize/{i}"), ok, || {
            format!("limsup {} liminf {} limit {}", e.limsup, e.liminf, lim)
        });
    }
}

// ---------------------------------------------------------------------
// Bisection.

fn newton_sqrt(c: i64) -> Rational {
    // Newton iteration on x^2 - c from 3/2; nine doublings leave the
    // error far below 10^-60.
    let c = q(c);
    let mut x = qr(3, 2);
    for _ in 0..9 {
        x = (x.clone() + c.clone() / x.clone()) / q(2);
    }
    x
}

fn suite_ivt(run: &mut Run, seed: u64) {
    let mut g = TermGen::new(seed);

    // Certified square root of two at depth 30.
    let f = RealFunction::poly(&[q(-2), q(0), q(1)]);
    match ivt_root(&f, &q(1), &q(2), 30) {
        Ok(r) => {
            let oracle = newton_sqrt(2);
            let tol = qr(1, 1i64 << 30) + Rational::new(BigInt::one(), BigInt::from(10).pow(60));
            run.check(
                "ivt/sqrt2_within_tolerance",
                (r.midpoint_estimate.clone() - &oracle).abs() <= tol,
                || format!("midpoint {} oracle distance too large", r.midpoint_estimate),
            );
            run.check("ivt/sqrt2_depth", r.depth == 30 && r.exact_hit.is_none(), || {
                format!("depth {} hit {:?}", r.depth, r.exact_hit)
            });
            run.check(
                "ivt/sqrt2_signs",
                r.lower_sign == -1 && r.upper_sign == 1,
                || format!("signs {} {}", r.lower_sign, r.upper_sign),
            );
            // Bracket invariant at every depth: exact width, opposite
            // certified signs. The endpoint sequences carry exact
            // rationals inside their enclosures.
            let mut ok = true;
            for k in 1..=30u32 {
                let lo = r.lower.eval_approx(k as u64, 64).unwrap().mid;
                let hi = r.upper.eval_approx(k as u64, 64).unwrap().mid;
                let width_ok = (&hi - &lo) == qr(1, 1i64 << k);
                let flo = &lo * &lo - q(2);
                let fhi = &hi * &hi - q(2);
                if !(width_ok && flo.is_negative() && fhi.is_positive()) {
                    ok = false;
                    break;
                }
            }
            run.check("ivt/sqrt2_bracket_invariant", ok, || {
                "bracket width or signs broke at some depth".to_string()
            });
        }
        Err(e) => {
            for id in [
                "ivt/sqrt2_within_tolerance",
                "ivt/sqrt2_depth",
                "ivt/sqrt2_signs",
                "ivt/sqrt2_bracket_invariant",
            ] {
                run.check(id, false, || format!("{e}"));
            }
        }
    }

    // Random family t^2 - c on [0, c] for c in (1, 4].
    for i in 0..20 {
        let c = q(1) + qr(g.int(1, 9), 3);
        let f = RealFunction::poly(&[-c.clone(), q(0), q(1)]);
        match ivt_root(&f, &q(0), &c, 12) {
            Ok(r) => {
                if let Some(h) = &r.exact_hit {
                    run.check(&format!("ivt/family_bracket/{i}"), h * h == c, || {
                        format!("claimed exact root {h} for c = {c}")
                    });
                    continue;
                }
                let lo = r.lower.eval_approx(12, 64).unwrap().mid;
                let hi = r.upper.eval_approx(12, 64).unwrap().mid;
                let width = crate::rational::pow_i(&qr(1, 2), 12).unwrap() * c.clone();
                let bracket_ok = (&hi - &lo) == width
                    && (&lo * &lo) <= c
                    && (&hi * &hi) >= c;
                run.check(&format!("ivt/family_bracket/{i}"), bracket_ok, || {
                    format!("bracket [{lo}, {hi}] fails for c = {c}")
                });
            }
            Err(e) => run.check(&format!("ivt/family_bracket/{i}"), false, || format!("{e}")),
        }
    }
}

// ---------------------------------------------------------------------
// Derivatives and continuity.

fn formal_derivative_at(coeffs: &[Rational], a: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for (k, c) in coeffs.iter().enumerate().skip(1) {
        acc += c * q(k as i64) * crate::rational::pow_i(a, (k - 1) as i64).unwrap();
    }
    acc
}

/// Floor approximation of the k-th root within 2^-bits (k odd for
/// negative input).
fn approx_root(a: &Rational, k: u32, bits: u32) -> Rational {
    let neg = a.is_negative();
    let num = a.numer().abs();
    let den = a.denom().clone();
    let scaled: BigInt = num * den.pow(k - 1) << (k * bits) as usize;
    let root = scaled.nth_root(k);
    let r = Rational::new(root, den * (BigInt::one() << bits));
    if neg {
        -r
    } else {
        r
    }
}

fn suite_deriv(run: &mut Run, seed: u64, fuel: u64) {
    let mut g = TermGen::new(seed);
    let budget = Budget::with_fuel(fuel);

    // Random polynomials: the reported derivative is the formal one.
    for i in 0..100 {
        let coeffs = g.poly_coeffs(6);
        let a = g.rational();
        let f = RealFunction::poly(&coeffs);
        match derivative(&f, &a, budget) {
            Ok(rep) => {
                let want = formal_derivative_at(&coeffs, &a);
                let ok = rep.estimate == LimitResult::Exact(ExtendedRational::Finite(want.clone()))
                    && rep.agreement;
                run.check(&format!("deriv/polynomial/{i}"), ok, || {
                    format!("estimate {} want {}", rep.estimate, want)
                });
                if i % 5 == 0 {
                    match continuity_at(&f, &a, budget) {
                        Ok(v) => run.check(
                            &format!("deriv/implies_continuity/{i}"),
                            v.is_proven(),
                            || format!("{}", v.outcome),
                        ),
                        Err(e) => run.check(&format!("deriv/implies_continuity/{i}"), false, || {
                            format!("{e}")
                        }),
                    }
                }
            }
            Err(e) => run.check(&format!("deriv/polynomial/{i}"), false, || format!("{e}")),
        }
    }

    // The absolute value at zero: refused, with the two one-sided
    // slopes as witnesses.
    match derivative(&RealFunction::abs_value(), &q(0), budget) {
        Err(CalculusError::NotDifferentiable { probe_a, probe_b }) => {
            let vals: Vec<Option<&Rational>> =
                vec![probe_a.1.exact_finite(), probe_b.1.exact_finite()];
            let ok = vals.iter().all(|v| {
                v.map(|r| r.abs() == q(1)).unwrap_or(false)
            }) && vals[0] != vals[1];
            run.check("deriv/absolute_value_split", ok, || {
                format!("probes {} / {}", probe_a.1, probe_b.1)
            });
        }
        Ok(rep) => run.check("deriv/absolute_value_split", false, || {
            format!("unexpectedly differentiable: {}", rep.estimate)
        }),
        Err(e) => run.check("deriv/absolute_value_split", false, || format!("{e}")),
    }

    // Continuity algebra on polynomial pairs, including quotients with
    // a nonvanishing denominator.
    for i in 0..30 {
        let fc = g.poly_coeffs(3);
        let gc = g.poly_coeffs(3);
        let a = g.rational();
        let fe = FnExpr::poly(&fc);
        let ge = FnExpr::poly(&gc);
        let line = IntervalSet::real_line();
        let combos: [(&str, FnExpr); 3] = [
            ("sum", fe.clone().add(ge.clone())),
            ("difference", fe.clone().sub(ge.clone())),
            ("product", fe.clone().mul(ge.clone())),
        ];
        for (name, expr) in combos {
            let h = RealFunction::exact(expr, line.clone());
            match continuity_at(&h, &a, budget) {
                Ok(v) => run.check(
                    &format!("deriv/continuity_{name}/{i}"),
                    v.is_proven() && v.provenance.is_symbolic(),
                    || format!("{} ({})", v.outcome, v.provenance),
                ),
                Err(e) => {
                    run.check(&format!("deriv/continuity_{name}/{i}"), false, || format!("{e}"))
                }
            }
        }
        // Denominator (g(t))^2 + c stays strictly positive.
        let c = g.rational().abs() + q(1);
        let den = ge.clone().int_pow(2).add(FnExpr::Const(c));
        let quot = RealFunction::exact(fe.clone().div(den), line.clone());
        match continuity_at(&quot, &a, budget) {
            Ok(v) => run.check(
                &format!("deriv/continuity_quotient/{i}"),
                v.is_proven(),
                || format!("{}", v.outcome),
            ),
            Err(e) => run.check(&format!("deriv/continuity_quotient/{i}"), false, || format!("{e}")),
        }
    }

    // Roots respect limits: lift a convergent nonnegative sequence
    // through the k-th root and land within the estimate's radius.
    for i in 0..14 {
        let k = if i % 2 == 0 { 2 } else { 3 };
        let mut a = g.rational();
        while a.abs() < qr(1, 4) {
            a = g.rational();
        }
        let target = if k == 2 { a.abs() } else { a.clone() };
        let base = SequenceTerm::constant(target.clone()).add(g.vanishing_plain());
        let xt = if k == 2 { base.abs() } else { base };
        let x = fx(xt);
        let f = if k == 2 {
            RealFunction::sqrt()
        } else {
            RealFunction::cbrt()
        };
        let id = format!("deriv/root_limit_k{k}/{i}");
        match lift(&f, &x) {
            Ok(y) => {
                let lim = y.limit_with(budget);
                let root = approx_root(&target, k, 64);
                match lim {
                    LimitResult::Approx { ref mid, ref rad, .. } => {
                        let ok = (mid - &root).abs() <= rad + qr(1, 4096);
                        run.check(&id, ok, || {
                            format!("mid {mid} rad {rad} root {root}")
                        });
                    }
                    other => run.check(&id, false, || format!("limit {other}")),
                }
            }
            Err(e) => run.check(&id, false, || format!("{e}")),
        }
    }
}

// ---------------------------------------------------------------------
// Topology.

fn closure_of_nonisolated(e: &IntervalSet) -> IntervalSet {
    IntervalSet::from_intervals(
        e.components()
            .iter()
            .filter(|c| !c.is_singleton())
            .map(|c| {
                Interval::new(
                    c.lo.clone(),
                    c.lo.is_finite(),
                    c.hi.clone(),
                    c.hi.is_finite(),
                )
            })
            .collect(),
    )
}

fn suite_topology(run: &mut Run, seed: u64, fuel: u64) {
    let mut g = TermGen::new(seed);
    let budget = Budget::with_fuel(fuel);

    {
        let empty = IntervalSet::empty();
        let line = IntervalSet::real_line();
        run.check(
            "topology/empty_and_line_clopen",
            empty.is_open() && empty.is_closed() && line.is_open() && line.is_closed(),
            || "trivial sets misclassified".to_string(),
        );
    }

    for i in 0..1100 {
        let e = g.set();
        let f = g.set();

        let ce = e.complement();
        run.check(
            &format!("topology/complement_duality/{i}"),
            e.is_open() == ce.is_closed() && e.is_closed() == ce.is_open(),
            || format!("set {e} vs complement {ce}"),
        );
        run.check(
            &format!("topology/double_complement/{i}"),
            ce.complement() == e,
            || format!("{e} lost under double complement"),
        );

        let u1 = e.interior();
        let u2 = f.interior();
        run.check(
            &format!("topology/open_union_intersection/{i}"),
            u1.is_open()
                && u2.is_open()
                && u1.union(&u2).is_open()
                && u1.intersect(&u2).is_open(),
            || format!("open sets {u1} and {u2} misbehave"),
        );

        let acc = closure_of_nonisolated(&e);
        run.check(
            &format!("topology/closed_iff_accumulation/{i}"),
            e.is_closed() == acc.is_subset_of(&e),
            || format!("{e}: closed {} but accumulation set {acc}", e.is_closed()),
        );

        run.check(
            &format!("topology/compact_characterization/{i}"),
            e.is_compact() == (e.is_closed() && e.is_bounded()),
            || format!("{e}"),
        );

        // A closed subset of a compact set is compact.
        let k = e
            .intersect(&IntervalSet::closed(q(-20), q(20)))
            .closure();
        let sub = k.intersect(&f.closure());
        run.check(
            &format!("topology/compact_subset/{i}"),
            k.is_compact() && sub.is_compact(),
            || format!("k {k} sub {sub}"),
        );
    }

    // Endpoint-level accumulation and isolation checks.
    for i in 0..150 {
        let e = g.set();
        let mut ok = true;
        for c in e.components() {
            if c.is_singleton() {
                if let Some(v) = c.lo.finite() {
                    if e.is_accumulation_point(v) {
                        ok = false;
                    }
                }
            } else {
                for endp in [&c.lo, &c.hi] {
                    if let Some(v) = endp.finite() {
                        if !e.is_accumulation_point(v) {
                            ok = false;
                        }
                    }
                }
            }
        }
        let isolated: Vec<Rational> = e
            .components()
            .iter()
            .filter(|c| c.is_singleton())
            .filter_map(|c| c.lo.finite().cloned())
            .collect();
        run.check(
            &format!("topology/accumulation_endpoints/{i}"),
            ok && e.isolated_points() == isolated,
            || format!("{e}"),
        );
    }

    // Membership lemmas for eventually-in.
    for i in 0..100 {
        let e = g.set();
        let f = g.set();
        let x = match (i % 2, e.sample_point()) {
            (0, Some(s)) => Fluxion::embed(s),
            (_, Some(s)) => Fluxion::embed(s).add(&fx(g.vanishing())),
            (_, None) => fx(g.bounded()),
        };

        let in_e = eventually_in_with(&x, &e, budget).verdict;
        let in_f = eventually_in_with(&x, &f, budget).verdict;
        let in_union = eventually_in_with(&x, &e.union(&f), budget).verdict;
        let in_meet = eventually_in_with(&x, &e.intersect(&f), budget).verdict;

        if in_e.is_proven() && e.is_subset_of(&f) {
            run.check(&format!("topology/membership_monotone/{i}"), in_f.is_proven(), || {
                format!("x in {e} but not in superset {f}")
            });
        } else {
            run.pass();
        }
        run.check(
            &format!("topology/membership_meet/{i}"),
            in_meet.is_proven() == (in_e.is_proven() && in_f.is_proven()),
            || format!("meet {} parts {} {}", in_meet.outcome, in_e.outcome, in_f.outcome),
        );
        if e.intersect(&f).is_empty() {
            run.check(
                &format!("topology/membership_disjoint/{i}"),
                !(in_e.is_proven() && in_f.is_proven()),
                || format!("x eventually in both disjoint {e} and {f}"),
            );
        } else {
            run.pass();
        }
        if in_e.is_proven() {
            run.check(&format!("topology/membership_union/{i}"), in_union.is_proven(), || {
                format!("union verdict {}", in_union.outcome)
            });
        } else {
            run.pass();
        }
    }

    // Sequential probes: compact sets keep subsequence limits, an open
    // interval leaks one.
    for i in 0..20 {
        let e = g.set();
        let k = e.intersect(&IntervalSet::closed(q(-20), q(20))).closure();
        let Some(s) = k.sample_point() else {
            run.pass();
            continue;
        };
        let x = Fluxion::embed(s);
        match compactness_probe(&k, &x, budget) {
            Ok(p) => run.check(
                &format!("topology/compact_probe/{i}"),
                p.limit_in_set == Some(true),
                || format!("limit {} flagged {:?}", p.limit, p.limit_in_set),
            ),
            Err(e) => run.check(&format!("topology/compact_probe/{i}"), false, || format!("{e}")),
        }
    }
    {
        let e = IntervalSet::open(q(0), q(1));
        let x = fx(SequenceTerm::from_int(1).div(index().add(SequenceTerm::from_int(1))));
        let member = eventually_in_with(&x, &e, budget).verdict;
        let escaped = match compactness_probe(&e, &x, budget) {
            Ok(p) => p.limit_in_set == Some(false),
            Err(_) => false,
        };
        run.check(
            "topology/open_interval_leaks_limit",
            member.is_proven() && escaped,
            || "subsequence limit did not escape (0,1)".to_string(),
        );
    }

    // Continuous image of a compact interval, desk form: the value
    // range is compact and lifted values settle inside it.
    for i in 0..10 {
        let coeffs = g.poly_coeffs(3);
        let (a, b) = {
            let (a, b) = g.endpoint_pair();
            if a == b {
                (a.clone(), a + q(1))
            } else {
                (a, b)
            }
        };
        let f = RealFunction::poly(&coeffs);
        let m = a.abs().max(b.abs()).max(q(1));
        let mut lip = Rational::zero();
        for (kk, c) in coeffs.iter().enumerate().skip(1) {
            lip += c.abs() * q(kk as i64) * crate::rational::pow_i(&m, (kk - 1) as i64).unwrap();
        }
        match extreme_values(&f, &a, &b, 8, 2, Some(&lip)) {
            Ok(ev) => {
                let range = IntervalSet::closed(ev.min.lower(), ev.max.upper());
                let mid = (&a + &b) / q(2);
                let value = f.value_exact(&mid).unwrap();
                let y = match lift(&f, &Fluxion::embed(mid)) {
                    Ok(y) => y,
                    Err(e) => {
                        run.check(&format!("topology/compact_image/{i}"), false, || format!("{e}"));
                        continue;
                    }
                };
                let settles = eventually_in_with(&y, &range, budget).verdict;
                run.check(
                    &format!("topology/compact_image/{i}"),
                    range.is_compact() && range.contains_point(&value) && settles.is_proven(),
                    || format!("range {range} value {value} settles {}", settles.outcome),
                );
            }
            Err(e) => run.check(&format!("topology/compact_image/{i}"), false, || format!("{e}")),
        }
    }
}

// ---------------------------------------------------------------------
// Subsequence extraction.

/// Estimates the limit of the extracted subsequence by quadratic
/// extrapolation in 1/n along three extraction indices from one
/// residue class; exact arithmetic keeps the estimate stable.
fn extrapolate_tail(x: &Fluxion, prefix: &[u64]) -> Option<Rational> {
    let form = x.form()?;
    let mut buckets: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for &n in prefix.iter().rev().take(200) {
        buckets.entry(form.class_index(n)).or_default().push(n);
    }
    let best = buckets
        .values()
        .filter(|v| v.len() >= 3)
        .max_by_key(|v| v[0])?;
    let nodes = [best[2], best[1], best[0]];
    let mut us = Vec::new();
    let mut vs = Vec::new();
    for &n in &nodes {
        us.push(q(1) / q(n as i64));
        vs.push(x.eval_exact(n).ok()?);
    }
    // Lagrange interpolation evaluated at u = 0.
    let mut acc = Rational::zero();
    for i in 0..3 {
        let mut w = vs[i].clone();
        for j in 0..3 {
            if i != j {
                w = w * (us[j].clone() / (us[j].clone() - us[i].clone()));
            }
        }
        acc += w;
    }
    Some(acc)
}

fn suite_bw(run: &mut Run, seed: u64, fuel: u64) {
    let mut g = TermGen::new(seed);
    let budget = Budget::with_fuel(fuel);
    let tol = Rational::new(BigInt::one(), BigInt::from(1_000_000));
    for i in 0..100 {
        let x = fx(g.bounded());
        let id = format!("bw/subsequence_limit/{i}");
        let ext = match x.bw_extract(budget) {
            Ok(e) => e,
            Err(e) => {
                run.check(&id, false, || format!("{e}"));
                continue;
            }
        };
        let Some(form) = x.form() else {
            run.check(&id, false, || "term failed to normalize".to_string());
            continue;
        };
        let class_limits: Vec<Rational> = form
            .classes()
            .iter()
            .filter_map(|c| c.limit_at_infinity().finite().cloned())
            .collect();
        if class_limits.is_empty() {
            run.check(&id, false, || "bounded term with no finite class limit".to_string());
            continue;
        }
        match extrapolate_tail(&x, &ext.prefix) {
            Some(est) => {
                let ok = class_limits.iter().any(|l| (l - &est).abs() <= tol);
                run.check(&id, ok, || {
                    format!(
                        "estimate {est} is not within 1e-6 of any class limit ({} classes, branch {})",
                        class_limits.len(),
                        ext.branch
                    )
                });
            }
            None => run.check(&id, false, || "could not extrapolate a tail estimate".to_string()),
        }
    }
}

// ---------------------------------------------------------------------
// Parser round-trips.

fn suite_parser(run: &mut Run, seed: u64) {
    let mut g = TermGen::new(seed);
    for i in 0..1000 {
        let t = g.ast(3);
        let printed = format_term(&t);
        match parse_term(&printed) {
            Ok(back) => run.check(&format!("parser/term_roundtrip/{i}"), back == t, || {
                format!("'{printed}' reparsed differently")
            }),
            Err(e) => run.check(&format!("parser/term_roundtrip/{i}"), false, || {
                format!("'{printed}': {e}")
            }),
        }
    }
    for i in 0..500 {
        let s = g.set();
        let printed = format_set(&s);
        match parse_set(&printed) {
            Ok(back) => run.check(&format!("parser/set_roundtrip/{i}"), back == s, || {
                format!("'{printed}' reparsed differently")
            }),
            Err(e) => run.check(&format!("parser/set_roundtrip/{i}"), false, || {
                format!("'{printed}': {e}")
            }),
        }
    }

    // The three documented error spans.
    let late = parse_term("n +");
    run.check(
        "parser/span_truncated",
        matches!(&late, Err(e) if e.span.start == 3 && e.span.end == 3 && e.found == "end of input"),
        || format!("{late:?}"),
    );
    let zero_idx = parse_term("patch(1/n; 0->5)");
    run.check(
        "parser/span_zero_index",
        matches!(&zero_idx, Err(e) if e.span.start == 11 && e.span.end == 12 && e.found == "0"),
        || format!("{zero_idx:?}"),
    );
    let reversed = parse_set("[2,1]");
    run.check(
        "parser/span_empty_interval",
        matches!(&reversed, Err(e) if e.span.start == 0 && e.span.end == 5 && e.found == "[2,1]"),
        || format!("{reversed:?}"),
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proposition_suite_is_green() {
        let r = run_suite("propositions", 7, 10_000).unwrap();
        assert!(r.passed(), "failures: {:?}", r.failures);
        assert!(r.cases >= 20);
    }

    #[test]
    fn ivt_suite_is_green() {
        let r = run_suite("ivt", 7, 10_000).unwrap();
        assert!(r.passed(), "failures: {:?}", r.failures);
    }

    #[test]
    fn parser_suite_is_green() {
        let r = run_suite("parser", 7, 10_000).unwrap();
        assert!(r.passed(), "failures: {:?}", r.failures);
        assert!(r.cases >= 1503);
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_suite("nonsense", 0, 100).is_none());
    }

    #[test]
    fn generators_produce_what_they_promise() {
        let mut g = TermGen::new(42);
        for _ in 0..30 {
            let t = g.fragment();
            assert!(fx(t).form().is_some());
            let b = fx(g.bounded());
            assert!(b.classify().finite.is_proven());
            let v = fx(g.vanishing());
            assert!(v.classify().infinitesimal.is_proven());
            let (c, a) = g.convergent();
            assert_eq!(
                fx(c).limit(),
                LimitResult::Exact(ExtendedRational::Finite(a))
            );
            let d = fx(g.divergent_up());
            assert!(d.classify().to_plus_infinity.is_proven());
            let s = g.set();
            assert_eq!(s, IntervalSet::from_intervals(s.components().to_vec()));
        }
    }

    #[test]
    fn identical_seeds_reproduce_reports() {
        let a = run_suite("ring", 11, 1_000).unwrap();
        let b = run_suite("ring", 11, 1_000).unwrap();
        assert_eq!(a.cases, b.cases);
        assert_eq!(a.failures, b.failures);
    }
}
