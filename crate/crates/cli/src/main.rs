//! Command-line front end: classify and compare sequence germs, take
//! limits, certify roots and derivatives, probe topology predicates
//! and run the seeded property suites.
//!
//! Exit codes: 0 success (proven-dominant), 1 refuted findings,
//! 2 inconclusive results present, 3 usage or parse error, 4 symbolic
//! mode rejected out-of-fragment input.

use std::fmt::Write as _;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fluxions::calculus::ivt::ivt_root_with;
use fluxions::calculus::{
    continuity_at, derivative, function_limit, CalculusError, Evaluator, FnExpr, RealFunction,
};
use fluxions::fluxion::{
    Budget, ExtendedRational, Fluxion, InvertError, LimitResult, Monotonicity, Outcome, Provenance,
    Verdict,
};
use fluxions::suites::{run_suite, SuiteReport, SUITE_NAMES};
use fluxions::rational::q;
use fluxions::topology::{Interval, IntervalSet};
use fluxions::{format_set, format_term, parse_set, parse_term, Rational, SequenceTerm};

const DEFAULT_FUEL: u64 = 10_000;

#[derive(Parser)]
#[command(
    name = "fluxions",
    version,
    about = "Exact reasoning about real sequences at infinity",
    after_help = "Function names: poly:<coeffs>, ratio:<coeffs>/<coeffs>, absval, sqrt, cbrt, step:<q>.\n\
                  The FLUXION_FUEL environment variable overrides the default fuel."
)]
struct Cli {
    /// Sampling budget for empirical procedures (default 10000).
    #[arg(long, global = true)]
    fuel: Option<u64>,
    /// Working precision in bits for approximate enclosures.
    #[arg(long, global = true, default_value_t = 128)]
    precision: u32,
    /// Decision strategy.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Auto)]
    mode: Mode,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputKind::Text)]
    output: OutputKind,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Symbolic where possible, empirical fallback otherwise.
    Auto,
    /// Exact only; out-of-fragment input is an error (exit 4).
    Symbolic,
    /// Sampling only, even where a symbolic answer exists.
    Empirical,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputKind {
    Text,
    Structured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Rel {
    Eq,
    Le,
    Lt,
    Avoids,
    Close,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Predicate {
    Open,
    Closed,
    Bounded,
    Compact,
    Contains,
    Accumulation,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full classification of a sequence term.
    Classify {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Limit of a sequence term.
    Limit {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Limit superior and limit inferior of a sequence term.
    Limsup {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Compare two sequence terms under a relation.
    Compare {
        #[arg(allow_hyphen_values = true)]
        lhs: String,
        #[arg(value_enum)]
        rel: Rel,
        #[arg(allow_hyphen_values = true)]
        rhs: String,
    },
    /// Multiplicative inverse of a sequence term, when one exists.
    Invert {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Certified bisection root of a function on [a, b].
    Root {
        function: String,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
        #[arg(long, default_value_t = 30)]
        depth: u32,
    },
    /// Derivative of a function at a point.
    Deriv {
        function: String,
        #[arg(allow_hyphen_values = true)]
        at: String,
    },
    /// Limit of a function at a point, or at inf / -inf.
    Flimit {
        function: String,
        #[arg(allow_hyphen_values = true)]
        at: String,
    },
    /// Continuity verdict for a function at a point.
    Continuity {
        function: String,
        #[arg(allow_hyphen_values = true)]
        at: String,
    },
    /// Topology predicate on an interval-set literal.
    Topo {
        #[arg(value_enum)]
        predicate: Predicate,
        set: String,
        #[arg(allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Run a named property suite, or "all".
    Suite {
        name: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let usage_ok = matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if usage_ok { 0 } else { 3 };
        }
    };
    let fuel = match cli.fuel {
        Some(f) => f,
        None => std::env::var("FLUXION_FUEL")
            .ok()
            .and_then(|v| v.parse::<u64>().ok())
            .unwrap_or(DEFAULT_FUEL),
    };
    if fuel == 0 {
        eprintln!("error: fuel must be a positive integer");
        return 3;
    }
    if cli.precision == 0 {
        eprintln!("error: precision must be a positive number of bits");
        return 3;
    }
    let budget = Budget {
        fuel,
        bits: cli.precision,
        empirical_only: cli.mode == Mode::Empirical,
    };
    let out = Out {
        structured: cli.output == OutputKind::Structured,
    };

    let r = match &cli.cmd {
        Cmd::Classify { expr } => cmd_classify(expr, budget, cli.mode, &out),
        Cmd::Limit { expr } => cmd_limit(expr, budget, cli.mode, &out),
        Cmd::Limsup { expr } => cmd_limsup(expr, budget, cli.mode, &out),
        Cmd::Compare { lhs, rel, rhs } => cmd_compare(lhs, *rel, rhs, budget, cli.mode, &out),
        Cmd::Invert { expr } => cmd_invert(expr, budget, cli.mode, &out),
        Cmd::Root { function, a, b, depth } => {
            cmd_root(function, a, b, *depth, budget, cli.mode, &out)
        }
        Cmd::Deriv { function, at } => cmd_deriv(function, at, budget, cli.mode, &out),
        Cmd::Flimit { function, at } => cmd_flimit(function, at, budget, cli.mode, &out),
        Cmd::Continuity { function, at } => cmd_continuity(function, at, budget, cli.mode, &out),
        Cmd::Topo { predicate, set, point } => cmd_topo(*predicate, set, point.as_deref(), &out),
        Cmd::Suite { name, seed } => cmd_suite(name, *seed, fuel, &out),
    };
    match r {
        Ok(code) => code,
        Err(CliError { code, message }) => {
            eprintln!("error: {message}");
            code
        }
    }
}

struct CliError {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: 3,
        message: message.into(),
    }
}

fn fragment_violation(message: impl Into<String>) -> CliError {
    CliError {
        code: 4,
        message: message.into(),
    }
}

struct Out {
    structured: bool,
}

impl Out {
    fn emit(&self, record: Value, text: String) {
        if self.structured {
            println!("{record}");
        } else {
            print!("{text}");
        }
    }
}

// ---------------------------------------------------------------------
// Argument parsing helpers.

fn load_term(expr: &str, mode: Mode) -> Result<Fluxion, CliError> {
    let t = parse_term(expr).map_err(|e| usage(format!("cannot parse term: {e}")))?;
    let x = Fluxion::from_term(t);
    if mode == Mode::Symbolic {
        if let Err(e) = x.form_result() {
            return Err(fragment_violation(format!(
                "symbolic mode requires the decidable fragment: {e}"
            )));
        }
    }
    Ok(x)
}

fn parse_rational_arg(s: &str) -> Result<Rational, CliError> {
    match parse_term(s) {
        Ok(SequenceTerm::Const(c)) => Ok(c),
        _ => Err(usage(format!("'{s}' is not a rational number"))),
    }
}

fn parse_extended_arg(s: &str) -> Result<ExtendedRational, CliError> {
    match s {
        "inf" | "+inf" => Ok(ExtendedRational::PosInfinity),
        "-inf" => Ok(ExtendedRational::NegInfinity),
        _ => Ok(ExtendedRational::Finite(parse_rational_arg(s)?)),
    }
}

fn parse_coeffs(s: &str) -> Result<Vec<Rational>, CliError> {
    if s.trim().is_empty() {
        return Err(usage("empty coefficient list"));
    }
    s.split(',').map(|p| parse_rational_arg(p.trim())).collect()
}

fn step_at(threshold: Rational) -> RealFunction {
    let below = IntervalSet::from_intervals(vec![Interval::new(
        ExtendedRational::NegInfinity,
        false,
        ExtendedRational::Finite(threshold),
        false,
    )]);
    let above = below.complement();
    RealFunction::exact(
        FnExpr::piecewise(vec![
            (below, FnExpr::Const(q(0))),
            (above, FnExpr::Const(q(1))),
        ]),
        IntervalSet::real_line(),
    )
}

fn load_function(spec: &str, mode: Mode) -> Result<RealFunction, CliError> {
    let f = if spec == "absval" {
        RealFunction::abs_value()
    } else if spec == "sqrt" {
        RealFunction::sqrt()
    } else if spec == "cbrt" {
        RealFunction::cbrt()
    } else if let Some(rest) = spec.strip_prefix("poly:") {
        RealFunction::poly(&parse_coeffs(rest)?)
    } else if let Some(rest) = spec.strip_prefix("ratio:") {
        let (ns, ds) = rest
            .split_once('/')
            .ok_or_else(|| usage("ratio wants <coeffs>/<coeffs> with integer coefficients"))?;
        let num = parse_coeffs(ns)?;
        let den = parse_coeffs(ds)?;
        if den.iter().all(|c| c == &q(0)) {
            return Err(usage("ratio denominator is identically zero"));
        }
        RealFunction::exact(
            FnExpr::poly(&num).div(FnExpr::poly(&den)),
            IntervalSet::real_line(),
        )
    } else if let Some(rest) = spec.strip_prefix("step:") {
        step_at(parse_rational_arg(rest)?)
    } else {
        return Err(usage(format!(
            "unknown function '{spec}' (builtins: poly:<coeffs>, ratio:<coeffs>/<coeffs>, absval, sqrt, cbrt, step:<q>)"
        )));
    };
    if mode == Mode::Symbolic {
        if let Evaluator::Approx(_) = f.evaluator() {
            return Err(fragment_violation(format!(
                "'{spec}' is approximation-backed and has no exact symbolic form"
            )));
        }
    }
    Ok(f)
}

// ---------------------------------------------------------------------
// Rendering helpers.

/// Outcome word honoring the honesty rule: sampling never "proves".
fn outcome_word(v: &Verdict) -> &'static str {
    match (v.outcome, v.provenance) {
        (Outcome::Proven, Provenance::Empirical { .. }) => "stabilized",
        (Outcome::Proven, _) => "proven",
        (Outcome::Refuted, _) => "refuted",
        (Outcome::Inconclusive, _) => "inconclusive",
    }
}

fn verdict_text(v: &Verdict) -> String {
    let mut s = outcome_word(v).to_string();
    match v.provenance {
        Provenance::Symbolic => s.push_str(" (symbolic"),
        Provenance::Empirical { fuel } => {
            let _ = write!(s, " (empirical, fuel {fuel}");
        }
    }
    if let Some(w) = &v.witness {
        let _ = write!(s, "; witness: {w}");
    }
    if let Some(d) = &v.detail {
        let _ = write!(s, "; {d}");
    }
    s.push(')');
    s
}

fn verdict_json(v: &Verdict) -> Value {
    json!({
        "outcome": outcome_word(v),
        "provenance": match v.provenance {
            Provenance::Symbolic => "symbolic",
            Provenance::Empirical { .. } => "empirical",
        },
        "fuel": match v.provenance {
            Provenance::Symbolic => Value::Null,
            Provenance::Empirical { fuel } => json!(fuel),
        },
        "witness": v.witness.as_ref().map(|w| w.to_string()),
        "detail": v.detail,
    })
}

fn verdict_exit(v: &Verdict) -> i32 {
    match v.outcome {
        Outcome::Proven => 0,
        Outcome::Refuted => 1,
        Outcome::Inconclusive => 2,
    }
}

fn limit_text(l: &LimitResult) -> String {
    match l {
        LimitResult::Exact(v) => format!("exact {v}"),
        LimitResult::Approx { mid, rad, fuel } => {
            format!("stabilized near {mid} (radius {rad}, fuel {fuel})")
        }
        LimitResult::DivergentOscillating { limsup, liminf } => {
            format!("oscillating; limsup {limsup}, liminf {liminf}")
        }
        LimitResult::Inconclusive { fuel } => format!("inconclusive (fuel {fuel})"),
    }
}

fn limit_json(l: &LimitResult) -> Value {
    match l {
        LimitResult::Exact(v) => json!({"kind": "exact", "value": v.to_string()}),
        LimitResult::Approx { mid, rad, fuel } => json!({
            "kind": "approx",
            "mid": mid.to_string(),
            "rad": rad.to_string(),
            "fuel": fuel,
        }),
        LimitResult::DivergentOscillating { limsup, liminf } => json!({
            "kind": "oscillating",
            "limsup": limsup.to_string(),
            "liminf": liminf.to_string(),
        }),
        LimitResult::Inconclusive { fuel } => json!({"kind": "inconclusive", "fuel": fuel}),
    }
}

fn limit_exit(l: &LimitResult) -> i32 {
    match l {
        LimitResult::Inconclusive { .. } => 2,
        _ => 0,
    }
}

fn monotone_word(m: Monotonicity) -> &'static str {
    match m {
        Monotonicity::Increasing => "increasing",
        Monotonicity::Decreasing => "decreasing",
        Monotonicity::No => "no",
        Monotonicity::Unknown => "unknown",
    }
}

fn ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

// ---------------------------------------------------------------------
// Commands.

fn cmd_classify(expr: &str, budget: Budget, mode: Mode, out: &Out) -> Result<i32, CliError> {
    let x = load_term(expr, mode)?;
    let t0 = Instant::now();
    let c = x.classify_with(budget);
    let exit = [
        &c.infinitesimal,
        &c.finite,
        &c.convergent,
        &c.to_plus_infinity,
        &c.to_minus_infinity,
        &c.avoids_zero,
    ]
    .iter()
    .map(|v| if v.outcome == Outcome::Inconclusive { 2 } else { 0 })
    .max()
    .unwrap_or(0);
    let echo = format_term(x.term());
    let record = json!({
        "command": "classify",
        "expr": echo,
        "infinitesimal": verdict_json(&c.infinitesimal),
        "finite": verdict_json(&c.finite),
        "convergent": verdict_json(&c.convergent),
        "limit": c.limit.as_ref().map(|l| l.to_string()),
        "to_plus_infinity": verdict_json(&c.to_plus_infinity),
        "to_minus_infinity": verdict_json(&c.to_minus_infinity),
        "avoids_zero": verdict_json(&c.avoids_zero),
        "monotone": monotone_word(c.monotone),
        "elapsed_ms": ms(t0),
        "exit": exit,
    });
    let mut text = String::new();
    let _ = writeln!(text, "term: {echo}");
    let _ = writeln!(text, "infinitesimal: {}", verdict_text(&c.infinitesimal));
    let _ = writeln!(text, "finite: {}", verdict_text(&c.finite));
    let _ = writeln!(text, "convergent: {}", verdict_text(&c.convergent));
    if let Some(l) = &c.limit {
        let _ = writeln!(text, "limit: {l}");
    }
    let _ = writeln!(text, "diverges to +inf: {}", verdict_text(&c.to_plus_infinity));
    let _ = writeln!(text, "diverges to -inf: {}", verdict_text(&c.to_minus_infinity));
    let _ = writeln!(text, "avoids zero: {}", verdict_text(&c.avoids_zero));
    let _ = writeln!(text, "monotone: {}", monotone_word(c.monotone));
    out.emit(record, text);
    Ok(exit)
}

fn cmd_limit(expr: &str, budget: Budget, mode: Mode, out: &Out) -> Result<i32, CliError> {
    let x = load_term(expr, mode)?;
    let t0 = Instant::now();
    let l = x.limit_with(budget);
    let exit = limit_exit(&l);
    let echo = format_term(x.term());
    let record = json!({
        "command": "limit",
        "expr": echo,
        "limit": limit_json(&l),
        "elapsed_ms": ms(t0),
        "exit": exit,
    });
    let text = format!("term: {echo}\nlimit: {}\n", limit_text(&l));
    out.emit(record, text);
    Ok(exit)
}

fn cmd_limsup(expr: &str, budget: Budget, mode: Mode, out: &Out) -> Result<i32, CliError> {
    let x = load_term(expr, mode)?;
    let t0 = Instant::now();
    let e = x.limsup_liminf_with(budget);
    let echo = format_term(x.term());
    let provenance = match e.provenance {
        Provenance::Symbolic => "symbolic".to_string(),
        Provenance::Empirical { fuel } => format!("empirical, fuel {fuel}"),
    };
    let record = json!({
        "command": "limsup",
        "expr": echo,
        "limsup": e.limsup.to_string(),
        "liminf": e.liminf.to_string(),
        "provenance": match e.provenance {
            Provenance::Symbolic => "symbolic",
            Provenance::Empirical { .. } => "empirical",
        },
        "elapsed_ms": ms(t0),
        "exit": 0,
    });
    let text = format!(
        "term: {echo}\nlimsup: {} ({provenance})\nliminf: {} ({provenance})\n",
        e.limsup, e.liminf
    );
    out.emit(record, text);
    Ok(0)
}

fn cmd_compare(
    lhs: &str,
    rel: Rel,
    rhs: &str,
    budget: Budget,
    mode: Mode,
    out: &Out,
) -> Result<i32, CliError> {
    let x = load_term(lhs, mode)?;
    let y = load_term(rhs, mode)?;
    let t0 = Instant::now();
    let (name, v) = match rel {
        Rel::Eq => ("eq", x.eventual_eq_with(&y, budget)),
        Rel::Le => ("le", x.le_with(&y, budget)),
        Rel::Lt => ("lt", x.lt_with(&y, budget)),
        Rel::Avoids => ("avoids", x.avoids_with(&y, budget)),
        Rel::Close => ("close", x.infinitely_close_with(&y, budget)),
    };
    let exit = verdict_exit(&v);
    let record = json!({
        "command": "compare",
        "relation": name,
        "lhs": format_term(x.term()),
        "rhs": format_term(y.term()),
        "verdict": verdict_json(&v),
        "elapsed_ms": ms(t0),
        "exit": exit,
    });
    let text = format!(
        "{} {} {}: {}\n",
        format_term(x.term()),
        name,
        format_term(y.term()),
        verdict_text(&v)
    );
    out.emit(record, text);
    Ok(exit)
}

fn cmd_invert(expr: &str, budget: Budget, mode: Mode, out: &Out) -> Result<i32, CliError> {
    let x = load_term(expr, mode)?;
    let t0 = Instant::now();
    let echo = format_term(x.term());
    match x.invert_with(budget) {
        Ok(r) => {
            let reciprocal = format_term(r.term());
            let record = json!({
                "command": "invert",
                "expr": echo,
                "invertible": true,
                "reciprocal": reciprocal,
                "elapsed_ms": ms(t0),
                "exit": 0,
            });
            let text = format!("term: {echo}\ninvertible: yes\nreciprocal: {reciprocal}\n");
            out.emit(record, text);
            Ok(0)
        }
        Err(InvertError::NotInvertible(v)) => {
            let exit = match v.outcome {
                Outcome::Inconclusive => 2,
                _ => 1,
            };
            let record = json!({
                "command": "invert",
                "expr": echo,
                "invertible": false,
                "verdict": verdict_json(&v),
                "elapsed_ms": ms(t0),
                "exit": exit,
            });
            let text = format!(
                "term: {echo}\ninvertible: no\navoids zero: {}\n",
                verdict_text(&v)
            );
            out.emit(record, text);
            Ok(exit)
        }
    }
}

fn cmd_root(
    function: &str,
    a: &str,
    b: &str,
    depth: u32,
    budget: Budget,
    mode: Mode,
    out: &Out,
) -> Result<i32, CliError> {
    let f = load_function(function, mode)?;
    let a = parse_rational_arg(a)?;
    let b = parse_rational_arg(b)?;
    let t0 = Instant::now();
    match ivt_root_with(&f, &a, &b, depth, budget) {
        Ok(r) => {
            let lo = r.lower.eval_approx(r.depth as u64, budget.bits).map(|m| m.mid);
            let hi = r.upper.eval_approx(r.depth as u64, budget.bits).map(|m| m.mid);
            let record = json!({
                "command": "root",
                "function": function,
                "lower": a.to_string(),
                "upper": b.to_string(),
                "depth": r.depth,
                "midpoint": r.midpoint_estimate.to_string(),
                "radius": r.radius.to_string(),
                "exact_hit": r.exact_hit.as_ref().map(|h| h.to_string()),
                "bracket_low": lo.as_ref().map(|v| v.to_string()).unwrap_or_default(),
                "bracket_high": hi.as_ref().map(|v| v.to_string()).unwrap_or_default(),
                "lower_sign": r.lower_sign,
                "upper_sign": r.upper_sign,
                "elapsed_ms": ms(t0),
                "exit": 0,
            });
            let mut text = String::new();
            let _ = writeln!(text, "root of {function} on [{a}, {b}], depth {}", r.depth);
            let _ = writeln!(text, "midpoint: {}", r.midpoint_estimate);
            let _ = writeln!(text, "radius: {}", r.radius);
            match &r.exact_hit {
                Some(h) => {
                    let _ = writeln!(text, "exact root: {h}");
                }
                None => {
                    if let (Ok(lo), Ok(hi)) = (&lo, &hi) {
                        let _ = writeln!(text, "bracket: [{lo}, {hi}]");
                    }
                }
            }
            let _ = writeln!(
                text,
                "endpoint signs: {} at {a}, {} at {b}",
                r.lower_sign, r.upper_sign
            );
            out.emit(record, text);
            Ok(0)
        }
        Err(CalculusError::NoSignChange) => {
            let record = json!({
                "command": "root",
                "function": function,
                "lower": a.to_string(),
                "upper": b.to_string(),
                "error": "no certified sign change across the endpoints",
                "elapsed_ms": ms(t0),
                "exit": 1,
            });
            let text = format!(
                "root of {function} on [{a}, {b}]: refuted (no certified sign change)\n"
            );
            out.emit(record, text);
            Ok(1)
        }
        Err(CalculusError::SignUncertain {
            achieved_depth,
            partial,
        }) => {
            let record = json!({
                "command": "root",
                "function": function,
                "lower": a.to_string(),
                "upper": b.to_string(),
                "depth": achieved_depth,
                "midpoint": partial.midpoint_estimate.to_string(),
                "radius": partial.radius.to_string(),
                "error": "sign undecided at the working precision",
                "elapsed_ms": ms(t0),
                "exit": 2,
            });
            let text = format!(
                "root of {function} on [{a}, {b}]: inconclusive past depth {achieved_depth} (midpoint {})\n",
                partial.midpoint_estimate
            );
            out.emit(record, text);
            Ok(2)
        }
        Err(e) => Err(usage(format!("{e}"))),
    }
}

fn cmd_deriv(
    function: &str,
    at: &str,
    budget: Budget,
    mode: Mode,
    out: &Out,
) -> Result<i32, CliError> {
    let f = load_function(function, mode)?;
    let a = parse_rational_arg(at)?;
    let t0 = Instant::now();
    match derivative(&f, &a, budget) {
        Ok(rep) => {
            let exit = limit_exit(&rep.estimate);
            let probes: Vec<Value> = rep
                .probes
                .iter()
                .map(|(label, l)| json!({"path": label, "limit": limit_json(l)}))
                .collect();
            let record = json!({
                "command": "deriv",
                "function": function,
                "at": a.to_string(),
                "derivative": limit_json(&rep.estimate),
                "probes": probes,
                "agreement": rep.agreement,
                "elapsed_ms": ms(t0),
                "exit": exit,
            });
            let mut text = String::new();
            let _ = writeln!(text, "derivative of {function} at {a}: {}", limit_text(&rep.estimate));
            for (label, l) in &rep.probes {
                let _ = writeln!(text, "probe {label}: {}", limit_text(l));
            }
            let _ = writeln!(text, "probes agree: {}", rep.agreement);
            out.emit(record, text);
            Ok(exit)
        }
        Err(CalculusError::NotDifferentiable { probe_a, probe_b }) => {
            let record = json!({
                "command": "deriv",
                "function": function,
                "at": a.to_string(),
                "error": "not differentiable: approach paths disagree",
                "probes": [
                    {"path": probe_a.0, "limit": limit_json(&probe_a.1)},
                    {"path": probe_b.0, "limit": limit_json(&probe_b.1)},
                ],
                "elapsed_ms": ms(t0),
                "exit": 1,
            });
            let text = format!(
                "derivative of {function} at {a}: refuted (paths disagree)\nprobe {}: {}\nprobe {}: {}\n",
                probe_a.0,
                limit_text(&probe_a.1),
                probe_b.0,
                limit_text(&probe_b.1)
            );
            out.emit(record, text);
            Ok(1)
        }
        Err(e) => Err(usage(format!("{e}"))),
    }
}

fn cmd_flimit(
    function: &str,
    at: &str,
    budget: Budget,
    mode: Mode,
    out: &Out,
) -> Result<i32, CliError> {
    let f = load_function(function, mode)?;
    let at = parse_extended_arg(at)?;
    let t0 = Instant::now();
    match function_limit(&f, &at, budget) {
        Ok(l) => {
            let exit = limit_exit(&l);
            let record = json!({
                "command": "flimit",
                "function": function,
                "at": at.to_string(),
                "limit": limit_json(&l),
                "elapsed_ms": ms(t0),
                "exit": exit,
            });
            let text = format!("limit of {function} at {at}: {}\n", limit_text(&l));
            out.emit(record, text);
            Ok(exit)
        }
        Err(e) => Err(usage(format!("{e}"))),
    }
}

fn cmd_continuity(
    function: &str,
    at: &str,
    budget: Budget,
    mode: Mode,
    out: &Out,
) -> Result<i32, CliError> {
    let f = load_function(function, mode)?;
    let a = parse_rational_arg(at)?;
    let t0 = Instant::now();
    match continuity_at(&f, &a, budget) {
        Ok(v) => {
            let exit = verdict_exit(&v);
            let record = json!({
                "command": "continuity",
                "function": function,
                "at": a.to_string(),
                "verdict": verdict_json(&v),
                "elapsed_ms": ms(t0),
                "exit": exit,
            });
            let text = format!("continuity of {function} at {a}: {}\n", verdict_text(&v));
            out.emit(record, text);
            Ok(exit)
        }
        Err(e) => Err(usage(format!("{e}"))),
    }
}

fn cmd_topo(
    predicate: Predicate,
    set: &str,
    point: Option<&str>,
    out: &Out,
) -> Result<i32, CliError> {
    let s = parse_set(set).map_err(|e| usage(format!("cannot parse set: {e}")))?;
    let t0 = Instant::now();
    let (name, needs_point) = match predicate {
        Predicate::Open => ("open", false),
        Predicate::Closed => ("closed", false),
        Predicate::Bounded => ("bounded", false),
        Predicate::Compact => ("compact", false),
        Predicate::Contains => ("contains", true),
        Predicate::Accumulation => ("accumulation", true),
    };
    let pt = match (needs_point, point) {
        (true, Some(p)) => Some(parse_rational_arg(p)?),
        (true, None) => return Err(usage(format!("predicate '{name}' needs a point argument"))),
        (false, Some(_)) => {
            return Err(usage(format!("predicate '{name}' does not take a point")))
        }
        (false, None) => None,
    };
    let holds = match predicate {
        Predicate::Open => s.is_open(),
        Predicate::Closed => s.is_closed(),
        Predicate::Bounded => s.is_bounded(),
        Predicate::Compact => s.is_compact(),
        Predicate::Contains => s.contains_point(pt.as_ref().unwrap()),
        Predicate::Accumulation => s.is_accumulation_point(pt.as_ref().unwrap()),
    };
    let exit = if holds { 0 } else { 1 };
    let echo = format_set(&s);
    let record = json!({
        "command": "topo",
        "predicate": name,
        "set": echo,
        "point": pt.as_ref().map(|p| p.to_string()),
        "holds": holds,
        "elapsed_ms": ms(t0),
        "exit": exit,
    });
    let text = match &pt {
        Some(p) => format!(
            "{name}({echo}, {p}): {}\n",
            if holds { "holds" } else { "does not hold" }
        ),
        None => format!(
            "{name}({echo}): {}\n",
            if holds { "holds" } else { "does not hold" }
        ),
    };
    out.emit(record, text);
    Ok(exit)
}

fn suite_record(r: &SuiteReport) -> Value {
    json!({
        "command": "suite",
        "suite": r.name,
        "seed": r.seed,
        "fuel": r.fuel,
        "cases": r.cases,
        "failures": r.failures,
        "passed": r.passed(),
        "elapsed_ms": r.elapsed.as_millis() as u64,
        "exit": if r.passed() { 0 } else { 1 },
    })
}

fn suite_text(r: &SuiteReport) -> String {
    let mut text = format!(
        "suite {}: {} ({} cases, {} ms, seed {})\n",
        r.name,
        if r.passed() { "pass" } else { "FAIL" },
        r.cases,
        r.elapsed.as_millis(),
        r.seed
    );
    for f in r.failures.iter().take(5) {
        let _ = writeln!(text, "  {f}");
    }
    if r.failures.len() > 5 {
        let _ = writeln!(text, "  ... and {} more", r.failures.len() - 5);
    }
    text
}

fn cmd_suite(name: &str, seed: u64, fuel: u64, out: &Out) -> Result<i32, CliError> {
    let names: Vec<&str> = if name == "all" {
        SUITE_NAMES.to_vec()
    } else if SUITE_NAMES.contains(&name) {
        vec![name]
    } else {
        return Err(usage(format!(
            "unknown suite '{name}' (available: {}, all)",
            SUITE_NAMES.join(", ")
        )));
    };
    let mut exit = 0;
    for n in names {
        let r = run_suite(n, seed, fuel).expect("known suite name");
        if !r.passed() {
            exit = 1;
        }
        out.emit(suite_record(&r), suite_text(&r));
    }
    Ok(exit)
}
