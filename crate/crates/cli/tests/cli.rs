//! End-to-end tests driving the compiled binary: command behavior,
//! exit codes, text wording, structured records and their agreement.

use std::process::{Command, Output};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fluxions"))
        .args(args)
        .env_remove("FLUXION_FUEL")
        .output()
        .expect("binary runs")
}

fn run_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fluxions"))
        .args(args)
        .env_remove("FLUXION_FUEL")
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8 stdout")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf8 stderr")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn records(o: &Output) -> Vec<Value> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is a json record"))
        .collect()
}

fn record(o: &Output) -> Value {
    let rs = records(o);
    assert_eq!(rs.len(), 1, "expected a single record, got {rs:?}");
    rs.into_iter().next().unwrap()
}

/// Parse "p" or "p/q" into an exact big-integer fraction.
fn frac(s: &str) -> (BigInt, BigInt) {
    match s.split_once('/') {
        Some((p, q)) => (
            p.parse().expect("numerator"),
            q.parse().expect("denominator"),
        ),
        None => (s.parse().expect("integer"), BigInt::one()),
    }
}

/// |a - b| <= tol over exact fractions.
fn within(a: (BigInt, BigInt), b: (BigInt, BigInt), tol: (BigInt, BigInt)) -> bool {
    let (an, ad) = a;
    let (bn, bd) = b;
    let (tn, td) = tol;
    let diff_n = &an * &bd - &bn * &ad;
    let diff_d = &ad * &bd;
    (diff_n.abs() * td) <= (tn * diff_d.abs())
}

#[test]
fn classify_reports_infinitesimal_with_witness() {
    let o = run(&["classify", "1/n"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("infinitesimal: proven"), "{text}");
    assert!(text.contains("all n >= 1"), "{text}");
    assert!(text.contains("limit: 0"), "{text}");
    assert!(text.contains("monotone: decreasing"), "{text}");
}

#[test]
fn classify_structured_agrees_with_text() {
    let t = run(&["classify", "1/n"]);
    let s = run(&["classify", "1/n", "--output", "structured"]);
    assert_eq!(code(&s), 0);
    let r = record(&s);
    assert_eq!(r["infinitesimal"]["outcome"], "proven");
    assert_eq!(r["infinitesimal"]["provenance"], "symbolic");
    assert_eq!(r["limit"], "0");
    assert_eq!(r["monotone"], "decreasing");
    assert_eq!(r["exit"], 0);
    // The text channel states the same facts.
    let text = stdout(&t);
    assert!(text.contains("limit: 0"), "{text}");
    assert!(text.contains("monotone: decreasing"), "{text}");
}

#[test]
fn strict_comparison_names_the_violating_class() {
    let o = run(&["compare", "1+(-1)^n", "lt", "2"]);
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert!(text.contains("refuted"), "{text}");
    assert!(text.contains("class n == 2 (mod 2)"), "{text}");
}

#[test]
fn compare_le_succeeds_where_lt_fails() {
    let o = run(&["compare", "1+(-1)^n", "le", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("proven"));
}

#[test]
fn infinitely_close_ignores_infinitesimal_gaps() {
    let o = run(&["compare", "1/n", "close", "0"]);
    assert_eq!(code(&o), 0);
    let eq = run(&["compare", "1/n", "eq", "0"]);
    assert_eq!(code(&eq), 1, "germ equality must still fail");
}

#[test]
fn limit_of_index_is_plus_infinity() {
    let o = run(&["limit", "n", "--output", "structured"]);
    assert_eq!(code(&o), 0);
    let r = record(&o);
    assert_eq!(r["limit"]["kind"], "exact");
    assert_eq!(r["limit"]["value"], "+inf");
    let t = run(&["limit", "n"]);
    assert!(stdout(&t).contains("exact +inf"));
}

#[test]
fn alternating_sign_oscillates_with_exact_extremes() {
    let o = run(&["limit", "(-1)^n", "--output", "structured"]);
    assert_eq!(code(&o), 0);
    let r = record(&o);
    assert_eq!(r["limit"]["kind"], "oscillating");
    assert_eq!(r["limit"]["limsup"], "1");
    assert_eq!(r["limit"]["liminf"], "-1");
    let s = run(&["limsup", "(-1)^n", "--output", "structured"]);
    let rr = record(&s);
    assert_eq!(rr["limsup"], "1");
    assert_eq!(rr["liminf"], "-1");
    assert_eq!(rr["provenance"], "symbolic");
}

#[test]
fn invert_index_gives_reciprocal() {
    let o = run(&["invert", "n", "--output", "structured"]);
    assert_eq!(code(&o), 0);
    let r = record(&o);
    assert_eq!(r["invertible"], true);
    assert_eq!(r["reciprocal"], "1/n");
}

#[test]
fn invert_rejects_zero_hitting_class() {
    let o = run(&["invert", "1+(-1)^n"]);
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert!(text.contains("invertible: no"), "{text}");
    assert!(text.contains("refuted"), "{text}");
    assert!(text.contains("mod 2"), "{text}");
}

#[test]
fn bisection_converges_to_sqrt_two() {
    let o = run(&[
        "root",
        "poly:-2,0,1",
        "1",
        "2",
        "--depth",
        "30",
        "--output",
        "structured",
    ]);
    assert_eq!(code(&o), 0);
    let r = record(&o);
    assert_eq!(r["depth"], 30);
    assert_eq!(r["lower_sign"], -1);
    assert_eq!(r["upper_sign"], 1);
    // Independent check: integer square root of 2 * 4^40 gives
    // floor(sqrt(2) * 2^40), so |mid - sqrt2| <= 2^-40 + 2^-30.
    let scaled = (BigInt::from(2) << 80u32).sqrt();
    let denom = BigInt::one() << 40u32;
    let mid = frac(r["midpoint"].as_str().unwrap());
    let tol_n = BigInt::from((1u64 << 10) + 2);
    let tol_d = BigInt::one() << 40u32;
    assert!(
        within(mid, (scaled, denom), (tol_n, tol_d)),
        "midpoint {} is not within 2^-30 of sqrt(2)",
        r["midpoint"]
    );
    let rad = frac(r["radius"].as_str().unwrap());
    assert!(within(
        rad,
        (BigInt::zero(), BigInt::one()),
        (BigInt::one(), BigInt::one() << 30u32)
    ));
}

#[test]
fn bisection_refuses_without_sign_change() {
    let o = run(&["root", "poly:1,0,1", "-1", "1"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("no certified sign change"));
}

#[test]
fn bisection_rejects_bad_bracket_as_usage_error() {
    let o = run(&["root", "poly:-2,0,1", "2", "1"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("need a < b"));
}

#[test]
fn derivative_of_square_is_doubling() {
    let o = run(&["deriv", "poly:0,0,1", "3", "--output", "structured"]);
    assert_eq!(code(&o), 0);
    let r = record(&o);
    assert_eq!(r["derivative"]["kind"], "exact");
    assert_eq!(r["derivative"]["value"], "6");
    assert_eq!(r["agreement"], true);
    assert!(r["probes"].as_array().unwrap().len() >= 2);
}

#[test]
fn absolute_value_has_no_derivative_at_zero() {
    let o = run(&["deriv", "absval", "0"]);
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert!(text.contains("paths disagree"), "{text}");
    assert!(text.contains("exact 1"), "{text}");
    assert!(text.contains("exact -1"), "{text}");
}

#[test]
fn function_limit_and_continuity_of_absolute_value() {
    let o = run(&["flimit", "absval", "0", "--output", "structured"]);
    assert_eq!(code(&o), 0);
    let r = record(&o);
    assert_eq!(r["limit"]["kind"], "exact");
    assert_eq!(r["limit"]["value"], "0");
    let c = run(&["continuity", "absval", "0"]);
    assert_eq!(code(&c), 0);
    assert!(stdout(&c).contains("proven"));
}

#[test]
fn step_function_is_discontinuous_at_its_threshold() {
    let o = run(&["continuity", "step:1/2", "1/2"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("refuted"));
    let elsewhere = run(&["continuity", "step:1/2", "2"]);
    assert_eq!(code(&elsewhere), 0);
}

#[test]
fn rational_function_limit_at_infinity() {
    let o = run(&["flimit", "ratio:1,3/2,3", "inf", "--output", "structured"]);
    assert_eq!(code(&o), 0);
    let r = record(&o);
    assert_eq!(r["limit"]["kind"], "exact");
    assert_eq!(r["limit"]["value"], "1");
}

#[test]
fn topo_answers_compactness_and_openness() {
    let k = run(&["topo", "compact", "[0,1] U {2}"]);
    assert_eq!(code(&k), 0);
    assert!(stdout(&k).contains("holds"));
    let open = run(&["topo", "open", "[0,1] U {2}"]);
    assert_eq!(code(&open), 1);
    assert!(stdout(&open).contains("does not hold"));
    let pt = run(&["topo", "contains", "(0,1)", "1/2", "--output", "structured"]);
    let r = record(&pt);
    assert_eq!(r["holds"], true);
    assert_eq!(r["point"], "1/2");
    let acc = run(&["topo", "accumulation", "{2}", "2"]);
    assert_eq!(code(&acc), 1);
}

#[test]
fn topo_point_arity_is_enforced() {
    let missing = run(&["topo", "contains", "(0,1)"]);
    assert_eq!(code(&missing), 3);
    let extra = run(&["topo", "open", "(0,1)", "1/2"]);
    assert_eq!(code(&extra), 3);
}

#[test]
fn symbolic_mode_rejects_undefined_division() {
    let o = run(&["classify", "1/(n-n)", "--mode", "symbolic"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("symbolic mode"));
}

#[test]
fn symbolic_mode_rejects_enclosure_backed_functions() {
    let o = run(&["continuity", "sqrt", "1", "--mode", "symbolic"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("no exact symbolic form"));
    let ok = run(&["continuity", "absval", "1", "--mode", "symbolic"]);
    assert_eq!(code(&ok), 0);
}

#[test]
fn empirical_mode_says_stabilized_never_proven() {
    let o = run(&["compare", "1/n", "le", "1", "--mode", "empirical"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("stabilized"), "{text}");
    assert!(!text.contains("proven"), "{text}");
    let s = run(&[
        "compare", "1/n", "le", "1", "--mode", "empirical", "--output", "structured",
    ]);
    let r = record(&s);
    assert_eq!(r["verdict"]["outcome"], "stabilized");
    assert_eq!(r["verdict"]["provenance"], "empirical");
}

#[test]
fn fuel_comes_from_flag_env_or_default() {
    let flagged = run(&[
        "compare", "1/n", "le", "1", "--mode", "empirical", "--fuel", "321", "--output",
        "structured",
    ]);
    assert_eq!(record(&flagged)["verdict"]["fuel"], 321);
    let from_env = run_env(
        &["compare", "1/n", "le", "1", "--mode", "empirical", "--output", "structured"],
        "FLUXION_FUEL",
        "250",
    );
    assert_eq!(record(&from_env)["verdict"]["fuel"], 250);
    // The flag wins over the environment.
    let both = run_env(
        &[
            "compare", "1/n", "le", "1", "--mode", "empirical", "--fuel", "99", "--output",
            "structured",
        ],
        "FLUXION_FUEL",
        "250",
    );
    assert_eq!(record(&both)["verdict"]["fuel"], 99);
    let default = run(&[
        "compare", "1/n", "le", "1", "--mode", "empirical", "--output", "structured",
    ]);
    assert_eq!(record(&default)["verdict"]["fuel"], 10000);
}

#[test]
fn suite_runs_are_deterministic_per_seed() {
    let a = run(&["suite", "parser", "--seed", "41", "--output", "structured"]);
    let b = run(&["suite", "parser", "--seed", "41", "--output", "structured"]);
    assert_eq!(code(&a), 0);
    let (mut ra, mut rb) = (record(&a), record(&b));
    // Wall-clock time is the only field allowed to differ.
    ra["elapsed_ms"] = Value::Null;
    rb["elapsed_ms"] = Value::Null;
    assert_eq!(ra, rb);
    assert_eq!(ra["cases"], 1503);
    assert_eq!(ra["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn suite_all_emits_one_record_per_suite() {
    let o = run(&["suite", "all", "--seed", "5", "--output", "structured"]);
    assert_eq!(code(&o), 0);
    let rs = records(&o);
    assert_eq!(rs.len(), 14, "expected every suite to report");
    let names: Vec<&str> = rs.iter().map(|r| r["suite"].as_str().unwrap()).collect();
    assert!(names.contains(&"propositions"));
    assert!(names.contains(&"parser"));
    for r in &rs {
        assert_eq!(r["passed"], true, "suite {} failed: {}", r["suite"], r["failures"]);
    }
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(code(&run(&["suite", "nosuch"])), 3);
    assert_eq!(code(&run(&["nosuchcmd"])), 3);
    assert_eq!(code(&run(&["classify", "n +"])), 3);
    assert_eq!(code(&run(&["deriv", "mystery", "0"])), 3);
    assert_eq!(code(&run(&["topo", "compact", "[2,1]"])), 3);
    assert_eq!(code(&run(&["classify", "1/n", "--fuel", "0"])), 3);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
}

#[test]
fn inconclusive_results_exit_two() {
    // Sampling can stabilize convergence but can never refute eventual
    // divergence, so those fields stay inconclusive and force exit 2.
    let o = run(&["classify", "1/n", "--mode", "empirical", "--output", "structured"]);
    assert_eq!(code(&o), 2);
    let r = record(&o);
    assert_eq!(r["exit"], 2);
    assert_eq!(r["to_plus_infinity"]["outcome"], "inconclusive");
    assert_eq!(r["convergent"]["provenance"], "empirical");
}

#[test]
fn structured_records_carry_elapsed_and_exit() {
    let o = run(&["limit", "n", "--output", "structured"]);
    let r = record(&o);
    assert!(r["elapsed_ms"].as_u64().unwrap() < 60_000);
    assert_eq!(r["exit"], 0);
    assert_eq!(r["command"], "limit");
    assert_eq!(r["expr"], "n");
}

#[test]
fn root_midpoint_also_matches_in_text_output() {
    let s = run(&["root", "poly:-2,0,1", "1", "2", "--depth", "12", "--output", "structured"]);
    let r = record(&s);
    let t = run(&["root", "poly:-2,0,1", "1", "2", "--depth", "12"]);
    let text = stdout(&t);
    let mid = r["midpoint"].as_str().unwrap();
    assert!(
        text.contains(&format!("midpoint: {mid}")),
        "text {text} lacks midpoint {mid}"
    );
    let lo = r["bracket_low"].as_str().unwrap();
    assert!(text.contains(lo), "text {text} lacks bracket low {lo}");
}

#[test]
fn exact_hit_is_reported_when_the_midpoint_lands() {
    let o = run(&["root", "poly:-1,0,1", "0", "2", "--depth", "8", "--output", "structured"]);
    assert_eq!(code(&o), 0);
    let r = record(&o);
    assert_eq!(r["exact_hit"], "1");
    assert_eq!(r["midpoint"], "1");
}

#[test]
fn deriv_structured_probes_match_text_lines() {
    let s = run(&["deriv", "poly:1,2,3", "1", "--output", "structured"]);
    let r = record(&s);
    assert_eq!(r["derivative"]["value"], "8");
    let t = run(&["deriv", "poly:1,2,3", "1"]);
    let text = stdout(&t);
    assert!(text.contains("exact 8"), "{text}");
    for p in r["probes"].as_array().unwrap() {
        let label = p["path"].as_str().unwrap();
        assert!(text.contains(&format!("probe {label}:")), "{text}");
    }
}

/// Checks the fraction helper on a couple of hand values so the root
/// test's arithmetic is itself trustworthy.
#[test]
fn fraction_comparison_helper_behaves() {
    let a = frac("3/2");
    let b = frac("17/12");
    // |3/2 - 17/12| = 1/12 <= 1/10 is false, <= 1/10 fails; <= 1/12 holds.
    assert!(within(
        a.clone(),
        b.clone(),
        (BigInt::one(), BigInt::from(12))
    ));
    assert!(!within(a, b, (BigInt::one(), BigInt::from(13))));
    let one_f = to_f64(frac("1/3"));
    assert!((one_f - 1.0 / 3.0).abs() < 1e-12);
}

fn to_f64(v: (BigInt, BigInt)) -> f64 {
    v.0.to_f64().unwrap() / v.1.to_f64().unwrap()
}
