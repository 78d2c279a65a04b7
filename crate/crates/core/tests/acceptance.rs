//! End-to-end acceptance: every numbered criterion below runs one or
//! more named suites with a pinned seed and prints a single verdict
//! line (visible with `--nocapture`); the test itself fails when the
//! criterion does.

use std::time::Duration;

use fluxions::suites::{run_suite, SuiteReport};

const SEED: u64 = 0x5EED_2026;
const FUEL: u64 = 10_000;

fn report(name: &str) -> SuiteReport {
    run_suite(name, SEED, FUEL).expect("known suite name")
}

fn verdict(criterion: u32, what: &str, ok: bool, detail: String) {
    let flag = if ok { "pass" } else { "FAIL" };
    println!("criterion {criterion}: {flag} - {what} ({detail})");
    assert!(ok, "criterion {criterion} failed: {detail}");
}

fn summarize(r: &SuiteReport) -> String {
    format!(
        "{}: {} cases, {} failures, {:?}",
        r.name,
        r.cases,
        r.failures.len(),
        r.elapsed
    )
}

fn first_failures(r: &SuiteReport) -> String {
    r.failures
        .iter()
        .take(3)
        .cloned()
        .collect::<Vec<_>>()
        .join("; ")
}

#[test]
fn criterion_01_worked_propositions_exact_and_fast() {
    let r = report("propositions");
    let ok = r.passed() && r.elapsed < Duration::from_secs(5);
    verdict(
        1,
        "worked propositions decided symbolically in under 5s",
        ok,
        format!("{}; {}", summarize(&r), first_failures(&r)),
    );
}

#[test]
fn criterion_02_algebraic_and_order_laws() {
    let reports: Vec<SuiteReport> = ["ring", "order", "absval", "subring", "invert"]
        .iter()
        .map(|n| report(n))
        .collect();
    let total: Duration = reports.iter().map(|r| r.elapsed).sum();
    let ok = reports.iter().all(|r| r.passed()) && total < Duration::from_secs(60);
    let detail = reports
        .iter()
        .map(|r| format!("{} [{}]", summarize(r), first_failures(r)))
        .collect::<Vec<_>>()
        .join(" | ");
    verdict(
        2,
        "ring, order, absolute value, subring and inversion laws on seeded terms in under 60s",
        ok,
        format!("total {total:?}; {detail}"),
    );
}

#[test]
fn criterion_03_representative_invariance() {
    let r = report("quotient");
    let ok = r.passed() && r.cases >= 8 * 500;
    verdict(
        3,
        "verdicts and limits unchanged under finite patching, 500 per operation family",
        ok,
        format!("{}; {}", summarize(&r), first_failures(&r)),
    );
}

#[test]
fn criterion_04_symbolic_verdicts_match_brute_force() {
    let r = report("oracle");
    let ok = r.passed() && r.cases >= 5 * 500;
    verdict(
        4,
        "symbolic verdicts agree with brute-force scans to 10x the witness",
        ok,
        format!("{}; {}", summarize(&r), first_failures(&r)),
    );
}

#[test]
fn criterion_05_convergence_theorems() {
    let r = report("convergence");
    let ok = r.passed() && r.cases >= 2000;
    verdict(
        5,
        "limit algebra, order limits, squeeze, monotone and limsup characterizations",
        ok,
        format!("{}; {}", summarize(&r), first_failures(&r)),
    );
}

#[test]
fn criterion_06_bisection_root_certificate() {
    let r = report("ivt");
    let ok = r.passed() && r.elapsed < Duration::from_secs(1);
    verdict(
        6,
        "depth-30 bisection encloses the square root of two in under 1s",
        ok,
        format!("{}; {}", summarize(&r), first_failures(&r)),
    );
}

#[test]
fn criterion_07_derivatives_and_continuity() {
    let r = report("deriv");
    let ok = r.passed() && r.cases >= 100;
    verdict(
        7,
        "polynomial derivatives are exact and the absolute value splits at zero",
        ok,
        format!("{}; {}", summarize(&r), first_failures(&r)),
    );
}

#[test]
fn criterion_08_topology_laws() {
    let r = report("topology");
    let ok = r.passed() && r.elapsed < Duration::from_secs(30);
    verdict(
        8,
        "duality, openness, accumulation, compactness and subset laws on 2000+ sets in under 30s",
        ok,
        format!("{}; {}", summarize(&r), first_failures(&r)),
    );
}

#[test]
fn criterion_09_subsequence_extraction() {
    let r = report("bw");
    let ok = r.passed() && r.cases >= 100;
    verdict(
        9,
        "extracted subsequences of bounded terms settle within 1e-6 of a class limit",
        ok,
        format!("{}; {}", summarize(&r), first_failures(&r)),
    );
}

#[test]
fn criterion_10_parser_round_trips() {
    let r = report("parser");
    let ok = r.passed() && r.cases >= 1503;
    verdict(
        10,
        "term and set round-trips plus pinned error spans",
        ok,
        format!("{}; {}", summarize(&r), first_failures(&r)),
    );
}
