//! Acceptance criteria, one line per criterion.
//!
//! Tolerances are pinned here and compared against the bounds the checks
//! report, so a loosened bound in the library shows up as a failure.
//! A condition listed in `KNOWN_FAILURES` is reported as FAIL but does not
//! fail the run; it does fail the run if it ever starts passing.

use std::process::ExitCode;

use vdp_core::validate::{run_check, Bound, CHECKS};

const PINNED: &[(u32, &str, Bound)] = &[
    (1, "population deviation", Bound::AtMost(1e-3)),
    (1, "runtime s", Bound::AtMost(1.0)),
    (2, "max dev k2=1e3", Bound::AtMost(2e-2)),
    (2, "max dev k2=1e4", Bound::AtMost(2e-3)),
    (2, "runtime s", Bound::AtMost(30.0)),
    (3, "|rho01 - 1/(6 sqrt 2)|", Bound::AtMost(5e-3)),
    (4, "max |N - closed form|", Bound::AtMost(1e-3)),
    (4, "|N(F=0) - 1/3|", Bound::AtMost(1e-15)),
    (5, "delta", Bound::Within(1.5, 2.1)),
    (6, "max g2", Bound::AtMost(0.05)),
    (6, "undefined points", Bound::AtMost(0.0)),
    (7, "evenness", Bound::AtMost(1e-6)),
    (7, "decreasing beyond tongue", Bound::True),
    (7, "delta(F=10, D=0)", Bound::AtLeast(10.0)),
    (7, "cutoff-dependent", Bound::True),
    (8, "max entry difference", Bound::AtMost(1e-12)),
    (9, "max entry difference", Bound::AtMost(1e-6)),
    (10, "vacuum tomogram", Bound::AtMost(1e-12)),
    (10, "limit-cycle tomogram", Bound::AtMost(1e-12)),
    (10, "omega(0)", Bound::AtMost(1e-12)),
    (10, "row normalization", Bound::AtMost(1e-6)),
    (10, "delta(vacuum)", Bound::AtMost(1e-9)),
    (10, "min delta + err (random)", Bound::AtLeast(0.0)),
    (10, "limit-cycle delta", Bound::AtMost(1e-6)),
    (11, "max deviation", Bound::AtMost(1e-10)),
    (12, "max |grad - FD|", Bound::AtMost(1e-6)),
    (12, "|root - F_c|", Bound::AtMost(1e-8)),
    (13, "|rho(-D) - conj rho(D)|", Bound::AtMost(1e-10)),
    (13, "with (-1)^(m+n)", Bound::AtMost(1e-10)),
    (13, "map evenness", Bound::AtMost(1e-8)),
    (14, "serial runtime s", Bound::AtMost(180.0)),
    (14, "bitwise identical 1 vs 8", Bound::True),
    (14, "all converged", Bound::True),
];

/// Conditions that cannot hold as stated, with the reason.
const KNOWN_FAILURES: &[(u32, &str, &str)] = &[
    (
        2,
        "max dev k2=1e4",
        "ansatz error is ~21.5/kappa2 at F=10, |D|=5 (2.153e-3 at 1e4, confirmed by a dense SVD nullspace)",
    ),
    (
        7,
        "decreasing beyond tongue",
        "with kappa2=0 nothing saturates the amplitude; delta grows with |D| for |D| >= 1 at dim 40, 60 and 80",
    ),
    (
        13,
        "|rho(-D) - conj rho(D)|",
        "entries with m+n odd flip sign: rho(-D) = (-1)^(m+n) conj rho(D) for F != 0",
    ),
];

fn main() -> ExitCode {
    let mut problems = Vec::new();
    for &(id, _, _) in CHECKS.iter() {
        let report = run_check(id).expect("registered check");
        println!("{report}");
        let pinned: Vec<_> = PINNED.iter().filter(|p| p.0 == id).collect();
        if pinned.len() != report.conditions.len() {
            problems.push(format!("criterion {id}: {} conditions, {} pinned", report.conditions.len(), pinned.len()));
        }
        for c in &report.conditions {
            match pinned.iter().find(|p| p.1 == c.label) {
                Some(p) if p.2 != c.bound => {
                    problems.push(format!("criterion {id} {:?}: bound {:?} != pinned {:?}", c.label, c.bound, p.2))
                }
                Some(_) => {}
                None => problems.push(format!("criterion {id}: unpinned condition {:?}", c.label)),
            }
            let known = KNOWN_FAILURES.iter().find(|k| k.0 == id && k.1 == c.label);
            match (c.passed(), known) {
                (false, None) => problems.push(format!("criterion {id} failed: {c}")),
                (true, Some(_)) => problems.push(format!("criterion {id}: known failure now passes: {c}")),
                (false, Some(k)) => println!("       known failure: {}", k.2),
                (true, None) => {}
            }
        }
    }
    if problems.is_empty() {
        println!("acceptance: all criteria behave as recorded");
        ExitCode::SUCCESS
    } else {
        for p in &problems {
            println!("acceptance problem: {p}");
        }
        ExitCode::FAILURE
    }
}
