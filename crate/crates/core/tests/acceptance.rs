//! Full-scale acceptance run: one line per criterion, then a total. Runs
//! without the libtest harness so the lines are always shown; the process
//! fails when any criterion fails.

use std::time::Instant;

use sphereiso::suites::*;
use sphereiso::Exact;

struct Line {
    id: usize,
    name: &'static str,
    passed: bool,
    summary: String,
}

fn check(id: usize, name: &'static str, budget_s: f64, run: impl FnOnce() -> (bool, String)) -> Line {
    let start = Instant::now();
    let (ok, summary) = run();
    let secs = start.elapsed().as_secs_f64();
    let line = Line { id, name, passed: ok, summary: format!("{summary}; {secs:.1} s (budget {budget_s} s)") };
    println!("[{}] criterion {id} {name}: {}", if line.passed { "PASS" } else { "FAIL" }, line.summary);
    line
}

fn failure_note(r: &SuiteReport) -> String {
    r.first_failure().and_then(|f| f.detail.clone()).map(|d| format!("; first failure: {d}")).unwrap_or_default()
}

fn main() {
    println!("\nrunning acceptance criteria");
    let mut lines = Vec::new();

    lines.push(check(1, "restricted-sphere distance vs direct search", 60.0, || {
        let r = distance_suite(&DistanceSuiteConfig::default()).expect("suite runs");
        (r.passed, format!("{} trials, max gap {:.3e} (tol {:.0e}){}", r.trials, r.max_metric, r.tolerance, failure_note(&r)))
    }));

    lines.push(check(2, "planted isometry round trip (exact)", 120.0, || {
        let r = extraction_suite::<Exact>(&ExtractionSuiteConfig::default()).expect("suite runs");
        (
            r.passed,
            format!("{} planted, {} failures, max agreement {:.3e} (tol {:.0e}){}", r.trials, r.failures, r.max_metric, r.tolerance, failure_note(&r)),
        )
    }));

    lines.push(check(3, "perturbed oracles rejected", 60.0, || {
        let r = adversarial_suite(&AdversarialSuiteConfig::default()).expect("suite runs");
        let false_rejections = r.summary["false_rejections"].as_u64().unwrap_or(u64::MAX);
        (
            r.passed && false_rejections == 0,
            format!(
                "{} perturbed, {} not rejected, min witness {:.3e} (> {:.0e}), {false_rejections} false rejections{}",
                r.trials,
                r.failures,
                r.summary["min_witness_deviation"].as_f64().unwrap_or(0.0),
                r.tolerance,
                failure_note(&r)
            ),
        )
    }));

    lines.push(check(4, "density existence/uniqueness vs LP oracle", 300.0, || {
        let r = rn_equivalence_suite(&RnSuiteConfig::default());
        let get = |k: &str| r.summary[k].as_u64().unwrap_or(u64::MAX);
        (
            r.passed,
            format!(
                "{} instances, {} mismatches, {} bad densities, {} semi-finiteness violations, {} with differing scopes",
                get("instances"),
                get("mismatches"),
                get("density_failures"),
                get("semifinite_violations"),
                get("scopes_differ")
            ),
        )
    }));

    lines.push(check(5, "sharp calculus on the five-level grid", 60.0, || {
        let r = sharp_suite(&SharpSuiteConfig::default());
        let mismatches: f64 = r.records.iter().map(|x| x.metric).sum();
        (r.passed, format!("{} check groups, {mismatches} mismatches{}", r.trials, failure_note(&r)))
    }));

    lines.push(check(6, "permutation oracles recovered, distortions rejected", 30.0, || {
        let r = homeo_suite(&HomeoSuiteConfig::default()).expect("suite runs");
        (r.passed, format!("{} planted, {} failures, max deviation {}{}", r.trials, r.failures, r.max_metric, failure_note(&r)))
    }));

    lines.push(check(7, "distance to nowhere-zero functions peaking at a point", 30.0, || {
        let r = px_distance_suite(&PxSuiteConfig::default());
        (r.passed, format!("{} trials, max gap {:.3e} (tol {:.0e}){}", r.trials, r.max_metric, r.tolerance, failure_note(&r)))
    }));

    lines.push(check(8, "regular set isomorphism existence criterion", 60.0, || {
        let r = iso_existence_suite(&IsoSuiteConfig::default()).expect("suite runs");
        (
            r.passed,
            format!("{} pairs ({} admit an isomorphism), {} mismatches{}", r.trials, r.summary["pairs_with_isomorphism"], r.failures, failure_note(&r)),
        )
    }));

    let failed: Vec<String> = lines.iter().filter(|l| !l.passed).map(|l| format!("{} ({})", l.id, l.name)).collect();
    println!("acceptance: {}/{} criteria passed", lines.len() - failed.len(), lines.len());
    if !failed.is_empty() {
        eprintln!("failed criteria: {}", failed.join(", "));
        std::process::exit(1);
    }
}
