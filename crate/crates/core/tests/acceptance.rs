//! One line per acceptance criterion. Every suite runs twice: once on a
//! single worker thread and once on four, and the serialised reports of the
//! two runs must match byte for byte.
//!
//! Criterion 8 is known to fail at desk scale (see README); it is reported
//! as FAIL but does not make the harness exit non-zero. Any other failure does.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lmoments::verify::{Suite, SuiteReport};

const SEED: u64 = 20_240_601;

/// Criteria whose band is out of reach of any desk-scale T.
const KNOWN_UNATTAINABLE: [u32; 1] = [8];

struct Run {
    report: Result<SuiteReport, String>,
    elapsed: Duration,
}

fn run_in_pool(suite: Suite, threads: usize) -> Run {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
    let t0 = Instant::now();
    let report = pool.install(|| suite.run(SEED)).map_err(|e| e.to_string());
    Run { report, elapsed: t0.elapsed() }
}

fn json(r: &Result<SuiteReport, String>) -> String {
    match r {
        Ok(r) => serde_json::to_string(r).expect("serialise report"),
        Err(e) => format!("error: {e}"),
    }
}

fn summary(runs: &[(Suite, Run)]) -> String {
    runs.iter()
        .flat_map(|(_, r)| match &r.report {
            Ok(rep) => rep
                .checks
                .iter()
                .map(|c| format!("{}={:.4e}{}", c.name, c.value, if c.pass { "" } else { "!" }))
                .collect::<Vec<_>>(),
            Err(e) => vec![format!("error: {e}")],
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn main() -> ExitCode {
    // (criterion, suites, runtime limit)
    let criteria: [(u32, &[Suite], Option<Duration>); 12] = [
        (1, &[Suite::Hurwitz], Some(Duration::from_secs(30))),
        (2, &[Suite::HalfShift], None),
        (3, &[Suite::KnownValues], None),
        (4, &[Suite::Truncation], Some(Duration::from_secs(5))),
        (5, &[Suite::MeanValue, Suite::Coprime, Suite::HighMoment], Some(Duration::from_secs(600))),
        (6, &[Suite::PartialSums], None),
        (7, &[Suite::Scaling], Some(Duration::from_secs(7200))),
        (8, &[Suite::Clt], None),
        (9, &[Suite::Joint], None),
        (10, &[Suite::Fubini], None),
        (11, &[Suite::Chandee], None),
        (12, &[Suite::Gabriel], None),
    ];

    let mut unexpected = 0;
    let mut mismatched = Vec::new();
    for (n, suites, limit) in criteria {
        let runs: Vec<(Suite, Run)> = suites.iter().map(|&s| (s, run_in_pool(s, 1))).collect();
        let elapsed: Duration = runs.iter().map(|r| r.1.elapsed).sum();
        let checks_ok = runs.iter().all(|(_, r)| r.report.as_ref().is_ok_and(|x| x.pass));
        let time_ok = limit.is_none_or(|l| elapsed <= l);
        let pass = checks_ok && time_ok;
        let note = if pass {
            String::new()
        } else if KNOWN_UNATTAINABLE.contains(&n) {
            " (expected at desk scale)".to_string()
        } else {
            unexpected += 1;
            String::new()
        };
        let time_note = if time_ok { String::new() } else { format!(" over time limit {limit:?}") };
        println!(
            "criterion {n:>2}: {}{note}{time_note} [{:.1}s] {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            summary(&runs)
        );

        for (s, first) in &runs {
            let again = run_in_pool(*s, 4);
            if json(&first.report) != json(&again.report) {
                mismatched.push(s.name());
            }
        }
    }

    let det_ok = mismatched.is_empty();
    println!(
        "criterion 13: {} reruns on 4 threads vs 1 thread{}",
        if det_ok { "PASS" } else { "FAIL" },
        if det_ok { String::new() } else { format!(", differing suites: {}", mismatched.join(", ")) }
    );
    if !det_ok {
        unexpected += 1;
    }
    if unexpected == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
