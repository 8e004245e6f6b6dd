//! Acceptance runner: one pass/fail line per criterion.
//!
//! Criteria 1 to 7 come from `locspec selftest --seed 7`. Criterion 8 runs the
//! same command a second time and compares the reports with timings masked.

use std::process::{Command, ExitCode};
use std::time::Instant;

use locspec_cli::RunReport;
use serde_json::Value;

const SEED: &str = "7";

struct Run {
    code: Option<i32>,
    report: RunReport,
}

fn selftest() -> Result<Run, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_locspec"))
        .args(["selftest", "--seed", SEED, "--format", "json"])
        .env_remove("LOCSPEC_SEED")
        .output()
        .map_err(|e| format!("cannot start locspec: {e}"))?;
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let report = serde_json::from_str(&text).map_err(|e| format!("unreadable report: {e}"))?;
    Ok(Run {
        code: out.status.code(),
        report,
    })
}

fn line(passed: bool, id: u64, name: &str, details: &str) -> String {
    format!(
        "[{}] criterion {id} {name}: {details}",
        if passed { "PASS" } else { "FAIL" }
    )
}

fn criterion_line(verdict: &Value) -> (bool, String) {
    let passed = verdict["passed"].as_bool().unwrap_or(false);
    let id = verdict["criterion"].as_u64().unwrap_or(0);
    let name = verdict["name"].as_str().unwrap_or("?");
    let details = verdict["details"]
        .as_object()
        .map(|m| {
            m.iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .unwrap_or_default();
    (passed, line(passed, id, name, &details))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let (first, second) = match (selftest(), selftest()) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            println!("[FAIL] selftest could not run: {e}");
            return ExitCode::FAILURE;
        }
    };

    let mut all = true;
    let mut seen = 0;
    for verdict in &first.report.verdicts {
        let (passed, text) = criterion_line(verdict);
        all &= passed;
        seen += 1;
        println!("{text}");
    }
    if seen != 7 {
        println!("[FAIL] expected 7 criteria in the selftest report, found {seen}");
        all = false;
    }
    for e in &first.report.errors {
        println!("[FAIL] selftest error: {e}");
        all = false;
    }

    let identical = first.report.to_json_masked() == second.report.to_json_masked();
    let same_code = first.code == second.code;
    let deterministic = identical && same_code;
    all &= deterministic;
    println!(
        "{}",
        line(
            deterministic,
            8,
            "seeded determinism",
            &format!(
                "seed={SEED} runs=2 masked_reports_identical={identical} exit_codes={:?}/{:?}",
                first.code, second.code
            )
        )
    );

    println!(
        "acceptance: {} in {:.1}s",
        if all { "all criteria passed" } else { "FAILED" },
        start.elapsed().as_secs_f64()
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
