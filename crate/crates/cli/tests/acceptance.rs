//! Full-scale acceptance run. Prints one line per criterion,
//! `criterion NN PASS|FAIL title: metrics elapsed_s=.. budget_s=..`, and
//! exits non-zero if any criterion fails.
//!
//! Optional arguments select criteria by number, e.g. `-- 3 9`.

use std::process::ExitCode;
use std::time::Instant;

use psh_cli::config::{RunConfig, Scale};
use psh_cli::run::{run, Command, Inputs};
use psh_cli::suite::{compare_outputs, run_one};

const SEED: u64 = 20240611;

/// Runtime budgets in seconds, one per criterion.
const BUDGET: [f64; 11] = [60.0, 120.0, 600.0, 180.0, 120.0, 300.0, 120.0, 180.0, 600.0, 600.0, 600.0];

fn criterion(id: u32) -> bool {
    match run_one(id, Scale::Full, SEED) {
        Ok(outcome) => {
            print!("{}", outcome.line());
            outcome.passed
        }
        Err(e) => {
            print!("criterion {id:>2} FAIL error: {e}");
            false
        }
    }
}

fn determinism() -> bool {
    let cfg = RunConfig::parse(&format!("grid.n = 1\nseed = {SEED}\nthreads = 1\nsuite.scale = quick\n")).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let runs = run(Command::AcceptanceSuite, &cfg, &Inputs::default(), a.path())
        .and_then(|_| run(Command::AcceptanceSuite, &cfg, &Inputs::default(), b.path()));
    let diff = match runs {
        Ok(_) => compare_outputs(a.path(), b.path()).unwrap_or_else(|e| vec![e.to_string()]),
        Err(e) => vec![e.to_string()],
    };
    print!(
        "criterion 11 {} two seeded single-thread suite runs are byte-identical: differing_files={}",
        if diff.is_empty() { "PASS" } else { "FAIL" },
        diff.len()
    );
    diff.is_empty()
}

fn main() -> ExitCode {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let ids: Vec<u32> = if selected.is_empty() { (1..=11).collect() } else { selected };
    let mut failed = 0;
    for id in ids {
        let start = Instant::now();
        let passed = if id == 11 { determinism() } else { criterion(id) };
        println!(" elapsed_s={:.1} budget_s={}", start.elapsed().as_secs_f64(), BUDGET[id as usize - 1]);
        if !passed {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        println!("all acceptance criteria passed");
        ExitCode::SUCCESS
    }
}
