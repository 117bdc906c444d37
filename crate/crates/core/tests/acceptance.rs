//! Runs the twelve acceptance criteria concurrently and prints one PASS/FAIL line each.

use std::process::ExitCode;
use torus_pencil::acceptance::{run, Outcome};

fn main() -> ExitCode {
    let filter: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let ids: Vec<usize> = (1..=12).filter(|&i| filter.is_none_or(|f| f == i)).collect();
    let outcomes: Vec<Outcome> = std::thread::scope(|s| {
        let handles: Vec<_> = ids.iter().map(|&i| s.spawn(move || run(i))).collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
