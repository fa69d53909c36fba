//! The eight acceptance criteria, one line each. Runs without the libtest
//! harness so the lines are always printed.

use ebit::acceptance::{run_all, AcceptanceConfig};

fn main() {
    let outcomes = run_all(&AcceptanceConfig::default());
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
