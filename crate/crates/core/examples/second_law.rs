//! Runs the protocol library through both error modes and tallies verdicts.

use ebit::channels::library_grid;
use ebit::secondlaw::{simulate_instance, ErrorMode, Verdict};

fn main() -> ebit::Result<()> {
    let grid = library_grid(1)?;
    for mode in [ErrorMode::Fidelity, ErrorMode::Trace] {
        let (mut holds, mut vacuous, mut violated) = (0, 0, 0);
        let mut tightest = (f64::INFINITY, String::new());
        for run in &grid {
            let r = simulate_instance(run, mode)?;
            match r.verdict {
                Verdict::Holds => holds += 1,
                Verdict::Vacuous => vacuous += 1,
                Verdict::Violated => violated += 1,
            }
            if r.verdict == Verdict::Holds && r.rhs_bits - r.lhs_bits < tightest.0 {
                tightest = (r.rhs_bits - r.lhs_bits, r.label.clone());
            }
        }
        println!("{mode}: {} runs, {holds} hold, {vacuous} vacuous, {violated} violated", grid.len());
        println!("  tightest: {:.3e} bits of slack on '{}'", tightest.0, tightest.1);
    }
    Ok(())
}
