//! Closed-form twirl against a Haar Monte-Carlo average.

use ebit::channels::{twirl, twirl_sampled};
use ebit::states::random_density;

fn main() -> ebit::Result<()> {
    let rho = random_density(3, 3, 2, 21)?;
    let exact = twirl(&rho)?;
    for n in [100, 1_000, 10_000] {
        let mc = twirl_sampled(&rho, n, 4)?;
        let err = mc.matrix().max_abs_diff(exact.matrix());
        println!("samples {n:>6}: max |mc - exact| = {err:.3e}  (n^-1/2 = {:.3e})", 1.0 / (n as f64).sqrt());
    }
    let again = twirl(&exact)?;
    println!("idempotence defect: {:.3e}", again.matrix().max_abs_diff(exact.matrix()));
    Ok(())
}
