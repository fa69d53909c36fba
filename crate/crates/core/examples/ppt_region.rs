//! The isotropic slice of PPT′ in `(α, β)` coordinates, drawn as a character
//! grid and spot-checked against the full membership test.

use ebit::rains::{isotropic_ppt_region, ppt_prime_membership};
use ebit::states::{isotropic_operator, IsotropicCoordinates};

const N: usize = 32;

fn main() -> ebit::Result<()> {
    for d in [2, 3] {
        println!("d = {d}  (alpha right, beta up; # = member)");
        for row in (0..=N / 2).rev() {
            let beta = row as f64 * 2.0 / N as f64;
            let line: String = (0..=N)
                .map(|col| {
                    let alpha = col as f64 / N as f64;
                    let c = IsotropicCoordinates::new(d, alpha, beta).expect("nonnegative");
                    if isotropic_ppt_region(&c) {
                        '#'
                    } else {
                        '.'
                    }
                })
                .collect();
            println!("  {line}");
        }
        let mut mismatches = 0;
        for (alpha, beta) in [(0.1, 0.3), (0.5, 0.5), (0.2, 0.9), (0.4, 0.2), (1.0 / d as f64, 0.0)] {
            let c = IsotropicCoordinates::new(d, alpha, beta)?;
            let full = ppt_prime_membership(&isotropic_operator(&c)?)?;
            if full.is_member() != isotropic_ppt_region(&c) {
                mismatches += 1;
            }
            println!("  ({alpha:.3}, {beta:.3}): pt norm {:.6}, member {}", full.pt_trace_norm, full.is_member());
        }
        println!("  mismatches: {mismatches}");
    }
    Ok(())
}
