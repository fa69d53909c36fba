//! Fidelity, sine and trace distance, with data processing under a random
//! channel and the success-probability bound for `Φ`.

use ebit::channels::random_channel;
use ebit::metrics::{fidelity, sine_distance, trace_distance};
use ebit::rng::SeededRng;
use ebit::secondlaw::{sine_composition_check, trace_distance_lemma_check};
use ebit::states::{random_density_with, werner_like_isotropic};

fn main() -> ebit::Result<()> {
    let mut rng = SeededRng::new(3, 0);
    let a = random_density_with(2, 2, 2, &mut rng)?;
    let b = random_density_with(2, 2, 4, &mut rng)?;
    let c = random_density_with(2, 2, 3, &mut rng)?;
    println!("F = {:.10}", fidelity(&a, &b)?);
    println!("P = {:.10}", sine_distance(&a, &b)?);
    println!("T = {:.10}", trace_distance(&a, &b)?);
    println!("triangle P(a,c) <= P(a,b) + P(b,c): {}", sine_composition_check(&a, &b, &c)?);

    let ch = random_channel(4, 3, 5, &mut rng)?;
    let (fa, fb) = (ch.apply(&a)?.without_bipartite(), ch.apply(&b)?.without_bipartite());
    println!("after channel: P {:.10} (was {:.10})", sine_distance(&fa, &fb)?, sine_distance(&a, &b)?);

    for p in [0.0, 0.1, 0.4] {
        let omega = werner_like_isotropic(3, p)?;
        let l = trace_distance_lemma_check(&omega, 3)?;
        println!("p={p}: Tr[Phi w] = {:.6} >= 1 - {:.6}: {}", l.success_probability, l.trace_distance, l.holds);
    }
    Ok(())
}
