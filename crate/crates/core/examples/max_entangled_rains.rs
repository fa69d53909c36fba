//! ε-Rains of `Φ^d` by three routes: closed form, isotropic reduction, SDP.

use ebit::rains::{rains_closed_form_max_ent, rains_general_sdp, rains_isotropic_reduced};
use ebit::states::max_entangled;

fn main() -> ebit::Result<()> {
    println!("{:>2} {:>5} {:>14} {:>14} {:>14}", "d", "eps", "closed", "reduced", "sdp");
    for d in [2, 3] {
        let phi = max_entangled(d)?;
        for eps in [0.0, 0.01, 0.1, 0.5, 0.9] {
            let closed = rains_closed_form_max_ent(d, eps)?;
            let reduced = rains_isotropic_reduced(&phi, eps)?.value_bits;
            let sdp = rains_general_sdp(&phi, eps, 1e-9)?.value_bits;
            println!("{d:>2} {eps:>5} {closed:>14.10} {reduced:>14.10} {sdp:>14.10}");
        }
    }
    // larger d only through the reduction
    for d in [4, 6, 8] {
        let r = rains_isotropic_reduced(max_entangled(d)?.operator(), 0.25)?;
        println!("d={d} eps=0.25: {:.10} bits (closed form {:.10})", r.value_bits, rains_closed_form_max_ent(d, 0.25)?);
    }
    Ok(())
}
