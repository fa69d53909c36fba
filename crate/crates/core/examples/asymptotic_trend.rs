//! `R_H^ε(ρ^{⊗n}) / n` for small `n`. Tensor powers beyond the SDP size
//! limit are reported and skipped.

use ebit::linalg::tensor_bipartite;
use ebit::rains::{rains_general_sdp, SDP_MAX_DIM};
use ebit::states::werner_like_isotropic;
use ebit::Error;

fn main() -> ebit::Result<()> {
    let eps = 0.1;
    for p in [0.0, 0.2] {
        let rho = werner_like_isotropic(2, p)?.into_operator();
        let mut power = rho.clone();
        for n in 1..=3 {
            if n > 1 {
                power = match tensor_bipartite(&power, &rho, SDP_MAX_DIM) {
                    Ok(x) => x,
                    Err(Error::ResourceLimit { requested, max }) => {
                        println!("p={p} n={n}: dimension {requested} exceeds {max}, skipped");
                        break;
                    }
                    Err(e) => return Err(e),
                };
            }
            let r = rains_general_sdp(&power, eps, 1e-9)?;
            println!("p={p} n={n}: {:.8} bits, {:.8} per copy", r.value_bits, r.value_bits / n as f64);
        }
    }
    Ok(())
}
