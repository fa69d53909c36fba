//! Protocol spec files for `secondlaw`.
//!
//! ```json
//! {"protocol": "identity_cycle", "d": 2}
//! {"protocol": "depolarizing_sweep", "d": 2, "p": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]}
//! {"protocol": "library"}
//! {"protocol": "custom", "d_in": 1, "d": 2, "target_noise": 0.0,
//!  "dilution_noise": 0.0, "distill": "discard_prepare", "d_out": 2}
//! ```

use serde::Deserialize;

use crate::channels::{dilution_channel, distillation_channel, library_grid, DistillationKind, ProtocolInstance};
use crate::error::{Error, Result};
use crate::states::{max_entangled, werner_like_isotropic};

fn default_sweep() -> Vec<f64> {
    (0..=5).map(|k| k as f64 / 10.0).collect()
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "protocol", rename_all = "snake_case")]
pub enum ProtocolSpec {
    /// `Φ^d → Φ^d → Φ^d` with identity channels.
    IdentityCycle {
        d: usize,
    },
    /// Target `(1 − p)Φ^d + p I/d²`, produced exactly from `Φ^d` and
    /// filtered back to `d_out` (default `d`), one row per `p`.
    DepolarizingSweep {
        d: usize,
        #[serde(default = "default_sweep")]
        p: Vec<f64>,
        #[serde(default)]
        d_out: Option<usize>,
    },
    /// The built-in grid; `seed` defaults to the run seed.
    Library {
        #[serde(default)]
        seed: Option<u64>,
    },
    Custom {
        d_in: usize,
        d: usize,
        target_noise: f64,
        dilution_noise: f64,
        distill: DistillationKind,
        d_out: usize,
    },
}

impl ProtocolSpec {
    pub fn instances(&self, run_seed: u64) -> Result<Vec<ProtocolInstance>> {
        match self {
            ProtocolSpec::IdentityCycle { d } => {
                let id = dilution_channel(*d, *d, 0.0)?;
                Ok(vec![ProtocolInstance {
                    label: format!("identity d={d}"),
                    d_in: *d,
                    d_out: *d,
                    target: max_entangled(*d)?,
                    dilute: id.clone(),
                    distill: id,
                }])
            }
            ProtocolSpec::DepolarizingSweep { d, p, d_out } => {
                let d_out = d_out.unwrap_or(*d);
                let distill = distillation_channel(&DistillationKind::Filter, *d, d_out)?;
                p.iter()
                    .map(|&p| {
                        Ok(ProtocolInstance {
                            label: format!("depolarizing d={d} p={p}"),
                            d_in: *d,
                            d_out,
                            target: werner_like_isotropic(*d, p)?,
                            dilute: dilution_channel(*d, *d, p)?,
                            distill: distill.clone(),
                        })
                    })
                    .collect()
            }
            ProtocolSpec::Library { seed } => library_grid(seed.unwrap_or(run_seed)),
            ProtocolSpec::Custom { d_in, d, target_noise, dilution_noise, distill, d_out } => {
                if d_in > d {
                    return Err(Error::InvalidDimension(format!("d_in = {d_in} exceeds d = {d}")));
                }
                let distill = distillation_channel(distill, *d, *d_out)?;
                Ok(vec![ProtocolInstance {
                    label: format!("custom d_in={d_in} d={d} | {}", distill.label()),
                    d_in: *d_in,
                    d_out: *d_out,
                    target: werner_like_isotropic(*d, *target_noise)?,
                    dilute: dilution_channel(*d_in, *d, *dilution_noise)?,
                    distill,
                }])
            }
        }
    }
}
