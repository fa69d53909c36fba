//! Small library of dilution and distillation channels built from product
//! Kraus operators, used to exercise the second-law and Rains checks.
//!
//! Dilution `Φ^{d_in} → d⊗d`: embed locally into `C^d ⊗ C^d`, then apply
//! local Weyl depolarizing noise on `A`. With `d_in = d` the output is the
//! isotropic state `(1 − p)Φ^d + p I/d²`.
//!
//! Distillation `d⊗d → Φ^{d_out}`: either a local filter onto the first
//! `d_out` levels on both sides (failures reset to `|00⟩`), or a
//! discard-and-prepare map that outputs `|00⟩` regardless of input.

use num_complex::Complex64 as C64;

use super::{weyl_operator, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{BipartiteState, ComplexMatrix};
use crate::rng::SeededRng;
use crate::states::{random_density_with, werner_like_isotropic};

fn basis_map(rows: usize, cols: usize, to: usize, from: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    m[(to, from)] = C64::new(1.0, 0.0);
    m
}

/// Local filter `d_from ⊗ d_from → d_to ⊗ d_to`: `Π ⊗ Π` onto the common
/// levels, plus `|00⟩⟨ij|` for every basis pair the filter rejects.
pub fn local_filter(d_from: usize, d_to: usize) -> Result<KrausChannel> {
    if d_from == 0 || d_to == 0 {
        return Err(Error::InvalidDimension("local filter needs positive dimensions".into()));
    }
    let m = d_from.min(d_to);
    let pi = ComplexMatrix::from_fn(d_to, d_from, |r, c| if r == c && r < m { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let mut ops = vec![pi.kron(&pi)];
    for i in 0..d_from {
        for j in 0..d_from {
            if i >= m || j >= m {
                ops.push(basis_map(d_to, d_from, 0, i).kron(&basis_map(d_to, d_from, 0, j)));
            }
        }
    }
    KrausChannel::new(ops, (d_from, d_from), (d_to, d_to), format!("filter {d_from}->{d_to}"))
}

/// Weyl depolarizing noise of strength `p` on the `A` half of `d ⊗ d`.
pub fn local_depolarizing(d: usize, p: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!("depolarizing strength {p} outside [0, 1]")));
    }
    let n2 = (d * d) as f64;
    let id_b = ComplexMatrix::identity(d);
    let mut ops = vec![ComplexMatrix::identity(d * d).scale_real((1.0 - p + p / n2).sqrt())];
    if p > 0.0 {
        let w = (p / n2).sqrt();
        for a in 0..d {
            for b in 0..d {
                if a != 0 || b != 0 {
                    ops.push(weyl_operator(d, a, b).scale_real(w).kron(&id_b));
                }
            }
        }
    }
    KrausChannel::new(ops, (d, d), (d, d), format!("depolarize A p={p}"))
}

/// Outputs `|00⟩` on `d_to ⊗ d_to` for every input.
pub fn discard_and_prepare(d_from: usize, d_to: usize) -> Result<KrausChannel> {
    let mut ops = Vec::with_capacity(d_from * d_from);
    for i in 0..d_from {
        for j in 0..d_from {
            ops.push(basis_map(d_to, d_from, 0, i).kron(&basis_map(d_to, d_from, 0, j)));
        }
    }
    KrausChannel::new(ops, (d_from, d_from), (d_to, d_to), format!("discard {d_from}->{d_to}"))
}

/// Embed `Φ^{d_in}` into `d ⊗ d`, then depolarize `A` with strength `p`.
pub fn dilution_channel(d_in: usize, d: usize, p: f64) -> Result<KrausChannel> {
    let embed = local_filter(d_in, d)?;
    if p == 0.0 {
        return Ok(embed);
    }
    embed.then(&local_depolarizing(d, p)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistillationKind {
    Filter,
    DiscardPrepare,
}

pub fn distillation_channel(kind: &DistillationKind, d: usize, d_out: usize) -> Result<KrausChannel> {
    match kind {
        DistillationKind::Filter => local_filter(d, d_out),
        DistillationKind::DiscardPrepare => discard_and_prepare(d, d_out),
    }
}

/// A target state `ρ` on `d ⊗ d` used by the library.
#[derive(Clone, Debug)]
pub struct LibraryTarget {
    pub label: String,
    pub d: usize,
    pub state: BipartiteState,
}

/// One dilute-then-distill instance.
#[derive(Clone, Debug)]
pub struct ProtocolInstance {
    pub label: String,
    pub d_in: usize,
    pub d_out: usize,
    pub target: BipartiteState,
    pub dilute: KrausChannel,
    pub distill: KrausChannel,
}

pub const TARGET_NOISE: [f64; 4] = [0.0, 0.05, 0.1, 0.25];
pub const DILUTION_NOISE: [f64; 4] = [0.0, 0.02, 0.05, 0.15];

/// Isotropic targets `(1 − p)Φ^d + p I/d²` for `d ∈ {2, 3}`, plus two random
/// two-qubit states drawn from `seed`.
pub fn library_targets(seed: u64) -> Result<Vec<LibraryTarget>> {
    let mut out = Vec::new();
    for d in [2, 3] {
        for p in TARGET_NOISE {
            out.push(LibraryTarget { label: format!("iso d={d} p={p}"), d, state: werner_like_isotropic(d, p)? });
        }
    }
    let mut rng = SeededRng::new(seed, 11);
    for k in 0..2 {
        let state = random_density_with(2, 2, 2 + k, &mut rng)?;
        out.push(LibraryTarget { label: format!("random d=2 #{k}"), d: 2, state });
    }
    Ok(out)
}

/// Output dimensions tried for distillation from `d ⊗ d`.
pub fn distillation_outputs(d: usize) -> [usize; 4] {
    [1, d, d + 1, 2 * d]
}

/// The full grid: every target × `d_in ∈ {d − 1, d}` × dilution noise ×
/// distillation (filter to each output size, discard to `d`).
pub fn library_grid(seed: u64) -> Result<Vec<ProtocolInstance>> {
    let mut out = Vec::new();
    for target in library_targets(seed)? {
        let d = target.d;
        let dilution_noise: &[f64] = if target.label.starts_with("random") { &[0.0] } else { &DILUTION_NOISE };
        let mut distillers = Vec::new();
        for d_out in distillation_outputs(d) {
            distillers.push((d_out, distillation_channel(&DistillationKind::Filter, d, d_out)?));
        }
        distillers.push((d, distillation_channel(&DistillationKind::DiscardPrepare, d, d)?));
        for d_in in [d - 1, d] {
            for &p in dilution_noise {
                let dilute = dilution_channel(d_in, d, p)?;
                for (d_out, distill) in &distillers {
                    out.push(ProtocolInstance {
                        label: format!("{} | d_in={d_in} p_dil={p} | {}", target.label, distill.label()),
                        d_in,
                        d_out: *d_out,
                        target: target.state.clone(),
                        dilute: dilute.clone(),
                        distill: distill.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}
