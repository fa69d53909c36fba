//! Quantum channels in Kraus form, the bilateral `U ⊗ Ū` twirl, and the
//! binary success measurement against a maximally entangled target.
//!
//! LOCC structure is only syntactic here: the protocol library builds its
//! channels from product Kraus operators, but nothing decides whether an
//! arbitrary separable channel is LOCC-realizable.

pub mod protocols;

pub use protocols::{
    dilution_channel, discard_and_prepare, distillation_channel, distillation_outputs, library_grid, library_targets,
    local_depolarizing, local_filter, DistillationKind, LibraryTarget, ProtocolInstance,
};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator};
use crate::rng::SeededRng;
use crate::states::{max_entangled, orthonormalize_columns, random_unitary_with, square_local_dim};

/// `‖Σ K†K − I‖_F` tolerance for trace preservation.
pub const TP_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct KrausChannel {
    kraus_ops: Vec<ComplexMatrix>,
    label: String,
    input_dims: (usize, usize),
    output_dims: (usize, usize),
}

impl KrausChannel {
    /// `input_dims` / `output_dims` are the bipartite splits `(d_A, d_B)`;
    /// pass `(d, 1)` for a channel on a single system.
    pub fn new(
        kraus_ops: Vec<ComplexMatrix>,
        input_dims: (usize, usize),
        output_dims: (usize, usize),
        label: impl Into<String>,
    ) -> Result<Self> {
        let (d_in, d_out) = (input_dims.0 * input_dims.1, output_dims.0 * output_dims.1);
        if kraus_ops.is_empty() {
            return Err(Error::InvalidInput("channel needs at least one Kraus operator".into()));
        }
        if let Some(k) = kraus_ops.iter().find(|k| k.rows() != d_out || k.cols() != d_in) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator is {}x{}, expected {d_out}x{d_in}",
                k.rows(),
                k.cols()
            )));
        }
        let ch = Self { kraus_ops, label: label.into(), input_dims, output_dims };
        let defect = ch.trace_preservation_defect();
        if defect > TP_TOL {
            return Err(Error::InvalidInput(format!("channel '{}' is not trace preserving (defect {defect:e})", ch.label)));
        }
        Ok(ch)
    }

    pub fn identity(dims: (usize, usize)) -> Self {
        Self {
            kraus_ops: vec![ComplexMatrix::identity(dims.0 * dims.1)],
            label: "identity".into(),
            input_dims: dims,
            output_dims: dims,
        }
    }

    /// `{E_i ⊗ F_j}` for local Kraus families on `A` and `B`.
    pub fn local_product(on_a: &[ComplexMatrix], on_b: &[ComplexMatrix], label: impl Into<String>) -> Result<Self> {
        let (a0, b0) = (on_a.first(), on_b.first());
        let (Some(a0), Some(b0)) = (a0, b0) else {
            return Err(Error::InvalidInput("empty local Kraus family".into()));
        };
        let ops = on_a.iter().flat_map(|e| on_b.iter().map(move |f| e.kron(f))).collect();
        Self::new(ops, (a0.cols(), b0.cols()), (a0.rows(), b0.rows()), label)
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn input_dims(&self) -> (usize, usize) {
        self.input_dims
    }

    pub fn output_dims(&self) -> (usize, usize) {
        self.output_dims
    }

    pub fn input_dim(&self) -> usize {
        self.input_dims.0 * self.input_dims.1
    }

    pub fn output_dim(&self) -> usize {
        self.output_dims.0 * self.output_dims.1
    }

    pub fn trace_preservation_defect(&self) -> f64 {
        let n = self.input_dim();
        let mut acc = ComplexMatrix::zeros(n, n);
        for k in &self.kraus_ops {
            acc = &acc + &(&k.adjoint() * k);
        }
        (&acc - &ComplexMatrix::identity(n)).frobenius_norm()
    }

    /// `Σ K ρ K†`, carrying the output bipartite split.
    pub fn apply(&self, rho: &HermitianOperator) -> Result<HermitianOperator> {
        if rho.dim() != self.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "channel '{}' expects dimension {}, got {}",
                self.label,
                self.input_dim(),
                rho.dim()
            )));
        }
        if let Some(dims) = rho.dims() {
            if dims != self.input_dims && self.input_dims.1 != 1 {
                return Err(Error::DimensionMismatch(format!(
                    "channel '{}' expects split {:?}, got {dims:?}",
                    self.label, self.input_dims
                )));
            }
        }
        let n = self.output_dim();
        let mut acc = ComplexMatrix::zeros(n, n);
        for k in &self.kraus_ops {
            let kr = k.matmul(rho.matrix())?;
            acc = &acc + &kr.matmul(&k.adjoint())?;
        }
        let out = HermitianOperator::new(acc)?;
        if self.output_dims.1 == 1 {
            Ok(out)
        } else {
            out.with_bipartite(self.output_dims.0, self.output_dims.1)
        }
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &KrausChannel) -> Result<Self> {
        if next.input_dim() != self.output_dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose '{}' (output {}) with '{}' (input {})",
                self.label,
                self.output_dim(),
                next.label,
                next.input_dim()
            )));
        }
        let mut ops = Vec::with_capacity(self.kraus_ops.len() * next.kraus_ops.len());
        for b in &next.kraus_ops {
            for a in &self.kraus_ops {
                let ba = b.matmul(a)?;
                if ba.max_abs() > 0.0 {
                    ops.push(ba);
                }
            }
        }
        if ops.is_empty() {
            ops.push(ComplexMatrix::zeros(next.output_dim(), self.input_dim()));
        }
        Self::new(ops, self.input_dims, next.output_dims, format!("{} ∘ {}", next.label, self.label))
    }
}

/// Generalized Pauli `X^a Z^b` on `C^d`.
pub fn weyl_operator(d: usize, a: usize, b: usize) -> ComplexMatrix {
    let omega = 2.0 * std::f64::consts::PI / d as f64;
    ComplexMatrix::from_fn(d, d, |row, col| {
        // X^a Z^b |col⟩ = ω^{b·col} |col + a⟩
        if row == (col + a) % d {
            C64::from_polar(1.0, omega * ((b * col) % d) as f64)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Maps every input on `C^n` to `I/n`, via the `n²` normalized Weyl operators.
pub fn full_depolarizer(dims: (usize, usize)) -> Result<KrausChannel> {
    let n = dims.0 * dims.1;
    let w = 1.0 / n as f64;
    let ops = (0..n).flat_map(|a| (0..n).map(move |b| weyl_operator(n, a, b).scale_real(w))).collect();
    KrausChannel::new(ops, dims, dims, "full-depolarizer")
}

/// Random channel `C^{d_in} → C^{d_out}` with `n_kraus` operators cut from a
/// random isometry.
pub fn random_channel(d_in: usize, d_out: usize, n_kraus: usize, rng: &mut SeededRng) -> Result<KrausChannel> {
    if d_in == 0 || d_out == 0 || n_kraus == 0 || d_out * n_kraus < d_in {
        return Err(Error::InvalidInput(format!("cannot build an isometry {d_in} -> {d_out} x {n_kraus}")));
    }
    let g = ComplexMatrix::from_fn(d_out * n_kraus, d_in, |_, _| rng.complex_gaussian());
    let v = orthonormalize_columns(&g);
    let ops = (0..n_kraus).map(|k| ComplexMatrix::from_fn(d_out, d_in, |i, j| v[(k * d_out + i, j)])).collect();
    KrausChannel::new(ops, (d_in, 1), (d_out, 1), "random")
}

/// Closed-form twirl `Φ Tr[Φx] + (I − Φ)/(d² − 1) Tr[(I − Φ)x]`.
pub fn twirl(x: &HermitianOperator) -> Result<HermitianOperator> {
    let d = square_local_dim(x)?;
    let phi = max_entangled(d)?;
    let on_phi = phi.inner(x);
    if d == 1 {
        return Ok(phi.scale(on_phi));
    }
    let off_phi = x.trace() - on_phi;
    let comp = HermitianOperator::bipartite_identity(d, d).sub(&phi)?;
    phi.combine(on_phi, &comp, off_phi / (d * d - 1) as f64)
}

/// Monte-Carlo twirl: the mean of `(U ⊗ Ū) x (U ⊗ Ū)†` over Haar samples.
pub fn twirl_sampled(x: &HermitianOperator, n_samples: usize, seed: u64) -> Result<HermitianOperator> {
    let d = square_local_dim(x)?;
    if n_samples == 0 {
        return Err(Error::InvalidInput("twirl needs at least one sample".into()));
    }
    let mut rng = SeededRng::new(seed, 0);
    let n = d * d;
    let mut acc = ComplexMatrix::zeros(n, n);
    for _ in 0..n_samples {
        let u = random_unitary_with(d, &mut rng)?;
        let uu = u.kron(&u.conj());
        acc = &acc + x.conjugate_by(&uu)?.matrix();
    }
    HermitianOperator::new(acc.scale_real(1.0 / n_samples as f64))?.with_bipartite(d, d)
}

/// `Tr[Φ ω]`: the success probability of the binary measurement
/// `{Φ, I − Φ}`.
pub fn success_measurement(omega: &HermitianOperator, target: &HermitianOperator) -> Result<f64> {
    if omega.dim() != target.dim() {
        return Err(Error::DimensionMismatch(format!("state {} vs target {}", omega.dim(), target.dim())));
    }
    Ok(target.inner(omega))
}
