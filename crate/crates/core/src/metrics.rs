//! Fidelity, normalized trace distance and sine distance.

use crate::error::{Error, Result};
use crate::linalg::{matrix_sqrt_psd, trace_norm, HermitianOperator};

/// Raw values outside `[-RANGE_TOL, 1 + RANGE_TOL]` are reported as failures
/// instead of being clamped.
pub const RANGE_TOL: f64 = 1e-9;
const TRACE_SLACK: f64 = 1e-10;
/// Eigenvalues of `√ω τ √ω` at or below this are treated as zero.
const DUST: f64 = 1e-12;

fn clamp_unit(raw: f64, what: &str) -> Result<f64> {
    if !(-RANGE_TOL..=1.0 + RANGE_TOL).contains(&raw) || raw.is_nan() {
        return Err(Error::Numerical(format!("{what} evaluated to {raw}, outside [0, 1]")));
    }
    Ok(raw.clamp(0.0, 1.0))
}

fn check_same_dim(a: &HermitianOperator, b: &HermitianOperator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("states of dimension {} and {}", a.dim(), b.dim())));
    }
    Ok(())
}

fn check_subnormalized(x: &HermitianOperator) -> Result<()> {
    if x.trace() > 1.0 + TRACE_SLACK {
        return Err(Error::InvalidInput(format!("trace {} exceeds 1", x.trace())));
    }
    Ok(())
}

/// `F(ω, τ) = ‖√ω √τ‖₁²`, computed as `(Tr √(√ω τ √ω))²`.
pub fn fidelity(omega: &HermitianOperator, tau: &HermitianOperator) -> Result<f64> {
    check_same_dim(omega, tau)?;
    check_subnormalized(omega)?;
    check_subnormalized(tau)?;
    let sqrt_omega = matrix_sqrt_psd(omega)?;
    // τ must be PSD too; this rejects it otherwise
    matrix_sqrt_psd(tau)?;
    let inner = tau.conjugate_by(sqrt_omega.matrix())?;
    let e = inner.eig()?;
    let min = e.min_eigenvalue();
    if min < -RANGE_TOL {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let root_trace: f64 = e.eigenvalues.iter().filter(|&&l| l > DUST).map(|&l| l.sqrt()).sum();
    clamp_unit(root_trace * root_trace, "fidelity")
}

/// Normalized trace distance `½‖ω − τ‖₁`.
pub fn trace_distance(omega: &HermitianOperator, tau: &HermitianOperator) -> Result<f64> {
    check_same_dim(omega, tau)?;
    let diff = HermitianOperator::from_matrix_symmetrized(omega.matrix() - tau.matrix(), None);
    Ok(0.5 * trace_norm(&diff)?)
}

/// `P(ω, τ) = √(1 − F(ω, τ))`.
pub fn sine_distance(omega: &HermitianOperator, tau: &HermitianOperator) -> Result<f64> {
    let f = fidelity(omega, tau)?;
    Ok((1.0 - f).max(0.0).sqrt())
}
