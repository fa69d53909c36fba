//! Norms and spectral functions of Hermitian operators.

use super::{EigenDecomposition, HermitianOperator};
use crate::error::{Error, Result};

/// Eigenvalues below `-PSD_TOL * max(1, λ_max)` reject a PSD-only operation.
pub const PSD_TOL: f64 = 1e-10;

/// Eigenvalues within this distance of each other, or of zero, are treated as
/// one eigenspace.
pub const TIE_TOL: f64 = 1e-10;

/// Schatten 1-norm, the sum of absolute eigenvalues.
pub fn trace_norm(x: &HermitianOperator) -> Result<f64> {
    Ok(x.eig()?.eigenvalues.iter().map(|l| l.abs()).sum())
}

/// Largest absolute eigenvalue.
pub fn operator_norm(x: &HermitianOperator) -> Result<f64> {
    Ok(x.eig()?.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max))
}

pub fn frobenius_norm(x: &HermitianOperator) -> f64 {
    x.matrix().frobenius_norm()
}

fn check_psd(e: &EigenDecomposition) -> Result<()> {
    let min = e.min_eigenvalue();
    if min < -PSD_TOL * e.max_eigenvalue().abs().max(1.0) {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    Ok(())
}

/// Principal square root; slightly negative eigenvalues are clamped to zero.
pub fn matrix_sqrt_psd(x: &HermitianOperator) -> Result<HermitianOperator> {
    let e = x.eig()?;
    check_psd(&e)?;
    let m = e.map_spectrum(|l| l.max(0.0).sqrt());
    Ok(HermitianOperator::from_matrix_symmetrized(m, x.dims()))
}

/// Returns `(x₊, P₊)`: the positive part of `x` and the projector onto its
/// eigenspace with eigenvalues above [`TIE_TOL`].
pub fn positive_part(x: &HermitianOperator) -> Result<(HermitianOperator, HermitianOperator)> {
    let e = x.eig()?;
    let plus = e.map_spectrum(|l| if l > TIE_TOL { l } else { 0.0 });
    let proj = e.spectral_projector(|l| l > TIE_TOL);
    Ok((HermitianOperator::from_matrix_symmetrized(plus, x.dims()), HermitianOperator::from_matrix_symmetrized(proj, x.dims())))
}

/// Projector onto the span of eigenvectors with eigenvalue above `tol`.
pub fn support_projector(x: &HermitianOperator, tol: f64) -> Result<HermitianOperator> {
    let e = x.eig()?;
    Ok(HermitianOperator::from_matrix_symmetrized(e.spectral_projector(|l| l > tol), x.dims()))
}

/// Clamps eigenvalues below zero. Fails if any is below the PSD tolerance.
pub fn project_psd(x: &HermitianOperator, tol: f64) -> Result<HermitianOperator> {
    let e = x.eig()?;
    if e.min_eigenvalue() < -tol {
        return Err(Error::NotPsd { min_eigenvalue: e.min_eigenvalue() });
    }
    Ok(HermitianOperator::from_matrix_symmetrized(e.map_spectrum(|l| l.max(0.0)), x.dims()))
}

pub fn min_eigenvalue(x: &HermitianOperator) -> Result<f64> {
    Ok(x.eig()?.min_eigenvalue())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;
    use crate::rng::SeededRng;

    fn random_psd(n: usize, rng: &mut SeededRng) -> HermitianOperator {
        let g = ComplexMatrix::from_fn(n, n, |_, _| rng.complex_gaussian());
        HermitianOperator::from_matrix_symmetrized(&g * &g.adjoint(), None)
    }

    #[test]
    fn sqrt_of_identity_and_scaled_projector() {
        let s = matrix_sqrt_psd(&HermitianOperator::identity(3)).unwrap();
        assert!(s.matrix().max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
        let x = HermitianOperator::from_real_diagonal(&[4.0, 0.0]);
        let s = matrix_sqrt_psd(&x).unwrap();
        assert!(s.matrix().max_abs_diff(&ComplexMatrix::from_real_diagonal(&[2.0, 0.0])) < 1e-15);
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = SeededRng::new(21, 0);
        for n in 1..10 {
            let x = random_psd(n, &mut rng);
            let s = matrix_sqrt_psd(&x).unwrap();
            let sq = s.matrix() * s.matrix();
            assert!(sq.max_abs_diff(x.matrix()) < 1e-8);
        }
    }

    #[test]
    fn sqrt_rejects_negative() {
        let x = HermitianOperator::from_real_diagonal(&[1.0, -1e-3]);
        assert!(matches!(matrix_sqrt_psd(&x), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn positive_part_of_signed_diagonal() {
        let x = HermitianOperator::from_real_diagonal(&[1.0, -1.0]);
        let (plus, proj) = positive_part(&x).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert!(plus.matrix().max_abs_diff(&expected) < 1e-15);
        assert!(proj.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn positive_part_dominates() {
        let mut rng = SeededRng::new(4, 2);
        for n in 2..8 {
            let g = ComplexMatrix::from_fn(n, n, |_, _| rng.complex_gaussian());
            let x = HermitianOperator::from_matrix_symmetrized(&g + &g.adjoint(), None);
            let (plus, _) = positive_part(&x).unwrap();
            let gap = plus.sub(&x).unwrap();
            assert!(min_eigenvalue(&gap).unwrap() > -1e-10);
            assert!(min_eigenvalue(&plus).unwrap() > -1e-12);
        }
    }

    #[test]
    fn trace_norm_bounds_trace() {
        let mut rng = SeededRng::new(9, 0);
        for n in 2..8 {
            let a = random_psd(n, &mut rng);
            let b = random_psd(n, &mut rng);
            let signed = a.sub(&b).unwrap();
            assert!(trace_norm(&signed).unwrap() >= signed.trace().abs() - 1e-12);
            assert!((trace_norm(&a).unwrap() - a.trace()).abs() < 1e-10 * a.trace());
            let neg = a.scale(-1.0);
            assert!((trace_norm(&neg).unwrap() - neg.trace().abs()).abs() < 1e-10 * a.trace());
        }
    }
}
