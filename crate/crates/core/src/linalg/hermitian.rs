use std::ops::Deref;

use num_complex::Complex64 as C64;

use super::eigen::{hermitian_eig, EigenDecomposition};
use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Maximum entry of `|M - M†|`, relative to `max(1, max|M_ij|)`, accepted on construction.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Default cap on the dimension of operators built by tensor products.
pub const DEFAULT_MAX_DIM: usize = 1024;

/// Dense Hermitian matrix with optional bipartite `A ⊗ B` structure.
///
/// Basis convention: `|i⟩_A |j⟩_B` sits at flat index `i * dim_b + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
    bipartite: Option<(usize, usize)>,
}

impl HermitianOperator {
    /// Validates Hermiticity and stores `(M + M†) / 2`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::checked(matrix, None)
    }

    pub fn bipartite(matrix: ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        Self::checked(matrix, Some((dim_a, dim_b)))
    }

    fn checked(matrix: ComplexMatrix, dims: Option<(usize, usize)>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian operator must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if let Some((a, b)) = dims {
            if a * b != matrix.rows() {
                return Err(Error::DimensionMismatch(format!("bipartite dims {a}x{b} do not match dimension {}", matrix.rows())));
            }
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > HERMITIAN_TOL * matrix.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::from_matrix_symmetrized(matrix, dims))
    }

    /// Symmetrizes without a tolerance check. For results that are Hermitian
    /// by construction up to rounding.
    pub(crate) fn from_matrix_symmetrized(mut m: ComplexMatrix, dims: Option<(usize, usize)>) -> Self {
        let n = m.rows();
        for i in 0..n {
            m[(i, i)].im = 0.0;
            for j in (i + 1)..n {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        Self { matrix: m, bipartite: dims }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::zeros(dim, dim), bipartite: None }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim), bipartite: None }
    }

    pub fn bipartite_identity(dim_a: usize, dim_b: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim_a * dim_b), bipartite: Some((dim_a, dim_b)) }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self { matrix: ComplexMatrix::from_real_diagonal(diag), bipartite: None }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector_onto(psi: &[C64]) -> Self {
        Self::from_matrix_symmetrized(ComplexMatrix::outer(psi, psi), None)
    }

    pub fn with_bipartite(mut self, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a * dim_b != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "bipartite dims {dim_a}x{dim_b} do not match dimension {}",
                self.dim()
            )));
        }
        self.bipartite = Some((dim_a, dim_b));
        Ok(self)
    }

    pub fn without_bipartite(mut self) -> Self {
        self.bipartite = None;
        self
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn dims(&self) -> Option<(usize, usize)> {
        self.bipartite
    }

    pub fn require_bipartite(&self) -> Result<(usize, usize)> {
        self.bipartite.ok_or(Error::MissingBipartite)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn eig(&self) -> Result<EigenDecomposition> {
        hermitian_eig(self)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { matrix: self.matrix.scale_real(c), bipartite: self.bipartite }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self { matrix: &self.matrix + &other.matrix, bipartite: self.bipartite.or(other.bipartite) })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self { matrix: &self.matrix - &other.matrix, bipartite: self.bipartite.or(other.bipartite) })
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_same_shape(other)?;
        let m = ComplexMatrix::from_fn(self.dim(), self.dim(), |i, j| self.matrix[(i, j)] * a + other.matrix[(i, j)] * b);
        Ok(Self { matrix: m, bipartite: self.bipartite.or(other.bipartite) })
    }

    /// `Tr[self · other]`, real for Hermitian arguments.
    pub fn inner(&self, other: &Self) -> f64 {
        self.matrix.inner(&other.matrix).re
    }

    /// `K X K†`, Hermitian by construction. The result carries no bipartite
    /// structure; attach one with [`HermitianOperator::with_bipartite`].
    pub fn conjugate_by(&self, k: &ComplexMatrix) -> Result<Self> {
        if k.cols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot conjugate a {}-dimensional operator by a {}x{} matrix",
                self.dim(),
                k.rows(),
                k.cols()
            )));
        }
        let kx = k.matmul(&self.matrix)?;
        let out = kx.matmul(&k.adjoint())?;
        Ok(Self::from_matrix_symmetrized(out, None))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!("dimensions {} and {}", self.dim(), other.dim())));
        }
        if let (Some(a), Some(b)) = (self.bipartite, other.bipartite) {
            if a != b {
                return Err(Error::DimensionMismatch(format!("bipartite dims {a:?} and {b:?}")));
            }
        }
        Ok(())
    }
}

/// A unit-trace positive semidefinite operator on `A ⊗ B`.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState(HermitianOperator);

impl BipartiteState {
    pub const TRACE_TOL: f64 = 1e-8;
    pub const PSD_TOL: f64 = 1e-10;

    pub fn new(op: HermitianOperator) -> Result<Self> {
        op.require_bipartite()?;
        let tr = op.trace();
        if (tr - 1.0).abs() > Self::TRACE_TOL {
            return Err(Error::InvalidInput(format!("state has trace {tr}, expected 1")));
        }
        let min = op.eig()?.min_eigenvalue();
        if min < -Self::PSD_TOL {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        Ok(Self(op))
    }

    pub(crate) fn new_unchecked(op: HermitianOperator) -> Self {
        debug_assert!(op.dims().is_some());
        Self(op)
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.0
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.0
    }

    pub fn dim_a(&self) -> usize {
        self.0.bipartite.map_or(self.0.dim(), |d| d.0)
    }

    pub fn dim_b(&self) -> usize {
        self.0.bipartite.map_or(1, |d| d.1)
    }

    /// `Tr[ρ²]`.
    pub fn purity(&self) -> f64 {
        self.0.inner(&self.0)
    }
}

impl Deref for BipartiteState {
    type Target = HermitianOperator;

    fn deref(&self) -> &HermitianOperator {
        &self.0
    }
}

impl AsRef<HermitianOperator> for BipartiteState {
    fn as_ref(&self) -> &HermitianOperator {
        &self.0
    }
}

impl AsRef<HermitianOperator> for HermitianOperator {
    fn as_ref(&self) -> &HermitianOperator {
        self
    }
}

pub fn tensor_product(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    tensor_product_capped(a, b, DEFAULT_MAX_DIM)
}

/// Kronecker product with the result split as `a-space ⊗ b-space`.
pub fn tensor_product_capped(a: &HermitianOperator, b: &HermitianOperator, max_dim: usize) -> Result<HermitianOperator> {
    let requested = a.dim().saturating_mul(b.dim());
    if requested > max_dim {
        return Err(Error::ResourceLimit { requested, max: max_dim });
    }
    Ok(HermitianOperator { matrix: a.matrix.kron(&b.matrix), bipartite: Some((a.dim(), b.dim())) })
}

/// Tensor product of two bipartite operators regrouped as `(A₁A₂) : (B₁B₂)`.
pub fn tensor_bipartite(x: &HermitianOperator, y: &HermitianOperator, max_dim: usize) -> Result<HermitianOperator> {
    let (a1, b1) = x.require_bipartite()?;
    let (a2, b2) = y.require_bipartite()?;
    let requested = x.dim().saturating_mul(y.dim());
    if requested > max_dim {
        return Err(Error::ResourceLimit { requested, max: max_dim });
    }
    let (da, db) = (a1 * a2, b1 * b2);
    // flat index of |i1 i2⟩_A |j1 j2⟩_B
    let index = |i1: usize, j1: usize, i2: usize, j2: usize| (i1 * a2 + i2) * db + (j1 * b2 + j2);
    let mut m = ComplexMatrix::zeros(requested, requested);
    for r1 in 0..x.dim() {
        for c1 in 0..x.dim() {
            let v1 = x.matrix[(r1, c1)];
            if v1.re == 0.0 && v1.im == 0.0 {
                continue;
            }
            for r2 in 0..y.dim() {
                for c2 in 0..y.dim() {
                    let row = index(r1 / b1, r1 % b1, r2 / b2, r2 % b2);
                    let col = index(c1 / b1, c1 % b1, c2 / b2, c2 % b2);
                    m[(row, col)] = v1 * y.matrix[(r2, c2)];
                }
            }
        }
    }
    Ok(HermitianOperator { matrix: m, bipartite: Some((da, db)) })
}

/// Transposes the `B` factor: `⟨i j| T_B(X) |k l⟩ = ⟨i l| X |k j⟩`.
pub fn partial_transpose_b(x: &HermitianOperator) -> Result<HermitianOperator> {
    let (da, db) = x.require_bipartite()?;
    let n = da * db;
    let m = ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, j) = (r / db, r % db);
        let (k, l) = (c / db, c % db);
        x.matrix[(i * db + l, k * db + j)]
    });
    Ok(HermitianOperator { matrix: m, bipartite: Some((da, db)) })
}

/// `Tr_B`, leaving an operator on `A`.
pub fn partial_trace_b(x: &HermitianOperator) -> Result<HermitianOperator> {
    let (da, db) = x.require_bipartite()?;
    let m = ComplexMatrix::from_fn(da, da, |i, k| (0..db).map(|j| x.matrix[(i * db + j, k * db + j)]).sum());
    Ok(HermitianOperator::from_matrix_symmetrized(m, None))
}

/// `Tr_A`, leaving an operator on `B`.
pub fn partial_trace_a(x: &HermitianOperator) -> Result<HermitianOperator> {
    let (da, db) = x.require_bipartite()?;
    let m = ComplexMatrix::from_fn(db, db, |j, l| (0..da).map(|i| x.matrix[(i * db + j, i * db + l)]).sum());
    Ok(HermitianOperator::from_matrix_symmetrized(m, None))
}

pub fn inner_product(a: &HermitianOperator, b: &HermitianOperator) -> f64 {
    a.inner(b)
}
