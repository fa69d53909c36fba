//! Canonical operators: maximally entangled states, isotropic operators,
//! swap and (anti)symmetric projectors, and random states and unitaries.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{BipartiteState, ComplexMatrix, HermitianOperator};
use crate::rng::SeededRng;

/// Weights of `α Φ + β (I − Φ)/(d² − 1)` on `C^d ⊗ C^d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsotropicCoordinates {
    pub d: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl IsotropicCoordinates {
    pub fn new(d: usize, alpha: f64, beta: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension("Schmidt rank must be at least 1".into()));
        }
        if !(alpha >= 0.0 && beta >= 0.0) {
            return Err(Error::InvalidInput(format!("isotropic weights must be nonnegative, got ({alpha}, {beta})")));
        }
        if d == 1 && beta != 0.0 {
            return Err(Error::InvalidInput("d = 1 has no complement of Φ".into()));
        }
        Ok(Self { d, alpha, beta })
    }

    /// Reads `(Tr[Φx], Tr[(I − Φ)x])` off an operator. Exact for twirl-invariant inputs.
    pub fn of_operator(x: &HermitianOperator) -> Result<Self> {
        let d = square_local_dim(x)?;
        let phi = max_entangled(d)?;
        let alpha = phi.inner(x);
        let beta = x.trace() - alpha;
        Ok(Self { d, alpha, beta })
    }

    pub fn trace(&self) -> f64 {
        self.alpha + self.beta
    }
}

/// Test-operator weights `κ Φ + λ (I − Φ)/(d² − 1)` with `0 ≤ κ ≤ 1`, `0 ≤ λ ≤ d² − 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedTestCoordinates {
    pub d: usize,
    pub kappa: f64,
    pub lambda: f64,
}

impl ReducedTestCoordinates {
    pub fn new(d: usize, kappa: f64, lambda: f64) -> Result<Self> {
        let cap = (d * d - 1) as f64;
        if !(0.0..=1.0).contains(&kappa) || !(0.0..=cap).contains(&lambda) {
            return Err(Error::InvalidInput(format!(
                "test weights out of range: kappa={kappa}, lambda={lambda}, lambda cap {cap}"
            )));
        }
        Ok(Self { d, kappa, lambda })
    }

    pub fn operator(&self) -> Result<HermitianOperator> {
        isotropic_operator(&IsotropicCoordinates { d: self.d, alpha: self.kappa, beta: self.lambda })
    }
}

pub(crate) fn square_local_dim(x: &HermitianOperator) -> Result<usize> {
    let (da, db) = x.require_bipartite()?;
    if da != db {
        return Err(Error::DimensionMismatch(format!("expected d x d bipartite structure, got {da} x {db}")));
    }
    Ok(da)
}

/// `Φ^d = (1/d) Σ_ij |ii⟩⟨jj|`.
pub fn max_entangled(d: usize) -> Result<BipartiteState> {
    if d == 0 {
        return Err(Error::InvalidDimension("Schmidt rank must be at least 1".into()));
    }
    let n = d * d;
    let mut m = ComplexMatrix::zeros(n, n);
    let w = 1.0 / d as f64;
    for i in 0..d {
        for j in 0..d {
            m[(i * d + i, j * d + j)] = C64::new(w, 0.0);
        }
    }
    Ok(BipartiteState::new_unchecked(HermitianOperator::from_matrix_symmetrized(m, Some((d, d)))))
}

/// `α Φ + β (I − Φ)/(d² − 1)`.
pub fn isotropic_operator(c: &IsotropicCoordinates) -> Result<HermitianOperator> {
    let c = IsotropicCoordinates::new(c.d, c.alpha, c.beta)?;
    let d = c.d;
    let phi = max_entangled(d)?;
    if d == 1 {
        return Ok(phi.scale(c.alpha));
    }
    let comp = HermitianOperator::bipartite_identity(d, d).sub(&phi)?;
    phi.combine(c.alpha, &comp, c.beta / (d * d - 1) as f64)
}

/// Isotropic state with weight `fidelity` on `Φ`.
pub fn isotropic_state(d: usize, fidelity: f64) -> Result<BipartiteState> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::InvalidInput(format!("fidelity {fidelity} outside [0, 1]")));
    }
    let op = isotropic_operator(&IsotropicCoordinates::new(d, fidelity, 1.0 - fidelity)?)?;
    Ok(BipartiteState::new_unchecked(op))
}

/// `(1 − p) Φ + p I/d²`.
pub fn werner_like_isotropic(d: usize, p: f64) -> Result<BipartiteState> {
    let dd = (d * d) as f64;
    isotropic_state(d, 1.0 - p + p / dd)
}

/// `F = Σ_ij |ij⟩⟨ji|`.
pub fn swap_operator(d: usize) -> Result<HermitianOperator> {
    if d == 0 {
        return Err(Error::InvalidDimension("local dimension must be at least 1".into()));
    }
    let n = d * d;
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j, j * d + i)] = C64::new(1.0, 0.0);
        }
    }
    Ok(HermitianOperator::from_matrix_symmetrized(m, Some((d, d))))
}

/// `Π_S = (I + F)/2`.
pub fn sym_projector(d: usize) -> Result<HermitianOperator> {
    let f = swap_operator(d)?;
    HermitianOperator::bipartite_identity(d, d).combine(0.5, &f, 0.5)
}

/// `Π_A = (I − F)/2`.
pub fn antisym_projector(d: usize) -> Result<HermitianOperator> {
    let f = swap_operator(d)?;
    HermitianOperator::bipartite_identity(d, d).combine(0.5, &f, -0.5)
}

/// `G G† / Tr[G G†]` for a complex Gaussian `dim × rank` matrix `G`, split as
/// `dim_a ⊗ dim_b`.
pub fn random_density(dim_a: usize, dim_b: usize, rank: usize, seed: u64) -> Result<BipartiteState> {
    let dim = dim_a * dim_b;
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::InvalidInput(format!("rank {rank} outside [1, {dim}]")));
    }
    let mut rng = SeededRng::new(seed, 0);
    random_density_with(dim_a, dim_b, rank, &mut rng)
}

pub fn random_density_with(dim_a: usize, dim_b: usize, rank: usize, rng: &mut SeededRng) -> Result<BipartiteState> {
    let dim = dim_a * dim_b;
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::InvalidInput(format!("rank {rank} outside [1, {dim}]")));
    }
    let g = ComplexMatrix::from_fn(dim, rank, |_, _| rng.complex_gaussian());
    let ggt = &g * &g.adjoint();
    let tr = ggt.trace().re;
    let op = HermitianOperator::from_matrix_symmetrized(ggt.scale_real(1.0 / tr), Some((dim_a, dim_b)));
    Ok(BipartiteState::new_unchecked(op))
}

/// Haar-random unitary from the QR factorization of a complex Gaussian
/// matrix, with `R`'s diagonal made real positive.
pub fn random_unitary(d: usize, seed: u64) -> Result<ComplexMatrix> {
    let mut rng = SeededRng::new(seed, 0);
    random_unitary_with(d, &mut rng)
}

pub fn random_unitary_with(d: usize, rng: &mut SeededRng) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::InvalidDimension("unitary dimension must be at least 1".into()));
    }
    let g = ComplexMatrix::from_fn(d, d, |_, _| rng.complex_gaussian());
    Ok(orthonormalize_columns(&g))
}

/// Gram–Schmidt with one reorthogonalization pass: the `Q` of a QR
/// factorization whose `R` has positive real diagonal.
pub(crate) fn orthonormalize_columns(g: &ComplexMatrix) -> ComplexMatrix {
    let (rows, cols) = (g.rows(), g.cols());
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = g.column(j);
        for _ in 0..2 {
            for u in &q {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        q.push(v);
    }
    ComplexMatrix::from_fn(rows, cols, |i, j| q[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{partial_trace_b, partial_transpose_b};

    #[test]
    fn max_entangled_basics() {
        let p1 = max_entangled(1).unwrap();
        assert_eq!(p1.dim(), 1);
        assert_eq!(p1.get(0, 0), C64::new(1.0, 0.0));
        assert!(matches!(max_entangled(0), Err(Error::InvalidDimension(_))));
        let p2 = max_entangled(2).unwrap();
        assert!((p2.purity() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn max_entangled_matches_index_formula() {
        // (1/2) Σ |ii⟩⟨jj| built from outer products of basis kets
        let d = 2;
        let mut expected = ComplexMatrix::zeros(4, 4);
        for i in 0..d {
            for j in 0..d {
                let mut ket_ii = vec![C64::new(0.0, 0.0); 4];
                let mut ket_jj = vec![C64::new(0.0, 0.0); 4];
                ket_ii[i * d + i] = C64::new(1.0, 0.0);
                ket_jj[j * d + j] = C64::new(1.0, 0.0);
                expected = &expected + &ComplexMatrix::outer(&ket_ii, &ket_jj).scale_real(0.5);
            }
        }
        assert_eq!(max_entangled(2).unwrap().matrix(), &expected);
    }

    #[test]
    fn max_entangled_marginal_is_maximally_mixed() {
        let rho_a = partial_trace_b(&max_entangled(3).unwrap()).unwrap();
        let expected = ComplexMatrix::identity(3).scale_real(1.0 / 3.0);
        assert!(rho_a.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn isotropic_special_points() {
        for d in 2..5 {
            let phi = max_entangled(d).unwrap();
            let iso = isotropic_operator(&IsotropicCoordinates::new(d, 1.0, 0.0).unwrap()).unwrap();
            assert!(iso.matrix().max_abs_diff(phi.matrix()) < 1e-15);
            let dd = (d * d) as f64;
            let mixed = isotropic_operator(&IsotropicCoordinates::new(d, 1.0 / dd, 1.0 - 1.0 / dd).unwrap()).unwrap();
            assert!(mixed.matrix().max_abs_diff(&ComplexMatrix::identity(d * d).scale_real(1.0 / dd)) < 1e-15);
        }
        assert!(IsotropicCoordinates::new(2, -0.1, 0.5).is_err());
    }

    #[test]
    fn isotropic_trace_and_commutes_with_phi() {
        let mut rng = SeededRng::new(2, 0);
        for _ in 0..20 {
            let (a, b) = (rng.uniform(), rng.uniform());
            let x = isotropic_operator(&IsotropicCoordinates::new(3, a, b).unwrap()).unwrap();
            assert!((x.trace() - (a + b)).abs() < 1e-13);
            let phi = max_entangled(3).unwrap();
            let comm = &(x.matrix() * phi.matrix()) - &(phi.matrix() * x.matrix());
            assert!(comm.max_abs() < 1e-15);
        }
    }

    #[test]
    fn swap_identities() {
        let f = swap_operator(2).unwrap();
        // F|01⟩ = |10⟩
        let mut ket01 = vec![C64::new(0.0, 0.0); 4];
        ket01[1] = C64::new(1.0, 0.0);
        let out = f.matrix().apply(&ket01);
        assert_eq!(out[2], C64::new(1.0, 0.0));
        for d in 2..5 {
            let f = swap_operator(d).unwrap();
            assert!((f.trace() - d as f64).abs() < 1e-15);
            let ff = f.matrix() * f.matrix();
            assert_eq!(ff, ComplexMatrix::identity(d * d));
            let ps = sym_projector(d).unwrap();
            let pa = antisym_projector(d).unwrap();
            assert_eq!(ps.matrix() - pa.matrix(), *f.matrix());
            assert_eq!(ps.matrix() + pa.matrix(), ComplexMatrix::identity(d * d));
            assert!((ps.matrix() * pa.matrix()).max_abs() < 1e-15);
            assert!((ps.matrix() * ps.matrix()).max_abs_diff(ps.matrix()) < 1e-15);
            assert!((ps.trace() - (d * (d + 1) / 2) as f64).abs() < 1e-14);
            assert!((pa.trace() - (d * (d - 1) / 2) as f64).abs() < 1e-14);
        }
        assert!((sym_projector(3).unwrap().trace() - 6.0).abs() < 1e-14);
        assert!((antisym_projector(2).unwrap().trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn partial_transpose_of_phi_is_scaled_swap() {
        for d in 1..5 {
            let pt = partial_transpose_b(&max_entangled(d).unwrap()).unwrap();
            let f = swap_operator(d).unwrap().scale(1.0 / d as f64);
            assert!(pt.matrix().max_abs_diff(f.matrix()) < 1e-15);
        }
    }

    #[test]
    fn random_density_properties() {
        let pure = random_density(2, 2, 1, 4).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-10);
        for rank in 1..=6 {
            let rho = random_density(2, 3, rank, 10 + rank as u64).unwrap();
            assert!((rho.trace() - 1.0).abs() < 1e-14);
            assert!(BipartiteState::new(rho.operator().clone()).is_ok());
        }
        assert_eq!(random_density(3, 3, 4, 99).unwrap(), random_density(3, 3, 4, 99).unwrap());
        assert!(random_density(2, 2, 5, 0).is_err());
        assert!(random_density(2, 2, 0, 0).is_err());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let u1 = random_unitary(1, 3).unwrap();
        assert!((u1[(0, 0)].norm() - 1.0).abs() < 1e-15);
        let mut rng = SeededRng::new(12, 0);
        for i in 0..100 {
            let d = 1 + i % 6;
            let u = random_unitary_with(d, &mut rng).unwrap();
            let uu = &u.adjoint() * &u;
            assert!(uu.max_abs_diff(&ComplexMatrix::identity(d)) < 1e-10);
        }
    }

    #[test]
    fn haar_average_is_depolarizing() {
        // E[U X U†] = Tr[X] I/d for Haar U
        let d = 3;
        let x = random_density(3, 1, 2, 5).unwrap().into_operator().without_bipartite();
        let mut rng = SeededRng::new(77, 0);
        let n = 10_000;
        let mut acc = ComplexMatrix::zeros(d, d);
        for _ in 0..n {
            let u = random_unitary_with(d, &mut rng).unwrap();
            acc = &acc + x.conjugate_by(&u).unwrap().matrix();
        }
        let mean = acc.scale_real(1.0 / n as f64);
        let expected = ComplexMatrix::identity(d).scale_real(x.trace() / d as f64);
        assert!((&mean - &expected).frobenius_norm() < 1e-1);
    }
}
