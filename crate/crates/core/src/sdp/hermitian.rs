//! Complex Hermitian variables on top of the real solver.
//!
//! A Hermitian `n×n` variable `H` lives in a real `2n×2n` PSD block `X`; its
//! value is read back as `H = (X₁₁ + X₂₂)/2 + i(X₂₁ − X₁₂)/2`. A real linear
//! functional `Tr[G H]` with Hermitian `G` becomes `⟨emb(G)/2, X⟩`, which
//! agrees with `Tr[G H]` for the extracted `H` whether or not `X` has the
//! embedded block pattern.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::problem::{Constraint, SdpProblem, Sense, SparseSymMatrix};
use super::solver::SdpSolution;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator};

/// `H ↦ [[Re H, −Im H], [Im H, Re H]]`.
pub fn complex_embed(h: &HermitianOperator) -> DMatrix<f64> {
    let n = h.dim();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            let z = h.get(r, c);
            out[(r, c)] = z.re;
            out[(r + n, c + n)] = z.re;
            out[(r, c + n)] = -z.im;
            out[(r + n, c)] = z.im;
        }
    }
    out
}

/// Inverse of [`complex_embed`] on embedded matrices; on a general real
/// symmetric `2n×2n` block it returns the Hermitian part described above.
pub fn complex_extract(x: &DMatrix<f64>) -> Result<HermitianOperator> {
    if x.nrows() != x.ncols() || !x.nrows().is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!("cannot extract from a {}x{} block", x.nrows(), x.ncols())));
    }
    let n = x.nrows() / 2;
    let m = ComplexMatrix::from_fn(n, n, |r, c| {
        C64::new(0.5 * (x[(r, c)] + x[(r + n, c + n)]), 0.5 * (x[(r + n, c)] - x[(r, c + n)]))
    });
    HermitianOperator::new(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HermitianVar {
    block: usize,
    n: usize,
    dims: Option<(usize, usize)>,
}

impl HermitianVar {
    pub fn dim(&self) -> usize {
        self.n
    }
}

/// A nonnegative real scalar held in a `1×1` block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScalarVar {
    block: usize,
}

/// One summand of a Hermitian matrix expression.
#[derive(Clone, Copy, Debug)]
pub enum MatrixTerm<'a> {
    /// `coeff · H`, or `coeff · T_B(H)` when `transpose_b` is set.
    Var { var: HermitianVar, coeff: f64, transpose_b: bool },
    /// `t · op` for a scalar variable `t`.
    Scaled { var: ScalarVar, op: &'a HermitianOperator },
}

/// Sparse complex matrix as `(row, col, value)` triplets.
type Triplets = Vec<(usize, usize, C64)>;

fn dense_triplets(g: &HermitianOperator) -> Triplets {
    let n = g.dim();
    let mut out = Vec::new();
    for r in 0..n {
        for c in 0..n {
            let z = g.get(r, c);
            if z.re != 0.0 || z.im != 0.0 {
                out.push((r, c, z));
            }
        }
    }
    out
}

fn transpose_b(g: &Triplets, (_, db): (usize, usize)) -> Triplets {
    g.iter()
        .map(|&(r, c, z)| {
            let (a, b) = (r / db, r % db);
            let (a2, b2) = (c / db, c % db);
            (a * db + b2, a2 * db + b, z)
        })
        .collect()
}

/// `Re H_kl` (`im = false`) or `Im H_kl` (`im = true`) as `Tr[G H]`.
fn entry_functional(k: usize, l: usize, im: bool) -> Triplets {
    let half = 0.5;
    match (k == l, im) {
        (true, _) => vec![(k, k, C64::new(1.0, 0.0))],
        (false, false) => vec![(l, k, C64::new(half, 0.0)), (k, l, C64::new(half, 0.0))],
        (false, true) => vec![(l, k, C64::new(0.0, -half)), (k, l, C64::new(0.0, half))],
    }
}

/// `Tr[G X]` for sparse `G` and a Hermitian operator.
fn triplet_trace(g: &Triplets, x: &HermitianOperator) -> f64 {
    g.iter().map(|&(r, c, z)| (z * x.get(c, r)).re).sum()
}

/// Adds `coeff · emb(G)/2` on the variable's block.
fn push_functional(m: &mut SparseSymMatrix, var: HermitianVar, g: &Triplets, coeff: f64) {
    let n = var.n;
    for &(r, c, z) in g {
        let (re, im) = (coeff * z.re * 0.5, coeff * z.im * 0.5);
        let cells = [(r, c, re), (r + n, c + n, re), (r, c + n, -im), (r + n, c, im)];
        for (rr, cc, v) in cells {
            if rr >= cc && v != 0.0 {
                m.push(var.block, rr, cc, v);
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct HermitianSdpBuilder {
    blocks: Vec<usize>,
    objective: SparseSymMatrix,
    constraints: Vec<Constraint>,
    sense: Sense,
}

impl HermitianSdpBuilder {
    pub fn new(sense: Sense) -> Self {
        Self { blocks: Vec::new(), objective: SparseSymMatrix::new(), constraints: Vec::new(), sense }
    }

    /// A PSD Hermitian variable of size `n`.
    pub fn hermitian(&mut self, n: usize) -> HermitianVar {
        self.blocks.push(2 * n);
        HermitianVar { block: self.blocks.len() - 1, n, dims: None }
    }

    /// A PSD Hermitian variable on `C^{d_A} ⊗ C^{d_B}`; needed for `T_B`
    /// terms.
    pub fn hermitian_bipartite(&mut self, dim_a: usize, dim_b: usize) -> HermitianVar {
        let mut v = self.hermitian(dim_a * dim_b);
        v.dims = Some((dim_a, dim_b));
        v
    }

    pub fn scalar(&mut self) -> ScalarVar {
        self.blocks.push(1);
        ScalarVar { block: self.blocks.len() - 1 }
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Adds `coeff · Tr[G H]` to the objective.
    pub fn objective_trace(&mut self, var: HermitianVar, g: &HermitianOperator, coeff: f64) -> Result<()> {
        check_dim(var, g)?;
        push_functional(&mut self.objective, var, &dense_triplets(g), coeff);
        Ok(())
    }

    pub fn objective_scalar(&mut self, var: ScalarVar, coeff: f64) {
        self.objective.push(var.block, 0, 0, coeff);
    }

    /// `Σ c_k Tr[G_k H_k] + Σ c_j t_j = rhs`.
    pub fn scalar_constraint(
        &mut self,
        traces: &[(HermitianVar, &HermitianOperator, f64)],
        scalars: &[(ScalarVar, f64)],
        rhs: f64,
    ) -> Result<()> {
        let mut a = SparseSymMatrix::new();
        for &(var, g, c) in traces {
            check_dim(var, g)?;
            push_functional(&mut a, var, &dense_triplets(g), c);
        }
        for &(var, c) in scalars {
            a.push(var.block, 0, 0, c);
        }
        self.constraints.push(Constraint { a, b: rhs });
        Ok(())
    }

    /// Hermitian equality `Σ terms = rhs`, one real constraint per real
    /// degree of freedom of the lower triangle.
    pub fn matrix_equality(&mut self, terms: &[MatrixTerm], rhs: &HermitianOperator) -> Result<()> {
        let n = rhs.dim();
        for t in terms {
            match t {
                MatrixTerm::Var { var, transpose_b, .. } => {
                    if var.n != n {
                        return Err(Error::DimensionMismatch(format!("term of size {} in equality of size {n}", var.n)));
                    }
                    if *transpose_b && var.dims.is_none() {
                        return Err(Error::MissingBipartite);
                    }
                }
                MatrixTerm::Scaled { op, .. } => {
                    if op.dim() != n {
                        return Err(Error::DimensionMismatch(format!("term of size {} in equality of size {n}", op.dim())));
                    }
                }
            }
        }
        for k in 0..n {
            for l in 0..=k {
                for im in [false, true] {
                    if im && k == l {
                        continue;
                    }
                    let g = entry_functional(k, l, im);
                    let mut a = SparseSymMatrix::new();
                    for t in terms {
                        match *t {
                            MatrixTerm::Var { var, coeff, transpose_b: false } => push_functional(&mut a, var, &g, coeff),
                            MatrixTerm::Var { var, coeff, transpose_b: true } => {
                                let dims = var.dims.ok_or(Error::MissingBipartite)?;
                                push_functional(&mut a, var, &transpose_b(&g, dims), coeff)
                            }
                            MatrixTerm::Scaled { var, op } => {
                                let v = triplet_trace(&g, op);
                                if v != 0.0 {
                                    a.push(var.block, 0, 0, v);
                                }
                            }
                        }
                    }
                    let b = triplet_trace(&g, rhs);
                    a.canonicalize();
                    if a.is_empty() {
                        if b.abs() > 1e-14 {
                            return Err(Error::Formulation(format!("equality entry ({k}, {l}) has no terms but rhs {b}")));
                        }
                        continue;
                    }
                    self.constraints.push(Constraint { a, b });
                }
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<SdpProblem> {
        SdpProblem::new(self.blocks.clone(), self.objective.clone(), self.constraints.clone(), self.sense)
    }

    pub fn hermitian_value(&self, sol: &SdpSolution, var: HermitianVar) -> Result<HermitianOperator> {
        let h = complex_extract(&sol.x[var.block])?;
        match var.dims {
            Some((a, b)) => h.with_bipartite(a, b),
            None => Ok(h),
        }
    }

    pub fn scalar_value(&self, sol: &SdpSolution, var: ScalarVar) -> f64 {
        sol.x[var.block][(0, 0)]
    }
}

fn check_dim(var: HermitianVar, g: &HermitianOperator) -> Result<()> {
    if g.dim() != var.n {
        return Err(Error::DimensionMismatch(format!("functional of size {} on a variable of size {}", g.dim(), var.n)));
    }
    Ok(())
}
