use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Symmetry tolerance for dense block input.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Minimize,
    Maximize,
}

/// One lower-triangle entry of a block-diagonal symmetric matrix. An
/// off-diagonal entry stands for both `(row, col)` and `(col, row)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymEntry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// Sparse block-diagonal symmetric matrix, lower triangle only.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseSymMatrix {
    entries: Vec<SymEntry>,
}

impl SparseSymMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `value` at `(row, col)` and its mirror. Entries given above the
    /// diagonal are flipped to the lower triangle.
    pub fn push(&mut self, block: usize, row: usize, col: usize, value: f64) {
        let (row, col) = if row >= col { (row, col) } else { (col, row) };
        self.entries.push(SymEntry { block, row, col, value });
    }

    pub fn entries(&self) -> &[SymEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sorts and merges duplicate positions, dropping exact zeros.
    pub fn canonicalize(&mut self) {
        self.entries.sort_by_key(|e| (e.block, e.row, e.col));
        let mut merged: Vec<SymEntry> = Vec::with_capacity(self.entries.len());
        for e in self.entries.drain(..) {
            match merged.last_mut() {
                Some(last) if (last.block, last.row, last.col) == (e.block, e.row, e.col) => last.value += e.value,
                _ => merged.push(e),
            }
        }
        merged.retain(|e| e.value != 0.0);
        self.entries = merged;
    }

    /// Reads the lower triangle of a dense symmetric block.
    pub fn from_dense_block(block: usize, m: &DMatrix<f64>) -> Result<Self> {
        check_symmetric(m)?;
        let mut out = Self::new();
        for c in 0..m.ncols() {
            for r in c..m.nrows() {
                if m[(r, c)] != 0.0 {
                    out.push(block, r, c, m[(r, c)]);
                }
            }
        }
        Ok(out)
    }

    /// Expands to dense blocks.
    pub fn to_dense(&self, blocks: &[usize]) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = blocks.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for e in &self.entries {
            let m = &mut out[e.block];
            m[(e.row, e.col)] += e.value;
            if e.row != e.col {
                m[(e.col, e.row)] += e.value;
            }
        }
        out
    }

    /// `⟨self, X⟩ = Σ_b Tr[self_b X_b]`.
    pub fn inner(&self, x: &[DMatrix<f64>]) -> f64 {
        self.entries
            .iter()
            .map(|e| {
                let v = x[e.block][(e.row, e.col)];
                if e.row == e.col {
                    e.value * v
                } else {
                    e.value * (v + x[e.block][(e.col, e.row)])
                }
            })
            .sum()
    }

    /// Adds `c · self` into dense blocks.
    pub fn add_scaled_to(&self, c: f64, out: &mut [DMatrix<f64>]) {
        for e in &self.entries {
            let m = &mut out[e.block];
            m[(e.row, e.col)] += c * e.value;
            if e.row != e.col {
                m[(e.col, e.row)] += c * e.value;
            }
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| if e.row == e.col { e.value * e.value } else { 2.0 * e.value * e.value }).sum::<f64>().sqrt()
    }
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("block is {}x{}", m.nrows(), m.ncols())));
    }
    let dev = (m - m.transpose()).amax();
    if dev > SYMMETRY_TOL * m.amax().max(1.0) {
        return Err(Error::InvalidInput(format!("block is not symmetric (deviation {dev:e})")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub a: SparseSymMatrix,
    pub b: f64,
}

/// `min/max ⟨C, X⟩  s.t.  ⟨A_i, X⟩ = b_i,  X ⪰ 0` over block-diagonal `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem {
    pub blocks: Vec<usize>,
    pub objective: SparseSymMatrix,
    pub constraints: Vec<Constraint>,
    pub sense: Sense,
}

impl SdpProblem {
    pub fn new(
        blocks: Vec<usize>,
        mut objective: SparseSymMatrix,
        mut constraints: Vec<Constraint>,
        sense: Sense,
    ) -> Result<Self> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::InvalidDimension("SDP blocks must be nonempty and positive".into()));
        }
        let check = |m: &SparseSymMatrix, what: &str| -> Result<()> {
            for e in m.entries() {
                if e.block >= blocks.len() || e.row >= blocks[e.block] || e.col > e.row {
                    return Err(Error::InvalidInput(format!("{what} entry ({}, {}, {}) out of range", e.block, e.row, e.col)));
                }
                if !e.value.is_finite() {
                    return Err(Error::InvalidInput(format!("{what} has a non-finite entry")));
                }
            }
            Ok(())
        };
        check(&objective, "objective")?;
        objective.canonicalize();
        for (i, c) in constraints.iter_mut().enumerate() {
            check(&c.a, &format!("constraint {i}"))?;
            if !c.b.is_finite() {
                return Err(Error::InvalidInput(format!("constraint {i} has non-finite rhs")));
            }
            c.a.canonicalize();
        }
        let dof: usize = blocks.iter().map(|n| n * (n + 1) / 2).sum();
        if constraints.len() > dof {
            return Err(Error::Formulation(format!("{} constraints exceed the {dof} degrees of freedom", constraints.len())));
        }
        Ok(Self { blocks, objective, constraints, sense })
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Total order `Σ n_b` of the block-diagonal variable.
    pub fn order(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// `A(X)`.
    pub fn apply_constraints(&self, x: &[DMatrix<f64>]) -> Vec<f64> {
        self.constraints.iter().map(|c| c.a.inner(x)).collect()
    }

    /// `Σ y_i A_i` as dense blocks.
    pub fn adjoint_constraints(&self, y: &[f64]) -> Vec<DMatrix<f64>> {
        let mut out = self.zero_blocks();
        for (c, &yi) in self.constraints.iter().zip(y) {
            c.a.add_scaled_to(yi, &mut out);
        }
        out
    }

    pub fn zero_blocks(&self) -> Vec<DMatrix<f64>> {
        self.blocks.iter().map(|&n| DMatrix::zeros(n, n)).collect()
    }
}

/// `Σ_b Tr[A_b B_b]` for dense blocks.
pub fn block_inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}
