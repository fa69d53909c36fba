//! Recomputes feasibility residuals and the duality gap from `(X, y, S)`
//! and the problem data alone.

use nalgebra::{DMatrix, SymmetricEigen};

use super::problem::{block_inner, SdpProblem, Sense};
use super::solver::SdpSolution;

/// Cone membership slack: `X, S ⪰ −PSD_SLACK`.
pub const PSD_SLACK: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Certificate {
    pub primal_obj: f64,
    pub dual_obj: f64,
    /// `|primal_obj − dual_obj|`.
    pub gap: f64,
    /// `max_i |⟨A_i, X⟩ − b_i|`.
    pub primal_residual: f64,
    /// Max-abs entry of the dual equation residual.
    pub dual_residual: f64,
    pub min_eig_x: f64,
    pub min_eig_s: f64,
}

impl Certificate {
    pub fn passes(&self, tol: f64) -> bool {
        self.gap <= tol
            && self.primal_residual <= tol
            && self.dual_residual <= tol
            && self.min_eig_x >= -PSD_SLACK
            && self.min_eig_s >= -PSD_SLACK
    }
}

fn min_eig(blocks: &[DMatrix<f64>]) -> f64 {
    blocks.iter().map(|b| SymmetricEigen::new((b + b.transpose()) * 0.5).eigenvalues.min()).fold(f64::INFINITY, f64::min)
}

pub fn check(p: &SdpProblem, x: &[DMatrix<f64>], y: &[f64], s: &[DMatrix<f64>]) -> Certificate {
    let c = p.objective.to_dense(&p.blocks);
    let primal_obj = block_inner(&c, x);
    let dual_obj: f64 = p.constraints.iter().zip(y).map(|(con, yi)| con.b * yi).sum();
    let primal_residual =
        p.apply_constraints(x).iter().zip(&p.constraints).map(|(ax, con)| (ax - con.b).abs()).fold(0.0, f64::max);
    let aty = p.adjoint_constraints(y);
    let sign = if p.sense == Sense::Maximize { -1.0 } else { 1.0 };
    let dual_residual = c.iter().zip(&aty).zip(s).map(|((cb, ab), sb)| ((cb - ab) * sign - sb).amax()).fold(0.0, f64::max);
    Certificate {
        primal_obj,
        dual_obj,
        gap: (primal_obj - dual_obj).abs(),
        primal_residual,
        dual_residual,
        min_eig_x: min_eig(x),
        min_eig_s: min_eig(s),
    }
}

pub fn check_solution(p: &SdpProblem, sol: &SdpSolution) -> Certificate {
    check(p, &sol.x, &sol.y, &sol.s)
}
