//! Infeasible-start primal–dual path following with the HKM direction and
//! Mehrotra predictor–corrector steps.
//!
//! Internally every problem is a minimization `min ⟨C, X⟩, A(X) = b,
//! X ⪰ 0` with dual `max bᵀy, C − Aᵀy = S ⪰ 0`; maximization problems are
//! solved as `min ⟨−C, X⟩` and mapped back on return.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen, LU};

use super::problem::{block_inner, SdpProblem, Sense};
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 100;
const STEP_FRACTION_BASE: f64 = 0.9;
const LAG_SIGMA: f64 = 0.5;
const REFINE_STEPS: usize = 2;
/// Iterations without a better merit before giving up.
const STALL_ITERATIONS: usize = 15;
const BLOWUP: f64 = 1e12;
const MIN_STEP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

impl std::fmt::Display for SdpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SdpStatus::Optimal => "optimal",
            SdpStatus::Infeasible => "infeasible",
            SdpStatus::NumericalFailure => "numerical_failure",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Bound on the absolute duality gap and on both residuals (max-abs).
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, max_iterations: MAX_ITERATIONS }
    }
}

/// Solver output in the problem's own sense. For `Minimize` the dual slack is
/// `S = C − Σ y_i A_i`; for `Maximize` it is `S = Σ y_i A_i − C`. The dual
/// objective is `bᵀy` in both cases.
#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub x: Vec<DMatrix<f64>>,
    pub y: Vec<f64>,
    pub s: Vec<DMatrix<f64>>,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub status: SdpStatus,
    pub iterations: usize,
}

impl SdpSolution {
    /// Turns a non-optimal status into an error carrying the diagnostics.
    pub fn require_optimal(self) -> Result<Self> {
        if self.status == SdpStatus::Optimal {
            return Ok(self);
        }
        Err(Error::Solver {
            status: self.status.to_string(),
            primal_residual: self.primal_residual,
            dual_residual: self.dual_residual,
            gap: self.gap,
        })
    }
}

pub fn solve(p: &SdpProblem, tol: f64) -> Result<SdpSolution> {
    solve_with(p, &SolverOptions { tol, ..SolverOptions::default() })
}

enum Factor {
    Chol(Cholesky<f64, Dyn>),
    Lu(LU<f64, Dyn, Dyn>),
}

/// Factored Schur complement; solves are refined against the unfactored matrix.
struct SchurFactor {
    m: DMatrix<f64>,
    factor: Factor,
}

impl SchurFactor {
    fn new(m: DMatrix<f64>) -> Result<Self> {
        if let Some(c) = Cholesky::new(m.clone()) {
            return Ok(Self { m, factor: Factor::Chol(c) });
        }
        let mut bumped = m.clone();
        let bump = 1e-14 * m.diagonal().amax().max(1.0);
        for i in 0..m.nrows() {
            bumped[(i, i)] += bump;
        }
        if let Some(c) = Cholesky::new(bumped.clone()) {
            return Ok(Self { m, factor: Factor::Chol(c) });
        }
        let lu = m.clone().lu();
        if !lu.is_invertible() {
            return Err(Error::Numerical("Schur complement is singular".into()));
        }
        Ok(Self { m, factor: Factor::Lu(lu) })
    }

    fn solve_once(&self, rhs: &DVector<f64>) -> Option<DVector<f64>> {
        match &self.factor {
            Factor::Chol(c) => Some(c.solve(rhs)),
            Factor::Lu(lu) => lu.solve(rhs),
        }
    }

    fn solve(&self, rhs: &DVector<f64>) -> Option<DVector<f64>> {
        let mut x = self.solve_once(rhs)?;
        for _ in 0..REFINE_STEPS {
            let r = rhs - &self.m * &x;
            x += self.solve_once(&r)?;
        }
        Some(x)
    }
}

/// Full-orientation constraint entries `(constraint, [(r, s, v)])`, one list
/// per block.
type Touching = Vec<Vec<(usize, Vec<(usize, usize, f64)>)>>;

struct Workspace<'a> {
    p: &'a SdpProblem,
    c: Vec<DMatrix<f64>>,
    b: DVector<f64>,
    touching: Touching,
}

impl<'a> Workspace<'a> {
    fn new(p: &'a SdpProblem) -> Self {
        let sign = if p.sense == Sense::Maximize { -1.0 } else { 1.0 };
        let mut c = p.objective.to_dense(&p.blocks);
        for blk in &mut c {
            *blk *= sign;
        }
        let b = DVector::from_iterator(p.num_constraints(), p.constraints.iter().map(|c| c.b));
        let mut touching: Touching = vec![Vec::new(); p.blocks.len()];
        for (i, con) in p.constraints.iter().enumerate() {
            let mut per_block: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); p.blocks.len()];
            for e in con.a.entries() {
                per_block[e.block].push((e.row, e.col, e.value));
                if e.row != e.col {
                    per_block[e.block].push((e.col, e.row, e.value));
                }
            }
            for (blk, entries) in per_block.into_iter().enumerate() {
                if !entries.is_empty() {
                    touching[blk].push((i, entries));
                }
            }
        }
        Self { p, c, b, touching }
    }

    fn a_of(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_vec(self.p.apply_constraints(x))
    }

    fn at_of(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        self.p.adjoint_constraints(y.as_slice())
    }

    /// `M_ij = Σ_b Tr[A_i X A_j S⁻¹]`.
    fn schur(&self, x: &[DMatrix<f64>], sinv: &[DMatrix<f64>]) -> DMatrix<f64> {
        let m = self.p.num_constraints();
        let mut out = DMatrix::zeros(m, m);
        for (blk, list) in self.touching.iter().enumerate() {
            let n = self.p.blocks[blk];
            let (xb, sb) = (&x[blk], &sinv[blk]);
            let mut g = DMatrix::zeros(n, n);
            for (jj, (j, ej)) in list.iter().enumerate() {
                g.fill(0.0);
                for &(r, s, v) in ej {
                    // S⁻¹ is symmetric, so its row s is its column s
                    g.ger(v, &xb.column(r), &sb.column(s), 1.0);
                }
                for (i, ei) in &list[jj..] {
                    let val: f64 = ei.iter().map(|&(r, s, v)| v * g[(r, s)]).sum();
                    out[(*i, *j)] += val;
                    if i != j {
                        out[(*j, *i)] += val;
                    }
                }
            }
        }
        out
    }
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn max_abs(blocks: &[DMatrix<f64>]) -> f64 {
    blocks.iter().map(|b| b.amax()).fold(0.0, f64::max)
}

fn inverse_pd(blocks: &[DMatrix<f64>]) -> Option<Vec<DMatrix<f64>>> {
    blocks.iter().map(|b| Cholesky::new(b.clone()).map(|c| sym(&c.inverse()))).collect()
}

/// Largest `α` with `X + α dX ⪰ 0` (may be infinite).
fn max_step(x: &[DMatrix<f64>], dx: &[DMatrix<f64>]) -> f64 {
    let mut alpha = f64::INFINITY;
    for (xb, db) in x.iter().zip(dx) {
        let Some(ch) = Cholesky::new(xb.clone()) else {
            return 0.0;
        };
        let l = ch.l();
        let Some(w) = l.solve_lower_triangular(db) else {
            return 0.0;
        };
        let Some(t) = l.solve_lower_triangular(&w.transpose()) else {
            return 0.0;
        };
        let lmin = SymmetricEigen::new(sym(&t)).eigenvalues.min();
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    alpha
}

struct Direction {
    dx: Vec<DMatrix<f64>>,
    dy: DVector<f64>,
    ds: Vec<DMatrix<f64>>,
}

#[allow(clippy::too_many_arguments)]
fn direction(
    w: &Workspace,
    factor: &SchurFactor,
    x: &[DMatrix<f64>],
    sinv: &[DMatrix<f64>],
    rp: &DVector<f64>,
    rd: &[DMatrix<f64>],
    rc: &[DMatrix<f64>],
) -> Result<Direction> {
    let xrs: Vec<DMatrix<f64>> = x.iter().zip(rd).zip(sinv).map(|((xb, rb), sb)| xb * rb * sb).collect();
    let rhs = rp - w.a_of(rc) + w.a_of(&xrs);
    let dy = factor.solve(&rhs).ok_or_else(|| Error::Numerical("Schur solve failed".into()))?;
    let aty = w.at_of(&dy);
    let ds: Vec<DMatrix<f64>> = rd.iter().zip(&aty).map(|(r, a)| r - a).collect();
    let dx = rc.iter().zip(x).zip(&ds).zip(sinv).map(|(((r, xb), sb_d), si)| r - sym(&(xb * sb_d * si))).collect();
    Ok(Direction { dx, dy, ds })
}

fn initial_point(w: &Workspace) -> (Vec<DMatrix<f64>>, DVector<f64>, Vec<DMatrix<f64>>) {
    let p = w.p;
    let mut x = Vec::with_capacity(p.blocks.len());
    let mut s = Vec::with_capacity(p.blocks.len());
    for (blk, &n) in p.blocks.iter().enumerate() {
        let nf = n as f64;
        let mut xi = 10f64.max(nf.sqrt());
        let mut eta = 10f64.max(nf.sqrt()).max(w.c[blk].norm());
        for (i, entries) in &w.touching[blk] {
            let na = entries.iter().map(|e| e.2 * e.2).sum::<f64>().sqrt();
            xi = xi.max(nf * (1.0 + w.b[*i].abs()) / (1.0 + na));
            eta = eta.max(na);
        }
        x.push(DMatrix::identity(n, n) * xi);
        s.push(DMatrix::identity(n, n) * eta);
    }
    (x, DVector::zeros(p.num_constraints()), s)
}

pub fn solve_with(p: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::InvalidInput(format!("solver tolerance {} must be positive", opts.tol)));
    }
    let w = Workspace::new(p);
    let order = p.order() as f64;
    let (mut x, mut y, mut s) = initial_point(&w);
    let mut status = SdpStatus::NumericalFailure;
    let mut iterations = 0;
    let mut best = (f64::INFINITY, 0, x.clone(), y.clone(), s.clone());

    let rp0 = (&w.b - w.a_of(&x)).amax().max(1.0);
    let mu0 = block_inner(&x, &s) / order;

    for iter in 0..=opts.max_iterations {
        iterations = iter;
        let rp = &w.b - w.a_of(&x);
        let aty = w.at_of(&y);
        let rd: Vec<DMatrix<f64>> = w.c.iter().zip(&aty).zip(&s).map(|((c, a), sb)| c - a - sb).collect();
        let pobj = block_inner(&w.c, &x);
        let dobj = w.b.dot(&y);
        let merit = rp.amax().max(max_abs(&rd)).max((pobj - dobj).abs());
        if merit <= opts.tol {
            status = SdpStatus::Optimal;
            break;
        }
        if merit < best.0 {
            best = (merit, iter, x.clone(), y.clone(), s.clone());
        } else if iter >= best.1 + STALL_ITERATIONS {
            break;
        }
        if max_abs(&x) > BLOWUP || y.amax() > BLOWUP || max_abs(&s) > BLOWUP {
            status = SdpStatus::Infeasible;
            break;
        }
        if iter == opts.max_iterations {
            break;
        }
        let mu = block_inner(&x, &s) / order;
        let Some(sinv) = inverse_pd(&s) else {
            break;
        };
        let Ok(factor) = SchurFactor::new(w.schur(&x, &sinv)) else {
            break;
        };

        let rc_pred: Vec<DMatrix<f64>> = x.iter().map(|xb| -xb).collect();
        let Ok(pred) = direction(&w, &factor, &x, &sinv, &rp, &rd, &rc_pred) else {
            break;
        };
        let ap = max_step(&x, &pred.dx).min(1.0);
        let ad = max_step(&s, &pred.ds).min(1.0);
        let mut aff = 0.0;
        for (((xb, dxb), sb), dsb) in x.iter().zip(&pred.dx).zip(&s).zip(&pred.ds) {
            aff += (xb + dxb * ap).dot(&(sb + dsb * ad));
        }
        let mu_aff = aff / order;
        let expon = (3.0 * ap.min(ad).powi(2)).max(1.0);
        let mut sigma = (mu_aff / mu).clamp(0.0, 1.0).powf(expon);
        let lag = (rp.amax() / rp0) / (mu / mu0);
        if lag > 1.0 {
            sigma = sigma.max(LAG_SIGMA);
        }
        let gamma = STEP_FRACTION_BASE + 0.09 * ap.min(ad);

        let rc: Vec<DMatrix<f64>> = x
            .iter()
            .zip(&sinv)
            .zip(pred.dx.iter().zip(&pred.ds))
            .map(|((xb, si), (dxa, dsa))| si * (sigma * mu) - xb - sym(&(dxa * dsa * si)))
            .collect();
        let Ok(corr) = direction(&w, &factor, &x, &sinv, &rp, &rd, &rc) else {
            break;
        };
        let ap = (gamma * max_step(&x, &corr.dx)).min(1.0);
        let ad = (gamma * max_step(&s, &corr.ds)).min(1.0);
        if ap < MIN_STEP && ad < MIN_STEP {
            break;
        }
        for (xb, d) in x.iter_mut().zip(&corr.dx) {
            *xb += d * ap;
            *xb = sym(xb);
        }
        y += &corr.dy * ad;
        for (sb, d) in s.iter_mut().zip(&corr.ds) {
            *sb += d * ad;
            *sb = sym(sb);
        }
    }

    if status == SdpStatus::NumericalFailure && best.0.is_finite() {
        (_, _, x, y, s) = best;
    }

    // report in the caller's sense
    let y_user: Vec<f64> = match p.sense {
        Sense::Minimize => y.iter().copied().collect(),
        Sense::Maximize => y.iter().map(|v| -v).collect(),
    };
    let cert = super::certificate::check(p, &x, &y_user, &s);
    Ok(SdpSolution {
        x,
        y: y_user,
        s,
        primal_obj: cert.primal_obj,
        dual_obj: cert.dual_obj,
        gap: cert.gap,
        primal_residual: cert.primal_residual,
        dual_residual: cert.dual_residual,
        status,
        iterations,
    })
}
