//! Hypothesis testing relative entropy
//! `D_H^ε(ω‖τ) = −log₂ min { Tr[Λτ] : 0 ⪯ Λ ⪯ I, Tr[Λω] = 1 − ε }`,
//! computed three ways: Neyman–Pearson bisection, a diagonal LP, and an SDP.
//!
//! `+∞` is returned (as `f64::INFINITY`) when a zero-cost test exists: for
//! `ε = 1`, for `τ = 0`, and when `ω` puts weight `≥ 1 − ε` on the kernel of
//! `τ`.

use crate::error::{Error, Result};
use crate::linalg::{support_projector, BipartiteState, HermitianOperator, TIE_TOL};
use crate::sdp::{self, HermitianSdpBuilder, MatrixTerm, SdpProblem, Sense};

pub const MAX_BISECTIONS: usize = 200;
const STATE_TRACE_TOL: f64 = 1e-8;
const PSD_TOL: f64 = 1e-10;
/// Relative threshold below which eigenvalues of `τ` count as kernel.
const SUPPORT_TOL: f64 = 1e-12;
/// Allowed mismatch of `Tr[Λω]` before falling back to bracket mixing.
const TYPE1_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisTestResult {
    /// `D_H^ε` in bits; `f64::INFINITY` for a zero-cost test.
    pub value_bits: f64,
    pub optimal_test: HermitianOperator,
    pub threshold_mu: f64,
    /// Weight on the boundary eigenspace of `ω − μτ`.
    pub boundary_weight: f64,
    /// `Tr[Λω]`.
    pub achieved_type1: f64,
    /// `Tr[Λτ]`.
    pub type2: f64,
}

fn bits(cost: f64) -> f64 {
    if cost > 0.0 {
        0.0 - cost.log2()
    } else {
        f64::INFINITY
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidInput(format!("eps = {eps} outside [0, 1]")));
    }
    Ok(())
}

fn check_pair(omega: &HermitianOperator, tau: &HermitianOperator) -> Result<()> {
    if omega.dim() != tau.dim() {
        return Err(Error::DimensionMismatch(format!("omega has dimension {}, tau {}", omega.dim(), tau.dim())));
    }
    if (omega.trace() - 1.0).abs() > STATE_TRACE_TOL {
        return Err(Error::InvalidInput(format!("omega has trace {}, expected 1", omega.trace())));
    }
    for (x, what) in [(omega, "omega"), (tau, "tau")] {
        let e = x.eig()?;
        if e.min_eigenvalue() < -PSD_TOL * e.max_eigenvalue().abs().max(1.0) {
            return Err(Error::InvalidInput(format!("{what} is not PSD (min eigenvalue {:e})", e.min_eigenvalue())));
        }
    }
    Ok(())
}

fn sentinel(test: HermitianOperator, omega: &HermitianOperator, tau: &HermitianOperator) -> HypothesisTestResult {
    HypothesisTestResult {
        value_bits: f64::INFINITY,
        achieved_type1: test.inner(omega),
        type2: test.inner(tau),
        optimal_test: test,
        threshold_mu: f64::INFINITY,
        boundary_weight: 0.0,
    }
}

/// `(Λ, Tr[Λω])` for the strict positive part of `ω − μτ`.
fn positive_test(omega: &HermitianOperator, tau: &HermitianOperator, mu: f64, tol: f64) -> Result<(HermitianOperator, f64)> {
    let diff = omega.combine(1.0, tau, -mu)?;
    let e = diff.eig()?;
    let p = HermitianOperator::new(e.spectral_projector(|l| l > tol))?;
    let w = p.inner(omega);
    Ok((p, w))
}

/// Neyman–Pearson test by bisection on `μ` with fractional boundary weight.
pub fn dh_neyman_pearson(omega: &HermitianOperator, tau: &HermitianOperator, eps: f64) -> Result<HypothesisTestResult> {
    check_eps(eps)?;
    check_pair(omega, tau)?;
    let dims = omega.dims();
    let attach = |x: HermitianOperator| -> Result<HermitianOperator> {
        match dims {
            Some((a, b)) => x.with_bipartite(a, b),
            None => Ok(x),
        }
    };
    let n = omega.dim();
    let target = 1.0 - eps;
    if eps == 1.0 {
        return Ok(sentinel(attach(HermitianOperator::zeros(n))?, omega, tau));
    }

    let tau_eig = tau.eig()?;
    let tau_max = tau_eig.max_eigenvalue();
    if tau_max <= 0.0 {
        return Ok(sentinel(attach(HermitianOperator::identity(n).scale(target))?, omega, tau));
    }
    let supp_tol = SUPPORT_TOL * tau_max;
    let kernel = HermitianOperator::new(tau_eig.spectral_projector(|l| l <= supp_tol))?;
    let kernel_weight = kernel.inner(omega);
    if kernel_weight >= target {
        let test = kernel.scale(target / kernel_weight);
        return Ok(sentinel(attach(test)?, omega, tau));
    }

    if eps == 0.0 {
        let test = attach(support_projector(omega, PSD_TOL)?)?;
        let type2 = test.inner(tau);
        return Ok(HypothesisTestResult {
            value_bits: bits(type2),
            achieved_type1: test.inner(omega),
            type2,
            optimal_test: test,
            threshold_mu: 0.0,
            boundary_weight: 0.0,
        });
    }

    let omega_max = omega.eig()?.max_eigenvalue();
    let tau_min_pos = tau_eig.eigenvalues.iter().copied().filter(|&l| l > supp_tol).fold(f64::INFINITY, f64::min);
    let mut lo = 0.0;
    let mut hi = 2.0 * omega_max / tau_min_pos;
    let scale_at = |mu: f64| TIE_TOL * omega_max.max(mu * tau_max).max(1.0);
    let mut doublings = 0;
    while positive_test(omega, tau, hi, scale_at(hi))?.1 >= target {
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_BISECTIONS || !hi.is_finite() {
            return Err(Error::NoConvergence { routine: "neyman-pearson bracket", iterations: doublings, residual: hi });
        }
    }
    let mut converged = false;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi {
            converged = true;
            break;
        }
        if positive_test(omega, tau, mid, scale_at(mid))?.1 >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if !converged && hi - lo > 1e-12 * hi {
        return Err(Error::NoConvergence { routine: "neyman-pearson bisection", iterations: MAX_BISECTIONS, residual: hi - lo });
    }

    let mu = 0.5 * (lo + hi);
    let tol = scale_at(mu);
    let diff = omega.combine(1.0, tau, -mu)?;
    let e = diff.eig()?;
    let plus = HermitianOperator::new(e.spectral_projector(|l| l > tol))?;
    let zero = HermitianOperator::new(e.spectral_projector(|l| l.abs() <= tol))?;
    let (w_plus, w_zero) = (plus.inner(omega), zero.inner(omega));
    let t = if w_zero > 0.0 { ((target - w_plus) / w_zero).clamp(0.0, 1.0) } else { 0.0 };
    let mut test = plus.combine(1.0, &zero, t)?;
    let mut boundary_weight = t;
    if (test.inner(omega) - target).abs() > TYPE1_TOL {
        // mix the tests at the two bracket ends so the type-I constraint is met exactly
        let (t_lo, w_lo) = positive_test(omega, tau, lo, scale_at(lo))?;
        let (t_hi, w_hi) = positive_test(omega, tau, hi, scale_at(hi))?;
        let theta = if w_lo > w_hi { ((target - w_hi) / (w_lo - w_hi)).clamp(0.0, 1.0) } else { 1.0 };
        test = t_lo.combine(theta, &t_hi, 1.0 - theta)?;
        boundary_weight = theta;
    }
    let test = attach(test)?;
    let type2 = test.inner(tau);
    Ok(HypothesisTestResult {
        value_bits: bits(type2),
        achieved_type1: test.inner(omega),
        type2,
        optimal_test: test,
        threshold_mu: mu,
        boundary_weight,
    })
}

/// Convenience wrapper for a state against a state.
pub fn dh_states(omega: &BipartiteState, tau: &BipartiteState, eps: f64) -> Result<HypothesisTestResult> {
    dh_neyman_pearson(omega, tau, eps)
}

/// Commuting case: `p` and `q` are the diagonals of `ω` and `τ`. Solved as a
/// fractional knapsack, filling indices in decreasing `p_i / q_i`.
pub fn dh_lp_oracle(p: &[f64], q: &[f64], eps: f64) -> Result<f64> {
    check_eps(eps)?;
    if p.len() != q.len() || p.is_empty() {
        return Err(Error::DimensionMismatch(format!("p has {} entries, q {}", p.len(), q.len())));
    }
    if p.iter().chain(q).any(|&x| x.is_nan() || x < 0.0 || !x.is_finite()) {
        return Err(Error::InvalidInput("p and q must be finite and nonnegative".into()));
    }
    if (p.iter().sum::<f64>() - 1.0).abs() > STATE_TRACE_TOL {
        return Err(Error::InvalidInput("p must sum to 1".into()));
    }
    let mut need = 1.0 - eps;
    if need <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let mut idx: Vec<usize> = (0..p.len()).filter(|&i| p[i] > 0.0).collect();
    // p_a/q_a > p_b/q_b  ⇔  p_a q_b > p_b q_a, which also ranks q = 0 first
    idx.sort_by(|&a, &b| (p[b] * q[a]).total_cmp(&(p[a] * q[b])));
    let mut cost = 0.0;
    for i in idx {
        if need <= 0.0 {
            break;
        }
        let take = (need / p[i]).min(1.0);
        cost += take * q[i];
        need -= take * p[i];
    }
    Ok(bits(cost))
}

/// How the type-I constraint enters the SDP.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeOneForm {
    /// `Tr[Λω] = 1 − ε`.
    Equality,
    /// `Tr[Λω] ≥ 1 − ε`.
    AtLeast,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DhSdpResult {
    /// `−log₂` of the primal optimum.
    pub value_bits: f64,
    /// `−log₂` of the dual optimum.
    pub dual_value_bits: f64,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub gap: f64,
    pub iterations: usize,
}

/// `min Tr[Λτ]  s.t.  Λ + W = I,  Tr[Λω] = 1 − ε,  Λ, W ⪰ 0`.
pub fn dh_sdp(omega: &HermitianOperator, tau: &HermitianOperator, eps: f64, tol: f64) -> Result<DhSdpResult> {
    dh_sdp_with(omega, tau, eps, TypeOneForm::Equality, tol)
}

pub fn dh_sdp_with(
    omega: &HermitianOperator,
    tau: &HermitianOperator,
    eps: f64,
    form: TypeOneForm,
    tol: f64,
) -> Result<DhSdpResult> {
    let problem = build_dh_sdp(omega, tau, eps, form)?;
    let sol = sdp::solve(&problem, tol)?.require_optimal()?;
    Ok(DhSdpResult {
        value_bits: bits(sol.primal_obj),
        dual_value_bits: bits(sol.dual_obj),
        primal_obj: sol.primal_obj,
        dual_obj: sol.dual_obj,
        gap: sol.gap,
        iterations: sol.iterations,
    })
}

/// Assemble the D_H SDP without solving it.
pub fn build_dh_sdp(omega: &HermitianOperator, tau: &HermitianOperator, eps: f64, form: TypeOneForm) -> Result<SdpProblem> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Precondition(format!("dh_sdp needs 0 < eps < 1, got {eps}")));
    }
    check_pair(omega, tau)?;
    let n = omega.dim();
    let mut b = HermitianSdpBuilder::new(Sense::Minimize);
    let lambda = b.hermitian(n);
    let slack = b.hermitian(n);
    b.objective_trace(lambda, tau, 1.0)?;
    b.matrix_equality(
        &[
            MatrixTerm::Var { var: lambda, coeff: 1.0, transpose_b: false },
            MatrixTerm::Var { var: slack, coeff: 1.0, transpose_b: false },
        ],
        &HermitianOperator::identity(n),
    )?;
    match form {
        TypeOneForm::Equality => b.scalar_constraint(&[(lambda, omega, 1.0)], &[], 1.0 - eps)?,
        TypeOneForm::AtLeast => {
            let s = b.scalar();
            b.scalar_constraint(&[(lambda, omega, 1.0)], &[(s, -1.0)], 1.0 - eps)?
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{min_eigenvalue, ComplexMatrix};
    use crate::rng::SeededRng;
    use crate::states::{max_entangled, random_density_with};

    fn diag(v: &[f64]) -> HermitianOperator {
        HermitianOperator::from_real_diagonal(v)
    }

    fn assert_valid(r: &HypothesisTestResult, eps: f64) {
        let l = &r.optimal_test;
        assert!(min_eigenvalue(l).unwrap() > -1e-9);
        let i_minus = HermitianOperator::identity(l.dim()).sub(&l.clone().without_bipartite()).unwrap();
        assert!(min_eigenvalue(&i_minus).unwrap() > -1e-9);
        assert!((r.achieved_type1 - (1.0 - eps)).abs() < 1e-9, "type1 {}", r.achieved_type1);
        if r.value_bits.is_finite() {
            assert!((r.value_bits + r.type2.log2()).abs() < 1e-9);
        }
    }

    #[test]
    fn self_relative_value() {
        let mut rng = SeededRng::new(40, 0);
        for eps in [0.0, 0.1, 0.5, 0.9] {
            let w = random_density_with(2, 2, 3, &mut rng).unwrap();
            let r = dh_neyman_pearson(&w, &w, eps).unwrap();
            assert!((r.value_bits - (1.0 / (1.0 - eps)).log2()).abs() < 1e-9);
            assert_valid(&r, eps);
        }
    }

    #[test]
    fn max_entangled_vs_mixed() {
        let phi = max_entangled(3).unwrap();
        let mixed = HermitianOperator::bipartite_identity(3, 3).scale(1.0 / 9.0);
        let r = dh_neyman_pearson(&phi, &mixed, 0.0).unwrap();
        assert!((r.value_bits - 2.0 * 3f64.log2()).abs() < 1e-12);
        let r = dh_neyman_pearson(&max_entangled(2).unwrap(), &mixed_2(), 0.5).unwrap();
        assert!((r.value_bits - 3.0).abs() < 1e-9);
        assert_valid(&r, 0.5);
    }

    fn mixed_2() -> HermitianOperator {
        HermitianOperator::bipartite_identity(2, 2).scale(0.25)
    }

    #[test]
    fn sentinels() {
        let w = diag(&[0.5, 0.5]);
        assert!(dh_neyman_pearson(&w, &w, 1.0).unwrap().value_bits.is_infinite());
        assert!(dh_neyman_pearson(&w, &HermitianOperator::zeros(2), 0.3).unwrap().value_bits.is_infinite());
        // ω has weight 0.6 off the support of τ
        let w = diag(&[0.4, 0.6]);
        let t = diag(&[1.0, 0.0]);
        let r = dh_neyman_pearson(&w, &t, 0.5).unwrap();
        assert!(r.value_bits.is_infinite());
        assert_valid(&r, 0.5);
        // weight 0.6 < 1 − ε = 0.7 is finite
        let r = dh_neyman_pearson(&w, &t, 0.3).unwrap();
        assert!((r.value_bits - (1.0 / 0.25f64).log2()).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        let w = diag(&[0.5, 0.5]);
        assert!(dh_neyman_pearson(&w, &w, 1.5).is_err());
        assert!(dh_neyman_pearson(&w, &diag(&[1.0, -0.1]), 0.5).is_err());
        assert!(dh_neyman_pearson(&diag(&[0.5, 0.6]), &w, 0.5).is_err());
        assert!(dh_neyman_pearson(&w, &diag(&[0.5, 0.25, 0.25]), 0.5).is_err());
        assert!(dh_lp_oracle(&[0.5, 0.6], &[1.0, 1.0], 0.1).is_err());
    }

    #[test]
    fn lp_oracle_examples() {
        assert!(dh_lp_oracle(&[0.5, 0.5], &[0.5, 0.5], 0.0).unwrap().abs() < 1e-15);
        assert!((dh_lp_oracle(&[1.0, 0.0], &[0.25, 0.75], 0.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(dh_lp_oracle(&[1.0, 0.0], &[0.25, 0.75], 1.0).unwrap().is_infinite());
    }

    #[test]
    fn neyman_pearson_matches_lp_on_diagonal_pairs() {
        let mut rng = SeededRng::new(41, 0);
        for k in 0..100 {
            let n = 2 + k % 5;
            let mut p: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
            if k % 3 == 0 {
                p[0] = 0.0;
            }
            let s: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= s);
            let q: Vec<f64> = (0..n).map(|_| rng.uniform() + if k % 4 == 0 { 0.0 } else { 0.01 }).collect();
            let eps = [0.0, 0.1, 0.5, 0.77][k % 4];
            let lp = dh_lp_oracle(&p, &q, eps).unwrap();
            let np = dh_neyman_pearson(&diag(&p), &diag(&q), eps).unwrap();
            assert!((lp - np.value_bits).abs() < 1e-8, "k={k}: lp {lp} np {}", np.value_bits);
            assert_valid(&np, eps);
        }
    }

    #[test]
    fn ties_are_split() {
        // two indices with equal ratio: boundary eigenspace is two-dimensional
        let p = [0.4, 0.4, 0.2];
        let q = [0.2, 0.2, 0.6];
        let np = dh_neyman_pearson(&diag(&p), &diag(&q), 0.5).unwrap();
        assert!((np.value_bits - dh_lp_oracle(&p, &q, 0.5).unwrap()).abs() < 1e-10);
        assert_valid(&np, 0.5);
    }

    #[test]
    fn scaling_property() {
        let mut rng = SeededRng::new(42, 0);
        let w = random_density_with(2, 2, 2, &mut rng).unwrap();
        let t = random_density_with(2, 2, 4, &mut rng).unwrap();
        let base = dh_neyman_pearson(&w, &t, 0.2).unwrap().value_bits;
        for c in [0.1, 3.0] {
            let scaled = dh_neyman_pearson(&w, &t.scale(c), 0.2).unwrap().value_bits;
            assert!((scaled - (base - c.log2())).abs() < 1e-9);
        }
    }

    #[test]
    fn sdp_matches_neyman_pearson() {
        let mut rng = SeededRng::new(43, 0);
        for k in 0..6 {
            let w = random_density_with(2, 2, 1 + k % 4, &mut rng).unwrap();
            let t = random_density_with(2, 2, 4, &mut rng).unwrap();
            let eps = if k % 2 == 0 { 0.1 } else { 0.5 };
            let np = dh_neyman_pearson(&w, &t, eps).unwrap();
            let s = dh_sdp(&w, &t, eps, 1e-9).unwrap();
            assert!((np.value_bits - s.value_bits).abs() < 1e-6, "{} vs {}", np.value_bits, s.value_bits);
            assert!(s.primal_obj >= s.dual_obj - 1e-10);
        }
        let s = dh_sdp(&max_entangled(2).unwrap(), &mixed_2(), 0.5, 1e-9).unwrap();
        assert!((s.value_bits - 3.0).abs() < 1e-6);
    }

    #[test]
    fn equality_and_inequality_forms_agree() {
        let mut rng = SeededRng::new(44, 0);
        for _ in 0..4 {
            let w = random_density_with(2, 2, 2, &mut rng).unwrap();
            let g = ComplexMatrix::from_fn(4, 4, |_, _| rng.complex_gaussian());
            let t = HermitianOperator::new(&g * &g.adjoint()).unwrap();
            let eq = dh_sdp_with(&w, &t, 0.3, TypeOneForm::Equality, 1e-9).unwrap();
            let ge = dh_sdp_with(&w, &t, 0.3, TypeOneForm::AtLeast, 1e-9).unwrap();
            assert!((eq.value_bits - ge.value_bits).abs() < 1e-6);
        }
        assert!(dh_sdp(&mixed_2(), &mixed_2(), 0.0, 1e-8).is_err());
    }
}
