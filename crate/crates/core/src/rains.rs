//! The ε-Rains relative entropy `R_H^ε(ρ) = min_{σ ∈ PPT′} D_H^ε(ρ‖σ)`,
//! where `PPT′ = {σ ⪰ 0 : ‖T_B σ‖₁ ≤ 1}`.
//!
//! Three routes: the closed form for `Φ^d`, a two-parameter reduction for
//! twirl-invariant (isotropic) inputs, and a single SDP for general inputs.
//! The SDP merges the dual of the inner test problem with the split
//! `T_B σ = P − Q`:
//!
//! ```text
//! maximize   (1 − ε) μ − Tr Z
//! subject to σ = T_B(P − Q),  μρ − Z ⪯ σ,  Tr P + Tr Q ≤ 1,
//!            σ, P, Q, Z ⪰ 0,  μ ≥ 0
//! ```
//!
//! with `R_H^ε = −log₂(optimum)`. For `ε = 0` the objective becomes
//! `Tr[Π_ρ σ]`, `Π_ρ` the support projector of `ρ`.

use serde::Serialize;

use crate::channels::twirl;
use crate::error::{Error, Result};
use crate::hyptest::{dh_lp_oracle, dh_neyman_pearson};
use crate::linalg::{min_eigenvalue, partial_transpose_b, project_psd, support_projector, trace_norm, HermitianOperator};
use crate::sdp::{self, HermitianSdpBuilder, HermitianVar, MatrixTerm, SdpProblem, SdpStatus, Sense};
use crate::states::{isotropic_operator, max_entangled, square_local_dim, IsotropicCoordinates, ReducedTestCoordinates};

/// Membership slack on both PPT′ conditions.
pub const MEMBERSHIP_TOL: f64 = 1e-10;
/// Largest `ε` solved as given; larger values are capped here.
pub const EPS_CAP: f64 = 1.0 - 1e-6;
/// Largest `dim(ρ)` accepted by the SDP route.
pub const SDP_MAX_DIM: usize = 36;
/// Default solver tolerance for the SDP route.
pub const RAINS_TOL: f64 = 1e-9;
/// Smaller `ε` is treated as exactly zero.
pub const EPS_FLOOR: f64 = 1e-12;
/// A stalled solve is still used when its gap and residuals are below this.
pub const ACCEPT_TOL: f64 = 1e-7;
/// `‖twirl(ρ) − ρ‖_F` allowed by the reduced route.
pub const TWIRL_INVARIANCE_TOL: f64 = 1e-9;
/// Allowed disagreement between the SDP value and the witness check.
pub const WITNESS_TOL: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PptPrimeCandidate {
    #[serde(skip)]
    pub sigma: HermitianOperator,
    /// Smallest eigenvalue of `σ`.
    pub psd_margin: f64,
    /// `‖T_B σ‖₁`.
    pub pt_trace_norm: f64,
}

impl PptPrimeCandidate {
    pub fn is_member(&self) -> bool {
        self.psd_margin >= -MEMBERSHIP_TOL && self.pt_trace_norm <= 1.0 + MEMBERSHIP_TOL
    }
}

pub fn ppt_prime_membership(sigma: &HermitianOperator) -> Result<PptPrimeCandidate> {
    let pt = partial_transpose_b(sigma)?;
    Ok(PptPrimeCandidate { psd_margin: min_eigenvalue(sigma)?, pt_trace_norm: trace_norm(&pt)?, sigma: sigma.clone() })
}

/// `‖T_B(αΦ + β(I − Φ)/(d² − 1))‖₁`: `α + β` if `β ≥ α(d − 1)`, else `αd`.
pub fn isotropic_pt_norm(c: &IsotropicCoordinates) -> f64 {
    let d = c.d as f64;
    if c.beta >= c.alpha * (d - 1.0) {
        c.alpha + c.beta
    } else {
        c.alpha * d
    }
}

pub fn isotropic_ppt_region(c: &IsotropicCoordinates) -> bool {
    c.alpha >= 0.0 && c.beta >= 0.0 && isotropic_pt_norm(c) <= 1.0 + MEMBERSHIP_TOL
}

/// `log₂ d + log₂(1/(1 − ε))`.
pub fn rains_closed_form_max_ent(d: usize, eps: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidDimension("Schmidt rank must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidInput(format!("eps = {eps} outside [0, 1)")));
    }
    Ok((d as f64).log2() - (1.0 - eps).log2())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RainsMethod {
    ClosedForm,
    Reduced,
    Sdp,
}

impl std::fmt::Display for RainsMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RainsMethod::ClosedForm => "closed_form",
            RainsMethod::Reduced => "reduced",
            RainsMethod::Sdp => "sdp",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RainsStatus {
    Ok,
    /// `ε` was above [`EPS_CAP`] and was lowered to it.
    EpsCapped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RainsResult {
    pub value_bits: f64,
    pub optimizer_sigma: PptPrimeCandidate,
    pub method: RainsMethod,
    /// Absolute duality gap of the SDP objective; zero for the analytic routes.
    pub certified_gap: f64,
    /// Largest primal or dual residual of the SDP; zero for the analytic routes.
    pub certified_residual: f64,
    pub eps_used: f64,
    pub status: RainsStatus,
    /// `D_H^ε(ρ‖σ*)` recomputed by Neyman–Pearson.
    pub witness_bits: f64,
    /// Optimal test weights, reduced route only.
    #[serde(skip)]
    pub reduced_test: Option<ReducedTestCoordinates>,
}

fn effective_eps(eps: f64) -> Result<(f64, RainsStatus)> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidInput(format!("eps = {eps} outside [0, 1)")));
    }
    if eps > EPS_CAP {
        Ok((EPS_CAP, RainsStatus::EpsCapped))
    } else if eps < EPS_FLOOR {
        Ok((0.0, RainsStatus::Ok))
    } else {
        Ok((eps, RainsStatus::Ok))
    }
}

/// Checks `‖twirl(ρ) − ρ‖_F` and returns the local dimension.
pub fn check_twirl_invariant(rho: &HermitianOperator) -> Result<usize> {
    let d = square_local_dim(rho)?;
    let dev = (twirl(rho)?.matrix() - rho.matrix()).frobenius_norm();
    if dev > TWIRL_INVARIANCE_TOL {
        return Err(Error::Precondition(format!("input is not twirl invariant (deviation {dev:e})")));
    }
    Ok(d)
}

/// Two-class test problem for commuting isotropic `ρ = aΦ + b(I − Φ)/(d²−1)`
/// and `σ = αΦ + β(I − Φ)/(d²−1)`: minimal `κα + λ'β` over
/// `κa + λ'b = 1 − ε`, `κ, λ' ∈ [0, 1]`. Returns `(cost, κ, λ')`.
fn two_class_test(a: f64, b: f64, alpha: f64, beta: f64, eps: f64) -> (f64, f64, f64) {
    let mut need = 1.0 - eps;
    let mut w = [0.0, 0.0];
    let p = [a, b];
    let order: [usize; 2] = if a * beta >= b * alpha { [0, 1] } else { [1, 0] };
    for i in order {
        if need <= 0.0 || p[i] <= 0.0 {
            continue;
        }
        w[i] = (need / p[i]).min(1.0);
        need -= w[i] * p[i];
    }
    (w[0] * alpha + w[1] * beta, w[0], w[1])
}

/// Reduced route for twirl-invariant `ρ`. The optimal `σ` is isotropic and
/// lies on the PPT′ boundary segment `α = s/d, β = 1 − s/d`, `s ∈ [0, 1]`;
/// the objective is concave and piecewise linear there, so the maximum is
/// at an endpoint or at the breakpoint `(α, β) = (a, b)`.
pub fn rains_isotropic_reduced(rho: &HermitianOperator, eps: f64) -> Result<RainsResult> {
    let (eps_used, status) = effective_eps(eps)?;
    let d = check_twirl_invariant(rho)?;
    let coords = IsotropicCoordinates::of_operator(rho)?;
    let (a, b) = (coords.alpha.max(0.0), coords.beta.max(0.0));
    let df = d as f64;

    let (alpha, beta, cost, kappa, lam) = if d == 1 {
        let (cost, k, _) = two_class_test(a, 0.0, 1.0, 0.0, eps_used);
        (1.0, 0.0, cost, k, 0.0)
    } else {
        let mut candidates = vec![(0.0, 1.0), (1.0 / df, 1.0 - 1.0 / df)];
        if a > 0.0 && a * df < 1.0 {
            candidates.push((a, 1.0 - a));
        }
        let mut best = (0.0, 0.0, f64::NEG_INFINITY, 0.0, 0.0);
        for (al, be) in candidates {
            let (c, k, l) = two_class_test(a, b, al, be, eps_used);
            if c > best.2 {
                best = (al, be, c, k, l);
            }
        }
        best
    };
    if cost <= 0.0 {
        return Err(Error::Numerical("reduced Rains objective vanished".into()));
    }
    let sigma = isotropic_operator(&IsotropicCoordinates::new(d, alpha, beta)?)?;
    let lambda = if d == 1 { 0.0 } else { lam * (df * df - 1.0) };
    let value_bits = -cost.log2();
    let witness_bits = dh_neyman_pearson(rho, &sigma, eps_used)?.value_bits;
    check_witness(value_bits, witness_bits)?;
    Ok(RainsResult {
        value_bits,
        optimizer_sigma: ppt_prime_membership(&sigma)?,
        method: RainsMethod::Reduced,
        certified_gap: 0.0,
        certified_residual: 0.0,
        eps_used,
        status,
        witness_bits,
        reduced_test: Some(ReducedTestCoordinates::new(d, kappa, lambda.min((df * df - 1.0).max(0.0)))?),
    })
}

/// Closed form for `Φ^d`, with optimizer `σ = isotropic(1/d, (d−1)/d)`.
pub fn rains_max_ent_result(d: usize, eps: f64) -> Result<RainsResult> {
    let (eps_used, status) = effective_eps(eps)?;
    let value_bits = rains_closed_form_max_ent(d, eps_used)?;
    let df = d as f64;
    let sigma = if d == 1 {
        max_entangled(1)?.into_operator()
    } else {
        isotropic_operator(&IsotropicCoordinates::new(d, 1.0 / df, 1.0 - 1.0 / df)?)?
    };
    let phi = max_entangled(d)?;
    let witness_bits = dh_neyman_pearson(&phi, &sigma, eps_used)?.value_bits;
    check_witness(value_bits, witness_bits)?;
    Ok(RainsResult {
        value_bits,
        optimizer_sigma: ppt_prime_membership(&sigma)?,
        method: RainsMethod::ClosedForm,
        certified_gap: 0.0,
        certified_residual: 0.0,
        eps_used,
        status,
        witness_bits,
        reduced_test: Some(ReducedTestCoordinates::new(d, 1.0 - eps_used, 0.0)?),
    })
}

fn check_witness(value_bits: f64, witness_bits: f64) -> Result<()> {
    let diff = (witness_bits - value_bits).abs();
    if diff.is_nan() || diff > WITNESS_TOL {
        return Err(Error::Formulation(format!(
            "witness check failed: optimum {value_bits} bits but D_H at the extracted sigma is {witness_bits} bits"
        )));
    }
    Ok(())
}

/// The Rains SDP for one state, before solving.
pub struct RainsSdp {
    pub problem: SdpProblem,
    pub builder: HermitianSdpBuilder,
    pub sigma: HermitianVar,
    pub eps_used: f64,
    pub status: RainsStatus,
}

/// Assemble the Rains SDP without solving it.
pub fn build_rains_sdp(rho: &HermitianOperator, eps: f64) -> Result<RainsSdp> {
    let (eps_used, status) = effective_eps(eps)?;
    let (da, db) = rho.require_bipartite()?;
    let n = rho.dim();
    if n > SDP_MAX_DIM {
        return Err(Error::ResourceLimit { requested: n, max: SDP_MAX_DIM });
    }
    if (rho.trace() - 1.0).abs() > 1e-8 || min_eigenvalue(rho)? < -1e-10 {
        return Err(Error::InvalidInput("rho must be a density operator".into()));
    }

    let zero = HermitianOperator::zeros(n);
    let mut b = HermitianSdpBuilder::new(Sense::Maximize);
    let sigma = b.hermitian_bipartite(da, db);
    let p = b.hermitian_bipartite(da, db);
    let q = b.hermitian_bipartite(da, db);
    b.matrix_equality(
        &[
            MatrixTerm::Var { var: sigma, coeff: 1.0, transpose_b: false },
            MatrixTerm::Var { var: p, coeff: -1.0, transpose_b: true },
            MatrixTerm::Var { var: q, coeff: 1.0, transpose_b: true },
        ],
        &zero,
    )?;
    let s = b.scalar();
    let id = HermitianOperator::identity(n);
    b.scalar_constraint(&[(p, &id, 1.0), (q, &id, 1.0)], &[(s, 1.0)], 1.0)?;

    if eps_used == 0.0 {
        let support = support_projector(rho, 1e-10)?.without_bipartite();
        b.objective_trace(sigma, &support, 1.0)?;
    } else {
        let z = b.hermitian(n);
        let w = b.hermitian(n);
        let mu = b.scalar();
        let rho_plain = rho.clone().without_bipartite();
        b.matrix_equality(
            &[
                MatrixTerm::Var { var: w, coeff: 1.0, transpose_b: false },
                MatrixTerm::Var { var: sigma, coeff: -1.0, transpose_b: false },
                MatrixTerm::Scaled { var: mu, op: &rho_plain },
                MatrixTerm::Var { var: z, coeff: -1.0, transpose_b: false },
            ],
            &zero,
        )?;
        b.objective_scalar(mu, 1.0 - eps_used);
        b.objective_trace(z, &id, -1.0)?;
    }

    let problem = b.build()?;
    Ok(RainsSdp { problem, builder: b, sigma, eps_used, status })
}

/// General route through the SDP above.
pub fn rains_general_sdp(rho: &HermitianOperator, eps: f64, tol: f64) -> Result<RainsResult> {
    let RainsSdp { problem, builder: b, sigma, eps_used, status } = build_rains_sdp(rho, eps)?;
    let sol = sdp::solve(&problem, tol)?;
    let worst = sol.gap.max(sol.primal_residual).max(sol.dual_residual);
    let sol = match sol.status {
        SdpStatus::Optimal => sol,
        SdpStatus::NumericalFailure if worst <= ACCEPT_TOL => sol,
        _ => sol.require_optimal()?,
    };
    if sol.primal_obj <= 0.0 {
        return Err(Error::Numerical(format!("Rains SDP optimum {} is not positive", sol.primal_obj)));
    }
    let value_bits = -sol.primal_obj.log2();

    let raw = b.hermitian_value(&sol, sigma)?;
    let clamped = project_psd(&raw, 1e-6)?;
    let pt_norm = trace_norm(&partial_transpose_b(&clamped)?)?;
    let sigma_star = clamped.scale(1.0 / pt_norm.max(1.0));
    let witness_bits = dh_neyman_pearson(rho, &sigma_star, eps_used)?.value_bits;
    check_witness(value_bits, witness_bits)?;
    Ok(RainsResult {
        value_bits,
        optimizer_sigma: ppt_prime_membership(&sigma_star)?,
        method: RainsMethod::Sdp,
        certified_gap: sol.gap,
        certified_residual: sol.primal_residual.max(sol.dual_residual),
        eps_used,
        status,
        witness_bits,
        reduced_test: None,
    })
}

/// Method choice for [`rains`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RainsRoute {
    /// Reduced route when `ρ` is twirl invariant, SDP otherwise.
    Auto,
    Reduced,
    Sdp,
}

pub fn rains(rho: &HermitianOperator, eps: f64, route: RainsRoute, tol: f64) -> Result<RainsResult> {
    match route {
        RainsRoute::Reduced => rains_isotropic_reduced(rho, eps),
        RainsRoute::Sdp => rains_general_sdp(rho, eps, tol),
        RainsRoute::Auto => {
            if check_twirl_invariant(rho).is_ok() {
                rains_isotropic_reduced(rho, eps)
            } else {
                rains_general_sdp(rho, eps, tol)
            }
        }
    }
}

/// Two-class value `D_H^ε` between isotropic operators, as an LP. Exposed
/// for cross-checks against the full eigen-based routines.
pub fn isotropic_dh(rho: &IsotropicCoordinates, sigma: &IsotropicCoordinates, eps: f64) -> Result<f64> {
    if rho.d != sigma.d {
        return Err(Error::DimensionMismatch(format!("d = {} vs {}", rho.d, sigma.d)));
    }
    dh_lp_oracle(&[rho.alpha, rho.beta], &[sigma.alpha, sigma.beta], eps)
}
