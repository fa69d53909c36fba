//! The acceptance battery: eight numbered checks, each producing one
//! pass/fail line. Shared by `ebit verify` and the integration tests.

use std::time::Instant;

use crate::channels::{
    distillation_channel, distillation_outputs, library_grid, library_targets, random_channel, twirl, twirl_sampled,
    DistillationKind,
};
use crate::error::Result;
use crate::hyptest::{build_dh_sdp, dh_lp_oracle, dh_neyman_pearson, dh_sdp, TypeOneForm};
use crate::linalg::{partial_transpose_b, trace_norm, BipartiteState, HermitianOperator};
use crate::metrics::{fidelity, sine_distance};
use crate::rains::{
    build_rains_sdp, isotropic_ppt_region, isotropic_pt_norm, ppt_prime_membership, rains_closed_form_max_ent, rains_general_sdp,
    rains_isotropic_reduced, MEMBERSHIP_TOL,
};
use crate::rng::SeededRng;
use crate::sdp::{self, check_solution, SdpStatus};
use crate::secondlaw::{simulate_instance, trace_distance_lemma_check, ErrorMode, Verdict, BOUND_SLACK};
use crate::states::{isotropic_operator, max_entangled, random_density_with, IsotropicCoordinates};

/// Battery settings. `tol` is the certificate threshold of criterion 8;
/// SDPs are solved to `tol / 10`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AcceptanceConfig {
    pub tol: f64,
    pub seed: u64,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        Self { tol: 1e-8, seed: 1 }
    }
}

impl AcceptanceConfig {
    fn solver_tol(&self) -> f64 {
        self.tol / 10.0
    }

    fn rng(&self, stream: u64) -> SeededRng {
        SeededRng::new(self.seed, 1000 + stream)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {} [{mark}] {}: {} ({:.2}s)", self.id, self.name, self.detail, self.seconds)
    }
}

type Check = fn(&AcceptanceConfig) -> Result<(bool, String)>;

pub const CRITERIA: [(&str, Check); 8] = [
    ("rains-max-entangled", rains_max_entangled),
    ("ppt-prime-region", ppt_prime_region),
    ("dh-three-way", dh_three_way),
    ("twirl", twirl_validation),
    ("second-law", second_law),
    ("distance-properties", distance_properties),
    ("protocol-soundness", protocol_soundness),
    ("solver-certificates", solver_certificates),
];

pub fn run_criterion(id: usize, cfg: &AcceptanceConfig) -> CriterionOutcome {
    let (name, check) = CRITERIA[id - 1];
    let start = Instant::now();
    let (passed, detail) = match check(cfg) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionOutcome { id, name, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn run_all(cfg: &AcceptanceConfig) -> Vec<CriterionOutcome> {
    (1..=CRITERIA.len()).map(|id| run_criterion(id, cfg)).collect()
}

fn rains_max_entangled(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let mut worst_sdp: f64 = 0.0;
    for d in [2, 3] {
        let phi = max_entangled(d)?;
        for eps in [0.1, 0.3, 0.5, 0.9] {
            let r = rains_general_sdp(&phi, eps, cfg.solver_tol())?;
            worst_sdp = worst_sdp.max((r.value_bits - rains_closed_form_max_ent(d, eps)?).abs());
        }
    }
    let mut worst_reduced: f64 = 0.0;
    for d in [2, 3, 4] {
        let phi = max_entangled(d)?;
        for eps in [0.01, 0.1, 0.3, 0.5, 0.9] {
            let r = rains_isotropic_reduced(&phi, eps)?;
            worst_reduced = worst_reduced.max((r.value_bits - rains_closed_form_max_ent(d, eps)?).abs());
        }
    }
    Ok((
        worst_sdp <= 1e-6 && worst_reduced <= 1e-8,
        format!("max |sdp - closed form| = {worst_sdp:.2e}, max |reduced - closed form| = {worst_reduced:.2e}"),
    ))
}

fn ppt_prime_region(_: &AcceptanceConfig) -> Result<(bool, String)> {
    const GRID: usize = 200;
    let mut worst: f64 = 0.0;
    let mut disagreements = 0;
    let mut points = 0;
    for d in [2, 3, 4] {
        for i in 0..GRID {
            for j in 0..GRID {
                let c = IsotropicCoordinates::new(d, i as f64 / (GRID - 1) as f64, j as f64 / (GRID - 1) as f64)?;
                let direct = trace_norm(&partial_transpose_b(&isotropic_operator(&c)?)?)?;
                worst = worst.max((direct - isotropic_pt_norm(&c)).abs());
                if (direct - 1.0).abs() > MEMBERSHIP_TOL && isotropic_ppt_region(&c) != (direct <= 1.0) {
                    disagreements += 1;
                }
                points += 1;
            }
        }
    }
    let mut worst_boundary: f64 = 0.0;
    for d in [2, 3, 4] {
        let df = d as f64;
        let c = IsotropicCoordinates::new(d, 1.0 / df, (df - 1.0) / df)?;
        let m = ppt_prime_membership(&isotropic_operator(&c)?)?;
        worst_boundary = worst_boundary.max((m.pt_trace_norm - 1.0).abs());
    }
    Ok((
        worst <= 1e-10 && disagreements == 0 && worst_boundary <= 1e-10,
        format!(
            "{points} points, max norm deviation {worst:.2e}, {disagreements} membership disagreements, boundary |norm - 1| = {worst_boundary:.2e}"
        ),
    ))
}

fn dh_three_way(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let mut rng = cfg.rng(3);
    let mut worst_sdp: f64 = 0.0;
    let mut sdp_cases = 0;
    for (da, db) in [(2, 2), (2, 3), (2, 4), (3, 3), (3, 4), (4, 4)] {
        for eps in [0.1, 0.5] {
            for _ in 0..2 {
                let n = da * db;
                let omega = random_density_with(da, db, n, &mut rng)?;
                let tau = random_density_with(da, db, n, &mut rng)?;
                let np = dh_neyman_pearson(&omega, &tau, eps)?.value_bits;
                let s = dh_sdp(&omega, &tau, eps, cfg.solver_tol())?.value_bits;
                worst_sdp = worst_sdp.max((np - s).abs());
                sdp_cases += 1;
            }
        }
    }

    let mut worst_lp: f64 = 0.0;
    for _ in 0..100 {
        let n = 2 + rng.below(15);
        let p = random_simplex(n, &mut rng);
        let q = random_simplex(n, &mut rng);
        let eps = 0.01 + 0.98 * rng.uniform();
        let np = dh_neyman_pearson(&HermitianOperator::from_real_diagonal(&p), &HermitianOperator::from_real_diagonal(&q), eps)?;
        worst_lp = worst_lp.max((np.value_bits - dh_lp_oracle(&p, &q, eps)?).abs());
    }

    let mut worst_self: f64 = 0.0;
    for k in 0..20 {
        let (da, db) = [(2, 2), (2, 3), (3, 3)][k % 3];
        let omega = random_density_with(da, db, 1 + rng.below(da * db), &mut rng)?;
        let eps = 0.05 + 0.9 * rng.uniform();
        let v = dh_neyman_pearson(&omega, &omega, eps)?.value_bits;
        worst_self = worst_self.max((v + (1.0 - eps).log2()).abs());
    }
    Ok((
        worst_sdp <= 1e-6 && worst_lp <= 1e-8 && worst_self <= 1e-9,
        format!(
            "NP vs SDP {worst_sdp:.2e} over {sdp_cases} pairs, NP vs LP {worst_lp:.2e} over 100 pairs, self-relative {worst_self:.2e} over 20 states"
        ),
    ))
}

fn random_simplex(n: usize, rng: &mut SeededRng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| -rng.uniform().max(1e-300).ln()).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

fn twirl_validation(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let mut rng = cfg.rng(4);
    let mut worst_mc: f64 = 0.0;
    let mut worst_idem: f64 = 0.0;
    for d in [2, 3] {
        let x = random_density_with(d, d, d * d, &mut rng)?;
        let exact = twirl(&x)?;
        let mc = twirl_sampled(&x, 10_000, cfg.seed ^ (d as u64))?;
        worst_mc = worst_mc.max((mc.matrix() - exact.matrix()).frobenius_norm());
        worst_idem = worst_idem.max((twirl(&exact)?.matrix() - exact.matrix()).frobenius_norm());
    }
    let mut escaped = 0;
    for k in 0..200 {
        let d = 2 + k % 2;
        let rho = random_density_with(d, d, 1 + rng.below(d * d), &mut rng)?;
        let norm = trace_norm(&partial_transpose_b(&rho)?)?;
        let member = rho.scale(1.0 / norm.max(1.0));
        if !ppt_prime_membership(&member)?.is_member() {
            continue;
        }
        if !ppt_prime_membership(&twirl(&member)?)?.is_member() {
            escaped += 1;
        }
    }
    Ok((
        worst_mc <= 0.1 && worst_idem <= 1e-12 && escaped == 0,
        format!("Monte-Carlo deviation {worst_mc:.3e}, idempotence {worst_idem:.2e}, {escaped} of 200 members left PPT'"),
    ))
}

fn second_law(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let grid = library_grid(cfg.seed)?;
    let mut violations = 0;
    let mut vacuous = 0;
    let mut worst_margin = f64::INFINITY;
    for mode in [ErrorMode::Fidelity, ErrorMode::Trace] {
        for run in &grid {
            let r = simulate_instance(run, mode)?;
            match r.verdict {
                Verdict::Vacuous => vacuous += 1,
                Verdict::Violated => violations += 1,
                Verdict::Holds => worst_margin = worst_margin.min(r.rhs_bits - r.lhs_bits),
            }
        }
    }
    Ok((
        grid.len() >= 50 && violations == 0,
        format!(
            "{} runs per mode, {vacuous} of {} vacuous across both modes, {violations} violations, tightest margin {worst_margin:.3e} bits (slack {BOUND_SLACK:e})",
            grid.len(),
            2 * grid.len()
        ),
    ))
}

fn distance_properties(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    const SLACK: f64 = -1e-8;
    let mut rng = cfg.rng(6);

    let mut tri: f64 = f64::INFINITY;
    for k in 0..1000 {
        let rank = 1 + rng.below(4);
        let mut s: Vec<_> = (0..3).map(|_| random_density_with(2, 2, rank, &mut rng)).collect::<Result<_>>()?;
        if k % 2 == 0 {
            // middle point on the segment, where the inequality is nearly tight
            let t = rng.uniform();
            s[1] = BipartiteState::new(s[0].combine(1.0 - t, &s[2], t)?)?;
        }
        let slack = sine_distance(&s[0], &s[1])? + sine_distance(&s[1], &s[2])? - sine_distance(&s[0], &s[2])?;
        tri = tri.min(slack);
    }

    let mut dp_sine: f64 = f64::INFINITY;
    let mut dp_dh: f64 = f64::INFINITY;
    for k in 0..200 {
        let omega = random_density_with(2, 2, 1 + rng.below(4), &mut rng)?;
        let tau = random_density_with(2, 2, 4, &mut rng)?;
        let d_out = [2, 3, 4, 6][k % 4];
        let ch = random_channel(4, d_out, 4usize.div_ceil(d_out) + rng.below(3), &mut rng)?;
        let (a, b) = (ch.apply(&omega)?, ch.apply(&tau)?);
        dp_sine = dp_sine.min(sine_distance(&omega, &tau)? - sine_distance(&a, &b)?);
        let eps = [0.1, 0.5][k % 2];
        let before = dh_neyman_pearson(&omega, &tau, eps)?.value_bits;
        let after = dh_neyman_pearson(&a, &b, eps)?.value_bits;
        dp_dh = dp_dh.min(before - after);
    }

    let mut lemma: f64 = f64::INFINITY;
    for k in 0..1000 {
        let d = 2 + k % 2;
        let noise = random_density_with(d, d, 1 + rng.below(d * d), &mut rng)?;
        let w = rng.uniform();
        let omega = max_entangled(d)?.combine(1.0 - w, &noise, w)?;
        let c = trace_distance_lemma_check(&omega, d)?;
        lemma = lemma.min(c.success_probability - (1.0 - c.trace_distance));
    }
    Ok((
        tri >= SLACK && dp_sine >= SLACK && dp_dh >= SLACK && lemma >= SLACK,
        format!("min slack: triangle {tri:.2e}, data processing P {dp_sine:.2e}, D_H {dp_dh:.2e}, lemma {lemma:.2e}"),
    ))
}

fn protocol_soundness(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let mut worst = f64::INFINITY;
    let mut checked = 0;
    let mut capped = 0;
    for target in library_targets(cfg.seed)? {
        let d = target.d;
        let mut protocols: Vec<_> = distillation_outputs(d).iter().map(|&o| (DistillationKind::Filter, o)).collect();
        protocols.push((DistillationKind::DiscardPrepare, d));
        for (kind, d_out) in protocols {
            let ch = distillation_channel(&kind, d, d_out)?;
            let out = ch.apply(&target.state)?;
            let f = fidelity(&out, max_entangled(d_out)?.operator())?;
            let eps = if 1.0 - f < 1e-12 { 0.0 } else { (1.0 - f).min(1.0) };
            let r = rains_general_sdp(&target.state, eps, cfg.solver_tol())?;
            if r.eps_used < eps {
                capped += 1;
            }
            worst = worst.min(r.value_bits - (d_out as f64).log2());
            checked += 1;
        }
    }
    Ok((worst >= -1e-6, format!("{checked} protocols, {capped} with capped eps, min (Rains - log2 d_out) = {worst:.3e} bits")))
}

fn solver_certificates(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let mut problems = Vec::new();
    for d in [2, 3] {
        let phi = max_entangled(d)?;
        for eps in [0.0, 0.1, 0.5, 0.9] {
            problems.push(build_rains_sdp(&phi, eps)?.problem);
        }
    }
    let mut rng = cfg.rng(8);
    for rank in 1..=4 {
        let rho = random_density_with(2, 2, rank, &mut rng)?;
        problems.push(build_rains_sdp(&rho, 0.2)?.problem);
    }
    for (k, form) in [TypeOneForm::Equality, TypeOneForm::AtLeast].into_iter().cycle().take(6).enumerate() {
        let (da, db) = [(2, 2), (2, 3), (3, 3)][k % 3];
        let omega = random_density_with(da, db, da * db, &mut rng)?;
        let tau = random_density_with(da, db, da * db, &mut rng)?;
        problems.push(build_dh_sdp(&omega, &tau, 0.3, form)?);
    }

    let mut optimal = 0;
    let mut failed = 0;
    let (mut gap, mut res): (f64, f64) = (0.0, 0.0);
    for p in &problems {
        let sol = sdp::solve(p, cfg.solver_tol())?;
        if sol.status != SdpStatus::Optimal {
            continue;
        }
        optimal += 1;
        let cert = check_solution(p, &sol);
        gap = gap.max(cert.gap);
        res = res.max(cert.primal_residual.max(cert.dual_residual));
        if !cert.passes(cfg.tol) {
            failed += 1;
        }
    }
    Ok((
        optimal > 0 && failed == 0,
        format!(
            "{optimal} of {} solves optimal, {failed} failed recomputation, max gap {gap:.2e}, max residual {res:.2e}",
            problems.len()
        ),
    ))
}
