//! Error accounting for dilute-then-distill cycles and the bound
//! `log₂ d_out ≤ log₂ d_in + log₂(1/(1 − ε′))`.
//!
//! Reports store `log₂ d` achieved by concrete protocols. These are one-sided
//! witnesses (achievable rates for distillation, feasible costs for
//! dilution), not the optimal one-shot quantities.

use serde::Serialize;

use crate::channels::protocols::ProtocolInstance;
use crate::channels::{success_measurement, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::HermitianOperator;
use crate::metrics::{fidelity, sine_distance, trace_distance};
use crate::states::max_entangled;

/// Slack on `lhs ≤ rhs`.
pub const BOUND_SLACK: f64 = 1e-9;
/// Slack on the sine triangle inequality.
pub const TRIANGLE_SLACK: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMode {
    /// `ε = 1 − F`, combined as `(√ε₁ + √ε₂)²`.
    Fidelity,
    /// `ε = ½‖·‖₁`, combined as `ε₁ + ε₂`.
    Trace,
}

impl std::fmt::Display for ErrorMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ErrorMode::Fidelity => "fidelity",
            ErrorMode::Trace => "trace",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorBudget {
    pub eps1: f64,
    pub eps2: f64,
    pub mode: ErrorMode,
    pub eps_combined: f64,
}

impl ErrorBudget {
    pub fn new(eps1: f64, eps2: f64, mode: ErrorMode) -> Result<Self> {
        for e in [eps1, eps2] {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::InvalidInput(format!("error {e} outside [0, 1]")));
            }
        }
        let eps_combined = match mode {
            ErrorMode::Fidelity => (eps1.sqrt() + eps2.sqrt()).powi(2),
            ErrorMode::Trace => eps1 + eps2,
        };
        Ok(Self { eps1, eps2, mode, eps_combined })
    }

    pub fn is_vacuous(&self) -> bool {
        self.eps_combined >= 1.0
    }
}

/// `log₂(1/(1 − ε′))`.
pub fn correction_term(budget: &ErrorBudget) -> Result<f64> {
    if budget.is_vacuous() {
        return Err(Error::InvalidInput(format!("combined error {} >= 1: the bound is vacuous", budget.eps_combined)));
    }
    Ok(-(1.0 - budget.eps_combined).log2())
}

/// `(log₂(1/(1 − x)), x/ln 2)`.
pub fn small_eps_expansion_check(x: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::InvalidInput(format!("x = {x} outside [0, 1)")));
    }
    Ok((-(1.0 - x).log2(), x / std::f64::consts::LN_2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    /// `ε′ ≥ 1`; excluded from violation counts.
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SecondLawReport {
    pub label: String,
    pub d_in: usize,
    pub d_out: usize,
    pub measured_eps1: f64,
    pub measured_eps2: f64,
    pub budget: ErrorBudget,
    /// `+∞` when vacuous.
    pub correction_bits: f64,
    pub lhs_bits: f64,
    pub rhs_bits: f64,
    pub bound_holds: bool,
    pub verdict: Verdict,
    /// Distance of `distill(dilute(Φ^{d_in}))` to `Φ^{d_out}`: sine distance
    /// in fidelity mode, normalized trace distance in trace mode.
    pub composed_distance: f64,
}

fn check_dims(ch: &KrausChannel, input: (usize, usize), output: usize, what: &str) -> Result<()> {
    if ch.input_dims() != input || ch.output_dim() != output {
        return Err(Error::DimensionMismatch(format!(
            "{what} channel '{}' maps {:?} -> {}, expected {input:?} -> {output}",
            ch.label(),
            ch.input_dims(),
            ch.output_dim()
        )));
    }
    Ok(())
}

fn error_of(a: &HermitianOperator, b: &HermitianOperator, mode: ErrorMode) -> Result<f64> {
    match mode {
        ErrorMode::Fidelity => Ok((1.0 - fidelity(a, b)?).clamp(0.0, 1.0)),
        ErrorMode::Trace => Ok(trace_distance(a, b)?.clamp(0.0, 1.0)),
    }
}

/// Runs `Φ^{d_in} → dilute → ρ` and `ρ → distill → Φ^{d_out}`, measures both
/// errors, and checks the bound.
pub fn simulate_quasi_cyclic(
    dilute: &KrausChannel,
    distill: &KrausChannel,
    rho: &HermitianOperator,
    d_in: usize,
    d_out: usize,
    mode: ErrorMode,
) -> Result<SecondLawReport> {
    check_dims(dilute, (d_in, d_in), rho.dim(), "dilution")?;
    check_dims(distill, distill.input_dims(), d_out * d_out, "distillation")?;
    if distill.input_dim() != rho.dim() || distill.output_dims() != (d_out, d_out) {
        return Err(Error::DimensionMismatch(format!(
            "distillation channel '{}' does not map dim {} to {d_out} x {d_out}",
            distill.label(),
            rho.dim()
        )));
    }
    let phi_in = max_entangled(d_in)?;
    let phi_out = max_entangled(d_out)?;
    let diluted = dilute.apply(&phi_in)?;
    let distilled = distill.apply(rho)?;
    let composed = distill.apply(&diluted)?;

    let eps1 = error_of(&diluted, rho, mode)?;
    let eps2 = error_of(&distilled, &phi_out, mode)?;
    let composed_distance = match mode {
        ErrorMode::Fidelity => sine_distance(&composed, &phi_out)?,
        ErrorMode::Trace => trace_distance(&composed, &phi_out)?,
    };
    let budget = ErrorBudget::new(eps1, eps2, mode)?;
    let lhs_bits = (d_out as f64).log2();
    let (correction_bits, rhs_bits, verdict) = if budget.is_vacuous() {
        (f64::INFINITY, f64::INFINITY, Verdict::Vacuous)
    } else {
        let c = correction_term(&budget)?;
        let rhs = (d_in as f64).log2() + c;
        let v = if lhs_bits <= rhs + BOUND_SLACK { Verdict::Holds } else { Verdict::Violated };
        (c, rhs, v)
    };
    Ok(SecondLawReport {
        label: format!("{} then {}", dilute.label(), distill.label()),
        d_in,
        d_out,
        measured_eps1: eps1,
        measured_eps2: eps2,
        budget,
        correction_bits,
        lhs_bits,
        rhs_bits,
        bound_holds: verdict != Verdict::Violated,
        verdict,
        composed_distance,
    })
}

pub fn simulate_instance(run: &ProtocolInstance, mode: ErrorMode) -> Result<SecondLawReport> {
    let mut r = simulate_quasi_cyclic(&run.dilute, &run.distill, &run.target, run.d_in, run.d_out, mode)?;
    r.label = run.label.clone();
    Ok(r)
}

/// `P(s1, s3) ≤ P(s1, s2) + P(s2, s3)` up to [`TRIANGLE_SLACK`].
pub fn sine_composition_check(s1: &HermitianOperator, s2: &HermitianOperator, s3: &HermitianOperator) -> Result<bool> {
    let direct = sine_distance(s1, s3)?;
    let via = sine_distance(s1, s2)? + sine_distance(s2, s3)?;
    Ok(direct <= via + TRIANGLE_SLACK)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LemmaCheck {
    /// `½‖Φ − ω‖₁`.
    pub trace_distance: f64,
    /// `Tr[Φω]`.
    pub success_probability: f64,
    /// `Tr[Φω] ≥ 1 − ½‖Φ − ω‖₁`.
    pub holds: bool,
}

/// Checks that trace distance `δ` to `Φ^d` forces success probability
/// `≥ 1 − δ` for the measurement `{Φ, I − Φ}`.
pub fn trace_distance_lemma_check(omega: &HermitianOperator, d: usize) -> Result<LemmaCheck> {
    let phi = max_entangled(d)?;
    let delta = trace_distance(&phi, omega)?;
    let p = success_measurement(omega, &phi)?;
    Ok(LemmaCheck { trace_distance: delta, success_probability: p, holds: p >= 1.0 - delta - 1e-12 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::protocols::{dilution_channel, library_grid, local_filter};
    use crate::rng::SeededRng;
    use crate::states::{random_density_with, werner_like_isotropic};

    #[test]
    fn correction_examples() {
        let b = ErrorBudget::new(0.0, 0.0, ErrorMode::Fidelity).unwrap();
        assert_eq!(correction_term(&b).unwrap(), 0.0);
        let b = ErrorBudget::new(0.01, 0.01, ErrorMode::Fidelity).unwrap();
        assert!((b.eps_combined - 0.04).abs() < 1e-15);
        assert!((correction_term(&b).unwrap() - 0.058893689053568).abs() < 1e-12);
        let b = ErrorBudget::new(0.1, 0.1, ErrorMode::Trace).unwrap();
        assert!((correction_term(&b).unwrap() - 0.321928094887362).abs() < 1e-12);
        let b = ErrorBudget::new(0.5, 0.6, ErrorMode::Trace).unwrap();
        assert!(correction_term(&b).is_err());
        assert!(ErrorBudget::new(-0.1, 0.0, ErrorMode::Trace).is_err());
    }

    #[test]
    fn expansion_examples() {
        assert_eq!(small_eps_expansion_check(0.0).unwrap(), (0.0, 0.0));
        let (e, l) = small_eps_expansion_check(0.01).unwrap();
        assert!((e - 0.014499569695115).abs() < 1e-12);
        assert!((l - 0.014426950408890).abs() < 1e-12);
        assert!((e - l).abs() < 1e-4);
        let (e, l) = small_eps_expansion_check(0.5).unwrap();
        assert!((e - 1.0).abs() < 1e-15);
        assert!((l - 0.721347520444482).abs() < 1e-12);
        // the remainder Σ_{k≥2} x^k/(k ln 2) is at most x²/(2 ln 2 (1 − x)),
        // and below x² only up to x ≈ 0.4 (at x = 0.5 it is 0.279 > 0.25)
        for i in 1..100 {
            let x = i as f64 / 100.0;
            let (e, l) = small_eps_expansion_check(x).unwrap();
            assert!(e - l >= 0.0);
            assert!(e - l <= x * x / (2.0 * std::f64::consts::LN_2 * (1.0 - x)));
            if x <= 0.4 {
                assert!(e - l <= x * x);
            }
        }
        let (e, l) = small_eps_expansion_check(0.5).unwrap();
        assert!(e - l > 0.25);
        assert!(small_eps_expansion_check(1.0).is_err());
    }

    #[test]
    fn zero_error_cycle_is_tight() {
        for d in [2, 3] {
            let id = KrausChannel::identity((d, d));
            let phi = max_entangled(d).unwrap();
            for mode in [ErrorMode::Fidelity, ErrorMode::Trace] {
                let r = simulate_quasi_cyclic(&id, &id, &phi, d, d, mode).unwrap();
                assert!(r.measured_eps1 < 1e-9 && r.measured_eps2 < 1e-9);
                assert!((r.lhs_bits - r.rhs_bits).abs() < 1e-9);
                assert!(r.bound_holds);
            }
        }
    }

    #[test]
    fn noisy_cycle_holds() {
        let rho = werner_like_isotropic(2, 0.1).unwrap();
        let dil = dilution_channel(2, 2, 0.1).unwrap();
        let dist = local_filter(2, 2).unwrap();
        let r = simulate_quasi_cyclic(&dil, &dist, &rho, 2, 2, ErrorMode::Fidelity).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.composed_distance <= r.measured_eps1.sqrt() + r.measured_eps2.sqrt() + 1e-9);
    }

    #[test]
    fn over_ambitious_output_forces_large_error() {
        // Φ² diluted perfectly, then embedded into 4⊗4: fidelity to Φ⁴ is 1/2
        let rho = max_entangled(2).unwrap();
        let id = KrausChannel::identity((2, 2));
        let up = local_filter(2, 4).unwrap();
        let r = simulate_quasi_cyclic(&id, &up, &rho, 2, 4, ErrorMode::Fidelity).unwrap();
        assert!((r.measured_eps2 - 0.5).abs() < 1e-9);
        assert!(r.bound_holds);
    }

    #[test]
    fn dimension_errors() {
        let rho = max_entangled(2).unwrap();
        let id = KrausChannel::identity((2, 2));
        assert!(simulate_quasi_cyclic(&id, &id, &rho, 3, 2, ErrorMode::Trace).is_err());
        assert!(simulate_quasi_cyclic(&id, &id, &rho, 2, 3, ErrorMode::Trace).is_err());
    }

    #[test]
    fn library_grid_has_no_violation() {
        for mode in [ErrorMode::Fidelity, ErrorMode::Trace] {
            for run in library_grid(3).unwrap() {
                let r = simulate_instance(&run, mode).unwrap();
                assert_ne!(r.verdict, Verdict::Violated, "{}", r.label);
            }
        }
    }

    #[test]
    fn lemma_and_triangle_examples() {
        let phi = max_entangled(3).unwrap();
        let c = trace_distance_lemma_check(&phi, 3).unwrap();
        assert!(c.trace_distance < 1e-12 && (c.success_probability - 1.0).abs() < 1e-12 && c.holds);
        let mixed = HermitianOperator::bipartite_identity(3, 3).scale(1.0 / 9.0);
        let c = trace_distance_lemma_check(&mixed, 3).unwrap();
        assert!((c.trace_distance - 8.0 / 9.0).abs() < 1e-12);
        assert!((c.success_probability - 1.0 / 9.0).abs() < 1e-12);
        assert!(c.holds);

        let mut rng = SeededRng::new(60, 0);
        let a = random_density_with(2, 2, 2, &mut rng).unwrap();
        assert!(sine_composition_check(&a, &a, &a).unwrap());
        let e = |i: usize| {
            let mut v = vec![num_complex::Complex64::new(0.0, 0.0); 3];
            v[i] = num_complex::Complex64::new(1.0, 0.0);
            HermitianOperator::projector_onto(&v)
        };
        assert!(sine_composition_check(&e(0), &e(1), &e(2)).unwrap());
    }
}
