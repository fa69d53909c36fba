//! Command-line front end: `dh`, `rains`, `secondlaw`, `verify`, `gen-state`.
//!
//! Exit codes: 0 ok, 1 acceptance failure, 2 parse (arguments, JSON, I/O),
//! 3 shape or domain, 4 solver, 5 bound violation.

pub mod format;
pub mod protocol;
pub mod statefile;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::acceptance::{self, AcceptanceConfig};
use crate::error::Error;
use crate::hyptest::{dh_lp_oracle, dh_neyman_pearson, dh_sdp};
use crate::linalg::{BipartiteState, HermitianOperator};
use crate::rains::{build_rains_sdp, rains, RainsRoute, SDP_MAX_DIM};
use crate::sdp::write_dump;
use crate::secondlaw::{simulate_instance, ErrorMode, Verdict};
use crate::states::{isotropic_state, max_entangled, random_density, werner_like_isotropic};

pub use format::{fmt_num, Field, OutputFormat, Report, Row};
pub use protocol::ProtocolSpec;
pub use statefile::{StateFile, StateFileError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SHAPE: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;
pub const EXIT_VIOLATION: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "ebit", version, about = "One-shot entanglement quantities and second-law checks")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Args)]
pub struct RunConfig {
    /// Solver and check tolerance, in (0, 1e-2].
    #[arg(long = "tol", global = true, default_value_t = 1e-8, value_parser = parse_tol)]
    pub tolerance: f64,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Largest total dimension accepted for SDP work.
    #[arg(long, global = true, default_value_t = SDP_MAX_DIM)]
    pub max_dim: usize,
    #[arg(long = "format", global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub output_format: OutputFormat,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { tolerance: 1e-8, seed: 1, max_dim: SDP_MAX_DIM, output_format: OutputFormat::Csv, out: None }
    }
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t > 0.0 && t <= 1e-2 {
        Ok(t)
    } else {
        Err(format!("tolerance must lie in (0, 1e-2], got {t}"))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// D_H^eps(state || sigma) with cross-checks.
    Dh {
        state: PathBuf,
        sigma: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    /// eps-Rains relative entropy of a bipartite state.
    Rains {
        state: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        /// Also write the SDP in text dump form.
        #[arg(long)]
        dump_sdp: Option<PathBuf>,
    },
    /// Quasi-cyclic second-law checks from a protocol spec file.
    Secondlaw {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Fidelity)]
        mode: Mode,
    },
    /// Run the acceptance battery.
    Verify,
    /// Write a state file.
    GenState {
        #[arg(value_enum)]
        kind: StateKind,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Weight on Φ for `isotropic`.
        #[arg(long)]
        fidelity: Option<f64>,
        /// Noise for `werner`.
        #[arg(long)]
        p: Option<f64>,
        /// Local dimensions for `random`; default `d x d`.
        #[arg(long)]
        dim_a: Option<usize>,
        #[arg(long)]
        dim_b: Option<usize>,
        #[arg(long)]
        rank: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Auto,
    Reduced,
    Sdp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Fidelity,
    Trace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    MaxEntangled,
    Isotropic,
    Werner,
    MaximallyMixed,
    Random,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Solver { .. } | Error::Numerical(_) | Error::NoConvergence { .. } | Error::Formulation(_) => EXIT_SOLVER,
            _ => EXIT_SHAPE,
        };
        Self::new(code, e.to_string())
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<StateFile, CliError> {
    StateFile::parse(&read_text(path)?).map_err(|e| {
        let code = if matches!(e, StateFileError::Parse { .. }) { EXIT_PARSE } else { EXIT_SHAPE };
        CliError::new(code, format!("{}: {e}", path.display()))
    })
}

fn shape(path: &Path) -> impl Fn(StateFileError) -> CliError + '_ {
    move |e| CliError::new(EXIT_SHAPE, format!("{}: {e}", path.display()))
}

fn load_state(path: &Path) -> Result<BipartiteState, CliError> {
    load(path)?.to_state().map_err(shape(path))
}

fn load_operator(path: &Path) -> Result<HermitianOperator, CliError> {
    load(path)?.to_operator().map_err(shape(path))
}

fn check_dim(dim: usize, cfg: &RunConfig) -> Result<(), CliError> {
    if dim > cfg.max_dim {
        return Err(Error::ResourceLimit { requested: dim, max: cfg.max_dim }.into());
    }
    Ok(())
}

fn is_diagonal(x: &HermitianOperator) -> bool {
    (0..x.dim()).all(|i| (0..i).all(|j| x.get(i, j).norm() == 0.0))
}

fn diagonal(x: &HermitianOperator) -> Vec<f64> {
    (0..x.dim()).map(|i| x.get(i, i).re).collect()
}

pub fn cmd_dh(state: &Path, sigma: &Path, eps: f64, cfg: &RunConfig) -> Result<Report, CliError> {
    let omega = load_state(state)?;
    let tau = load_operator(sigma)?;
    if omega.dim() != tau.dim() {
        return Err(CliError::new(EXIT_SHAPE, format!("state has dimension {}, sigma {}", omega.dim(), tau.dim())));
    }
    check_dim(omega.dim(), cfg)?;
    let np = dh_neyman_pearson(&omega, &tau, eps)?;
    // the SDP is a cross-check only; its failure is reported, not fatal
    let (sdp, sdp_status) = if np.value_bits.is_finite() && eps > 0.0 && eps < 1.0 {
        match dh_sdp(&omega, &tau, eps, cfg.tolerance / 10.0) {
            Ok(r) => (Some(r.value_bits), "optimal".to_string()),
            Err(Error::Solver { status, .. }) => (None, status),
            Err(e) => return Err(e.into()),
        }
    } else {
        (None, "skipped".to_string())
    };
    let lp = if is_diagonal(&omega) && is_diagonal(&tau) {
        Some(dh_lp_oracle(&diagonal(&omega), &diagonal(&tau), eps)?)
    } else {
        None
    };
    let delta = |other: Option<f64>| other.map(|v| if v == np.value_bits { 0.0 } else { (v - np.value_bits).abs() });

    let mut report = Report::new("dh");
    report.push_row(vec![
        ("eps".into(), eps.into()),
        ("value_bits".into(), np.value_bits.into()),
        ("threshold_mu".into(), np.threshold_mu.into()),
        ("boundary_weight".into(), np.boundary_weight.into()),
        ("achieved_type1".into(), np.achieved_type1.into()),
        ("type2".into(), np.type2.into()),
        ("sdp_status".into(), sdp_status.into()),
        ("sdp_value_bits".into(), sdp.into()),
        ("sdp_delta".into(), delta(sdp).into()),
        ("lp_delta".into(), delta(lp).into()),
    ]);
    Ok(report)
}

pub fn cmd_rains(state: &Path, eps: f64, method: Method, dump: Option<&Path>, cfg: &RunConfig) -> Result<Report, CliError> {
    let rho = load_state(state)?;
    let route = match method {
        Method::Auto => RainsRoute::Auto,
        Method::Reduced => RainsRoute::Reduced,
        Method::Sdp => RainsRoute::Sdp,
    };
    if method == Method::Sdp {
        check_dim(rho.dim(), cfg)?;
    }
    if let Some(path) = dump {
        check_dim(rho.dim(), cfg)?;
        let text = write_dump(&build_rains_sdp(&rho, eps)?.problem);
        std::fs::write(path, text).map_err(|e| CliError::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    }
    let r = rains(&rho, eps, route, cfg.tolerance / 10.0)?;
    let mut report = Report::new("rains");
    report.push_row(vec![
        ("eps".into(), eps.into()),
        ("eps_used".into(), r.eps_used.into()),
        ("status".into(), enum_text(&r.status).into()),
        ("method".into(), enum_text(&r.method).into()),
        ("value_bits".into(), r.value_bits.into()),
        ("witness_bits".into(), r.witness_bits.into()),
        ("certified_gap".into(), r.certified_gap.into()),
        ("certified_residual".into(), r.certified_residual.into()),
        ("pt_trace_norm".into(), r.optimizer_sigma.pt_trace_norm.into()),
        ("psd_margin".into(), r.optimizer_sigma.psd_margin.into()),
    ]);
    Ok(report)
}

fn enum_text<T: serde::Serialize>(x: &T) -> String {
    serde_json::to_value(x).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

/// Runs every grid point of the spec. Returns the report and the number of violations.
pub fn cmd_secondlaw(spec_path: &Path, mode: Mode, cfg: &RunConfig) -> Result<(Report, usize), CliError> {
    let text = read_text(spec_path)?;
    let spec: ProtocolSpec = serde_json::from_str(&text).map_err(|e| {
        CliError::new(EXIT_PARSE, format!("{}: line {}, column {}: {e}", spec_path.display(), e.line(), e.column()))
    })?;
    let mode = match mode {
        Mode::Fidelity => ErrorMode::Fidelity,
        Mode::Trace => ErrorMode::Trace,
    };
    let mut report = Report::new("secondlaw");
    let (mut violations, mut vacuous) = (0, 0);
    let runs = spec.instances(cfg.seed)?;
    for run in &runs {
        let r = simulate_instance(run, mode)?;
        match r.verdict {
            Verdict::Violated => violations += 1,
            Verdict::Vacuous => vacuous += 1,
            Verdict::Holds => {}
        }
        report.push_row(vec![
            ("label".into(), r.label.clone().into()),
            ("mode".into(), mode.to_string().into()),
            ("d_in".into(), r.d_in.into()),
            ("d_out".into(), r.d_out.into()),
            ("eps1".into(), r.measured_eps1.into()),
            ("eps2".into(), r.measured_eps2.into()),
            ("eps_combined".into(), r.budget.eps_combined.into()),
            ("correction_bits".into(), r.correction_bits.into()),
            ("lhs_bits".into(), r.lhs_bits.into()),
            ("rhs_bits".into(), r.rhs_bits.into()),
            ("composed_distance".into(), r.composed_distance.into()),
            ("verdict".into(), enum_text(&r.verdict).into()),
        ]);
    }
    report.summarize("runs", runs.len());
    report.summarize("vacuous", vacuous);
    report.summarize("violations", violations);
    report.summarize("note", "log2 d_out and log2 d_in are achieved by the simulated protocols; they witness E_D and E_C from one side and are not optimized values");
    Ok((report, violations))
}

/// Runs the battery. Returns the report and whether every criterion passed.
pub fn cmd_verify(cfg: &RunConfig, progress: &mut dyn Write) -> (Report, bool) {
    let acfg = AcceptanceConfig { tol: cfg.tolerance, seed: cfg.seed };
    let mut report = Report::new("verify");
    let mut failed = 0;
    for id in 1..=acceptance::CRITERIA.len() {
        let o = acceptance::run_criterion(id, &acfg);
        let _ = writeln!(progress, "{o}");
        if !o.passed {
            failed += 1;
        }
        report.push_row(vec![
            ("criterion".into(), o.id.into()),
            ("name".into(), o.name.into()),
            ("passed".into(), o.passed.into()),
            ("seconds".into(), o.seconds.into()),
            ("detail".into(), o.detail.into()),
        ]);
    }
    report.summarize("passed", acceptance::CRITERIA.len() - failed);
    report.summarize("failed", failed);
    (report, failed == 0)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_gen_state(
    kind: StateKind,
    d: usize,
    fidelity: Option<f64>,
    p: Option<f64>,
    dim_a: Option<usize>,
    dim_b: Option<usize>,
    rank: Option<usize>,
    cfg: &RunConfig,
) -> Result<StateFile, CliError> {
    let need = |x: Option<f64>, flag: &str| x.ok_or_else(|| CliError::new(EXIT_PARSE, format!("{kind:?} needs --{flag}")));
    let op = match kind {
        StateKind::MaxEntangled => max_entangled(d)?.into_operator(),
        StateKind::Isotropic => isotropic_state(d, need(fidelity, "fidelity")?)?.into_operator(),
        StateKind::Werner => werner_like_isotropic(d, need(p, "p")?)?.into_operator(),
        StateKind::MaximallyMixed => {
            let (a, b) = (dim_a.unwrap_or(d), dim_b.unwrap_or(d));
            HermitianOperator::bipartite_identity(a, b).scale(1.0 / (a * b) as f64)
        }
        StateKind::Random => {
            let (a, b) = (dim_a.unwrap_or(d), dim_b.unwrap_or(d));
            random_density(a, b, rank.unwrap_or(a * b), cfg.seed)?.into_operator()
        }
    };
    Ok(StateFile::from_operator(&op))
}

fn emit(text: &str, cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::new(EXIT_PARSE, format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::new(EXIT_PARSE, e.to_string())),
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = &cli.config;
    let fmt = cfg.output_format;
    match cli.command {
        Command::Dh { state, sigma, eps } => {
            emit(&cmd_dh(&state, &sigma, eps, cfg)?.render(fmt), cfg, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Rains { state, eps, method, dump_sdp } => {
            emit(&cmd_rains(&state, eps, method, dump_sdp.as_deref(), cfg)?.render(fmt), cfg, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Secondlaw { spec, mode } => {
            let (report, violations) = cmd_secondlaw(&spec, mode, cfg)?;
            emit(&report.render(fmt), cfg, stdout)?;
            let _ = writeln!(stderr, "violations: {violations}");
            Ok(if violations == 0 { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Verify => {
            let (report, ok) = cmd_verify(cfg, stderr);
            emit(&report.render(fmt), cfg, stdout)?;
            Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::GenState { kind, d, fidelity, p, dim_a, dim_b, rank } => {
            let file = cmd_gen_state(kind, d, fidelity, p, dim_a, dim_b, rank, cfg)?;
            emit(&file.to_json(), cfg, stdout)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}
