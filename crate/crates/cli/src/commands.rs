//! Subcommand pipelines. Each returns a report and an exit status; errors
//! carry their own exit code.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use psgate_core::achievability;
use psgate_core::cartan::{self, CartanDecomposition};
use psgate_core::dilation::{self, OpticalNetwork};
use psgate_core::gatemap;
use psgate_core::linalg::{self, ComplexMatrix};
use psgate_core::probability::{self, OptimizationConfig, OptimizationReport};
use psgate_core::solver::{self, GateSolution, NonZeroPoint, SignBranch};
use psgate_core::Error;

use crate::gates::{self, GATE_UNITARITY_TOL};
use crate::matrix_io::{self, MatrixJson};
use crate::report::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_ACHIEVABLE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

/// Proportionality tolerance for simulated blocks.
pub const PROPORTIONALITY_TOL: f64 = 1e-7;
/// Allowed gap between the optimized and the simulated probability.
pub const PROBABILITY_AGREEMENT_TOL: f64 = 1e-3;
/// Reconstruction tolerance for compiled networks.
pub const NETWORK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    NotAchievable(String),
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::NotAchievable(_) => EXIT_NOT_ACHIEVABLE,
            CliError::Invalid(_) => EXIT_INVALID,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotAchievable => CliError::NotAchievable(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: ReportDocument,
    pub exit_code: i32,
    /// Network document for `compile`.
    pub network_json: Option<String>,
}

impl Outcome {
    fn ok(report: ReportDocument) -> Self {
        Self { report, exit_code: EXIT_OK, network_json: None }
    }
}

/// A gate given by name tokens or by a matrix file.
#[derive(Debug, Clone, Default)]
pub struct GateInput {
    pub tokens: Vec<String>,
    pub matrix: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct ResolvedGate {
    pub name: String,
    pub matrix: ComplexMatrix,
}

pub fn resolve_gate(input: &GateInput) -> CliResult<ResolvedGate> {
    let (name, matrix) = match (&input.matrix, input.tokens.is_empty()) {
        (Some(_), false) => {
            return Err(CliError::Invalid("give either a gate name or --matrix, not both".into()))
        }
        (Some(path), true) => (path.display().to_string(), matrix_io::read_matrix(path).map_err(CliError::Invalid)?),
        (None, _) => {
            let g = gates::parse_named_gate(&input.tokens).map_err(|e| CliError::Invalid(e.0))?;
            (g.to_string(), g.matrix())
        }
    };
    linalg::ensure_shape(&matrix, 4, 4)?;
    linalg::ensure_unitary(&matrix, GATE_UNITARITY_TOL)?;
    Ok(ResolvedGate { name, matrix })
}

fn analyze(gate: &ResolvedGate, report: &mut ReportDocument) -> CliResult<CartanDecomposition> {
    let d = cartan::kak_decompose(&gate.matrix)?;
    report.gate = Some(GateSummary {
        name: gate.name.clone(),
        matrix: MatrixJson::from_matrix(&gate.matrix),
        triple: d.triple,
        weights: cartan::weights_from_triple(&d.triple),
        global_phase: d.global_phase,
    });
    let diag = &mut report.diagnostics;
    diag.insert("gate_unitarity_residual".into(), linalg::unitarity_residual(&gate.matrix)?);
    diag.insert("gate_unitarity_tolerance".into(), GATE_UNITARITY_TOL);
    diag.insert("kak_residual".into(), d.residual(&gate.matrix));
    Ok(d)
}

fn verdicts(report: &mut ReportDocument, d: &CartanDecomposition, tol: f64) -> bool {
    let verdict = achievability::check_triple(&d.triple, tol);
    let weights = cartan::weights_from_triple(&d.triple);
    // |signed sum| = 2|sin(angle distance)|.
    report.weight_verdict = Some(achievability::check_weights(&weights, 2.0 * tol));
    let achievable = verdict.achievable;
    report.verdict = Some(verdict);
    achievable
}

pub fn check(input: &GateInput, tol: f64) -> CliResult<Outcome> {
    let gate = resolve_gate(input)?;
    let mut report = ReportDocument::new("check");
    let d = analyze(&gate, &mut report)?;
    let achievable = verdicts(&mut report, &d, tol);
    Ok(Outcome {
        report,
        exit_code: if achievable { EXIT_OK } else { EXIT_NOT_ACHIEVABLE },
        network_json: None,
    })
}

fn solution_report(s: &GateSolution) -> SolutionReport {
    SolutionReport {
        construction: s.canonical.construction.clone(),
        submatrix: MatrixJson::from_matrix(&s.submatrix),
        unscaled: MatrixJson::from_matrix(&s.unscaled),
        p: s.p,
        s1: linalg::largest_singular_value(&s.unscaled),
        f_residual: s.f_residual,
        canonical_f_residual: s.canonical.f_residual,
    }
}

/// Explicit free parameters for `solve`.
#[derive(Debug, Clone, Default)]
pub struct SolveParams {
    pub u23: Option<Complex64>,
    pub u30: Option<Complex64>,
    pub branch: Option<SignBranch>,
}

pub fn solve(input: &GateInput, params: &SolveParams, tol: f64) -> CliResult<Outcome> {
    let gate = resolve_gate(input)?;
    let mut report = ReportDocument::new("solve");
    let d = analyze(&gate, &mut report)?;
    if !verdicts(&mut report, &d, tol) {
        return Err(CliError::NotAchievable(format!("{} is not achievable", gate.name)));
    }
    let point = (params.u23.is_some() || params.u30.is_some() || params.branch.is_some()).then(|| NonZeroPoint {
        branch: params.branch,
        u23: params.u23.unwrap_or(linalg::ONE),
        u30: params.u30.unwrap_or(linalg::ONE),
    });
    let s = solver::solve_gate(&gate.matrix, point, tol)?;
    report.diagnostics.insert("solution_tolerance".into(), solver::SOLUTION_TOL);
    report.solution = Some(solution_report(&s));
    Ok(Outcome::ok(report))
}

fn optimized(gate: &ResolvedGate, cfg: &OptimizationConfig, report: &mut ReportDocument) -> CliResult<(OptimizationReport, GateSolution)> {
    let d = analyze(gate, report)?;
    if !verdicts(report, &d, cfg.tolerance) {
        return Err(CliError::NotAchievable(format!("{} is not achievable", gate.name)));
    }
    let mut r = probability::optimize_gate(&gate.matrix, cfg)?;
    let solution = r.gate_solution.take().expect("gate target yields a gate solution");
    report.solution = Some(solution_report(&solution));
    report.optimization = Some(OptimizationSummary {
        restarts: cfg.restarts,
        seed: cfg.seed,
        best_p: r.best_p,
        best_s1: r.best_s1,
        best_family: r.best_family.clone(),
        per_branch_best: r.per_branch_best.clone(),
        starts_converged: r.starts_converged,
        starts_total: r.starts_total,
        objective_history: r.objective_history.clone(),
        dilated_unitary: None,
    });
    Ok((r, solution))
}

pub fn optimize(input: &GateInput, cfg: &OptimizationConfig, show_dilation: bool) -> CliResult<Outcome> {
    let gate = resolve_gate(input)?;
    let mut report = ReportDocument::new("optimize");
    let (_, solution) = optimized(&gate, cfg, &mut report)?;
    if show_dilation {
        let u8 = dilation::dilate(&solution.submatrix, linalg::ALGEBRAIC_TOL)?;
        report.diagnostics.insert("dilation_unitarity_residual".into(), linalg::unitarity_residual(&u8)?);
        if let Some(o) = report.optimization.as_mut() {
            o.dilated_unitary = Some(MatrixJson::from_matrix(&u8));
        }
    }
    Ok(Outcome::ok(report))
}

/// optimize, dilate, decompose; the network is rebuilt and simulated before
/// it is returned.
pub fn compile(input: &GateInput, cfg: &OptimizationConfig) -> CliResult<Outcome> {
    let gate = resolve_gate(input)?;
    let mut report = ReportDocument::new("compile");
    let (r, solution) = optimized(&gate, cfg, &mut report)?;
    let u8 = dilation::dilate(&solution.submatrix, linalg::ALGEBRAIC_TOL)?;
    let network = dilation::reck_decompose(&u8)?;
    let rebuilt = dilation::network_to_unitary(&network)?;
    let reconstruction = linalg::max_abs_diff(&rebuilt, &u8);
    if reconstruction > NETWORK_TOL {
        return Err(CliError::Invalid(format!("network reconstruction residual {reconstruction:.3e}")));
    }
    let sim = probability::probability_of_network(&rebuilt, &gate.matrix, PROPORTIONALITY_TOL)?;
    let gap = (sim.p - r.best_p).abs();
    if gap > PROBABILITY_AGREEMENT_TOL {
        return Err(CliError::Invalid(format!(
            "simulated probability {:.6} differs from optimum {:.6}",
            sim.p, r.best_p
        )));
    }
    let diag = &mut report.diagnostics;
    diag.insert("dilation_unitarity_residual".into(), linalg::unitarity_residual(&u8)?);
    diag.insert("network_reconstruction_residual".into(), reconstruction);
    diag.insert("network_tolerance".into(), NETWORK_TOL);
    diag.insert("simulated_p".into(), sim.p);
    diag.insert("simulated_p_gap".into(), gap);
    diag.insert("proportionality_residual".into(), sim.proportionality_residual);
    diag.insert("proportionality_tolerance".into(), PROPORTIONALITY_TOL);
    let network_json = serde_json::to_string_pretty(&network).expect("network serializes");
    report.network = Some(network);
    Ok(Outcome { report, exit_code: EXIT_OK, network_json: Some(network_json) })
}

#[derive(Debug, Clone)]
pub enum CircuitSource {
    Network(PathBuf),
    Unitary(PathBuf),
}

/// Which photon input to trace through the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputSpec {
    All,
    Modes(usize, usize),
}

impl std::str::FromStr for InputSpec {
    type Err = String;

    /// `all`, a logical basis label `00`..`11`, or a mode pair `i,j`.
    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim().trim_start_matches('|').trim_end_matches('>');
        if t.eq_ignore_ascii_case("all") {
            return Ok(InputSpec::All);
        }
        if let Some(idx) = ["00", "01", "10", "11"].iter().position(|l| *l == t) {
            let (i, j) = gatemap::COMPUTATIONAL_PAIRS[idx];
            return Ok(InputSpec::Modes(i, j));
        }
        let parts: Vec<&str> = t.split(',').map(str::trim).collect();
        match parts[..] {
            [a, b] => match (a.parse(), b.parse()) {
                (Ok(i), Ok(j)) => Ok(InputSpec::Modes(i, j)),
                _ => Err(format!("invalid mode pair {s:?}")),
            },
            _ => Err(format!("input must be all, 00..11 or a mode pair i,j; got {s:?}")),
        }
    }
}

fn read_circuit(source: &CircuitSource) -> CliResult<ComplexMatrix> {
    let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())));
    match source {
        CircuitSource::Network(p) => {
            let net: OpticalNetwork = serde_json::from_str(&read(p)?)
                .map_err(|e| CliError::Invalid(format!("{}: invalid network JSON: {e}", p.display())))?;
            Ok(dilation::network_to_unitary(&net)?)
        }
        CircuitSource::Unitary(p) => {
            let u = matrix_io::parse_matrix(&read(p)?).map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))?;
            linalg::ensure_square(&u)?;
            linalg::ensure_unitary(&u, GATE_UNITARITY_TOL)?;
            Ok(u)
        }
    }
}

pub fn simulate(source: &CircuitSource, input: InputSpec, target: Option<&GateInput>) -> CliResult<Outcome> {
    let u = read_circuit(source)?;
    let n = u.nrows();
    let mut report = ReportDocument::new("simulate");
    let mut sim = SimulationReport {
        n_modes: n,
        block: None,
        success_probabilities: None,
        input: None,
        target: None,
    };
    if n >= 4 {
        let t = gatemap::transfer_matrix(&u)?;
        report.diagnostics.insert("formula_residual".into(), t.formula_residual);
        sim.block = Some(MatrixJson::from_matrix(&t.block));
        sim.success_probabilities = Some(t.success_probabilities);
    }
    if let InputSpec::Modes(i, j) = input {
        let state = gatemap::evolve_two_photons(&u, (i, j))?;
        let (_, p) = gatemap::postselect_computational(&state);
        sim.input = Some(InputReport {
            modes: [i, j],
            output: state
                .amplitudes
                .iter()
                .filter(|(_, a)| a.norm() > 1e-15)
                .map(|(&(k, l), &amplitude)| OutputAmplitude { modes: [k, l], amplitude })
                .collect(),
            computational_probability: p,
        });
    }
    if let Some(target) = target {
        let gate = resolve_gate(target)?;
        // Reported, not enforced.
        let np = probability::probability_of_network(&u, &gate.matrix, f64::INFINITY)?;
        sim.target = Some(TargetCheck {
            name: gate.name,
            kappa: np.kappa,
            p: np.p,
            proportionality_residual: np.proportionality_residual,
            tolerance: PROPORTIONALITY_TOL,
        });
    }
    report.simulation = Some(sim);
    Ok(Outcome::ok(report))
}
