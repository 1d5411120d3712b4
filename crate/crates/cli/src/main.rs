use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use psgate::commands::{self, CircuitSource, CliError, GateInput, InputSpec, Outcome, SolveParams, EXIT_INVALID};
use psgate::report::render_text;
use psgate_core::probability::OptimizationConfig;
use psgate_core::solver::SignBranch;

/// Two-qubit gates from two photons, linear optics and post-selection.
///
/// Exit codes: 0 success or achievable, 1 not achievable, 2 invalid input.
#[derive(Parser)]
#[command(name = "psgate", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GateArgs {
    /// cnot | cz | swap | iswap | sqrt_swap | cphase PHI | canonical A B G
    /// (radians).
    #[arg(value_name = "GATE", num_args = 0.., allow_negative_numbers = true)]
    gate: Vec<String>,
    /// 4x4 gate matrix file: {"rows": [[[re, im], ...], ...]}.
    #[arg(long, value_name = "FILE")]
    matrix: Option<PathBuf>,
}

impl From<GateArgs> for GateInput {
    fn from(a: GateArgs) -> Self {
        GateInput { tokens: a.gate, matrix: a.matrix }
    }
}

#[derive(Args)]
struct Output {
    /// Print the JSON report instead of text.
    #[arg(long)]
    json: bool,
    /// Write the JSON report (the network, for compile) to FILE.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Tolerance {
    /// Decision tolerance.
    #[arg(long, env = "PSGATE_DEFAULT_TOL", default_value_t = psgate_core::linalg::DECISION_TOL)]
    tol: f64,
}

#[derive(Args)]
struct Search {
    /// Optimizer starts per branch.
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Decide achievability.
    Check {
        #[command(flatten)]
        gate: GateArgs,
        #[command(flatten)]
        tol: Tolerance,
        #[command(flatten)]
        output: Output,
    },
    /// Construct a submatrix implementing the gate.
    Solve {
        #[command(flatten)]
        gate: GateArgs,
        /// Free parameter u23, e.g. 0.5 or 1-2i.
        #[arg(long, allow_hyphen_values = true)]
        u23: Option<Complex64>,
        /// Free parameter u30.
        #[arg(long, allow_hyphen_values = true)]
        u30: Option<Complex64>,
        /// Sign branch b1 b2 b3 b4, e.g. ++-+.
        #[arg(long, allow_hyphen_values = true)]
        branch: Option<SignBranch>,
        #[command(flatten)]
        tol: Tolerance,
        #[command(flatten)]
        output: Output,
    },
    /// Maximize the success probability.
    Optimize {
        #[command(flatten)]
        gate: GateArgs,
        #[command(flatten)]
        search: Search,
        /// Include the dilated 8x8 unitary.
        #[arg(long)]
        dilate: bool,
        #[command(flatten)]
        tol: Tolerance,
        #[command(flatten)]
        output: Output,
    },
    /// Build a beam-splitter network for the gate.
    Compile {
        #[command(flatten)]
        gate: GateArgs,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        tol: Tolerance,
        #[command(flatten)]
        output: Output,
    },
    /// Run two photons through a network or mode unitary. A GATE, if given,
    /// is compared with the post-selected block.
    Simulate {
        #[arg(long, value_name = "FILE", conflicts_with = "unitary", required_unless_present = "unitary")]
        network: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        unitary: Option<PathBuf>,
        /// all, 00..11, or a mode pair i,j.
        #[arg(long, default_value = "all")]
        input: InputSpec,
        #[command(flatten)]
        gate: GateArgs,
        #[command(flatten)]
        output: Output,
    },
}

fn config(search: &Search, tol: f64) -> OptimizationConfig {
    OptimizationConfig {
        restarts: search.restarts,
        seed: search.seed,
        tolerance: tol,
        ..Default::default()
    }
}

fn check_tol(tol: f64) -> Result<f64, CliError> {
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err(CliError::Invalid(format!("tolerance must be positive, got {tol}")))
    }
}

fn run(command: Command) -> (Result<Outcome, CliError>, Output) {
    match command {
        Command::Check { gate, tol, output } => {
            let r = check_tol(tol.tol).and_then(|t| commands::check(&gate.into(), t));
            (r, output)
        }
        Command::Solve { gate, u23, u30, branch, tol, output } => {
            let params = SolveParams { u23, u30, branch };
            let r = check_tol(tol.tol).and_then(|t| commands::solve(&gate.into(), &params, t));
            (r, output)
        }
        Command::Optimize { gate, search, dilate, tol, output } => {
            let r = check_tol(tol.tol).and_then(|t| commands::optimize(&gate.into(), &config(&search, t), dilate));
            (r, output)
        }
        Command::Compile { gate, search, tol, output } => {
            let r = check_tol(tol.tol).and_then(|t| commands::compile(&gate.into(), &config(&search, t)));
            (r, output)
        }
        Command::Simulate { network, unitary, input, gate, output } => {
            let source = match (network, unitary) {
                (Some(p), _) => CircuitSource::Network(p),
                (None, Some(p)) => CircuitSource::Unitary(p),
                (None, None) => unreachable!("clap requires one source"),
            };
            let target: GateInput = gate.into();
            let has_target = !target.tokens.is_empty() || target.matrix.is_some();
            let r = commands::simulate(&source, input, has_target.then_some(&target));
            (r, output)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, output) = run(cli.command);
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("psgate: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let json = outcome.report.to_json();
    if let Some(path) = &output.out {
        let payload = outcome.network_json.as_deref().unwrap_or(&json);
        if let Err(e) = std::fs::write(path, format!("{payload}\n")) {
            eprintln!("psgate: {}: {e}", path.display());
            return ExitCode::from(EXIT_INVALID as u8);
        }
    }
    if output.json {
        println!("{json}");
    } else {
        print!("{}", render_text(&outcome.report));
    }
    ExitCode::from(outcome.exit_code as u8)
}
