//! Report documents (`schema: "psgate/1"`) and their text rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use psgate_core::achievability::AchievabilityVerdict;
use psgate_core::cartan::{CanonicalTriple, CanonicalWeights};
use psgate_core::dilation::OpticalNetwork;
use psgate_core::solver::Construction;
use serde::{Deserialize, Serialize};

use crate::matrix_io::MatrixJson;

pub const SCHEMA: &str = "psgate/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateSummary>,
    /// Angle criterion on the canonical triple.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<AchievabilityVerdict>,
    /// Weight criterion, evaluated at twice the angle tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_verdict: Option<AchievabilityVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimization: Option<OptimizationSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<OpticalNetwork>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationReport>,
    /// Residuals and tolerances keyed by name.
    #[serde(default)]
    pub diagnostics: BTreeMap<String, f64>,
}

impl ReportDocument {
    pub fn new(command: &str) -> Self {
        Self {
            schema: SCHEMA.into(),
            command: command.into(),
            gate: None,
            verdict: None,
            weight_verdict: None,
            solution: None,
            optimization: None,
            network: None,
            simulation: None,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSummary {
    pub name: String,
    pub matrix: MatrixJson,
    pub triple: CanonicalTriple,
    pub weights: CanonicalWeights,
    pub global_phase: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub construction: Construction,
    /// Contraction with `f(submatrix) = sqrt(p) W`.
    pub submatrix: MatrixJson,
    /// Solution of `f(U) = W` before rescaling.
    pub unscaled: MatrixJson,
    pub p: f64,
    pub s1: f64,
    /// `max |f(submatrix) - sqrt(p) W|`.
    pub f_residual: f64,
    /// `max |f(U) - C|` in the canonical frame.
    pub canonical_f_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationSummary {
    pub restarts: usize,
    pub seed: u64,
    pub best_p: f64,
    pub best_s1: f64,
    pub best_family: String,
    pub per_branch_best: BTreeMap<String, f64>,
    pub starts_converged: usize,
    pub starts_total: usize,
    pub objective_history: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dilated_unitary: Option<MatrixJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub n_modes: usize,
    /// Post-selected computational block; absent with fewer than 4 modes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub success_probabilities: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputReport {
    pub modes: [usize; 2],
    /// Nonzero output amplitudes keyed by occupied modes `[k, l]`, `k <= l`.
    pub output: Vec<OutputAmplitude>,
    /// Probability of landing in the computational subspace.
    pub computational_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputAmplitude {
    pub modes: [usize; 2],
    pub amplitude: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetCheck {
    pub name: String,
    /// `block ~ kappa W`.
    pub kappa: Complex64,
    pub p: f64,
    pub proportionality_residual: f64,
    pub tolerance: f64,
}

fn fmt_c(z: Complex64) -> String {
    format!("{:+.6}{:+.6}i", z.re, z.im)
}

fn fmt_matrix(out: &mut String, m: &MatrixJson) {
    for row in &m.rows {
        let cells: Vec<String> = row.iter().map(|&[re, im]| fmt_c(Complex64::new(re, im))).collect();
        let _ = writeln!(out, "    [{}]", cells.join(", "));
    }
}

fn fmt_verdict(out: &mut String, label: &str, v: &AchievabilityVerdict) {
    let _ = writeln!(
        out,
        "{label}: {} (witness {}, residual {:.3e}, tol {:.1e})",
        if v.achievable { "achievable" } else { "not achievable" },
        v.witness,
        v.residual,
        v.tolerance
    );
}

pub fn render_text(r: &ReportDocument) -> String {
    let mut out = String::new();
    if let Some(g) = &r.gate {
        let t = g.triple;
        let _ = writeln!(out, "gate: {}", g.name);
        let _ = writeln!(out, "triple: alpha={:.9} beta={:.9} gamma={:.9}", t.alpha, t.beta, t.gamma);
        let w = g.weights.as_array().map(fmt_c);
        let _ = writeln!(out, "weights: w1={} w2={} w3={} w4={}", w[0], w[1], w[2], w[3]);
    }
    if let Some(v) = &r.verdict {
        fmt_verdict(&mut out, "angle criterion", v);
    }
    if let Some(v) = &r.weight_verdict {
        fmt_verdict(&mut out, "weight criterion", v);
    }
    if let Some(s) = &r.solution {
        let how = match &s.construction {
            Construction::NonZero { branch, .. } => format!("non-zero case, branch {branch}"),
            Construction::Zero { zero_index, .. } => format!("zero case, w{zero_index} = 0"),
            Construction::Shortcut { name } => format!("exact {name} solution"),
        };
        let _ = writeln!(out, "construction: {how}");
        let _ = writeln!(out, "p = {:.9} (s1 = {:.9})", s.p, s.s1);
        let _ = writeln!(out, "f residual: {:.3e}", s.f_residual);
        let _ = writeln!(out, "submatrix:");
        fmt_matrix(&mut out, &s.submatrix);
    }
    if let Some(o) = &r.optimization {
        let _ = writeln!(out, "best p = {:.9} (s1 = {:.9}, {})", o.best_p, o.best_s1, o.best_family);
        let _ = writeln!(
            out,
            "starts: {} converged of {} ({} restarts, seed {})",
            o.starts_converged, o.starts_total, o.restarts, o.seed
        );
        for (family, p) in &o.per_branch_best {
            let _ = writeln!(out, "  {family:<22} p = {p:.9}");
        }
        if let Some(u) = &o.dilated_unitary {
            let _ = writeln!(out, "dilated unitary:");
            fmt_matrix(&mut out, u);
        }
    }
    if let Some(n) = &r.network {
        let _ = writeln!(
            out,
            "network: {} modes, {} beam splitters, {} phase shifters",
            n.n_modes,
            n.beam_splitter_count(),
            n.phase_shifter_count()
        );
    }
    if let Some(s) = &r.simulation {
        let _ = writeln!(out, "modes: {}", s.n_modes);
        if let Some(b) = &s.block {
            let _ = writeln!(out, "post-selected block:");
            fmt_matrix(&mut out, b);
        }
        if let Some(p) = &s.success_probabilities {
            let _ = writeln!(
                out,
                "success probabilities |00>,|01>,|10>,|11>: {:.9} {:.9} {:.9} {:.9}",
                p[0], p[1], p[2], p[3]
            );
        }
        if let Some(i) = &s.input {
            let _ = writeln!(out, "input modes ({}, {}):", i.modes[0], i.modes[1]);
            for a in &i.output {
                let _ = writeln!(out, "  |{},{}>  {}", a.modes[0], a.modes[1], fmt_c(a.amplitude));
            }
            let _ = writeln!(out, "  computational subspace probability: {:.9}", i.computational_probability);
        }
        if let Some(t) = &s.target {
            let _ = writeln!(
                out,
                "target {}: p = {:.9}, proportionality residual {:.3e} (tol {:.1e})",
                t.name, t.p, t.proportionality_residual, t.tolerance
            );
        }
    }
    if !r.diagnostics.is_empty() {
        let _ = writeln!(out, "diagnostics:");
        for (k, v) in &r.diagnostics {
            let _ = writeln!(out, "  {k}: {v:.3e}");
        }
    }
    out
}
