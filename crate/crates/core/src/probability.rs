//! Success probability of a solution and its maximization over the free
//! parameters of the construction.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::achievability;
use crate::cartan::{self, CanonicalWeights, CartanDecomposition};
use crate::error::{Error, Result};
use crate::gatemap;
use crate::linalg::{self, ComplexMatrix, DECISION_TOL};
use crate::quasi_newton::{self, BfgsOptions};
use crate::solver::{
    self, Construction, GateSolution, Reduction, RootChoice, SignBranch, SolutionPoint, ZeroParams,
};

/// `min(1, s1^-4)`: the map is homogeneous of degree two, so scaling the
/// submatrix by `1/s1` scales the gate amplitude by `s1^-2`.
pub fn success_probability(u: &ComplexMatrix) -> f64 {
    let s1 = linalg::largest_singular_value(u);
    if s1 <= 1.0 {
        1.0
    } else {
        s1.powi(-4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizationConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub objective_tolerance: f64,
    pub seed: u64,
    /// Start moduli are log-uniform in `[1/start_radius, start_radius]`.
    pub start_radius: f64,
    /// Decision tolerance for achievability and zero weights.
    pub tolerance: f64,
    pub parallel: bool,
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iterations: 500,
            objective_tolerance: 1e-10,
            seed: 0,
            start_radius: 3.0,
            tolerance: DECISION_TOL,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone)]
pub enum OptimizationTarget {
    Weights(CanonicalWeights),
    Gate(ComplexMatrix),
}

#[derive(Debug, Clone)]
pub struct OptimizationReport {
    pub best_p: f64,
    pub best_s1: f64,
    /// Label of the family holding the optimum.
    pub best_family: String,
    /// Optimum in the canonical frame.
    pub best_point: SolutionPoint,
    /// Best probability per family (sign branch, zero-case root, shortcut).
    pub per_branch_best: BTreeMap<String, f64>,
    pub starts_converged: usize,
    pub starts_total: usize,
    /// Objective (largest singular value) per iteration of the winning start.
    pub objective_history: Vec<f64>,
    pub weights: CanonicalWeights,
    /// Present for gate targets: the optimum carried to the gate's frame.
    pub gate_solution: Option<GateSolution>,
}

#[derive(Debug, Clone)]
enum Family {
    NonZero(SignBranch),
    Zero(RootChoice),
}

impl Family {
    fn label(&self) -> String {
        match self {
            Family::NonZero(b) => format!("branch {b}"),
            Family::Zero(RootChoice::Larger) => "zero larger-root".into(),
            Family::Zero(RootChoice::Smaller) => "zero smaller-root".into(),
        }
    }
}

struct Problem<'a> {
    weights: &'a CanonicalWeights,
    reduction: Option<Reduction>,
    tol: f64,
}

impl Problem<'_> {
    fn build(&self, family: &Family, x: &DVector<f64>) -> Option<(ComplexMatrix, Construction)> {
        let p = Complex64::new(x[0], x[1]);
        let q = Complex64::new(x[2], x[3]);
        let built = match family {
            Family::NonZero(branch) => Some(solver::construct_nonzero(self.weights, *branch, p, q)),
            Family::Zero(root) => {
                let reduction = self.reduction.as_ref()?;
                let params = ZeroParams { scale32: p, scale30: q, root: *root };
                solver::construct_zero(reduction, &params, self.tol)
                    .ok()
                    .map(|u| (u, Construction::Zero { zero_index: reduction.zero_index, params }))
            }
        }?;
        linalg::is_finite(&built.0).then_some(built)
    }

    fn objective(&self, family: &Family, x: &DVector<f64>) -> f64 {
        match self.build(family, x) {
            Some((u, _)) => linalg::largest_singular_value(&u),
            None => f64::INFINITY,
        }
    }
}

struct StartResult {
    family: usize,
    value: f64,
    x: DVector<f64>,
    converged: bool,
    history: Vec<f64>,
}

fn random_start(rng: &mut ChaCha8Rng, radius: f64) -> DVector<f64> {
    let log_r = radius.ln();
    let mut x = DVector::zeros(4);
    for k in 0..2 {
        let modulus = rng.random_range(-log_r..=log_r).exp();
        let phase = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        x[2 * k] = modulus * phase.cos();
        x[2 * k + 1] = modulus * phase.sin();
    }
    x
}

fn run_start(problem: &Problem, families: &[Family], job: (usize, usize), cfg: &OptimizationConfig) -> StartResult {
    let (fi, start) = job;
    let family = &families[fi];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(((fi as u64) << 32) | start as u64);
    // Starts on a singular set are redrawn from the same stream.
    let mut x0 = random_start(&mut rng, cfg.start_radius);
    for _ in 0..16 {
        if problem.objective(family, &x0).is_finite() {
            break;
        }
        x0 = random_start(&mut rng, cfg.start_radius);
    }
    let opts = BfgsOptions {
        max_iterations: cfg.max_iterations,
        objective_tolerance: cfg.objective_tolerance,
        ..Default::default()
    };
    let m = quasi_newton::minimize(|x: &DVector<f64>| problem.objective(family, x), x0, &opts);
    StartResult {
        family: fi,
        value: m.value,
        converged: m.converged() && m.value.is_finite(),
        x: m.x,
        history: m.history,
    }
}

fn p_from_s1(s1: f64) -> f64 {
    if s1 <= 1.0 {
        1.0
    } else {
        s1.powi(-4)
    }
}

/// Maximizes the success probability over every admissible construction of
/// the canonical weights `w`.
pub fn optimize_weights(w: &CanonicalWeights, cfg: &OptimizationConfig) -> Result<OptimizationReport> {
    if !achievability::check_weights(w, cfg.tolerance).achievable {
        return Err(Error::NotAchievable);
    }
    let tol = cfg.tolerance;
    let zero_case = solver::smallest_weight(w).1 <= tol;
    let (families, reduction) = if zero_case {
        let reduction = solver::reduce_to_w1_zero(w, tol)?;
        let [_, r2, r3, _] = reduction.reduced.as_array();
        let families = if r2.norm() > tol && r3.norm() > tol {
            vec![Family::Zero(RootChoice::Larger), Family::Zero(RootChoice::Smaller)]
        } else {
            vec![Family::Zero(RootChoice::Larger)]
        };
        (families, Some(reduction))
    } else {
        let branches = solver::valid_branches(w, tol)?;
        if branches.is_empty() {
            return Err(Error::NotAchievable);
        }
        (branches.into_iter().map(Family::NonZero).collect(), None)
    };
    let problem = Problem { weights: w, reduction, tol };

    let jobs: Vec<(usize, usize)> = (0..families.len())
        .flat_map(|f| (0..cfg.restarts).map(move |s| (f, s)))
        .collect();
    let results: Vec<StartResult> = if cfg.parallel {
        jobs.par_iter().map(|&j| run_start(&problem, &families, j, cfg)).collect()
    } else {
        jobs.iter().map(|&j| run_start(&problem, &families, j, cfg)).collect()
    };

    let mut per_branch_best = BTreeMap::new();
    for f in &families {
        per_branch_best.insert(f.label(), 0.0);
    }
    let mut best: Option<(&StartResult, f64)> = None;
    for r in &results {
        if !r.value.is_finite() {
            continue;
        }
        let p = p_from_s1(r.value);
        let entry = per_branch_best.entry(families[r.family].label()).or_insert(0.0);
        *entry = f64::max(*entry, p);
        if best.is_none_or(|(b, _)| r.value < b.value) {
            best = Some((r, p));
        }
    }
    let starts_converged = results.iter().filter(|r| r.converged).count();

    let shortcut = if zero_case { solver::exact_shortcut(w, tol) } else { None };
    if let Some(s) = &shortcut {
        let Construction::Shortcut { name } = &s.construction else { unreachable!() };
        per_branch_best.insert(format!("shortcut {name}"), success_probability(&s.submatrix));
    }

    let mut candidate = best.map(|(r, _)| {
        let (u, construction) = problem
            .build(&families[r.family], &r.x)
            .expect("finite optimum rebuilds");
        (u, construction, families[r.family].label(), r.history.clone())
    });
    if let Some(s) = shortcut {
        let s1 = linalg::largest_singular_value(&s.submatrix);
        let better = candidate
            .as_ref()
            .is_none_or(|(u, ..)| s1 <= linalg::largest_singular_value(u));
        if better {
            let Construction::Shortcut { name } = &s.construction else { unreachable!() };
            candidate = Some((s.submatrix, s.construction.clone(), format!("shortcut {name}"), vec![s1]));
        }
    }
    let Some((submatrix, construction, best_family, objective_history)) = candidate else {
        return Err(Error::NoConvergence);
    };

    let f_residual = linalg::max_abs_diff(&gatemap::f(&submatrix), &w.matrix());
    let best_s1 = linalg::largest_singular_value(&submatrix);
    Ok(OptimizationReport {
        best_p: success_probability(&submatrix),
        best_s1,
        best_family,
        best_point: SolutionPoint { construction, submatrix, f_residual },
        per_branch_best,
        starts_converged,
        starts_total: results.len(),
        objective_history,
        weights: *w,
        gate_solution: None,
    })
}

/// Maximizes the success probability for a gate: KAK, canonical
/// optimization, transport of the optimum to the gate's frame.
pub fn optimize_gate(w_in: &ComplexMatrix, cfg: &OptimizationConfig) -> Result<OptimizationReport> {
    let decomposition: CartanDecomposition = cartan::kak_decompose(w_in)?;
    if !achievability::check_triple(&decomposition.triple, cfg.tolerance).achievable {
        return Err(Error::NotAchievable);
    }
    let weights = cartan::weights_from_triple(&decomposition.triple);
    let mut report = optimize_weights(&weights, cfg)?;
    report.gate_solution = Some(solver::finish_gate_solution(
        w_in,
        report.best_point.clone(),
        decomposition,
    )?);
    Ok(report)
}

pub fn optimize(target: &OptimizationTarget, cfg: &OptimizationConfig) -> Result<OptimizationReport> {
    match target {
        OptimizationTarget::Weights(w) => optimize_weights(w, cfg),
        OptimizationTarget::Gate(m) => optimize_gate(m, cfg),
    }
}

#[derive(Debug, Clone)]
pub struct NetworkProbability {
    pub p: f64,
    /// `block ~ kappa W`.
    pub kappa: Complex64,
    pub proportionality_residual: f64,
    pub block: ComplexMatrix,
}

/// Post-selected success probability of a mode unitary for the target `w`.
/// Fails with `NotProportional` if the simulated block is not a multiple of
/// `w` within `tol`.
pub fn probability_of_network(u: &ComplexMatrix, w: &ComplexMatrix, tol: f64) -> Result<NetworkProbability> {
    linalg::ensure_shape(w, 4, 4)?;
    let block = gatemap::transfer_matrix(u)?.block;
    let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if norm == 0.0 {
        return Err(Error::DegenerateInput("zero target".into()));
    }
    let kappa = w.iter().zip(block.iter()).map(|(a, b)| a.conj() * b).sum::<Complex64>() / norm;
    let proportionality_residual = linalg::max_abs_diff(&block, &(w * kappa));
    if proportionality_residual > tol {
        return Err(Error::NotProportional(proportionality_residual));
    }
    Ok(NetworkProbability {
        p: kappa.norm_sqr(),
        kappa,
        proportionality_residual,
        block,
    })
}
