//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::time::Instant;

use psgate_core::achievability;
use psgate_core::cartan::{self, CanonicalTriple, CanonicalWeights};
use psgate_core::dilation;
use psgate_core::gatemap;
use psgate_core::linalg::{self, c, ComplexMatrix, ALGEBRAIC_TOL, DECISION_TOL};
use psgate_core::probability::{self, OptimizationConfig};
use psgate_core::solver::{self, RootChoice, ZeroParams};
use rand::Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn cnot() -> ComplexMatrix {
    linalg::from_real_rows(&[
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
    ])
}

fn cz() -> ComplexMatrix {
    linalg::from_real_rows(&[
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
    ])
}

fn benchmark_config() -> OptimizationConfig {
    OptimizationConfig { restarts: 64, seed: 7, ..Default::default() }
}

fn cnot_benchmark() -> Outcome {
    let start = Instant::now();
    let r = probability::optimize_gate(&cnot(), &benchmark_config());
    let secs = start.elapsed().as_secs_f64();
    match r {
        Ok(r) => {
            let gap = (r.best_p - 1.0 / 9.0).abs();
            outcome(gap <= 1e-3 && secs < 60.0, format!("best_p = {:.9}, |best_p - 1/9| = {gap:.2e}, {secs:.1} s", r.best_p))
        }
        Err(e) => outcome(false, format!("optimizer error: {e}")),
    }
}

fn cz_benchmark() -> Outcome {
    let run = || -> psgate_core::Result<(f64, f64, f64, f64)> {
        let r = probability::optimize_gate(&cz(), &benchmark_config())?;
        let sol = r.gate_solution.as_ref().expect("gate target");
        let u8 = dilation::dilate(&sol.submatrix, ALGEBRAIC_TOL)?;
        let circuit = dilation::network_to_unitary(&dilation::reck_decompose(&u8)?)?;
        // Measured with an unbounded tolerance so the residual is reported.
        let sim = probability::probability_of_network(&circuit, &cz(), f64::INFINITY)?;
        Ok((r.best_p, sim.p, sim.proportionality_residual, (sim.p - r.best_p).abs()))
    };
    match run() {
        Ok((best, p, prop, gap)) => outcome(
            (best - 1.0 / 9.0).abs() <= 1e-3 && prop < 1e-7 && gap <= 1e-3,
            format!("best_p = {best:.9}, simulated p = {p:.9}, proportionality residual = {prop:.2e}, |p - best_p| = {gap:.2e}"),
        ),
        Err(e) => outcome(false, format!("pipeline error: {e}")),
    }
}

fn grid_equivalence() -> Outcome {
    let n = 50;
    let band = 1e-5;
    let (mut disagreements, mut in_band, mut achievable) = (0usize, 0usize, 0usize);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let step = PI / n as f64;
                let t = CanonicalTriple::new(i as f64 * step, j as f64 * step, k as f64 * step);
                let a = achievability::check_triple(&t, DECISION_TOL);
                let w = achievability::check_weights(&cartan::weights_from_triple(&t), 2.0 * DECISION_TOL);
                achievable += a.achievable as usize;
                if a.achievable != w.achievable {
                    if (a.residual - DECISION_TOL).abs() <= band / 2.0 {
                        in_band += 1;
                    } else {
                        disagreements += 1;
                    }
                }
            }
        }
    }
    outcome(
        disagreements == 0,
        format!("{} grid points, {achievable} achievable, {disagreements} disagreements outside the band, {in_band} inside", n * n * n),
    )
}

fn nonzero_weights<R: Rng>(rng: &mut R) -> CanonicalWeights {
    loop {
        let w = cartan::weights_from_triple(&common::forced_triple(rng));
        if w.as_array().iter().all(|z| z.norm() > 1e-3) {
            return w;
        }
    }
}

fn constructive_completeness() -> Outcome {
    let mut rng = common::rng(404);
    let (mut worst_f, mut worst_kernel, mut solutions, mut failures) = (0.0f64, 0.0f64, 0usize, 0usize);
    for _ in 0..500 {
        let w = nonzero_weights(&mut rng);
        let branches = solver::valid_branches(&w, 1e-9).unwrap_or_default();
        if branches.is_empty() {
            failures += 1;
        }
        for branch in branches {
            for _ in 0..10 {
                let (u23, u30) = (common::random_complex(&mut rng), common::random_complex(&mut rng));
                match solver::solve_nonzero(&w, branch, u23, u30) {
                    Ok(s) => {
                        solutions += 1;
                        worst_f = worst_f.max(linalg::max_abs_diff(&gatemap::f(&s.submatrix), &w.matrix()));
                        for r in solver::kernel_residuals(&s, &w) {
                            worst_kernel = worst_kernel.max(r);
                        }
                    }
                    Err(_) => failures += 1,
                }
            }
        }
    }
    outcome(
        failures == 0 && worst_f < 1e-9 && worst_kernel < 1e-9,
        format!("{solutions} solutions, {failures} failures, max f residual = {worst_f:.2e}, max kernel residual = {worst_kernel:.2e}"),
    )
}

fn zero_case_suite() -> Outcome {
    let mut rng = common::rng(505);
    let mut triples: Vec<CanonicalTriple> = (0..160).map(|k| common::zero_triple(k % 4 + 1, &mut rng)).collect();
    for k in 0..40 {
        let g = rng.random_range(0.0..PI);
        triples.push(match k % 5 {
            0 => CanonicalTriple::new(FRAC_PI_4, FRAC_PI_4, g),
            1 => CanonicalTriple::new(FRAC_PI_4, FRAC_PI_4, FRAC_PI_4),
            2 => CanonicalTriple::new(0.0, 0.0, g),
            3 => CanonicalTriple::new(FRAC_PI_4, -FRAC_PI_4, g),
            _ => CanonicalTriple::new(FRAC_PI_2, 0.0, g),
        });
    }
    let (mut worst, mut failures, mut orientations) = (0.0f64, 0usize, [0usize; 4]);
    for t in &triples {
        let w = cartan::weights_from_triple(t);
        let params = ZeroParams {
            scale32: common::random_complex(&mut rng),
            scale30: common::random_complex(&mut rng),
            root: if rng.random_bool(0.5) { RootChoice::Larger } else { RootChoice::Smaller },
        };
        match solver::solve_zero(&w, Some(params)) {
            Ok(s) => {
                if let solver::Construction::Zero { zero_index, .. } = s.construction {
                    orientations[zero_index - 1] += 1;
                }
                worst = worst.max(linalg::max_abs_diff(&gatemap::f(&s.submatrix), &w.matrix()));
            }
            Err(_) => failures += 1,
        }
    }
    outcome(
        failures == 0 && worst < 1e-9 && orientations.iter().all(|&n| n > 0),
        format!("{} triples, orientations w1..w4 = {orientations:?}, {failures} failures, max f residual = {worst:.2e}", triples.len()),
    )
}

fn exponent_lock() -> Outcome {
    let mut rng = common::rng(606);
    let (mut worst, mut min_sep, mut unit, mut failures) = (0.0f64, f64::INFINITY, 0usize, 0usize);
    for _ in 0..100 {
        let w = nonzero_weights(&mut rng);
        let branches = solver::valid_branches(&w, 1e-9).unwrap_or_default();
        let Some(&branch) = branches.get(rng.random_range(0..branches.len().max(1))) else {
            failures += 1;
            continue;
        };
        let (u23, u30) = (common::random_complex(&mut rng), common::random_complex(&mut rng));
        let Ok(point) = solver::solve_nonzero(&w, branch, u23, u30) else {
            failures += 1;
            continue;
        };
        let unscaled = point.submatrix;
        let s1 = linalg::largest_singular_value(&unscaled);
        let contraction = &unscaled / c(s1.max(1.0), 0.0);
        let measured = dilation::dilate(&contraction, ALGEBRAIC_TOL)
            .and_then(|u8| probability::probability_of_network(&u8, &w.matrix(), 1e-7));
        let Ok(m) = measured else {
            failures += 1;
            continue;
        };
        let predicted = s1.max(1.0).powi(-4);
        worst = worst.max((m.p - predicted).abs());
        if s1 > 1.0 {
            let quarter = s1.powf(-0.25);
            min_sep = min_sep.min((m.p - quarter).abs() / quarter);
        } else {
            unit += 1;
        }
    }
    outcome(
        failures == 0 && worst < 1e-9 && min_sep > 1e-8,
        format!("max |p_sim - s1^-4| = {worst:.2e}, min relative gap to s1^(-1/4) = {min_sep:.2e}, {unit} points with s1 <= 1, {failures} failures"),
    )
}

fn genericity() -> Outcome {
    let mut rng = common::rng(707);
    let not_achievable = (0..1000)
        .filter(|_| {
            let w = linalg::haar_unitary(4, &mut rng);
            !achievability::check_gate(&w, 1e-6).map(|(v, _)| v.achievable).unwrap_or(true)
        })
        .count();
    outcome(not_achievable >= 990, format!("{not_achievable} of 1000 Haar gates not achievable"))
}

fn invariance_suite() -> Outcome {
    let mut rng = common::rng(808);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let u = linalg::random_matrix(4, 4, &mut rng);
        let v: Vec<_> = (0..4).map(|_| linalg::haar_unitary(2, &mut rng)).collect();
        worst = worst.max(cartan::invariance_residual(&u, &v[0], &v[1], &v[2], &v[3]).unwrap_or(f64::INFINITY));
    }
    let mut flips = 0usize;
    for k in 0..1000 {
        let t = if k % 2 == 0 { common::forced_triple(&mut rng) } else { common::random_triple(&mut rng) };
        let w = cartan::canonical_matrix(&t);
        let moved = common::random_local(&mut rng) * &w * common::random_local(&mut rng);
        let a = achievability::check_gate(&w, DECISION_TOL).map(|(v, _)| v.achievable);
        let b = achievability::check_gate(&moved, DECISION_TOL).map(|(v, _)| v.achievable);
        if a.is_err() || a != b {
            flips += 1;
        }
    }
    outcome(
        worst < 1e-11 && flips == 0,
        format!("max identity residual = {worst:.2e}, {flips} verdict changes in 1000 trials"),
    )
}

fn round_trips() -> Outcome {
    let mut rng = common::rng(909);
    let mut kak = 0.0f64;
    for _ in 0..1000 {
        let w = linalg::haar_unitary(4, &mut rng);
        kak = kak.max(cartan::kak_decompose(&w).map(|d| d.residual(&w)).unwrap_or(f64::INFINITY));
    }
    let mut reck = 0.0f64;
    for n in 1..=12 {
        for _ in 0..20 {
            let u = linalg::haar_unitary(n, &mut rng);
            let r = dilation::reck_decompose(&u)
                .and_then(|net| dilation::network_to_unitary(&net))
                .map(|back| linalg::max_abs_diff(&back, &u))
                .unwrap_or(f64::INFINITY);
            reck = reck.max(r);
        }
    }
    let mut dil = 0.0f64;
    for _ in 0..1000 {
        let u = common::random_contraction(4, &mut rng);
        let r = dilation::dilate(&u, ALGEBRAIC_TOL)
            .and_then(|d| linalg::unitarity_residual(&d))
            .unwrap_or(f64::INFINITY);
        dil = dil.max(r);
    }
    outcome(
        kak < 1e-8 && reck < 1e-9 && dil < 1e-10,
        format!("KAK max residual = {kak:.2e}, Reck max residual (N <= 12) = {reck:.2e}, dilation max unitarity residual = {dil:.2e}"),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("CNOT benchmark", cnot_benchmark),
        ("CZ benchmark and simulated circuit", cz_benchmark),
        ("criterion equivalence on the 50^3 grid", grid_equivalence),
        ("constructive completeness, non-zero case", constructive_completeness),
        ("zero-case constructions", zero_case_suite),
        ("success-probability exponent", exponent_lock),
        ("genericity of non-achievable gates", genericity),
        ("local invariance", invariance_suite),
        ("decomposition round trips", round_trips),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("{} [{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, k + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
