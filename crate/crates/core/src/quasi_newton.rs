//! Minimal BFGS with central-difference gradients and Armijo backtracking.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions {
    pub max_iterations: usize,
    /// Stop when an iteration improves the objective by less than this,
    /// relative to `max(1, |f|)`.
    pub objective_tolerance: f64,
    pub gradient_tolerance: f64,
    /// Relative finite-difference step.
    pub step: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            objective_tolerance: 1e-10,
            gradient_tolerance: 1e-9,
            step: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Gradient,
    Objective,
    /// The line search found no decrease along the search direction.
    LineSearch,
    MaxIterations,
    NonFinite,
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: DVector<f64>,
    pub value: f64,
    pub termination: Termination,
    pub history: Vec<f64>,
}

impl Minimum {
    pub fn converged(&self) -> bool {
        matches!(
            self.termination,
            Termination::Gradient | Termination::Objective | Termination::LineSearch
        )
    }
}

pub fn gradient<F: Fn(&DVector<f64>) -> f64>(f: &F, x: &DVector<f64>, step: f64) -> DVector<f64> {
    let mut g = DVector::zeros(x.len());
    let mut probe = x.clone();
    for i in 0..x.len() {
        let h = step * x[i].abs().max(1.0);
        probe[i] = x[i] + h;
        let up = f(&probe);
        probe[i] = x[i] - h;
        let down = f(&probe);
        probe[i] = x[i];
        g[i] = (up - down) / (2.0 * h);
    }
    g
}

pub fn minimize<F: Fn(&DVector<f64>) -> f64>(f: F, x0: DVector<f64>, opts: &BfgsOptions) -> Minimum {
    let n = x0.len();
    let mut x = x0;
    let mut fx = f(&x);
    let mut history = vec![fx];
    if !fx.is_finite() {
        return Minimum {
            x,
            value: fx,
            termination: Termination::NonFinite,
            history,
        };
    }
    let mut g = gradient(&f, &x, opts.step);
    let mut h_inv = DMatrix::<f64>::identity(n, n);

    for _ in 0..opts.max_iterations {
        if !g.iter().all(|v| v.is_finite()) {
            return Minimum { x, value: fx, termination: Termination::NonFinite, history };
        }
        if g.norm() < opts.gradient_tolerance {
            return Minimum { x, value: fx, termination: Termination::Gradient, history };
        }
        let mut dir = -(&h_inv * &g);
        let mut slope = g.dot(&dir);
        if slope >= 0.0 {
            h_inv.fill_with_identity();
            dir = -g.clone();
            slope = g.dot(&dir);
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let candidate = &x + &dir * t;
            let fc = f(&candidate);
            if fc.is_finite() && fc <= fx + 1e-4 * t * slope {
                accepted = Some((candidate, fc));
                break;
            }
            t *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            return Minimum { x, value: fx, termination: Termination::LineSearch, history };
        };

        let g_new = gradient(&f, &x_new, opts.step);
        let s = &x_new - &x;
        let y = &g_new - &g;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            let rho = 1.0 / sy;
            let id = DMatrix::<f64>::identity(n, n);
            let left = &id - (&s * y.transpose()) * rho;
            let right = &id - (&y * s.transpose()) * rho;
            h_inv = left * h_inv * right + (&s * s.transpose()) * rho;
        }

        let improvement = fx - f_new;
        x = x_new;
        g = g_new;
        fx = f_new;
        history.push(fx);
        if improvement <= opts.objective_tolerance * fx.abs().max(1.0) {
            return Minimum { x, value: fx, termination: Termination::Objective, history };
        }
    }
    Minimum {
        x,
        value: fx,
        termination: Termination::MaxIterations,
        history,
    }
}
