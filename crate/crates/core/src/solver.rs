//! Explicit submatrices `U` with `f(U) = W` for achievable canonical gates.
//!
//! When every canonical weight is nonzero, solutions form a family with two
//! free nonzero complex parameters `(u23, u30)` and sign choices
//! `(b1, b2, b3, b4)`, subject to `b2 w2 = b1 b4 w3 - b4 w4 + w1`. When some
//! weight vanishes, a fixed zero pattern reduces the system to a quadratic
//! (or to a closed form when two weights vanish).

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::achievability::{self, BRANCH_TRIPLES};
use crate::cartan::{self, CanonicalWeights, CartanDecomposition};
use crate::error::{Error, Result};
use crate::gatemap;
use crate::linalg::{self, ComplexMatrix, ONE, ZERO};

/// Tolerance on `f(U) = W` for constructed solutions.
pub const SOLUTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignBranch {
    pub b1: i8,
    pub b2: i8,
    pub b3: i8,
    pub b4: i8,
}

impl SignBranch {
    pub fn new(b1: i8, b2: i8, b3: i8, b4: i8) -> Result<Self> {
        if [b1, b2, b3, b4].iter().any(|b| b.abs() != 1) {
            return Err(Error::Parse(format!(
                "branch signs must be +1 or -1, got ({b1},{b2},{b3},{b4})"
            )));
        }
        Ok(Self { b1, b2, b3, b4 })
    }

    pub fn as_array(&self) -> [i8; 4] {
        [self.b1, self.b2, self.b3, self.b4]
    }

    /// `|b2 w2 - (b1 b4 w3 - b4 w4 + w1)|`.
    pub fn constraint_residual(&self, w: &CanonicalWeights) -> f64 {
        let s = |b: i8| f64::from(b);
        let lhs = w.w2 * s(self.b2);
        let rhs = w.w3 * s(self.b1 * self.b4) - w.w4 * s(self.b4) + w.w1;
        (lhs - rhs).norm()
    }
}

impl fmt::Display for SignBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |b: i8| if b > 0 { '+' } else { '-' };
        write!(f, "{}{}{}{}", s(self.b1), s(self.b2), s(self.b3), s(self.b4))
    }
}

impl std::str::FromStr for SignBranch {
    type Err = Error;

    /// Accepts four sign characters, e.g. `++-+`.
    fn from_str(s: &str) -> Result<Self> {
        let signs: Vec<i8> = s
            .chars()
            .map(|ch| match ch {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::Parse(format!("invalid sign character {other:?}"))),
            })
            .collect::<Result<_>>()?;
        match signs[..] {
            [b1, b2, b3, b4] => Self::new(b1, b2, b3, b4),
            _ => Err(Error::Parse(format!("branch must have four signs, got {s:?}"))),
        }
    }
}

/// Which root of the zero-case quadratic to take.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootChoice {
    /// Larger modulus; ties broken by the larger principal argument.
    #[default]
    Larger,
    Smaller,
}

/// Free scalars of the zero-case construction: `u32 = scale32`,
/// `u30 = scale30`, plus the quadratic root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroParams {
    pub scale32: Complex64,
    pub scale30: Complex64,
    pub root: RootChoice,
}

impl Default for ZeroParams {
    fn default() -> Self {
        Self {
            scale32: ONE,
            scale30: ONE,
            root: RootChoice::Larger,
        }
    }
}

/// How a solution was constructed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum Construction {
    NonZero {
        branch: SignBranch,
        u23: Complex64,
        u30: Complex64,
        /// Substitution variable with `u33 = a u23`.
        a: Complex64,
        lambda: Complex64,
        mu: Complex64,
    },
    Zero {
        /// 1-based index of the weight moved to position 1.
        zero_index: usize,
        params: ZeroParams,
    },
    /// Exact solution for the identity or swap class.
    Shortcut { name: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionPoint {
    pub construction: Construction,
    pub submatrix: ComplexMatrix,
    /// `max |f(U) - W|` against the requested weights.
    pub f_residual: f64,
}

impl SolutionPoint {
    pub fn min_entry_modulus(&self) -> f64 {
        self.submatrix.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn determinant_residual(&self) -> f64 {
        determinant_constraint(&self.submatrix)
    }

    pub fn largest_singular_value(&self) -> f64 {
        linalg::largest_singular_value(&self.submatrix)
    }
}

pub(crate) fn smallest_weight(w: &CanonicalWeights) -> (usize, f64) {
    w.as_array()
        .iter()
        .enumerate()
        .map(|(i, z)| (i + 1, z.norm()))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// Every sign branch satisfying the branch constraint within `tol`, each
/// `(b1, b2, b4)` expanded with both values of the free sign `b3`.
pub fn valid_branches(w: &CanonicalWeights, tol: f64) -> Result<Vec<SignBranch>> {
    let (index, modulus) = smallest_weight(w);
    if modulus <= tol {
        return Err(Error::ZeroWeight(index));
    }
    let mut out = Vec::new();
    for [b1, b2, b4] in BRANCH_TRIPLES {
        for b3 in [1, -1] {
            let branch = SignBranch { b1, b2, b3, b4 };
            if branch.constraint_residual(w) <= tol {
                out.push(branch);
            }
        }
    }
    Ok(out)
}

/// `u22 u23 u30 u31 - u20 u21 u32 u33`, relative to the size of its terms.
fn determinant_constraint(u: &ComplexMatrix) -> f64 {
    let p = u[(2, 2)] * u[(2, 3)] * u[(3, 0)] * u[(3, 1)];
    let q = u[(2, 0)] * u[(2, 1)] * u[(3, 2)] * u[(3, 3)];
    (p - q).norm() / (p.norm() + q.norm()).max(1.0)
}

/// Back-substitution for the non-zero case without any verification. Used
/// directly by the optimizer's objective.
pub(crate) fn construct_nonzero(
    w: &CanonicalWeights,
    branch: SignBranch,
    u23: Complex64,
    u30: Complex64,
) -> (ComplexMatrix, Construction) {
    let CanonicalWeights { w1, w2, w3, w4 } = *w;
    let s = |b: i8| f64::from(b);

    let u31 = (w1.sqrt() * w3.sqrt() / (w2.sqrt() * w4.sqrt())) * u30 * s(branch.b3);
    let lambda = (w2 / u30) / (ONE - w1 / w4 * s(branch.b4));
    let mu = lambda * u31 / u30 * s(branch.b1);
    let a = -lambda * w1 / (mu * w4);
    let u33 = a * u23;
    let u32 = u23 * s(branch.b1);
    let u22 = a * u23 * s(branch.b2);
    let u21 = (u31 - w1 / mu) / a;
    let u20 = (u30 - w2 / lambda) / a;

    let row0 = [
        -u20 / u23,
        -u31 / u33,
        u20 * u32 / (u23 * u30),
        ONE,
    ]
    .map(|x| x * lambda);
    let row1 = [
        -u30 / u33,
        -u21 / u23,
        u22 * u30 / (u20 * u33),
        ONE,
    ]
    .map(|x| x * mu);
    let submatrix = linalg::from_rows(&[row0, row1, [u20, u21, u22, u23], [u30, u31, u32, u33]]);
    (
        submatrix,
        Construction::NonZero {
            branch,
            u23,
            u30,
            a,
            lambda,
            mu,
        },
    )
}

/// Non-zero-weight construction for one sign branch and free parameters.
pub fn solve_nonzero(
    w: &CanonicalWeights,
    branch: SignBranch,
    u23: Complex64,
    u30: Complex64,
) -> Result<SolutionPoint> {
    let tol = linalg::DECISION_TOL;
    let (index, modulus) = smallest_weight(w);
    if modulus <= tol {
        return Err(Error::DegenerateInput(format!(
            "w{index} = 0; the non-zero construction needs every weight nonzero"
        )));
    }
    let branch_residual = branch.constraint_residual(w);
    if branch_residual > tol {
        return Err(Error::InvalidBranch(branch.as_array(), branch_residual));
    }
    if u23 == ZERO || u30 == ZERO {
        return Err(Error::ZeroParameter);
    }
    let (submatrix, construction) = construct_nonzero(w, branch, u23, u30);
    if !linalg::is_finite(&submatrix) {
        return Err(Error::NumericalFailure(
            "division by zero in back-substitution".into(),
        ));
    }
    let point = SolutionPoint {
        f_residual: linalg::max_abs_diff(&gatemap::f(&submatrix), &w.matrix()),
        construction,
        submatrix,
    };
    let det = point.determinant_residual();
    if det > linalg::ALGEBRAIC_TOL {
        return Err(Error::NumericalFailure(format!(
            "determinant constraint violated ({det:.3e})"
        )));
    }
    if point.min_entry_modulus() == 0.0 {
        return Err(Error::NumericalFailure("solution has a zero entry".into()));
    }
    if point.f_residual > SOLUTION_TOL.max(branch_residual * 10.0) {
        return Err(Error::NumericalFailure(format!(
            "f(U) misses the target by {:.3e}",
            point.f_residual
        )));
    }
    Ok(point)
}

/// The two coefficient matrices of the linear systems satisfied by the first
/// two rows of `U` (`M1 u1 = 0`, `M2 u2 = 0`, `M2 u1 = w`, `M1 u2 = w reversed`).
pub fn kernel_matrices(s: &SolutionPoint) -> (ComplexMatrix, ComplexMatrix) {
    let u = &s.submatrix;
    let e = |i: usize, j: usize| u[(i, j)];
    let m1 = linalg::from_rows(&[
        [e(3, 2), ZERO, e(3, 0), ZERO],
        [e(2, 3), ZERO, ZERO, e(2, 0)],
        [ZERO, e(2, 2), e(2, 1), ZERO],
        [ZERO, e(3, 3), ZERO, e(3, 1)],
    ]);
    let m2 = linalg::from_rows(&[
        [e(2, 2), ZERO, e(2, 0), ZERO],
        [e(3, 3), ZERO, ZERO, e(3, 0)],
        [ZERO, e(3, 2), e(3, 1), ZERO],
        [ZERO, e(2, 3), ZERO, e(2, 1)],
    ]);
    (m1, m2)
}

/// Residuals of the kernel-matrix identities, in the order
/// `[det M1, det M2, M1 u1, M2 u2, M2 u1 - w, M1 u2 - rev(w)]`.
pub fn kernel_residuals(s: &SolutionPoint, w: &CanonicalWeights) -> [f64; 6] {
    let (m1, m2) = kernel_matrices(s);
    let row = |r: usize| s.submatrix.row(r).transpose();
    let (u1, u2) = (row(0), row(1));
    let wv = nalgebra::DVector::from_column_slice(&w.as_array());
    let mut rev = w.as_array();
    rev.reverse();
    let wr = nalgebra::DVector::from_column_slice(&rev);
    let vmax = |v: nalgebra::DVector<Complex64>| v.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    [
        m1.determinant().norm(),
        m2.determinant().norm(),
        vmax(&m1 * &u1),
        vmax(&m2 * &u2),
        vmax(&m2 * &u1 - wv),
        vmax(&m1 * &u2 - wr),
    ]
}

/// Local transformation taking the canonical weights to an orientation with
/// `w1 = 0`: `W(reduced) = (left0 (x) left1) W(original) (right0 (x) right1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub zero_index: usize,
    pub left: [ComplexMatrix; 2],
    pub right: [ComplexMatrix; 2],
    pub reduced: CanonicalWeights,
}

impl Reduction {
    /// Transports a solution for the reduced weights back to the original
    /// orientation.
    pub fn transport_back(&self, u: &ComplexMatrix) -> Result<ComplexMatrix> {
        cartan::conjugate_submatrix(
            u,
            &self.left[0].adjoint(),
            &self.left[1].adjoint(),
            &self.right[0].adjoint(),
            &self.right[1].adjoint(),
        )
    }
}

/// Moves the first weight with modulus at most `tol` into position 1
/// using Pauli conjugations of the canonical form.
pub fn reduce_to_w1_zero(w: &CanonicalWeights, tol: f64) -> Result<Reduction> {
    let zero_index = w
        .as_array()
        .iter()
        .position(|z| z.norm() <= tol)
        .ok_or(Error::NotZeroCase)?
        + 1;
    let [w1, w2, w3, w4] = w.as_array();
    let (x, id) = (linalg::pauli_x(), linalg::identity(2));
    // X(x)I conjugation swaps (w1,w2) and (w3,w4); left multiplication by
    // X(x)X reverses the weights.
    let (left, right, reduced) = match zero_index {
        1 => ([id.clone(), id.clone()], [id.clone(), id], [w1, w2, w3, w4]),
        2 => ([x.clone(), id.clone()], [x, id], [w2, w1, w4, w3]),
        3 => ([id.clone(), x.clone()], [x, id], [w3, w4, w1, w2]),
        _ => ([x.clone(), x], [id.clone(), id], [w4, w3, w2, w1]),
    };
    Ok(Reduction {
        zero_index,
        left,
        right,
        reduced: CanonicalWeights::from_array(reduced),
    })
}

/// Roots of `a x^2 + b x + c`, larger modulus first (ties: larger argument).
fn quadratic_roots(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 2] {
    let disc = (b * b - a * c * 4.0).sqrt();
    let q = if (b + disc).norm() >= (b - disc).norm() {
        -(b + disc) * 0.5
    } else {
        -(b - disc) * 0.5
    };
    let (r1, r2) = (q / a, c / q);
    let first_larger = match r1.norm().total_cmp(&r2.norm()) {
        std::cmp::Ordering::Equal => r1.arg() >= r2.arg(),
        ord => ord.is_gt(),
    };
    if first_larger {
        [r1, r2]
    } else {
        [r2, r1]
    }
}

/// Zero-pattern construction for weights with `w1 = 0` exactly.
pub(crate) fn construct_w1_zero(
    w: &CanonicalWeights,
    params: &ZeroParams,
) -> Result<ComplexMatrix> {
    let CanonicalWeights { w2, w3, w4, .. } = *w;
    let (s, t) = (params.scale32, params.scale30);
    if s == ZERO || t == ZERO {
        return Err(Error::ZeroParameter);
    }
    if w4 == ZERO {
        return Err(Error::DegenerateInput("w1 = w4 = 0".into()));
    }
    let mut u = ComplexMatrix::zeros(4, 4);
    u[(3, 2)] = s;
    u[(3, 0)] = t;
    if w2 != ZERO && w3 != ZERO {
        let roots = quadratic_roots(w4, w2 * w2 - w3 * w3 - w4 * w4, w3 * w3 * w4);
        let x = match params.root {
            RootChoice::Larger => roots[0],
            RootChoice::Smaller => roots[1],
        };
        u[(0, 1)] = w3 / s;
        u[(0, 3)] = w2 / t;
        u[(1, 0)] = x / s;
        u[(1, 2)] = (w4 - x) / t;
        u[(2, 3)] = w3 * s / x;
        u[(2, 1)] = w2 * t / (w4 - x);
    } else if w2 == ZERO {
        u[(0, 1)] = w3 / s;
        u[(2, 3)] = w4 * s / w3;
        u[(1, 0)] = w3 * w3 / (w4 * s);
        u[(1, 2)] = (w4 - w3 * w3 / w4) / t;
    } else {
        u[(0, 3)] = w2 / t;
        u[(2, 1)] = w4 * t / w2;
        u[(1, 2)] = w2 * w2 / (w4 * t);
        u[(1, 0)] = (w4 - w2 * w2 / w4) / s;
    }
    if !linalg::is_finite(&u) {
        return Err(Error::NumericalFailure("zero-case construction diverged".into()));
    }
    Ok(u)
}

fn snap(w: &CanonicalWeights, tol: f64) -> CanonicalWeights {
    CanonicalWeights::from_array(w.as_array().map(|z| if z.norm() <= tol { ZERO } else { z }))
}

/// Reduction, zero-pattern solve and transport back, without verification.
pub(crate) fn construct_zero(
    reduction: &Reduction,
    params: &ZeroParams,
    tol: f64,
) -> Result<ComplexMatrix> {
    let reduced = snap(&reduction.reduced, tol);
    let u = construct_w1_zero(&reduced, params)?;
    reduction.transport_back(&u)
}

/// Solution for weights with some `|w_i| <= tol`. Near-zero weights are
/// snapped to zero; the residual is reported against the unsnapped target.
pub fn solve_zero(w: &CanonicalWeights, params: Option<ZeroParams>) -> Result<SolutionPoint> {
    let tol = linalg::DECISION_TOL;
    let params = params.unwrap_or_default();
    let reduction = reduce_to_w1_zero(w, tol)?;
    let submatrix = construct_zero(&reduction, &params, tol)?;
    let f_residual = linalg::max_abs_diff(&gatemap::f(&submatrix), &w.matrix());
    if f_residual > SOLUTION_TOL.max(10.0 * tol) {
        return Err(Error::NumericalFailure(format!(
            "zero-case solution misses the target by {f_residual:.3e}"
        )));
    }
    Ok(SolutionPoint {
        construction: Construction::Zero {
            zero_index: reduction.zero_index,
            params,
        },
        submatrix,
        f_residual,
    })
}

/// Exact solutions for the identity class (`w3 = w4 = 0`, `w1 = w2`) and the
/// swap class (`w2 = w4 = 0`, `w1 = w3`), both with unit singular values.
pub fn exact_shortcut(w: &CanonicalWeights, tol: f64) -> Option<SolutionPoint> {
    let CanonicalWeights { w1, w2, w3, w4 } = *w;
    let (name, base) = if w3.norm() <= tol && w4.norm() <= tol && (w1 - w2).norm() <= tol {
        ("identity", linalg::identity(4))
    } else if w2.norm() <= tol && w4.norm() <= tol && (w1 - w3).norm() <= tol {
        let mut u = ComplexMatrix::zeros(4, 4);
        u.view_mut((0, 2), (2, 2)).copy_from(&linalg::identity(2));
        u.view_mut((2, 0), (2, 2)).copy_from(&linalg::identity(2));
        ("swap", u)
    } else {
        return None;
    };
    // f(c U) = c^2 f(U); f(base) is I or S.
    let submatrix = base * w1.sqrt();
    let f_residual = linalg::max_abs_diff(&gatemap::f(&submatrix), &w.matrix());
    Some(SolutionPoint {
        construction: Construction::Shortcut { name: name.into() },
        submatrix,
        f_residual,
    })
}

/// Solution of the canonical system for an achievable triple's weights,
/// using default free parameters: the first valid branch with
/// `u23 = u30 = 1`, or the zero-case construction.
pub fn solve_canonical(w: &CanonicalWeights, tol: f64) -> Result<SolutionPoint> {
    if smallest_weight(w).1 <= tol {
        return solve_zero(w, None);
    }
    let branch = *valid_branches(w, tol)?
        .first()
        .ok_or(Error::NotAchievable)?;
    solve_nonzero(w, branch, ONE, ONE)
}

/// A submatrix implementing an arbitrary achievable gate.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSolution {
    /// Contraction implementing `sqrt(p) W`; the corner of a mode unitary.
    pub submatrix: ComplexMatrix,
    /// Solution of `f(U) = W` before rescaling.
    pub unscaled: ComplexMatrix,
    pub p: f64,
    /// `max |f(submatrix) - sqrt(p) W|`.
    pub f_residual: f64,
    pub canonical: SolutionPoint,
    pub decomposition: CartanDecomposition,
}

/// Largest singular value and success probability `min(1, s1^-4)`.
pub fn rescale(u: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let s1 = linalg::largest_singular_value(u);
    let scale = s1.max(1.0);
    (u.unscale(scale), (1.0 / scale).powi(4))
}

/// Carries a canonical-frame solution to the frame of the original gate:
/// with `W = g (v1 (x) v2) C (v3 (x) v4)` and `f(U) = C`, the matrix
/// `sqrt(g) X U Y` solves `f = W`.
pub fn transport_to_gate(
    canonical: &ComplexMatrix,
    decomposition: &CartanDecomposition,
) -> Result<ComplexMatrix> {
    let d = decomposition;
    let moved = cartan::conjugate_submatrix(canonical, &d.v1, &d.v2, &d.v3, &d.v4)?;
    Ok(moved * d.global_phase.sqrt())
}

pub fn finish_gate_solution(
    w_in: &ComplexMatrix,
    canonical: SolutionPoint,
    decomposition: CartanDecomposition,
) -> Result<GateSolution> {
    let unscaled = transport_to_gate(&canonical.submatrix, &decomposition)?;
    let (submatrix, p) = rescale(&unscaled);
    let f_residual = linalg::max_abs_diff(&gatemap::f(&submatrix), &(w_in * Complex64::from(p.sqrt())));
    Ok(GateSolution {
        submatrix,
        unscaled,
        p,
        f_residual,
        canonical,
        decomposition,
    })
}

/// Explicit non-zero-case parameters for [`solve_gate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonZeroPoint {
    pub branch: Option<SignBranch>,
    pub u23: Complex64,
    pub u30: Complex64,
}

/// KAK, canonical solve, transport through the local factors, rescale to a
/// contraction.
pub fn solve_gate(
    w_in: &ComplexMatrix,
    point: Option<NonZeroPoint>,
    tol: f64,
) -> Result<GateSolution> {
    let (verdict, decomposition) = achievability::check_gate(w_in, tol)?;
    if !verdict.achievable {
        return Err(Error::NotAchievable);
    }
    let weights = cartan::weights_from_triple(&decomposition.triple);
    let canonical = match point {
        Some(p) if smallest_weight(&weights).1 > tol => {
            let branch = match p.branch {
                Some(b) => b,
                None => *valid_branches(&weights, tol)?
                    .first()
                    .ok_or(Error::NotAchievable)?,
            };
            solve_nonzero(&weights, branch, p.u23, p.u30)?
        }
        _ => solve_canonical(&weights, tol)?,
    };
    finish_gate_solution(w_in, canonical, decomposition)
}
