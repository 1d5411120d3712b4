//! Embedding a contraction as the corner of a mode unitary, and synthesizing
//! mode unitaries as triangular beam-splitter meshes.
//!
//! Beam splitter convention, on modes `(m, n)` with `m < n`:
//!
//! ```text
//! [ e^{i phi} cos(theta)    sin(theta) ]
//! [ e^{i phi} sin(theta)   -cos(theta) ]
//! ```
//!
//! so `theta = pi/4, phi = 0` is the symmetric 50:50 splitter
//! `(1/sqrt 2)[[1, 1], [1, -1]]`. A phase shifter multiplies one mode by
//! `e^{i phi}`. Elements are listed in the order light traverses them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix};

/// Mode count of the generic dilation.
pub const DILATION_MODES: usize = 8;
/// Largest mesh the synthesizer accepts.
pub const MAX_MESH_MODES: usize = 16;

/// `1 - s^2` below this is rounding noise of a unit singular value.
const DEFECT_FLOOR: f64 = 1e-14;

/// Skip nulling steps whose target entry is already this small.
const NULL_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    BeamSplitter,
    PhaseShifter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkElement {
    pub kind: ElementKind,
    pub modes: Vec<usize>,
    /// Mixing angle in radians; zero for phase shifters.
    #[serde(default)]
    pub theta: f64,
    /// Phase in radians.
    pub phi: f64,
}

impl NetworkElement {
    pub fn beam_splitter(m: usize, n: usize, theta: f64, phi: f64) -> Self {
        Self {
            kind: ElementKind::BeamSplitter,
            modes: vec![m, n],
            theta,
            phi,
        }
    }

    pub fn phase_shifter(m: usize, phi: f64) -> Self {
        Self {
            kind: ElementKind::PhaseShifter,
            modes: vec![m],
            theta: 0.0,
            phi,
        }
    }

    fn validate(&self, n_modes: usize) -> Result<()> {
        if !self.theta.is_finite() || !self.phi.is_finite() {
            return Err(Error::MalformedNetwork("non-finite angle".into()));
        }
        let arity = match self.kind {
            ElementKind::BeamSplitter => 2,
            ElementKind::PhaseShifter => 1,
        };
        if self.modes.len() != arity {
            return Err(Error::MalformedNetwork(format!(
                "{:?} needs {arity} mode(s), got {}",
                self.kind,
                self.modes.len()
            )));
        }
        if let Some(&m) = self.modes.iter().find(|&&m| m >= n_modes) {
            return Err(Error::MalformedNetwork(format!(
                "mode {m} out of range for {n_modes} modes"
            )));
        }
        if arity == 2 && self.modes[0] == self.modes[1] {
            return Err(Error::MalformedNetwork("beam splitter on a single mode".into()));
        }
        Ok(())
    }

    /// Embedding of the element as an `n_modes` unitary.
    pub fn matrix(&self, n_modes: usize) -> Result<ComplexMatrix> {
        self.validate(n_modes)?;
        let mut u = linalg::identity(n_modes);
        let e = Complex64::from_polar(1.0, self.phi);
        match self.kind {
            ElementKind::PhaseShifter => u[(self.modes[0], self.modes[0])] = e,
            ElementKind::BeamSplitter => {
                let (m, n) = (self.modes[0], self.modes[1]);
                let (s, co) = self.theta.sin_cos();
                u[(m, m)] = e * co;
                u[(m, n)] = c(s, 0.0);
                u[(n, m)] = e * s;
                u[(n, n)] = c(-co, 0.0);
            }
        }
        Ok(u)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpticalNetwork {
    pub n_modes: usize,
    pub elements: Vec<NetworkElement>,
}

impl OpticalNetwork {
    pub fn beam_splitter_count(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| e.kind == ElementKind::BeamSplitter)
            .count()
    }

    pub fn phase_shifter_count(&self) -> usize {
        self.elements.len() - self.beam_splitter_count()
    }
}

/// The unitary `[[u, sqrt(I - u u^dagger)], [sqrt(I - u^dagger u), -u^dagger]]`.
///
/// Both defect operators come from one SVD `u = L S R^dagger` as
/// `L C L^dagger` and `R C R^dagger` with `C = sqrt(1 - S^2)`, which keeps
/// the result unitary to machine precision even when singular values sit at
/// one. Accepts `s1(u) <= 1 + tol`. Values of `1 - s^2` below
/// `DEFECT_FLOOR` are set to zero, so a unitary corner yields a block-diagonal
/// dilation rather than `1e-8`-sized couplings. The corner is `u` itself,
/// untouched.
pub fn dilate(u: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    linalg::ensure_square(u)?;
    if !linalg::is_finite(u) {
        return Err(Error::NumericalFailure("non-finite entries".into()));
    }
    let n = u.nrows();
    let svd = u.clone().svd(true, true);
    let s1 = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if s1 > 1.0 + tol {
        return Err(Error::NotContraction(s1));
    }
    let (left, right_t) = match (svd.u, svd.v_t) {
        (Some(l), Some(r)) => (l, r),
        _ => return Err(Error::NumericalFailure("SVD did not converge".into())),
    };
    let defect: Vec<Complex64> = svd
        .singular_values
        .iter()
        .map(|&s| {
            let d = (1.0 - s) * (1.0 + s);
            c(if d < DEFECT_FLOOR { 0.0 } else { d.sqrt() }, 0.0)
        })
        .collect();
    let defect = linalg::diagonal(&defect);
    let right = right_t.adjoint();
    let top_right = &left * &defect * left.adjoint();
    let bottom_left = &right * &defect * right.adjoint();

    let mut out = ComplexMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(u);
    out.view_mut((0, n), (n, n)).copy_from(&top_right);
    out.view_mut((n, 0), (n, n)).copy_from(&bottom_left);
    out.view_mut((n, n), (n, n)).copy_from(&(-u.adjoint()));
    Ok(out)
}

/// Triangular (Reck) decomposition: at most `N(N-1)/2` beam splitters on
/// neighbouring modes followed by at most `N` phase shifters.
pub fn reck_decompose(u: &ComplexMatrix) -> Result<OpticalNetwork> {
    linalg::ensure_square(u)?;
    let n = u.nrows();
    if n > MAX_MESH_MODES {
        return Err(Error::MalformedNetwork(format!(
            "{n} modes exceeds the supported {MAX_MESH_MODES}"
        )));
    }
    linalg::ensure_unitary(u, 1e-8)?;

    // Null the strictly lower triangle by right-multiplying with inverse
    // beam splitters: U B_1^dagger ... B_K^dagger = D, so U = D B_K ... B_1.
    let mut work = u.clone();
    let mut elements = Vec::new();
    for row in (1..n).rev() {
        for col in 0..row {
            let x = work[(row, col)];
            if x.norm() < NULL_THRESHOLD {
                continue;
            }
            let y = work[(row, col + 1)];
            let theta = x.norm().atan2(y.norm());
            let phi = if y.norm() == 0.0 { 0.0 } else { x.arg() - (-y).arg() };
            let element = NetworkElement::beam_splitter(col, col + 1, theta, phi);
            work *= element.matrix(n)?.adjoint();
            work[(row, col)] = linalg::ZERO;
            elements.push(element);
        }
    }
    for m in 0..n {
        let phase = work[(m, m)].arg();
        if phase.abs() > 0.0 {
            elements.push(NetworkElement::phase_shifter(m, phase));
        }
    }
    let network = OpticalNetwork {
        n_modes: n,
        elements,
    };
    let residual = linalg::max_abs_diff(&network_to_unitary(&network)?, u);
    if residual > 1e-9 {
        return Err(Error::NumericalFailure(format!(
            "mesh reconstruction residual {residual:.3e}"
        )));
    }
    Ok(network)
}

/// Ordered product of the network's elements.
pub fn network_to_unitary(net: &OpticalNetwork) -> Result<ComplexMatrix> {
    if net.n_modes == 0 {
        return Err(Error::MalformedNetwork("network has no modes".into()));
    }
    net.elements
        .iter()
        .try_fold(linalg::identity(net.n_modes), |acc, e| Ok(e.matrix(net.n_modes)? * acc))
}
