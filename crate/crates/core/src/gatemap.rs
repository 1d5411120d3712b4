//! The map from a mode transformation to the gate it induces on the
//! dual-rail computational subspace, and a brute-force two-photon Fock
//! simulator that serves as its oracle.
//!
//! Logical basis states are photon pairs in modes `{0,2}, {0,3}, {1,2}, {1,3}`
//! for `|00>, |01>, |10>, |11>`.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ZERO};

/// Largest mode count the simulator accepts.
pub const MAX_MODES: usize = 16;

/// Mode pairs of the four logical basis states, in logical order.
pub const COMPUTATIONAL_PAIRS: [(usize, usize); 4] = [(0, 2), (0, 3), (1, 2), (1, 3)];

/// The induced computational-subspace operator, written out entry by entry.
pub fn f_entrywise(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    linalg::ensure_shape(u, 4, 4)?;
    let e = |i: usize, j: usize| u[(i, j)];
    let mut out = ComplexMatrix::zeros(4, 4);
    // Row r is the output pair (p, q), column c the input pair (i, j).
    for (r, &(p, q)) in COMPUTATIONAL_PAIRS.iter().enumerate() {
        for (col, &(i, j)) in COMPUTATIONAL_PAIRS.iter().enumerate() {
            out[(r, col)] = e(p, i) * e(q, j) + e(q, i) * e(p, j);
        }
    }
    Ok(out)
}

/// The same map via the block identity `A (x) D + (B (x) C) S`.
pub fn f_block(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    linalg::ensure_shape(u, 4, 4)?;
    let a = u.view((0, 0), (2, 2)).into_owned();
    let b = u.view((0, 2), (2, 2)).into_owned();
    let cc = u.view((2, 0), (2, 2)).into_owned();
    let d = u.view((2, 2), (2, 2)).into_owned();
    Ok(a.kronecker(&d) + b.kronecker(&cc) * linalg::swap_operator())
}

/// Shorthand for [`f_entrywise`] on an already-validated 4x4 matrix.
pub fn f(u: &ComplexMatrix) -> ComplexMatrix {
    f_entrywise(u).expect("f requires a 4x4 matrix")
}

/// Two photons distributed over `n_modes` modes, keyed by the unordered
/// occupied pair `(k, l)` with `k <= l`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonState {
    pub n_modes: usize,
    pub amplitudes: BTreeMap<(usize, usize), Complex64>,
}

impl TwoPhotonState {
    /// The state `a_i^dagger a_j^dagger |vacuum>` for `i != j`.
    pub fn basis(n_modes: usize, i: usize, j: usize) -> Result<Self> {
        if i == j || i >= n_modes || j >= n_modes {
            return Err(Error::InvalidPair(i, j));
        }
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert((i.min(j), i.max(j)), linalg::ONE);
        Ok(Self { n_modes, amplitudes })
    }

    pub fn amplitude(&self, k: usize, l: usize) -> Complex64 {
        self.amplitudes
            .get(&(k.min(l), k.max(l)))
            .copied()
            .unwrap_or(ZERO)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }
}

/// Evolves `a_i^dagger a_j^dagger |vacuum>` through the mode unitary `u`.
///
/// Doubly occupied outputs carry the bosonic factor `sqrt(2)` so the output
/// state has unit norm.
pub fn evolve_two_photons(u: &ComplexMatrix, input: (usize, usize)) -> Result<TwoPhotonState> {
    linalg::ensure_square(u)?;
    let n = u.nrows();
    if n > MAX_MODES {
        return Err(Error::TooManyModes(n));
    }
    let (i, j) = input;
    if i == j || i >= n || j >= n {
        return Err(Error::InvalidPair(i, j));
    }
    linalg::ensure_unitary(u, 1e-8)?;

    let mut amplitudes = BTreeMap::new();
    for k in 0..n {
        for l in k..n {
            let amp = if k == l {
                u[(k, i)] * u[(k, j)] * SQRT_2
            } else {
                u[(k, i)] * u[(l, j)] + u[(l, i)] * u[(k, j)]
            };
            if amp != ZERO {
                amplitudes.insert((k, l), amp);
            }
        }
    }
    Ok(TwoPhotonState {
        n_modes: n,
        amplitudes,
    })
}

/// Projects onto the computational subspace. Returns the four logical
/// amplitudes and the probability of landing there.
pub fn postselect_computational(state: &TwoPhotonState) -> ([Complex64; 4], f64) {
    let amps = COMPUTATIONAL_PAIRS.map(|(k, l)| state.amplitude(k, l));
    let p = amps.iter().map(|a| a.norm_sqr()).sum();
    (amps, p)
}

/// Computational-subspace transfer matrix of a mode unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct PostselectedBlock {
    pub block: ComplexMatrix,
    /// Success probability for each logical basis input, in logical order.
    pub success_probabilities: [f64; 4],
    /// Max deviation between the simulated block and `f` of the corner.
    pub formula_residual: f64,
}

/// Simulates all four logical inputs through `u` and assembles the
/// post-selected block. The result is cross-checked against `f` applied to
/// the top-left 4x4 corner.
pub fn transfer_matrix(u: &ComplexMatrix) -> Result<PostselectedBlock> {
    linalg::ensure_square(u)?;
    if u.nrows() < 4 {
        return Err(Error::DimensionMismatch {
            expected: "at least 4x4".into(),
            found: format!("{}x{}", u.nrows(), u.ncols()),
        });
    }
    let mut block = ComplexMatrix::zeros(4, 4);
    let mut success_probabilities = [0.0; 4];
    for (col, &pair) in COMPUTATIONAL_PAIRS.iter().enumerate() {
        let out = evolve_two_photons(u, pair)?;
        let (amps, p) = postselect_computational(&out);
        for (row, a) in amps.iter().enumerate() {
            block[(row, col)] = *a;
        }
        success_probabilities[col] = p;
    }
    let corner = u.view((0, 0), (4, 4)).into_owned();
    let formula_residual = linalg::max_abs_diff(&block, &f(&corner));
    if formula_residual > 1e-8 {
        return Err(Error::NumericalFailure(format!(
            "simulator and corner formula disagree by {formula_residual:.3e}"
        )));
    }
    Ok(PostselectedBlock {
        block,
        success_probabilities,
        formula_residual,
    })
}
