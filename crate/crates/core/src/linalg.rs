//! Dense complex matrix helpers for the small (at most 16x16) matrices used
//! throughout the crate.
//!
//! Matrices are plain [`nalgebra::DMatrix`] values over [`Complex64`]. The
//! basis convention for two-qubit operators is `|00>, |01>, |10>, |11>` with
//! the first tensor factor as the most significant bit.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Tolerance for algebraic identities that hold exactly in exact arithmetic.
pub const ALGEBRAIC_TOL: f64 = 1e-10;
/// Tolerance for physical decisions (achievability, unitarity of inputs).
pub const DECISION_TOL: f64 = 1e-6;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// Builds a matrix from row slices. Panics on ragged input; only used with
/// literal tables.
pub fn from_rows<const N: usize>(rows: &[[Complex64; N]]) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows.len(), N, |i, j| rows[i][j])
}

pub fn from_real_rows<const N: usize>(rows: &[[f64; N]]) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows.len(), N, |i, j| c(rows[i][j], 0.0))
}

pub fn diagonal(entries: &[Complex64]) -> ComplexMatrix {
    let n = entries.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { entries[i] } else { ZERO })
}

pub fn pauli_x() -> ComplexMatrix {
    from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])
}

pub fn pauli_y() -> ComplexMatrix {
    from_rows(&[[ZERO, -I], [I, ZERO]])
}

pub fn pauli_z() -> ComplexMatrix {
    from_real_rows(&[[1.0, 0.0], [0.0, -1.0]])
}

/// The two-qubit swap operator `S`.
pub fn swap_operator() -> ComplexMatrix {
    from_real_rows(&[
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
}

pub fn ensure_shape(m: &ComplexMatrix, rows: usize, cols: usize) -> Result<()> {
    if m.nrows() != rows || m.ncols() != cols {
        return Err(Error::DimensionMismatch {
            expected: format!("{rows}x{cols}"),
            found: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    Ok(())
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Kronecker product of two 2x2 matrices, row index `2*i1 + i2`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_shape(a, 2, 2)?;
    ensure_shape(b, 2, 2)?;
    Ok(a.kronecker(b))
}

/// `blockdiag(a, b)` for square blocks.
pub fn block_diag(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (n, m) = (a.nrows(), b.nrows());
    let mut out = ComplexMatrix::zeros(n + m, n + m);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((n, n), (m, m)).copy_from(b);
    out
}

/// Largest absolute entry.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff: shape mismatch");
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Max-norm of `m^dagger m - I`.
pub fn unitarity_residual(m: &ComplexMatrix) -> Result<f64> {
    ensure_square(m)?;
    let gram = m.adjoint() * m;
    Ok(max_abs_diff(&gram, &identity(m.nrows())))
}

pub fn is_unitary(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(unitarity_residual(m)? <= tol)
}

pub fn ensure_unitary(m: &ComplexMatrix, tol: f64) -> Result<()> {
    let residual = unitarity_residual(m)?;
    if residual > tol || !residual.is_finite() {
        return Err(Error::NonUnitary { residual, tol });
    }
    Ok(())
}

/// Singular values in descending order, from the Hermitian eigenproblem of
/// `m^dagger m` (or `m m^dagger`, whichever is smaller).
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let gram = if m.nrows() >= m.ncols() {
        m.adjoint() * m
    } else {
        m * m.adjoint()
    };
    let eig = SymmetricEigen::new(gram);
    let mut values: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

pub fn largest_singular_value(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn hermiticity_residual(m: &ComplexMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Hermitian positive semidefinite square root.
///
/// Eigenvalues in `[-1e-10, 0)` are clamped to zero; anything more negative
/// is rejected.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_square(m)?;
    let herm = hermiticity_residual(m);
    if herm > ALGEBRAIC_TOL {
        return Err(Error::NotPsd(format!("Hermiticity deviation {herm:.3e}")));
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    if let Some(min) = eig.eigenvalues.iter().copied().reduce(f64::min) {
        if min < -ALGEBRAIC_TOL {
            return Err(Error::NotPsd(format!("eigenvalue {min:.3e}")));
        }
    }
    let roots: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&l| c(l.max(0.0).sqrt(), 0.0))
        .collect();
    let v = &eig.eigenvectors;
    Ok(v * diagonal(&roots) * v.adjoint())
}

/// Haar-distributed random unitary via QR of a complex Ginibre matrix with
/// the phases of `R`'s diagonal divided out.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases: Vec<Complex64> = (0..n)
        .map(|k| {
            let d = r[(k, k)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                ONE
            }
        })
        .collect();
    q * diagonal(&phases)
}

pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}
