//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use psgate_core::cartan::CanonicalTriple;
use psgate_core::linalg::{self, c, ComplexMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix exponential by scaling and squaring over a Taylor series.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.nrows();
    let norm = linalg::max_abs(a) * n as f64;
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a / c(2f64.powi(squarings as i32), 0.0);
    let mut term = linalg::identity(n);
    let mut sum = linalg::identity(n);
    for k in 1..40 {
        term = &term * &scaled / c(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(i(a XX + b YY + c ZZ))`.
pub fn canonical_oracle(t: &CanonicalTriple) -> ComplexMatrix {
    let (x, y, z) = (linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z());
    let h = x.kronecker(&x) * c(t.alpha, 0.0) + y.kronecker(&y) * c(t.beta, 0.0) + z.kronecker(&z) * c(t.gamma, 0.0);
    expm(&(h * c(0.0, 1.0)))
}

/// Permanent of a 2x2 matrix.
fn perm2(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> Complex64 {
    a * d + b * cc
}

/// Amplitude of finding photons in modes `(k, l)` given inputs `(i, j)`,
/// from the permanent formula `perm(U[out, in]) / sqrt(prod n_out!)`.
pub fn fock_amplitude(u: &ComplexMatrix, (i, j): (usize, usize), (k, l): (usize, usize)) -> Complex64 {
    let p = perm2(u[(k, i)], u[(k, j)], u[(l, i)], u[(l, j)]);
    if k == l {
        p / 2f64.sqrt()
    } else {
        p
    }
}

/// Computational block by the permanent formula.
pub fn block_oracle(u: &ComplexMatrix) -> ComplexMatrix {
    const PAIRS: [(usize, usize); 4] = [(0, 2), (0, 3), (1, 2), (1, 3)];
    ComplexMatrix::from_fn(4, 4, |r, col| fock_amplitude(u, PAIRS[col], PAIRS[r]))
}

/// Makhlin local invariants `(G1, G2)` of a two-qubit gate.
pub fn makhlin(u: &ComplexMatrix) -> (Complex64, Complex64) {
    let s = 1.0 / 2f64.sqrt();
    let (o, z, i) = (c(s, 0.0), c(0.0, 0.0), c(0.0, s));
    let q = linalg::from_rows(&[[o, i, z, z], [z, z, i, o], [z, z, i, -o], [o, -i, z, z]]);
    let ub = q.adjoint() * u * &q;
    let m = ub.transpose() * &ub;
    let det = u.determinant();
    let tr = m.trace();
    let tr2 = (&m * &m).trace();
    (tr * tr / (det * 16.0), (tr * tr - tr2) / (det * 4.0))
}

pub fn random_local<R: Rng>(rng: &mut R) -> ComplexMatrix {
    linalg::haar_unitary(2, rng).kronecker(&linalg::haar_unitary(2, rng))
}

pub fn random_triple<R: Rng>(rng: &mut R) -> CanonicalTriple {
    CanonicalTriple::new(rng.random_range(0.0..PI), rng.random_range(0.0..PI), rng.random_range(0.0..PI))
}

pub fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    let r = rng.random_range(-1.0f64..1.0).exp();
    Complex64::from_polar(r, rng.random_range(-PI..PI))
}

/// Haar unitary scaled so its largest singular value is `< 1`.
pub fn random_contraction<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
    let m = linalg::random_matrix(n, n, rng);
    let s1 = linalg::largest_singular_value(&m);
    m / c(s1 * rng.random_range(1.0..2.0), 0.0)
}

/// A triple with one of the six combinations placed exactly on the lattice.
pub fn forced_triple<R: Rng>(rng: &mut R) -> CanonicalTriple {
    let x = rng.random_range(0.0..PI);
    let y = rng.random_range(0.0..PI);
    let target = if rng.random_bool(0.5) { 0.0 } else { PI / 2.0 } + PI * rng.random_range(-1i32..=1) as f64;
    let (a, b, g) = match rng.random_range(0..6) {
        0 => (x + target, x, y),
        1 => (target - x, x, y),
        2 => (x + target, y, x),
        3 => (target - x, y, x),
        4 => (y, x + target, x),
        _ => (y, target - x, x),
    };
    CanonicalTriple::new(a, b, g)
}

/// A triple with at least the weight `index` (1-based) vanishing.
pub fn zero_triple<R: Rng>(index: usize, rng: &mut R) -> CanonicalTriple {
    let b = rng.random_range(0.0..PI);
    let g = rng.random_range(0.0..PI);
    let k = PI * rng.random_range(-1i32..=1) as f64;
    let a = match index {
        1 => b + PI / 2.0 + k,
        2 => PI / 2.0 - b + k,
        3 => -b + k,
        _ => b + k,
    };
    CanonicalTriple::new(a, b, g)
}
