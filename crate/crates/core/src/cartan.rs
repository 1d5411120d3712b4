//! Cartan (KAK) canonical form of two-qubit gates.
//!
//! Every 4x4 unitary factors as `g (V1 (x) V2) C(alpha, beta, gamma) (V3 (x) V4)`
//! with `C = exp(i(alpha XX + beta YY + gamma ZZ))`. Triples are reported in
//! the Weyl chamber `pi/4 >= alpha >= beta >= |gamma|`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gatemap;
use crate::linalg::{self, c, ComplexMatrix, I, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalTriple {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl CanonicalTriple {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    fn as_array(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    fn from_array(t: [f64; 3]) -> Self {
        Self::new(t[0], t[1], t[2])
    }

    /// Whether the triple lies in the Weyl chamber, up to `tol`.
    pub fn is_canonical(&self, tol: f64) -> bool {
        let [a, b, g] = self.as_array();
        FRAC_PI_4 + tol >= a && a + tol >= b && b + tol >= g.abs()
    }
}

/// The four distinct entries of the canonical matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalWeights {
    pub w1: Complex64,
    pub w2: Complex64,
    pub w3: Complex64,
    pub w4: Complex64,
}

impl CanonicalWeights {
    pub fn new(w1: Complex64, w2: Complex64, w3: Complex64, w4: Complex64) -> Self {
        Self { w1, w2, w3, w4 }
    }

    pub fn from_array(w: [Complex64; 4]) -> Self {
        Self::new(w[0], w[1], w[2], w[3])
    }

    pub fn as_array(&self) -> [Complex64; 4] {
        [self.w1, self.w2, self.w3, self.w4]
    }

    /// The matrix `[[w1,0,0,w4],[0,w2,w3,0],[0,w3,w2,0],[w4,0,0,w1]]`.
    pub fn matrix(&self) -> ComplexMatrix {
        let Self { w1, w2, w3, w4 } = *self;
        linalg::from_rows(&[
            [w1, ZERO, ZERO, w4],
            [ZERO, w2, w3, ZERO],
            [ZERO, w3, w2, ZERO],
            [w4, ZERO, ZERO, w1],
        ])
    }

    /// Largest deviation from the row-norm and column-orthogonality
    /// relations a unitary canonical matrix must satisfy.
    pub fn unitarity_residual(&self) -> f64 {
        let Self { w1, w2, w3, w4 } = *self;
        let r1 = (w1.norm_sqr() + w4.norm_sqr() - 1.0).abs();
        let r2 = (w2.norm_sqr() + w3.norm_sqr() - 1.0).abs();
        let o1 = (w1 * w4.conj() + w4 * w1.conj()).norm();
        let o2 = (w2 * w3.conj() + w3 * w2.conj()).norm();
        r1.max(r2).max(o1).max(o2)
    }
}

pub fn weights_from_triple(t: &CanonicalTriple) -> CanonicalWeights {
    let g = Complex64::from_polar(1.0, t.gamma);
    let gc = g.conj();
    let (diff, sum) = (t.alpha - t.beta, t.alpha + t.beta);
    CanonicalWeights {
        w1: g * diff.cos(),
        w2: gc * sum.cos(),
        w3: I * gc * sum.sin(),
        w4: I * g * diff.sin(),
    }
}

/// `exp(i(alpha XX + beta YY + gamma ZZ))` in closed form.
pub fn canonical_matrix(t: &CanonicalTriple) -> ComplexMatrix {
    weights_from_triple(t).matrix()
}

/// Two-qubit decomposition `global_phase (v1 (x) v2) C(triple) (v3 (x) v4)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartanDecomposition {
    pub v1: ComplexMatrix,
    pub v2: ComplexMatrix,
    pub v3: ComplexMatrix,
    pub v4: ComplexMatrix,
    pub triple: CanonicalTriple,
    pub global_phase: Complex64,
}

impl CartanDecomposition {
    pub fn left(&self) -> ComplexMatrix {
        self.v1.kronecker(&self.v2)
    }

    pub fn right(&self) -> ComplexMatrix {
        self.v3.kronecker(&self.v4)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.left() * canonical_matrix(&self.triple) * self.right() * self.global_phase
    }

    pub fn residual(&self, w: &ComplexMatrix) -> f64 {
        linalg::max_abs_diff(&self.reconstruct(), w)
    }
}

/// Local factors accumulated while moving a triple around the symmetry
/// group. Maintains `C(original) = phase (v1 (x) v2) C(triple) (v3 (x) v4)`.
struct Frame {
    v: [ComplexMatrix; 4],
    phase: Complex64,
    t: [f64; 3],
}

fn axis_pauli(k: usize) -> ComplexMatrix {
    match k {
        0 => linalg::pauli_x(),
        1 => linalg::pauli_y(),
        _ => linalg::pauli_z(),
    }
}

impl Frame {
    fn new(t: [f64; 3]) -> Self {
        Self {
            v: std::array::from_fn(|_| linalg::identity(2)),
            phase: ONE,
            t,
        }
    }

    /// `C(t) = i^n (P (x) P)^n C(t - n pi/2 e_k)` for the Pauli `P` of axis k.
    fn shift(&mut self, k: usize, n: i64) {
        if n == 0 {
            return;
        }
        self.t[k] -= n as f64 * FRAC_PI_2;
        self.phase *= Complex64::from_polar(1.0, n as f64 * FRAC_PI_2);
        if n.rem_euclid(2) == 1 {
            let p = axis_pauli(k);
            self.v[0] = &self.v[0] * &p;
            self.v[1] = &self.v[1] * &p;
        }
    }

    /// Negates the two angles other than `keep`, conjugating by `P_keep (x) I`.
    fn flip_pair(&mut self, keep: usize) {
        let p = axis_pauli(keep);
        for k in 0..3 {
            if k != keep {
                self.t[k] = -self.t[k];
            }
        }
        self.v[0] = &self.v[0] * &p;
        self.v[2] = &p * &self.v[2];
    }

    /// Exchanges two angles. `G` satisfies `(G (x) G) C(t) (G (x) G)^dagger = C(swapped t)`.
    fn swap(&mut self, i: usize, j: usize) {
        let g = match (i.min(j), i.max(j)) {
            (0, 1) => linalg::diagonal(&[ONE, I]),
            (0, 2) => linalg::from_real_rows(&[
                [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
                [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
            ]),
            _ => linalg::from_rows(&[
                [c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)],
                [c(0.0, FRAC_1_SQRT_2), c(FRAC_1_SQRT_2, 0.0)],
            ]),
        };
        let gd = g.adjoint();
        self.t.swap(i, j);
        self.v[0] = &self.v[0] * &gd;
        self.v[1] = &self.v[1] * &gd;
        self.v[2] = &g * &self.v[2];
        self.v[3] = &g * &self.v[3];
    }

    fn canonicalize(&mut self) {
        for k in 0..3 {
            let n = (self.t[k] / FRAC_PI_2).round() as i64;
            self.shift(k, n);
        }
        // Sort by magnitude, descending.
        for (i, j) in [(0, 1), (1, 2), (0, 1)] {
            if self.t[j].abs() > self.t[i].abs() {
                self.swap(i, j);
            }
        }
        if self.t[0] < 0.0 && self.t[1] < 0.0 {
            self.flip_pair(2);
        } else if self.t[0] < 0.0 {
            self.flip_pair(1);
        } else if self.t[1] < 0.0 {
            self.flip_pair(0);
        }
        // On the alpha = pi/4 face, gamma and -gamma are equivalent.
        if (self.t[0] - FRAC_PI_4).abs() < 1e-12 && self.t[2] < 0.0 {
            self.shift(0, 1);
            self.flip_pair(1);
        }
        for x in self.t.iter_mut() {
            if *x == 0.0 {
                *x = 0.0; // drop negative zero
            }
        }
    }
}

/// Moves a triple into the Weyl chamber using the symmetries of the
/// canonical form (pi/2 shifts, paired sign flips and permutations).
pub fn canonicalize_triple(t: &CanonicalTriple) -> CanonicalTriple {
    let mut frame = Frame::new(t.as_array());
    frame.canonicalize();
    CanonicalTriple::from_array(frame.t)
}

/// Canonicalizes and returns the local factors relating the two forms:
/// `C(t) = phase (v1 (x) v2) C(t') (v3 (x) v4)`.
pub fn canonicalize_with_locals(t: &CanonicalTriple) -> CartanDecomposition {
    let mut frame = Frame::new(t.as_array());
    frame.canonicalize();
    let [v1, v2, v3, v4] = frame.v;
    CartanDecomposition {
        v1,
        v2,
        v3,
        v4,
        triple: CanonicalTriple::from_array(frame.t),
        global_phase: frame.phase,
    }
}

/// Columns are the magic basis.
fn magic_basis() -> ComplexMatrix {
    let h = FRAC_1_SQRT_2;
    linalg::from_rows(&[
        [c(h, 0.0), c(0.0, h), ZERO, ZERO],
        [ZERO, ZERO, c(0.0, h), c(h, 0.0)],
        [ZERO, ZERO, c(0.0, h), c(-h, 0.0)],
        [c(h, 0.0), c(0.0, -h), ZERO, ZERO],
    ])
}

/// Diagonal signs of XX, YY and ZZ in the magic basis.
const MAGIC_SIGNS: [[f64; 4]; 3] = [
    [1.0, -1.0, 1.0, -1.0],
    [-1.0, 1.0, 1.0, -1.0],
    [1.0, 1.0, -1.0, -1.0],
];

/// Splits a 4x4 tensor product into `a (x) b` with `det b = 1`.
pub fn decompose_product(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    linalg::ensure_shape(m, 4, 4)?;
    let block = |i: usize, k: usize| m.view((2 * i, 2 * k), (2, 2)).into_owned();
    let (mut bi, mut bk, mut best) = (0, 0, -1.0);
    for i in 0..2 {
        for k in 0..2 {
            let n = block(i, k).norm();
            if n > best {
                (bi, bk, best) = (i, k, n);
            }
        }
    }
    let pivot = block(bi, bk);
    let det = pivot.determinant();
    if det.norm() < 1e-14 {
        return Err(Error::NumericalFailure("product factor is singular".into()));
    }
    let b = pivot / det.sqrt();
    let bd = b.adjoint();
    let a = ComplexMatrix::from_fn(2, 2, |i, k| (&bd * block(i, k)).trace() * 0.5);
    let residual = linalg::max_abs_diff(&a.kronecker(&b), m);
    if residual > 1e-7 {
        return Err(Error::NumericalFailure(format!(
            "matrix is not a tensor product (residual {residual:.3e})"
        )));
    }
    Ok((a, b))
}

/// Real orthogonal `P` with `P^T m P` diagonal, for complex symmetric unitary
/// `m`. Real and imaginary parts commute, so a generic real combination of
/// them shares the eigenvectors.
fn simultaneous_diagonalize(m: &ComplexMatrix) -> Result<(Matrix4<f64>, [Complex64; 4])> {
    const MIXES: [(f64, f64); 6] = [
        (1.260_206_611_224_938_8, 0.223_178_490_467_220_27),
        (0.416_145_923_047_216, -1.094_720_412_335_917),
        (-0.757_834_283_716_418, 1.329_120_416_073_411),
        (1.0, 0.0),
        (0.0, 1.0),
        (0.618_033_988_749_895, 1.618_033_988_749_895),
    ];
    let mut best: Option<(f64, Matrix4<f64>)> = None;
    for (ra, rb) in MIXES {
        let real = Matrix4::from_fn(|i, j| {
            let sym = (m[(i, j)] + m[(j, i)]) * 0.5;
            ra * sym.re + rb * sym.im
        });
        let p = SymmetricEigen::new(real).eigenvectors;
        let pc: ComplexMatrix = ComplexMatrix::from_fn(4, 4, |i, j| c(p[(i, j)], 0.0));
        let d = pc.transpose() * m * &pc;
        let off = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .fold(0.0f64, |acc, (i, j)| acc.max(d[(i, j)].norm()));
        if best.as_ref().is_none_or(|(b, _)| off < *b) {
            best = Some((off, p));
        }
        if off < 1e-13 {
            break;
        }
    }
    let (off, p) = best.expect("at least one mix is tried");
    if off > 1e-9 {
        return Err(Error::NumericalFailure(format!(
            "could not diagonalize the symmetric factor (off-diagonal {off:.3e})"
        )));
    }
    let pc: ComplexMatrix = ComplexMatrix::from_fn(4, 4, |i, j| c(p[(i, j)], 0.0));
    let d = pc.transpose() * m * &pc;

    // Deterministic ordering: by eigenvalue argument, then lexicographically
    // on the eigenvector; each vector's first significant entry is positive.
    let mut cols: Vec<(Complex64, [f64; 4])> = (0..4)
        .map(|k| {
            let mut v = [p[(0, k)], p[(1, k)], p[(2, k)], p[(3, k)]];
            if let Some(first) = v.iter().copied().find(|x| x.abs() > 1e-8) {
                if first < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
            (d[(k, k)], v)
        })
        .collect();
    cols.sort_by(|(la, va), (lb, vb)| {
        la.arg()
            .total_cmp(&lb.arg())
            .then_with(|| va.iter().zip(vb).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal))
    });
    let mut sorted = Matrix4::from_fn(|i, k| cols[k].1[i]);
    if sorted.determinant() < 0.0 {
        for i in 0..4 {
            sorted[(i, 3)] = -sorted[(i, 3)];
        }
    }
    Ok((sorted, std::array::from_fn(|k| cols[k].0)))
}

/// KAK decomposition of a 4x4 unitary, with the triple in the Weyl chamber.
pub fn kak_decompose(w: &ComplexMatrix) -> Result<CartanDecomposition> {
    linalg::ensure_shape(w, 4, 4)?;
    linalg::ensure_unitary(w, 1e-8)?;

    let det = w.determinant();
    let phase0 = Complex64::from_polar(1.0, det.arg() / 4.0);
    let u = w / phase0;
    let magic = magic_basis();
    let up = magic.adjoint() * &u * &magic;
    let m2 = up.transpose() * &up;

    let (p, eigenvalues) = simultaneous_diagonalize(&m2)?;
    let pc: ComplexMatrix = ComplexMatrix::from_fn(4, 4, |i, j| c(p[(i, j)], 0.0));
    let mut d: [Complex64; 4] = eigenvalues.map(|l| (l / l.norm()).sqrt());
    let mut k1 = &up * &pc * linalg::diagonal(&d.map(|x| x.inv()));
    if k1.determinant().re < 0.0 {
        d[0] = -d[0];
        for i in 0..4 {
            k1[(i, 0)] = -k1[(i, 0)];
        }
    }
    let imag = k1.iter().fold(0.0f64, |acc, z| acc.max(z.im.abs()));
    if imag > 1e-6 {
        return Err(Error::NumericalFailure(format!(
            "left orthogonal factor is not real (imaginary part {imag:.3e})"
        )));
    }

    // Diagonal phases theta_k = phi + a sx_k + b sy_k + c sz_k.
    let theta = d.map(|x| x.arg());
    let phi = theta.iter().sum::<f64>() / 4.0;
    let raw: [f64; 3] = std::array::from_fn(|axis| {
        MAGIC_SIGNS[axis]
            .iter()
            .zip(&theta)
            .map(|(s, t)| s * t)
            .sum::<f64>()
            / 4.0
    });

    let left = &magic * &k1 * magic.adjoint();
    let right = &magic * pc.transpose() * magic.adjoint();
    let (a1, b1) = decompose_product(&left)?;
    let (a2, b2) = decompose_product(&right)?;

    let frame = canonicalize_with_locals(&CanonicalTriple::from_array(raw));
    let decomposition = CartanDecomposition {
        v1: a1 * frame.v1,
        v2: b1 * frame.v2,
        v3: frame.v3 * a2,
        v4: frame.v4 * b2,
        triple: frame.triple,
        global_phase: phase0 * Complex64::from_polar(1.0, phi) * frame.global_phase,
    };
    let residual = decomposition.residual(w);
    if residual > 1e-7 {
        return Err(Error::NumericalFailure(format!(
            "KAK reconstruction residual {residual:.3e}"
        )));
    }
    Ok(decomposition)
}

/// `X u Y` with `X = blockdiag(v1, v2)` and `Y = blockdiag(v3, v4)`, so that
/// `f(X u Y) = (v1 (x) v2) f(u) (v3 (x) v4)`.
pub fn conjugate_submatrix(
    u: &ComplexMatrix,
    v1: &ComplexMatrix,
    v2: &ComplexMatrix,
    v3: &ComplexMatrix,
    v4: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    linalg::ensure_shape(u, 4, 4)?;
    for v in [v1, v2, v3, v4] {
        linalg::ensure_shape(v, 2, 2)?;
        linalg::ensure_unitary(v, linalg::ALGEBRAIC_TOL)?;
    }
    Ok(linalg::block_diag(v1, v2) * u * linalg::block_diag(v3, v4))
}

/// Residual of the local-transport identity for one set of inputs.
pub fn invariance_residual(
    u: &ComplexMatrix,
    v1: &ComplexMatrix,
    v2: &ComplexMatrix,
    v3: &ComplexMatrix,
    v4: &ComplexMatrix,
) -> Result<f64> {
    let lhs = gatemap::f(&conjugate_submatrix(u, v1, v2, v3, v4)?);
    let rhs = v1.kronecker(v2) * gatemap::f(u) * v3.kronecker(v4);
    Ok(linalg::max_abs_diff(&lhs, &rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, max_abs_diff};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn cnot() -> ComplexMatrix {
        linalg::from_real_rows(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ])
    }

    /// Brute-force exponential of `i(a XX + b YY + c ZZ)` by Taylor series.
    fn expm_oracle(t: &CanonicalTriple) -> ComplexMatrix {
        let x = linalg::pauli_x();
        let y = linalg::pauli_y();
        let z = linalg::pauli_z();
        let h = (x.kronecker(&x) * c(t.alpha, 0.0)
            + y.kronecker(&y) * c(t.beta, 0.0)
            + z.kronecker(&z) * c(t.gamma, 0.0))
            * I;
        let mut term = linalg::identity(4);
        let mut sum = linalg::identity(4);
        for k in 1..60 {
            term = &term * &h / c(k as f64, 0.0);
            sum += &term;
        }
        sum
    }

    #[test]
    fn canonical_matrix_matches_exponential() {
        for t in [
            CanonicalTriple::new(0.3, 0.5, 0.7),
            CanonicalTriple::new(-1.1, 2.0, 0.25),
            CanonicalTriple::new(FRAC_PI_4, 0.0, 0.0),
        ] {
            assert!(max_abs_diff(&canonical_matrix(&t), &expm_oracle(&t)) < 1e-13);
        }
    }

    #[test]
    fn canonical_matrix_examples() {
        let zero = canonical_matrix(&CanonicalTriple::new(0.0, 0.0, 0.0));
        assert!(max_abs_diff(&zero, &linalg::identity(4)) < 1e-15);

        let h = FRAC_1_SQRT_2;
        let cnot_like = canonical_matrix(&CanonicalTriple::new(FRAC_PI_4, 0.0, 0.0));
        let expected = CanonicalWeights::new(c(h, 0.0), c(h, 0.0), c(0.0, h), c(0.0, h)).matrix();
        assert!(max_abs_diff(&cnot_like, &expected) < 1e-15);

        let iswap = canonical_matrix(&CanonicalTriple::new(FRAC_PI_4, FRAC_PI_4, 0.0));
        let expected = CanonicalWeights::new(ONE, ZERO, I, ZERO).matrix();
        assert!(max_abs_diff(&iswap, &expected) < 1e-15);
        assert!(linalg::is_unitary(&iswap, 1e-12).unwrap());
    }

    #[test]
    fn weights_examples() {
        let w = weights_from_triple(&CanonicalTriple::new(0.0, 0.0, 0.0));
        assert_eq!(w.as_array(), [ONE, ONE, ZERO, ZERO]);

        let q = FRAC_PI_4;
        let w = weights_from_triple(&CanonicalTriple::new(q, q, q));
        let e = Complex64::from_polar(1.0, q);
        let expected = [e, ZERO, I * e.conj(), ZERO];
        for (a, b) in w.as_array().iter().zip(expected) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!(w.unitarity_residual() < 1e-15);
    }

    #[test]
    fn canonicalize_examples() {
        let q = FRAC_PI_4;
        assert_eq!(
            canonicalize_triple(&CanonicalTriple::new(q, 0.0, 0.0)),
            CanonicalTriple::new(q, 0.0, 0.0)
        );
        let t = canonicalize_triple(&CanonicalTriple::new(0.0, q, 0.0));
        assert!((t.alpha - q).abs() < 1e-15 && t.beta == 0.0 && t.gamma == 0.0);
        let t = canonicalize_triple(&CanonicalTriple::new(q + PI, 0.0, 0.0));
        assert!((t.alpha - q).abs() < 1e-12 && t.beta.abs() < 1e-12 && t.gamma.abs() < 1e-12);
    }

    #[test]
    fn canonicalize_locals_reconstruct_original() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let raw = CanonicalTriple::new(
                rng.random_range(-7.0..7.0),
                rng.random_range(-7.0..7.0),
                rng.random_range(-7.0..7.0),
            );
            let d = canonicalize_with_locals(&raw);
            assert!(d.triple.is_canonical(1e-12), "{:?}", d.triple);
            assert!(d.residual(&canonical_matrix(&raw)) < 1e-12);
        }
    }

    #[test]
    fn kak_identity_and_cnot() {
        let d = kak_decompose(&linalg::identity(4)).unwrap();
        assert!(d.triple.alpha.abs() < 1e-12 && d.triple.beta.abs() < 1e-12 && d.triple.gamma.abs() < 1e-12);
        assert!(d.residual(&linalg::identity(4)) < 1e-12);

        let d = kak_decompose(&cnot()).unwrap();
        assert!((d.triple.alpha - FRAC_PI_4).abs() < 1e-9, "{:?}", d.triple);
        assert!(d.triple.beta.abs() < 1e-9 && d.triple.gamma.abs() < 1e-9);
        assert!(d.residual(&cnot()) < 1e-9);
    }

    #[test]
    fn kak_round_trip_recovers_triple() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let t = CanonicalTriple::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            );
            let locals: Vec<ComplexMatrix> = (0..4).map(|_| haar_unitary(2, &mut rng)).collect();
            let w = locals[0].kronecker(&locals[1]) * canonical_matrix(&t) * locals[2].kronecker(&locals[3]);
            let d = kak_decompose(&w).unwrap();
            assert!(d.residual(&w) < 1e-9);
            let expected = canonicalize_triple(&t);
            // Generic interior points have a unique chamber representative.
            let diff = (d.triple.alpha - expected.alpha).abs()
                + (d.triple.beta - expected.beta).abs()
                + (d.triple.gamma - expected.gamma).abs();
            assert!(diff < 1e-8, "{:?} vs {:?}", d.triple, expected);
        }
    }

    #[test]
    fn kak_rejects_non_unitary() {
        assert!(matches!(
            kak_decompose(&linalg::identity(4).scale(2.0)),
            Err(Error::NonUnitary { .. })
        ));
    }

    #[test]
    fn conjugate_submatrix_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let i2 = linalg::identity(2);
        let u = linalg::random_matrix(4, 4, &mut rng);
        assert_eq!(conjugate_submatrix(&u, &i2, &i2, &i2, &i2).unwrap(), u);

        let v: Vec<ComplexMatrix> = (0..4).map(|_| haar_unitary(2, &mut rng)).collect();
        assert!(invariance_residual(&u, &v[0], &v[1], &v[2], &v[3]).unwrap() < 1e-11);

        let xy = conjugate_submatrix(&linalg::identity(4), &v[0], &v[1], &v[2], &v[3]).unwrap();
        let expected = v[0].kronecker(&v[1]) * v[2].kronecker(&v[3]);
        assert!(max_abs_diff(&gatemap::f(&xy), &expected) < 1e-12);

        assert!(conjugate_submatrix(&u, &i2.scale(2.0), &i2, &i2, &i2).is_err());
    }

    #[test]
    fn decompose_product_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = haar_unitary(2, &mut rng);
        let b = haar_unitary(2, &mut rng);
        let (x, y) = decompose_product(&a.kronecker(&b)).unwrap();
        assert!(max_abs_diff(&x.kronecker(&y), &a.kronecker(&b)) < 1e-12);
        assert!((y.determinant() - ONE).norm() < 1e-12);
        assert!(decompose_product(&cnot()).is_err());
    }
}
