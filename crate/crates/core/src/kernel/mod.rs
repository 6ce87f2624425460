//! Dense complex matrices and the hermitian spectral primitives used by every
//! positivity, nullity and quotient computation in the crate.
//!
//! Thresholds are relative: a quantity counts as zero when it is at most
//! `tol * max(1, ‖M‖)`, where `‖M‖` is the spectral radius for hermitian input
//! and the Frobenius norm otherwise.

mod sparse;

pub use sparse::{SparseMatrix, SparseVec};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const DEFAULT_TOL: f64 = 1e-9;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn one() -> C64 {
    C64::new(1.0, 0.0)
}

pub fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

pub fn adjoint(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}

/// Frobenius distance from hermiticity, relative to `max(1, ‖M‖_F)`.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    frobenius(&(m - m.adjoint())) / frobenius(m).max(1.0)
}

/// `(‖X − Y‖_F, max(‖X‖_F, ‖Y‖_F))`, the inputs of a relative residual.
pub fn sparse_residual(x: &SparseMatrix, y: &SparseMatrix) -> (f64, f64) {
    (x.sub(y).frobenius_norm(), x.frobenius_norm().max(y.frobenius_norm()))
}

/// Dense counterpart of [`sparse_residual`].
pub fn dense_residual(x: &CMatrix, y: &CMatrix) -> (f64, f64) {
    (frobenius(&(x - y)), frobenius(x).max(frobenius(y)))
}

#[derive(Clone, Debug)]
pub struct Eigensystem {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

impl Eigensystem {
    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn scale(&self) -> f64 {
        self.spectral_radius().max(1.0)
    }
}

fn phase_normalize(v: &mut CVector) {
    let peak = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return;
    }
    if let Some(first) = v.iter().find(|x| x.norm() > 1e-12 * peak).copied() {
        let phase = first / first.norm();
        for x in v.iter_mut() {
            *x /= phase;
        }
    }
}

fn lex_cmp(a: &CVector, b: &CVector) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// Eigen-decomposition of a hermitian matrix, eigenvalues ascending.
///
/// Each eigenvector is phase-normalized so its first significant entry is
/// real positive; eigenvalues equal to within `1e-12 * scale` are ordered by
/// lexicographic comparison of their eigenvectors.
pub fn hermitian_eigensystem(m: &CMatrix, tol: f64) -> Result<Eigensystem> {
    let residual = hermiticity_residual(m);
    if residual > tol {
        return Err(Error::NotHermitian { residual });
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(Eigensystem { values: vec![], vectors: CMatrix::zeros(0, 0) });
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut pairs: Vec<(f64, CVector)> = (0..n)
        .map(|k| {
            let mut v: CVector = eig.eigenvectors.column(k).into_owned();
            phase_normalize(&mut v);
            (eig.eigenvalues[k], v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let scale = pairs.iter().map(|p| p.0.abs()).fold(1.0, f64::max);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && pairs[end].0 - pairs[end - 1].0 <= 1e-12 * scale {
            end += 1;
        }
        pairs[start..end].sort_by(|a, b| lex_cmp(&a.1, &b.1));
        start = end;
    }
    let values = pairs.iter().map(|p| p.0).collect();
    let cols: Vec<CVector> = pairs.into_iter().map(|p| p.1).collect();
    Ok(Eigensystem { values, vectors: CMatrix::from_columns(&cols) })
}

/// `true` iff the smallest eigenvalue is at least `-tol * max(1, ‖M‖)`.
pub fn is_psd(m: &CMatrix, tol: f64) -> Result<bool> {
    let eig = hermitian_eigensystem(m, tol)?;
    Ok(eig.min() >= -tol * eig.scale())
}

/// Split of a PSD matrix's eigenvectors into the numerical null space and its
/// orthogonal complement.
#[derive(Clone, Debug)]
pub struct SpectralSplit {
    pub null: Vec<CVector>,
    pub complement: Vec<CVector>,
    pub complement_values: Vec<f64>,
}

pub fn split_spectrum(g: &CMatrix, tol: f64) -> Result<SpectralSplit> {
    let eig = hermitian_eigensystem(g, tol)?;
    let threshold = tol * eig.scale();
    if eig.min() < -threshold {
        return Err(Error::NotPsd { min_eigenvalue: eig.min() });
    }
    let mut out = SpectralSplit { null: vec![], complement: vec![], complement_values: vec![] };
    for (k, &lambda) in eig.values.iter().enumerate() {
        let v = eig.vectors.column(k).into_owned();
        if lambda <= threshold {
            out.null.push(v);
        } else {
            out.complement.push(v);
            out.complement_values.push(lambda);
        }
    }
    Ok(out)
}

/// Orthonormal basis of the eigenspaces of `g` with eigenvalue at most
/// `tol * max(1, ‖G‖)`.
pub fn null_space(g: &CMatrix, tol: f64) -> Result<Vec<CVector>> {
    Ok(split_spectrum(g, tol)?.null)
}

/// Numerical rank via the singular values of `m` (eigenvalues of `M^H M`).
pub fn rank(m: &CMatrix, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > tol * top.max(1.0)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(rows: usize, cols: usize, data: &[(f64, f64)]) -> CMatrix {
        CMatrix::from_row_iterator(rows, cols, data.iter().map(|&(a, b)| c(a, b)))
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let a = CMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (&a + a.adjoint()).scale(0.5)
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(adjoint(&CMatrix::identity(3, 3)), CMatrix::identity(3, 3));
        let e12 = m(2, 2, &[(0., 0.), (1., 0.), (0., 0.), (0., 0.)]);
        assert_eq!(adjoint(&e12), m(2, 2, &[(0., 0.), (0., 0.), (1., 0.), (0., 0.)]));
        assert_eq!(adjoint(&m(1, 1, &[(0., 1.)])), m(1, 1, &[(0., -1.)]));
    }

    #[test]
    fn eigensystem_of_diagonal_and_pauli_x() {
        let d = m(2, 2, &[(2., 0.), (0., 0.), (0., 0.), (1., 0.)]);
        let e = hermitian_eigensystem(&d, DEFAULT_TOL).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0]);
        assert!((e.vectors[(1, 0)] - one()).norm() < 1e-14);
        assert!((e.vectors[(0, 1)] - one()).norm() < 1e-14);

        let x = m(2, 2, &[(0., 0.), (1., 0.), (1., 0.), (0., 0.)]);
        let e = hermitian_eigensystem(&x, DEFAULT_TOL).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gram_of_two_vectors() {
        // Gram of (1,0),(1,1) is [[1,1],[1,2]]; characteristic polynomial
        // x^2 - 3x + 1 gives (3 -/+ sqrt 5)/2.
        let g = m(2, 2, &[(1., 0.), (1., 0.), (1., 0.), (2., 0.)]);
        let e = hermitian_eigensystem(&g, DEFAULT_TOL).unwrap();
        let s5 = 5f64.sqrt();
        assert!((e.values[0] - (3.0 - s5) / 2.0).abs() < 1e-14);
        assert!((e.values[1] - (3.0 + s5) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn not_hermitian_is_rejected() {
        let e12 = m(2, 2, &[(0., 0.), (1., 0.), (0., 0.), (0., 0.)]);
        assert!(matches!(hermitian_eigensystem(&e12, DEFAULT_TOL), Err(Error::NotHermitian { .. })));
        assert!(matches!(is_psd(&e12, DEFAULT_TOL), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn psd_examples() {
        assert!(is_psd(&CMatrix::identity(3, 3), DEFAULT_TOL).unwrap());
        let d = m(2, 2, &[(1., 0.), (0., 0.), (0., 0.), (-1., 0.)]);
        assert!(!is_psd(&d, DEFAULT_TOL).unwrap());
        // Choi matrix of the 2x2 transpose is the swap on C^2 (x) C^2.
        let mut swap = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                swap[(i * 2 + j, j * 2 + i)] = one();
            }
        }
        let e = hermitian_eigensystem(&swap, DEFAULT_TOL).unwrap();
        assert!((e.min() + 1.0).abs() < 1e-14);
        assert!(!is_psd(&swap, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn null_space_examples() {
        assert_eq!(null_space(&CMatrix::zeros(2, 2), DEFAULT_TOL).unwrap().len(), 2);
        assert!(null_space(&CMatrix::identity(3, 3), DEFAULT_TOL).unwrap().is_empty());
        let g = m(2, 2, &[(1., 0.), (1., 0.), (1., 0.), (1., 0.)]);
        let ns = null_space(&g, DEFAULT_TOL).unwrap();
        assert_eq!(ns.len(), 1);
        let r = 1.0 / 2f64.sqrt();
        assert!((ns[0][0] - c(r, 0.0)).norm() < 1e-14);
        assert!((ns[0][1] - c(-r, 0.0)).norm() < 1e-14);
        let neg = m(2, 2, &[(1., 0.), (0., 0.), (0., 0.), (-1., 0.)]);
        assert!(matches!(null_space(&neg, DEFAULT_TOL), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn random_hermitian_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..8 {
            let h = random_hermitian(n, &mut rng);
            let e = hermitian_eigensystem(&h, DEFAULT_TOL).unwrap();
            let d = CMatrix::from_diagonal(&CVector::from_iterator(n, e.values.iter().map(|&x| c(x, 0.0))));
            let rec = &e.vectors * d * e.vectors.adjoint();
            assert!(frobenius(&(rec - &h)) / frobenius(&h).max(1.0) < 1e-10);
            let u = e.vectors.adjoint() * &e.vectors;
            assert!(frobenius(&(u - CMatrix::identity(n, n))) < 1e-10);
        }
    }

    #[test]
    fn null_projector_is_idempotent_and_complementary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = CMatrix::from_fn(5, 3, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let g = &a * a.adjoint();
        let split = split_spectrum(&g, DEFAULT_TOL).unwrap();
        assert_eq!(split.null.len(), 2);
        assert_eq!(split.null.len() + split.complement.len(), 5);
        let n = CMatrix::from_columns(&split.null);
        let p = &n * n.adjoint();
        assert!(frobenius(&(&p * &p - &p)) < 1e-10);
        let all: Vec<CVector> = split.null.iter().chain(split.complement.iter()).cloned().collect();
        assert_eq!(rank(&CMatrix::from_columns(&all), 1e-10), 5);
    }

    #[test]
    fn adjoint_reverses_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = CMatrix::from_fn(3, 4, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let b = CMatrix::from_fn(4, 2, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let lhs = (&a * &b).adjoint();
        let rhs = b.adjoint() * a.adjoint();
        assert!(frobenius(&(lhs - rhs)) / frobenius(&(&a * &b)).max(1.0) < 1e-14);
    }
}
