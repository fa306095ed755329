//! Dense complex matrices, Hermitian eigendecomposition and Schatten norms.
//!
//! Everything here is immutable once built. Hermitian matrices are symmetrized
//! at construction so that `h[(i, j)] == h[(j, i)].conj()` holds bit for bit.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

const EIGEN_EPS: f64 = 1e-15;

/// Square complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{:?}", self.0)
    }
}

impl ComplexMatrix {
    pub fn new(inner: DMatrix<C64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::NotSquare {
                rows: inner.nrows(),
                cols: inner.ncols(),
            });
        }
        if inner.nrows() == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be positive".into()));
        }
        for j in 0..inner.ncols() {
            for i in 0..inner.nrows() {
                let z = inner[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
            }
        }
        Ok(ComplexMatrix(inner))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        Self::new(DMatrix::from_fn(dim, dim, f))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
        }
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        Self::from_fn(diag.len(), |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn identity(dim: usize) -> Self {
        ComplexMatrix(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn scale(&self, c: C64) -> Self {
        ComplexMatrix(&self.0 * c)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        schatten_norm(self, SchattenP::Op)
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(ComplexMatrix(&self.0 * &other.0))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(ComplexMatrix(&self.0 + &other.0))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(ComplexMatrix(&self.0 - &other.0))
    }

    /// Short identifier used in diagnostics: dimension, Frobenius norm and a
    /// hash of the raw entry bits.
    pub fn fingerprint(&self) -> String {
        // FNV-1a over the IEEE bit patterns.
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for z in self.0.iter() {
            for bits in [z.re.to_bits(), z.im.to_bits()] {
                for byte in bits.to_le_bytes() {
                    hash ^= u64::from(byte);
                    hash = hash.wrapping_mul(0x0100_0000_01b3);
                }
            }
        }
        format!(
            "{n}x{n} matrix (frobenius {:.6e}, fnv {hash:016x})",
            self.0.norm(),
            n = self.dim()
        )
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on dimension mismatch; use [`ComplexMatrix::try_mul`] for fallible code.
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix dimensions must agree")
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix dimensions must agree")
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix dimensions must agree")
    }
}

/// Self-adjoint matrix. Construction averages the input with its conjugate
/// transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Self {
        let inner = m.as_matrix();
        let n = inner.nrows();
        let sym = DMatrix::from_fn(n, n, |i, j| (inner[(i, j)] + inner[(j, i)].conj()) * 0.5);
        HermitianMatrix(ComplexMatrix(sym))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        Ok(HermitianMatrix(ComplexMatrix::from_real_diagonal(diag)?))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_complex(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_complex(self) -> ComplexMatrix {
        self.0
    }
}

impl From<HermitianMatrix> for ComplexMatrix {
    fn from(h: HermitianMatrix) -> Self {
        h.0
    }
}

/// Eigenvalues in nondecreasing order together with a unitary matrix whose
/// columns are the matching eigenvectors. Each column spans the range of one
/// rank-one spectral projection; repeated eigenvalues are kept separate.
#[derive(Clone, Debug)]
pub struct SpectralResolution {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

impl SpectralResolution {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Rank-one spectral projection onto the `index`-th eigenvector.
    pub fn projection(&self, index: usize) -> ComplexMatrix {
        let v = self.eigenvectors.column(index);
        ComplexMatrix(&v * v.adjoint())
    }

    /// `U diag(f(λ)) U*`.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= w;
            }
        }
        ComplexMatrix(scaled * u.adjoint())
    }

    /// `U diag(λ) U*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|x| C64::new(x, 0.0))
    }

    /// Expresses `m` in this eigenbasis: `U* m U`.
    pub fn to_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.eigenvectors.adjoint() * m.as_matrix() * &self.eigenvectors)
    }
}

/// Eigendecomposition of a Hermitian matrix (Householder tridiagonalization
/// followed by implicit symmetric QR).
pub fn eig_hermitian(h: &HermitianMatrix) -> Result<SpectralResolution> {
    let m = h.as_complex();
    let eig = m
        .as_matrix()
        .clone()
        .try_symmetric_eigen(EIGEN_EPS, 0)
        .ok_or_else(|| Error::EigenNoConvergence {
            fingerprint: m.fingerprint(),
        })?;
    let n = m.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(SpectralResolution {
        eigenvalues,
        eigenvectors,
    })
}

/// `XY - YX`.
pub fn commutator(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<ComplexMatrix> {
    x.check_same_dim(y)?;
    Ok(ComplexMatrix(&x.0 * &y.0 - &y.0 * &x.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchattenP {
    /// Trace norm.
    One,
    /// Hilbert-Schmidt norm.
    Two,
    /// Operator norm.
    Op,
}

pub fn schatten_norm(x: &ComplexMatrix, p: SchattenP) -> f64 {
    match p {
        SchattenP::Two => x.0.norm(),
        SchattenP::One => x.0.clone().singular_values().sum(),
        SchattenP::Op => x.0.clone().singular_values().max(),
    }
}

/// Sum of the first `n` diagonal entries.
pub fn principal_trace(x: &ComplexMatrix, n: usize) -> Result<C64> {
    if n > x.dim() {
        return Err(Error::BlockTooLarge {
            requested: n,
            dim: x.dim(),
        });
    }
    Ok((0..n).map(|i| x.0[(i, i)]).sum())
}

/// On-disk matrix layout: row-major real and imaginary parts.
#[derive(Debug, Serialize, Deserialize)]
struct MatrixFile {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl ComplexMatrix {
    /// Serializes as `{"dim": n, "re": [[...]], "im": [[...]]}`. Floats are
    /// written in shortest round-trip form, so parsing the output recovers
    /// every entry bit for bit.
    pub fn to_json(&self) -> String {
        let n = self.dim();
        let file = MatrixFile {
            dim: n,
            re: (0..n).map(|i| (0..n).map(|j| self.0[(i, j)].re).collect()).collect(),
            im: (0..n).map(|i| (0..n).map(|j| self.0[(i, j)].im).collect()).collect(),
        };
        serde_json::to_string(&file).expect("finite floats always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MatrixFile =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("matrix json: {e}")))?;
        let n = file.dim;
        if n == 0 {
            return Err(Error::Format("matrix json: dim must be positive".into()));
        }
        let rows_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !rows_ok(&file.re) || !rows_ok(&file.im) {
            return Err(Error::Format(format!(
                "matrix json: expected {n} rows of {n} entries in both re and im"
            )));
        }
        Self::from_fn(n, |i, j| C64::new(file.re[i][j], file.im[i][j]))
    }

    pub fn read_json(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn write_json(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_complex, random_hermitian, random_unitary, seeded};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn hermitian_residual(h: &HermitianMatrix, s: &SpectralResolution) -> f64 {
        let diff = &s.reconstruct() - h.as_complex();
        diff.op_norm() / (1.0 + h.as_complex().op_norm())
    }

    fn unitarity_defect(s: &SpectralResolution) -> f64 {
        let u = s.eigenvectors();
        let n = s.dim();
        ComplexMatrix(u.adjoint() * u - DMatrix::<C64>::identity(n, n)).op_norm()
    }

    #[test]
    fn diagonal_input_sorts_eigenvalues() {
        let h = HermitianMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]).unwrap();
        let s = eig_hermitian(&h).unwrap();
        assert_eq!(s.eigenvalues(), &[1.0, 2.0, 3.0]);
        // Columns are (up to phase) e_1, e_2, e_0.
        let u = s.eigenvectors();
        for (col, row) in [(0, 1), (1, 2), (2, 0)] {
            assert!((u[(row, col)].norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn swap_matrix_eigenpairs() {
        let x = ComplexMatrix::from_rows(&[vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]])
            .unwrap();
        let s = eig_hermitian(&HermitianMatrix::new(x)).unwrap();
        assert!((s.eigenvalues()[0] + 1.0).abs() < 1e-15);
        assert!((s.eigenvalues()[1] - 1.0).abs() < 1e-15);
        let u = s.eigenvectors();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // (1, -1)/sqrt 2 up to a phase
        assert!((u[(0, 0)] + u[(1, 0)]).norm() < 1e-15);
        assert!((u[(0, 0)].norm() - r).abs() < 1e-15);
        assert!((u[(0, 1)] - u[(1, 1)]).norm() < 1e-15);
    }

    #[test]
    fn random_hermitian_seed_42_reconstructs() {
        let mut rng = seeded(42);
        let h = random_hermitian(&mut rng, 8);
        let s = eig_hermitian(&h).unwrap();
        assert!(hermitian_residual(&h, &s) <= 1e-12);
        assert!(unitarity_defect(&s) <= 1e-12);
        assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn hermitization_is_exact() {
        let mut rng = seeded(5);
        let raw = random_complex(&mut rng, 5);
        let h = HermitianMatrix::new(raw);
        let m = h.as_complex();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(m.get(i, j), m.get(j, i).conj());
            }
        }
    }

    #[test]
    fn commutator_examples() {
        let y = random_complex(&mut seeded(1), 3);
        let z = commutator(&ComplexMatrix::identity(3), &y).unwrap();
        assert_eq!(z, ComplexMatrix::zeros(3));

        let d = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]).unwrap();
        let n = ComplexMatrix::from_rows(&[vec![c(0., 0.), c(1., 0.)], vec![c(0., 0.), c(0., 0.)]])
            .unwrap();
        let z = commutator(&d, &n).unwrap();
        let expected =
            ComplexMatrix::from_rows(&[vec![c(0., 0.), c(-1., 0.)], vec![c(0., 0.), c(0., 0.)]])
                .unwrap();
        assert_eq!(z, expected);

        assert!(matches!(
            commutator(&d, &ComplexMatrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn commutator_is_traceless() {
        let mut rng = seeded(77);
        for dim in 1..=9 {
            let x = random_complex(&mut rng, dim);
            let y = random_complex(&mut rng, dim);
            let t = commutator(&x, &y).unwrap().trace().norm();
            assert!(t <= 1e-12 * x.op_norm() * y.op_norm() * dim as f64);
        }
    }

    #[test]
    fn schatten_examples() {
        assert_eq!(schatten_norm(&ComplexMatrix::zeros(3), SchattenP::One), 0.0);
        let v = [c(0.6, 0.0), c(0.0, 0.8)];
        let p = ComplexMatrix::from_fn(2, |i, j| v[i] * v[j].conj()).unwrap();
        assert!((schatten_norm(&p, SchattenP::One) - 1.0).abs() < 1e-15);
        let d = ComplexMatrix::from_real_diagonal(&[3.0, -4.0]).unwrap();
        assert!((schatten_norm(&d, SchattenP::One) - 7.0).abs() < 1e-14);
        assert!((schatten_norm(&d, SchattenP::Two) - 5.0).abs() < 1e-14);
        assert!((schatten_norm(&d, SchattenP::Op) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn schatten_ordering_and_triangle() {
        let mut rng = seeded(100);
        for trial in 0..100 {
            let dim = 1 + trial % 7;
            let x = random_complex(&mut rng, dim);
            let y = random_complex(&mut rng, dim);
            let s = &x + &y;
            for p in [SchattenP::One, SchattenP::Two, SchattenP::Op] {
                let lhs = schatten_norm(&s, p);
                let rhs = schatten_norm(&x, p) + schatten_norm(&y, p);
                assert!(lhs <= rhs * (1.0 + 1e-12));
            }
            let n1 = schatten_norm(&x, SchattenP::One);
            let n2 = schatten_norm(&x, SchattenP::Two);
            let no = schatten_norm(&x, SchattenP::Op);
            assert!(n1 >= n2 * (1.0 - 1e-14) && n2 >= no * (1.0 - 1e-14));
        }
    }

    #[test]
    fn schatten_unitary_invariance() {
        let mut rng = seeded(9);
        for dim in [2, 5, 8] {
            let x = random_complex(&mut rng, dim);
            let u = random_unitary(&mut rng, dim);
            let v = random_unitary(&mut rng, dim);
            let uxv = &(&u * &x) * &v;
            for p in [SchattenP::One, SchattenP::Two, SchattenP::Op] {
                let a = schatten_norm(&x, p);
                let b = schatten_norm(&uxv, p);
                assert!((a - b).abs() <= 1e-12 * (1.0 + a), "{p:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn principal_trace_examples() {
        assert_eq!(principal_trace(&ComplexMatrix::identity(5), 3).unwrap(), c(3.0, 0.0));
        let d = ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, -0.5]).unwrap();
        assert_eq!(principal_trace(&d, 2).unwrap(), c(0.5, 0.0));
        let x = random_complex(&mut seeded(6), 6);
        assert_eq!(principal_trace(&x, 6).unwrap(), x.trace());
        assert!(matches!(
            principal_trace(&x, 7),
            Err(Error::BlockTooLarge { requested: 7, dim: 6 })
        ));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let x = random_complex(&mut seeded(3), 4);
        let back = ComplexMatrix::from_json(&x.to_json()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(x.get(i, j).re.to_bits(), back.get(i, j).re.to_bits());
                assert_eq!(x.get(i, j).im.to_bits(), back.get(i, j).im.to_bits());
            }
        }
    }

    #[test]
    fn json_rejects_ragged_rows() {
        let bad = r#"{"dim": 2, "re": [[1, 2], [3]], "im": [[0, 0], [0, 0]]}"#;
        assert!(matches!(ComplexMatrix::from_json(bad), Err(Error::Format(_))));
        let zero = r#"{"dim": 0, "re": [], "im": []}"#;
        assert!(ComplexMatrix::from_json(zero).is_err());
    }
}
