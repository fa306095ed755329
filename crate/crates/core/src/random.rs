//! Seeded random matrices for trial harnesses.
//!
//! The generator is ChaCha8 seeded through `seed_from_u64`, which produces the
//! same stream on every platform. Gaussian draws use `rand_distr::StandardNormal`.

use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{eig_hermitian, ComplexMatrix, HermitianMatrix, C64};

pub type TrialRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut TrialRng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Complex Ginibre matrix rescaled to unit operator norm.
pub fn random_complex(rng: &mut TrialRng, dim: usize) -> ComplexMatrix {
    let raw = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let m = ComplexMatrix::new(raw).expect("gaussian entries are finite");
    let norm = m.op_norm();
    m.scale(C64::new(1.0 / norm, 0.0))
}

/// Hermitian matrix from the Gaussian unitary ensemble, rescaled so that its
/// spectrum lies in `[-1, 1]` with one endpoint attained.
pub fn random_hermitian(rng: &mut TrialRng, dim: usize) -> HermitianMatrix {
    let raw = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let h = HermitianMatrix::new(ComplexMatrix::new(raw).expect("gaussian entries are finite"));
    let radius = eig_hermitian(&h)
        .expect("eigensolver converges on small gaussian matrices")
        .spectral_radius();
    HermitianMatrix::new(h.as_complex().scale(C64::new(1.0 / radius, 0.0)))
}

/// Unitary matrix taken from the eigenvectors of a GUE sample.
pub fn random_unitary(rng: &mut TrialRng, dim: usize) -> ComplexMatrix {
    let h = random_hermitian(rng, dim);
    let s = eig_hermitian(&h).expect("eigensolver converges on small gaussian matrices");
    ComplexMatrix::new(s.eigenvectors().clone()).expect("eigenvectors are finite")
}

/// Uniform draw from `[lo, hi)`.
pub fn uniform(rng: &mut TrialRng, lo: f64, hi: f64) -> f64 {
    let u: f64 = rng.random();
    lo + (hi - lo) * u
}

/// Uniform index in `0..n`.
pub fn index(rng: &mut TrialRng, n: usize) -> usize {
    rng.random_range(0..n)
}
