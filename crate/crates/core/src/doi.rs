//! Double operator integrals `φ(A, B) = ∬ φ(x, y) dE_A(x) dE_B(y)`.
//!
//! In finite dimensions the integral is the finite sum
//! `Σ_{j,k} φ(λ_j, μ_k) P_j Q_k`, evaluated as the Schur product
//! `U_A [F ∘ (U_A* U_B)] U_B*` with `F_{jk} = φ(λ_j, μ_k)`. All spectral
//! projections of `A` sit to the left of those of `B`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::function::{FourierMeasure, Function2D};
use crate::linalg::{eig_hermitian, ComplexMatrix, HermitianMatrix, SpectralResolution, C64};

/// Radius used when `phi` does not declare one: one more than the larger
/// spectral radius of the two operators.
pub fn default_radius(a: &SpectralResolution, b: &SpectralResolution) -> f64 {
    1.0 + a.spectral_radius().max(b.spectral_radius())
}

pub(crate) fn check_radius(
    phi: &Function2D,
    a: &SpectralResolution,
    b: &SpectralResolution,
) -> Result<()> {
    let Some(radius) = phi.radius() else {
        return Ok(());
    };
    for &v in a.eigenvalues().iter().chain(b.eigenvalues()) {
        if v.abs() > radius {
            return Err(Error::SpectrumOutsideRadius { value: v, radius });
        }
    }
    Ok(())
}

/// Samples `phi` on the eigenvalue grid: `F_{jk} = φ(λ_j, μ_k)`.
pub fn sample_on_spectra(
    phi: &Function2D,
    a: &SpectralResolution,
    b: &SpectralResolution,
) -> Result<DMatrix<C64>> {
    let la = a.eigenvalues();
    let lb = b.eigenvalues();
    let mut f = DMatrix::zeros(la.len(), lb.len());
    for (k, &mu) in lb.iter().enumerate() {
        for (j, &lambda) in la.iter().enumerate() {
            f[(j, k)] = phi.eval_finite(lambda, mu)?;
        }
    }
    Ok(f)
}

/// `φ(A, B)` for the spectral resolutions of `A` and `B`.
pub fn apply_doi(
    phi: &Function2D,
    a: &SpectralResolution,
    b: &SpectralResolution,
) -> Result<ComplexMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    check_radius(phi, a, b)?;
    let f = sample_on_spectra(phi, a, b)?;
    let ua = a.eigenvectors();
    let ub = b.eigenvectors();
    let mut kernel = ua.adjoint() * ub;
    kernel.component_mul_assign(&f);
    ComplexMatrix::new(ua * kernel * ub.adjoint())
}

/// `Σ_atoms w · exp(isA) exp(itB)`, the calculus of Fourier transforms of
/// finite measures. Agrees with [`apply_doi`] on trigonometric sums.
pub fn apply_fourier_calculus(
    omega: &FourierMeasure,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> Result<ComplexMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let ea = eig_hermitian(a)?;
    let eb = eig_hermitian(b)?;
    let n = a.dim();
    let mut total = DMatrix::<C64>::zeros(n, n);
    for atom in omega.atoms() {
        let exp_a = ea.apply(|x| C64::cis(atom.s * x));
        let exp_b = eb.apply(|y| C64::cis(atom.t * y));
        total += (exp_a.as_matrix() * exp_b.as_matrix()) * atom.weight;
    }
    ComplexMatrix::new(total)
}

/// `‖φ_c(A,B) − Σ cᵢ φᵢ(A,B)‖_op` where `φ_c = Σ cᵢ φᵢ`.
pub fn check_linearity(
    phis: &[Function2D],
    coeffs: &[C64],
    a: &SpectralResolution,
    b: &SpectralResolution,
) -> Result<f64> {
    if phis.len() != coeffs.len() {
        return Err(Error::LengthMismatch {
            left: phis.len(),
            right: coeffs.len(),
        });
    }
    let terms: Vec<(C64, Function2D)> =
        coeffs.iter().copied().zip(phis.iter().cloned()).collect();
    let combined = apply_doi(&Function2D::linear_combination(&terms), a, b)?;
    let mut separate = ComplexMatrix::zeros(a.dim());
    for (c, phi) in coeffs.iter().zip(phis) {
        separate = separate.try_add(&apply_doi(phi, a, b)?.scale(*c))?;
    }
    Ok(combined.try_sub(&separate)?.op_norm())
}
