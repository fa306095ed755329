//! Triple operator integrals `∭ Φ(x₁, x₂, x₃) dE₁(x₁) T dE₂(x₂) R dE₃(x₃)`
//! for finite spectral resolutions, and the commutator formula built on them.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::divdiff::{Axis, DividedDifferenceKernel};
use crate::doi::{apply_doi, check_radius};
use crate::error::{Error, Result};
use crate::function::Function2D;
use crate::linalg::{
    commutator, eig_hermitian, schatten_norm, ComplexMatrix, HermitianMatrix, SchattenP,
    SpectralResolution, C64,
};

type Scalar3 = Arc<dyn Fn(f64, f64, f64) -> C64 + Send + Sync>;

/// Function of three real variables sampled on eigenvalue triples.
#[derive(Clone)]
pub enum TripleIntegrand {
    Explicit { descriptor: String, f: Scalar3 },
    DividedDifference(DividedDifferenceKernel),
}

impl fmt::Debug for TripleIntegrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TripleIntegrand::Explicit { descriptor, .. } => write!(f, "Explicit({descriptor})"),
            TripleIntegrand::DividedDifference(k) => {
                write!(f, "DividedDifference({:?}, {})", k.axis(), k.source().descriptor())
            }
        }
    }
}

impl TripleIntegrand {
    pub fn explicit(
        descriptor: impl Into<String>,
        f: impl Fn(f64, f64, f64) -> C64 + Send + Sync + 'static,
    ) -> Self {
        TripleIntegrand::Explicit {
            descriptor: descriptor.into(),
            f: Arc::new(f),
        }
    }

    pub fn divided_difference(phi: &Function2D, axis: Axis) -> Self {
        TripleIntegrand::DividedDifference(DividedDifferenceKernel::new(phi.clone(), axis))
    }

    #[inline]
    pub fn eval(&self, x1: f64, x2: f64, x3: f64) -> C64 {
        match self {
            TripleIntegrand::Explicit { f, .. } => f(x1, x2, x3),
            TripleIntegrand::DividedDifference(k) => k.eval(x1, x2, x3),
        }
    }

    /// `Φ(λ_i, μ_j, ν_k)` stored at `[i][j][k]`, flattened.
    fn sample(&self, l1: &[f64], l2: &[f64], l3: &[f64]) -> Result<Vec<C64>> {
        let mut out = Vec::with_capacity(l1.len() * l2.len() * l3.len());
        for &a in l1 {
            for &b in l2 {
                for &c in l3 {
                    let z = self.eval(a, b, c);
                    if !(z.re.is_finite() && z.im.is_finite()) {
                        return Err(Error::InvalidArgument(format!(
                            "integrand {self:?} is not finite at ({a}, {b}, {c})"
                        )));
                    }
                    out.push(z);
                }
            }
        }
        Ok(out)
    }
}

fn check_dims(dims: &[usize]) -> Result<usize> {
    let d = dims[0];
    for &other in &dims[1..] {
        if other != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: other,
            });
        }
    }
    Ok(d)
}

/// `Σ_{i,j,k} Φ(λ_i, μ_j, ν_k) P_i T Q_j R S_k`.
///
/// With `T̃ = U₁* T U₂` and `R̃ = U₂* R U₃` the result is `U₁ X U₃*`, where
/// `X_{ik} = Σ_j Φ_{ijk} T̃_{ij} R̃_{jk}` is accumulated one middle index at a
/// time. Cost is `O(d³)`.
pub fn triple_oi(
    phi: &TripleIntegrand,
    e1: &SpectralResolution,
    t: &ComplexMatrix,
    e2: &SpectralResolution,
    r: &ComplexMatrix,
    e3: &SpectralResolution,
) -> Result<ComplexMatrix> {
    let d = check_dims(&[e1.dim(), t.dim(), e2.dim(), r.dim(), e3.dim()])?;
    let (u1, u2, u3) = (e1.eigenvectors(), e2.eigenvectors(), e3.eigenvectors());
    let t_tilde = u1.adjoint() * t.as_matrix() * u2;
    let r_tilde = u2.adjoint() * r.as_matrix() * u3;
    let values = phi.sample(e1.eigenvalues(), e2.eigenvalues(), e3.eigenvalues())?;
    let at = |i: usize, j: usize, k: usize| values[(i * d + j) * d + k];

    let mut x = DMatrix::<C64>::zeros(d, d);
    for j in 0..d {
        for k in 0..d {
            let rjk = r_tilde[(j, k)];
            for i in 0..d {
                x[(i, k)] += at(i, j, k) * t_tilde[(i, j)] * rjk;
            }
        }
    }
    ComplexMatrix::new(u1 * x * u3.adjoint())
}

/// The same integral obtained from its defining pairing: `W` is the matrix
/// with `trace(W Q') = trace((∭ Ψ dE₂ R dE₃ Q' dE₁) T)` for every `Q'`.
/// `W` is assembled entry by entry from the `d²` matrix units, so the cost is
/// `O(d⁵)`; intended for small dimensions only.
pub fn triple_oi_dual(
    psi: &TripleIntegrand,
    e1: &SpectralResolution,
    t: &ComplexMatrix,
    e2: &SpectralResolution,
    r: &ComplexMatrix,
    e3: &SpectralResolution,
) -> Result<ComplexMatrix> {
    let d = check_dims(&[e1.dim(), t.dim(), e2.dim(), r.dim(), e3.dim()])?;
    let (u1, u2, u3) = (e1.eigenvectors(), e2.eigenvectors(), e3.eigenvectors());
    // ⟨u_i, T v_j⟩ and ⟨v_j, R w_k⟩
    let t_tilde = u1.adjoint() * t.as_matrix() * u2;
    let r_tilde = u2.adjoint() * r.as_matrix() * u3;
    let values = psi.sample(e1.eigenvalues(), e2.eigenvalues(), e3.eigenvalues())?;

    // trace(Q_j R S_k Q' P_i T) = ⟨v_j, R w_k⟩ ⟨w_k, Q' u_i⟩ ⟨u_i, T v_j⟩
    let pairing = |q_tilde: &dyn Fn(usize, usize) -> C64| -> C64 {
        let mut total = C64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                let tij = t_tilde[(i, j)];
                for k in 0..d {
                    total += values[(i * d + j) * d + k] * r_tilde[(j, k)] * q_tilde(k, i) * tij;
                }
            }
        }
        total
    };

    let mut w = DMatrix::<C64>::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            // Q' = e_a e_bᵀ, so ⟨w_k, Q' u_i⟩ = conj(U₃[a, k]) U₁[b, i].
            let unit = |k: usize, i: usize| u3[(a, k)].conj() * u1[(b, i)];
            w[(b, a)] = pairing(&unit);
        }
    }
    ComplexMatrix::new(w)
}

/// `Σ_{i,j,k} Φ(λ_i, μ_j, ν_k) P_i T Q_j R S_k` summed term by term over
/// rank-one projections. `O(d⁶)`; a reference for small dimensions.
pub fn triple_oi_projection_sum(
    phi: &TripleIntegrand,
    e1: &SpectralResolution,
    t: &ComplexMatrix,
    e2: &SpectralResolution,
    r: &ComplexMatrix,
    e3: &SpectralResolution,
) -> Result<ComplexMatrix> {
    let d = check_dims(&[e1.dim(), t.dim(), e2.dim(), r.dim(), e3.dim()])?;
    let values = phi.sample(e1.eigenvalues(), e2.eigenvalues(), e3.eigenvalues())?;
    let mut total = DMatrix::<C64>::zeros(d, d);
    for i in 0..d {
        let left = e1.projection(i).as_matrix() * t.as_matrix();
        for j in 0..d {
            let middle = &left * e2.projection(j).as_matrix() * r.as_matrix();
            for k in 0..d {
                total += (&middle * e3.projection(k).as_matrix()) * values[(i * d + j) * d + k];
            }
        }
    }
    ComplexMatrix::new(total)
}

/// `[φ(A,B), Q]` through the two triple operator integrals
///
/// ```text
/// ∭ Δ₂φ(x, y₁, y₂) dE_A(x) dE_B(y₁) [B,Q] dE_B(y₂)
///   + ∭ Δ₁φ(x₁, x₂, y) dE_A(x₁) [A,Q] dE_A(x₂) dE_B(y).
/// ```
pub fn commutator_via_trioi(
    phi: &Function2D,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    q: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let ea = eig_hermitian(a)?;
    let eb = eig_hermitian(b)?;
    commutator_via_trioi_resolved(phi, a, &ea, b, &eb, q)
}

/// As [`commutator_via_trioi`] with precomputed spectral resolutions.
pub fn commutator_via_trioi_resolved(
    phi: &Function2D,
    a: &HermitianMatrix,
    ea: &SpectralResolution,
    b: &HermitianMatrix,
    eb: &SpectralResolution,
    q: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    check_radius(phi, ea, eb)?;
    let identity = ComplexMatrix::identity(q.dim());
    let aq = commutator(a.as_complex(), q)?;
    let bq = commutator(b.as_complex(), q)?;
    let second = triple_oi(
        &TripleIntegrand::divided_difference(phi, Axis::Second),
        ea,
        &identity,
        eb,
        &bq,
        eb,
    )?;
    let first = triple_oi(
        &TripleIntegrand::divided_difference(phi, Axis::First),
        ea,
        &aq,
        ea,
        &identity,
        eb,
    )?;
    second.try_add(&first)
}

/// Outcome of one trace-norm commutator probe.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct S1BoundRecord {
    /// `‖[φ(A,B), Q]‖_{S₁}`
    pub lhs: f64,
    /// `‖[A,Q]‖_{S₁} + ‖[B,Q]‖_{S₁}`
    pub rhs_core: f64,
    /// `lhs / rhs_core`, undefined when `rhs_core = 0`.
    pub ratio: Option<f64>,
    pub besov_estimate: f64,
    /// Set when `rhs_core = 0` yet `lhs > 1e-12`, which the commutator formula
    /// rules out.
    pub violation: bool,
}

pub const S1_ZERO_TOLERANCE: f64 = 1e-12;

pub fn verify_s1_bound(
    phi: &Function2D,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    q: &ComplexMatrix,
    besov_estimate: f64,
) -> Result<S1BoundRecord> {
    let ea = eig_hermitian(a)?;
    let eb = eig_hermitian(b)?;
    verify_s1_bound_resolved(phi, a, &ea, b, &eb, q, besov_estimate)
}

pub fn verify_s1_bound_resolved(
    phi: &Function2D,
    a: &HermitianMatrix,
    ea: &SpectralResolution,
    b: &HermitianMatrix,
    eb: &SpectralResolution,
    q: &ComplexMatrix,
    besov_estimate: f64,
) -> Result<S1BoundRecord> {
    let phi_ab = apply_doi(phi, ea, eb)?;
    let lhs = schatten_norm(&commutator(&phi_ab, q)?, SchattenP::One);
    let rhs_core = schatten_norm(&commutator(a.as_complex(), q)?, SchattenP::One)
        + schatten_norm(&commutator(b.as_complex(), q)?, SchattenP::One);
    let ratio = (rhs_core > 0.0).then(|| lhs / rhs_core);
    Ok(S1BoundRecord {
        lhs,
        rhs_core,
        ratio,
        besov_estimate,
        violation: rhs_core == 0.0 && lhs > S1_ZERO_TOLERANCE,
    })
}
