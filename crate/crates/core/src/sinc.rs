//! Sinc-lattice expansion of `Δ₁φ` for band-limited `φ`.
//!
//! For `φ` whose Fourier transform lives in the unit ball,
//!
//! ```text
//! Δ₁φ(x₁, x₂, y) = Σ_{j,k} sinc(x₁ − jπ) sinc(x₂ − kπ) γ_{jk}(y),
//! γ_{jk}(y) = (φ(jπ, y) − φ(kπ, y)) / (jπ − kπ),   γ_{jj}(y) = ∂φ/∂x(jπ, y),
//! ```
//!
//! and `Σ_j sinc²(x − jπ) = 1`, so each scalar system has `L∞(ℓ²)` norm one.
//! A truncated representation keeps `|j|, |k| ≤ J`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::divdiff::{divided_diff, Axis, DividedDifferenceKernel};
use crate::error::{Error, Result};
use crate::function::{BandLimit, Function2D};
use crate::linalg::{schatten_norm, ComplexMatrix, SchattenP, C64};

/// `sin(x − jπ) / (x − jπ)`, computed as `(−1)^j sin(x) / (x − jπ)` so that
/// lattice points give exact zeros and ones.
#[inline]
pub fn sinc_shifted(x: f64, j: i64) -> f64 {
    let d = x - j as f64 * PI;
    if d == 0.0 {
        return 1.0;
    }
    let sign = if j.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * x.sin() / d
}

/// `|Σ_{|j|≤J} sinc²(x − jπ) − 1|`.
pub fn sinc_partition_defect(x: f64, truncation: usize) -> f64 {
    let j_max = truncation as i64;
    let total: f64 = (-j_max..=j_max).map(|j| sinc_shifted(x, j).powi(2)).sum();
    (total - 1.0).abs()
}

/// Truncated sinc-system representation of `Δ₁φ`.
#[derive(Clone, Debug)]
pub struct HaagerupRepresentation {
    kernel: DividedDifferenceKernel,
    truncation: usize,
}

/// Builds the canonical representation with nodes `jπ`, `|j| ≤ J`.
pub fn build_sinc_haagerup(phi: &Function2D, truncation: usize) -> Result<HaagerupRepresentation> {
    if phi.band_limit() == BandLimit::Unknown {
        return Err(Error::NotBandLimited(phi.descriptor()));
    }
    if truncation == 0 {
        return Err(Error::InvalidArgument("truncation J must be positive".into()));
    }
    Ok(HaagerupRepresentation {
        kernel: DividedDifferenceKernel::new(phi.clone(), Axis::First),
        truncation,
    })
}

impl HaagerupRepresentation {
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn node_spacing(&self) -> f64 {
        PI
    }

    fn node_indices(&self) -> impl Iterator<Item = i64> + Clone {
        let j = self.truncation as i64;
        -j..=j
    }

    /// The `(2J+1) × (2J+1)` matrix `γ(y)`, rows and columns indexed by
    /// `j = −J..=J`.
    pub fn gamma(&self, y: f64) -> DMatrix<C64> {
        let n = 2 * self.truncation + 1;
        let nodes: Vec<f64> = self.node_indices().map(|j| j as f64 * PI).collect();
        let phi = self.kernel.source();
        let values: Vec<C64> = nodes.iter().map(|&t| phi.eval(t, y)).collect();
        DMatrix::from_fn(n, n, |a, b| {
            if a == b {
                phi.d_dx(nodes[a], y)
            } else {
                (values[a] - values[b]) / (nodes[a] - nodes[b])
            }
        })
    }

    /// Truncated series `Σ sinc(x₁ − jπ) sinc(x₂ − kπ) γ_{jk}(y)`.
    pub fn series(&self, x1: f64, x2: f64, y: f64) -> C64 {
        let gamma = self.gamma(y);
        let alpha: Vec<f64> = self.node_indices().map(|j| sinc_shifted(x1, j)).collect();
        let beta: Vec<f64> = self.node_indices().map(|k| sinc_shifted(x2, k)).collect();
        let mut total = C64::new(0.0, 0.0);
        for (a, &wa) in alpha.iter().enumerate() {
            let mut row = C64::new(0.0, 0.0);
            for (b, &wb) in beta.iter().enumerate() {
                row += gamma[(a, b)] * wb;
            }
            total += row * wa;
        }
        total
    }

    /// `|series − Δ₁φ|` at one point.
    pub fn reconstruction_error(&self, x1: f64, x2: f64, y: f64) -> f64 {
        (self.series(x1, x2, y) - divided_diff(&self.kernel, x1, x2, y)).norm()
    }
}

/// `max_y ‖γ(y)‖_op` over the probes. Since both sinc systems have
/// `L∞(ℓ²)` norm at most one, this bounds the tensor norm of the truncated
/// representation.
pub fn haagerup_norm_upper(rep: &HaagerupRepresentation, probe_ys: &[f64]) -> Result<f64> {
    if probe_ys.is_empty() {
        return Err(Error::InvalidArgument("at least one probe point is required".into()));
    }
    let mut best: f64 = 0.0;
    for &y in probe_ys {
        let g = ComplexMatrix::new(rep.gamma(y))?;
        best = best.max(schatten_norm(&g, SchattenP::Op));
    }
    Ok(best)
}

/// Deterministic probe grid on `[−half_width, half_width]` followed by
/// `random` seeded uniform points from the same interval.
pub fn probe_points(half_width: f64, grid: usize, random: usize, seed: u64) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..grid)
        .map(|i| {
            if grid == 1 {
                0.0
            } else {
                -half_width + 2.0 * half_width * i as f64 / (grid - 1) as f64
            }
        })
        .collect();
    let mut rng = crate::random::seeded(seed);
    pts.extend((0..random).map(|_| crate::random::uniform(&mut rng, -half_width, half_width)));
    pts
}
