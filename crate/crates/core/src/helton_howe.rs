//! Numerical check of the trace formula
//!
//! ```text
//! trace(i[φ(A,B), ψ(A,B)]) = (1/2π) ∬ (φ_x ψ_y − φ_y ψ_x) g dx dy
//! ```
//!
//! on truncations of the unilateral shift `S = A + iB`, whose principal
//! function is the indicator of the closed unit disk.
//!
//! Every finite commutator has trace zero, so the left side is estimated by
//! the trace of the leading `N × N` block of an `M × M` truncation with
//! `M ≥ 2N`. The commutator of the infinite model is concentrated near the
//! top-left corner while truncation artifacts live near index `M`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use crate::doi::apply_doi;
use crate::error::{Error, Result};
use crate::function::Function2D;
use crate::linalg::{
    commutator, eig_hermitian, principal_trace, ComplexMatrix, HermitianMatrix,
    SpectralResolution, C64,
};
use crate::quadrature::{integrate_square_midpoint, integrate_unit_disk};

/// `A_M = (S + S*)/2` and `B_M = (S − S*)/(2i)` for the nilpotent `M × M`
/// shift `S e_k = e_{k+1}`.
#[derive(Clone, Debug)]
pub struct ShiftModel {
    m: usize,
    a: HermitianMatrix,
    b: HermitianMatrix,
}

pub fn shift_truncation(m: usize) -> Result<ShiftModel> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("shift truncation needs M >= 2, got {m}")));
    }
    let half = C64::new(0.5, 0.0);
    let a = ComplexMatrix::from_fn(m, |i, j| {
        if i + 1 == j || j + 1 == i {
            half
        } else {
            C64::new(0.0, 0.0)
        }
    })?;
    let b = ComplexMatrix::from_fn(m, |i, j| {
        if i + 1 == j {
            C64::new(0.0, 0.5)
        } else if j + 1 == i {
            C64::new(0.0, -0.5)
        } else {
            C64::new(0.0, 0.0)
        }
    })?;
    Ok(ShiftModel {
        m,
        a: HermitianMatrix::new(a),
        b: HermitianMatrix::new(b),
    })
}

impl ShiftModel {
    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn a(&self) -> &HermitianMatrix {
        &self.a
    }

    pub fn b(&self) -> &HermitianMatrix {
        &self.b
    }

    /// `A + iB`.
    pub fn shift(&self) -> ComplexMatrix {
        self.a
            .as_complex()
            .try_add(&self.b.as_complex().scale(C64::new(0.0, 1.0)))
            .expect("same dimension")
    }

    pub fn resolve(&self) -> Result<ResolvedShift> {
        Ok(ResolvedShift {
            ea: eig_hermitian(&self.a)?,
            eb: eig_hermitian(&self.b)?,
        })
    }
}

/// Spectral resolutions of both generators, computed once per truncation.
#[derive(Clone, Debug)]
pub struct ResolvedShift {
    ea: SpectralResolution,
    eb: SpectralResolution,
}

impl ResolvedShift {
    pub fn dim(&self) -> usize {
        self.ea.dim()
    }

    /// `principal_trace(i[φ(A,B), ψ(A,B)], n)`.
    pub fn commutator_trace(&self, phi: &Function2D, psi: &Function2D, n: usize) -> Result<C64> {
        check_block(n, self.dim())?;
        let x = apply_doi(phi, &self.ea, &self.eb)?;
        let y = apply_doi(psi, &self.ea, &self.eb)?;
        let c = commutator(&x, &y)?.scale(C64::new(0.0, 1.0));
        principal_trace(&c, n)
    }
}

fn check_block(n: usize, m: usize) -> Result<()> {
    if n == 0 || 2 * n > m {
        return Err(Error::InvalidArgument(format!(
            "principal block N = {n} must satisfy 1 <= N <= M/2 (M = {m})"
        )));
    }
    Ok(())
}

/// Left side of the trace formula at block size `n` in an `m × m` truncation.
pub fn commutator_trace_estimate(
    phi: &Function2D,
    psi: &Function2D,
    n: usize,
    m: usize,
) -> Result<C64> {
    check_block(n, m)?;
    shift_truncation(m)?.resolve()?.commutator_trace(phi, psi, n)
}

/// Density `g` of the trace-formula measure.
#[derive(Clone)]
pub enum PrincipalFunction {
    /// Indicator of the closed unit disk.
    UnitDisk,
    /// Arbitrary `g` supported in `[−half_width, half_width]²`.
    Sampled {
        descriptor: String,
        half_width: f64,
        g: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    },
}

impl std::fmt::Debug for PrincipalFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl PrincipalFunction {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            PrincipalFunction::UnitDisk => {
                if x * x + y * y <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            PrincipalFunction::Sampled { g, .. } => g(x, y),
        }
    }

    pub fn descriptor(&self) -> String {
        match self {
            PrincipalFunction::UnitDisk => "indicator of the unit disk".into(),
            PrincipalFunction::Sampled { descriptor, .. } => descriptor.clone(),
        }
    }
}

/// Right side `(1/2π) ∬ (φ_x ψ_y − φ_y ψ_x) g dx dy`, real part.
///
/// For the unit disk, `quad_points` radial Gauss nodes and `4·quad_points`
/// angles are used; otherwise a `quad_points × quad_points` midpoint grid.
pub fn jacobian_integral(
    phi: &Function2D,
    psi: &Function2D,
    g: &PrincipalFunction,
    quad_points: usize,
) -> Result<f64> {
    if quad_points == 0 {
        return Err(Error::InvalidArgument("quad_points must be positive".into()));
    }
    let jacobian =
        |x: f64, y: f64| (phi.d_dx(x, y) * psi.d_dy(x, y) - phi.d_dy(x, y) * psi.d_dx(x, y)).re;
    let integral = match g {
        PrincipalFunction::UnitDisk => integrate_unit_disk(jacobian, quad_points, 4 * quad_points),
        PrincipalFunction::Sampled { half_width, g, .. } => integrate_square_midpoint(
            |x, y| jacobian(x, y) * g(x, y),
            *half_width,
            quad_points,
        ),
    };
    Ok(integral / (2.0 * PI))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub lhs: f64,
    pub lhs_imag: f64,
    pub rhs: f64,
    pub abs_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportMetadata {
    pub phi: String,
    pub psi: String,
    pub principal_function: String,
    pub ratio: usize,
    pub quad_points: usize,
    /// The shift model is deterministic; recorded for report uniformity.
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub metadata: ReportMetadata,
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    /// Header `N,M,lhs,rhs,abs_error`; floats in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        #[derive(Serialize)]
        struct CsvRow {
            #[serde(rename = "N")]
            n: usize,
            #[serde(rename = "M")]
            m: usize,
            lhs: f64,
            rhs: f64,
            abs_error: f64,
        }
        let mut writer = csv::Writer::from_writer(Vec::new());
        if self.rows.is_empty() {
            writer.write_record(["N", "M", "lhs", "rhs", "abs_error"]).expect("in-memory write");
        }
        for r in &self.rows {
            writer
                .serialize(CsvRow {
                    n: r.n,
                    m: r.m,
                    lhs: r.lhs,
                    rhs: r.rhs,
                    abs_error: r.abs_error,
                })
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report floats are finite")
    }

    pub fn max_abs_error(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.abs_error))
    }

    pub fn max_lhs_imag(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.lhs_imag.abs()))
    }

    /// Writes `<stem>.csv` and `<stem>.json` and returns both paths.
    pub fn write(&self, stem: &Path) -> Result<(PathBuf, PathBuf)> {
        let csv = stem.with_extension("csv");
        let json = stem.with_extension("json");
        std::fs::write(&csv, self.to_csv()).map_err(|e| Error::io(&csv, e))?;
        std::fs::write(&json, self.to_json()).map_err(|e| Error::io(&json, e))?;
        Ok((csv, json))
    }
}

/// One report row per `N` with `M = ratio · N`, against the unit-disk
/// principal function. When `out_stem` is given the report is also written
/// as CSV and JSON next to it.
pub fn run_experiment(
    phi: &Function2D,
    psi: &Function2D,
    n_list: &[usize],
    ratio: usize,
    quad_points: usize,
    out_stem: Option<&Path>,
) -> Result<ExperimentReport> {
    if ratio < 2 {
        return Err(Error::InvalidArgument(format!("ratio must be at least 2, got {ratio}")));
    }
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("N ladder is empty".into()));
    }
    let g = PrincipalFunction::UnitDisk;
    let rhs = jacobian_integral(phi, psi, &g, quad_points)?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let m = n
            .checked_mul(ratio)
            .ok_or_else(|| Error::InvalidArgument(format!("M = {ratio} * {n} overflows")))?;
        let lhs = commutator_trace_estimate(phi, psi, n, m)?;
        rows.push(ReportRow {
            n,
            m,
            lhs: lhs.re,
            lhs_imag: lhs.im,
            rhs,
            abs_error: (lhs.re - rhs).abs(),
        });
    }
    let report = ExperimentReport {
        metadata: ReportMetadata {
            phi: phi.descriptor(),
            psi: psi.descriptor(),
            principal_function: g.descriptor(),
            ratio,
            quad_points,
            seed: None,
        },
        rows,
    };
    if let Some(stem) = out_stem {
        report.write(stem)?;
    }
    Ok(report)
}
