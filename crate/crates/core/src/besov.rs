//! Littlewood–Paley estimate of the `B¹_{∞,1}(ℝ²)` norm from samples on a
//! uniform periodic grid.
//!
//! Angular frequencies on a `G × G` grid over `[−L, L)²` are `ξ = π k / L`.
//! Band `n` uses the filter `tri(log₂|ξ| − n)` with `tri(t) = max(0, 1 − |t|)`,
//! supported on `[2ⁿ⁻¹, 2ⁿ⁺¹]`. For `n ≥ n_min` the bands sum to one on
//! `|ξ| ≥ 2^{n_min}`; whatever is left (the zero frequency and anything below
//! `2^{n_min}`) forms the coarse block. `n_min = ⌊log₂(π/L)⌋`, so the coarse
//! block holds only the mean.
//!
//! The estimate is `2^{n_min} ‖coarse‖_∞ + Σ_n 2ⁿ ‖band n‖_∞`.

use std::path::Path;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::Function2D;
use crate::linalg::C64;

/// Samples `φ(x_i, y_j)` stored row-major at `i * G + j`, with
/// `x_i = −L + 2L i / G` and likewise for `y_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    size: usize,
    half_width: f64,
    samples: Vec<C64>,
}

/// Largest accepted grid side. Keeps untrusted headers from requesting
/// absurd allocations.
pub const MAX_GRID_SIZE: usize = 4096;

const BINARY_MAGIC: &[u8; 4] = b"BSVG";
const BINARY_HEADER_LEN: usize = 16;

#[derive(Serialize, Deserialize)]
struct GridFile {
    #[serde(rename = "G")]
    size: usize,
    #[serde(rename = "L")]
    half_width: f64,
    re: Vec<f64>,
    im: Vec<f64>,
}

fn check_header(size: usize, half_width: f64) -> Result<()> {
    if size < 2 || !size.is_power_of_two() {
        return Err(Error::GridNotPowerOfTwo(size));
    }
    if size > MAX_GRID_SIZE {
        return Err(Error::Format(format!("grid size {size} exceeds {MAX_GRID_SIZE}")));
    }
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::Format(format!("half width must be positive, got {half_width}")));
    }
    Ok(())
}

impl Grid {
    pub fn new(size: usize, half_width: f64, samples: Vec<C64>) -> Result<Self> {
        check_header(size, half_width)?;
        if samples.len() != size * size {
            return Err(Error::Format(format!(
                "expected {} samples, got {}",
                size * size,
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFiniteEntry {
                row: i / size,
                col: i % size,
            });
        }
        Ok(Grid {
            size,
            half_width,
            samples,
        })
    }

    pub fn zeros(size: usize, half_width: f64) -> Result<Self> {
        Self::new(size, half_width, vec![C64::new(0.0, 0.0); size * size])
    }

    /// Samples `f` on the grid.
    pub fn from_fn(size: usize, half_width: f64, f: impl Fn(f64, f64) -> C64) -> Result<Self> {
        check_header(size, half_width)?;
        let h = 2.0 * half_width / size as f64;
        let mut samples = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                samples.push(f(-half_width + h * i as f64, -half_width + h * j as f64));
            }
        }
        Self::new(size, half_width, samples)
    }

    pub fn from_function(phi: &Function2D, size: usize, half_width: f64) -> Result<Self> {
        Self::from_fn(size, half_width, |x, y| phi.eval(x, y))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn scaled(&self, c: C64) -> Self {
        Grid {
            samples: self.samples.iter().map(|z| z * c).collect(),
            ..self.clone()
        }
    }

    pub fn sup_norm(&self) -> f64 {
        sup(&self.samples)
    }

    /// `{"G": .., "L": .., "re": [G*G], "im": [G*G]}`, row-major.
    pub fn to_json(&self) -> String {
        let file = GridFile {
            size: self.size,
            half_width: self.half_width,
            re: self.samples.iter().map(|z| z.re).collect(),
            im: self.samples.iter().map(|z| z.im).collect(),
        };
        serde_json::to_string(&file).expect("finite floats always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GridFile =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("grid json: {e}")))?;
        check_header(file.size, file.half_width)?;
        if file.re.len() != file.im.len() {
            return Err(Error::Format("grid json: re and im lengths differ".into()));
        }
        let samples = file.re.iter().zip(&file.im).map(|(&r, &i)| C64::new(r, i)).collect();
        Self::new(file.size, file.half_width, samples)
    }

    /// Binary layout, little endian: magic `BSVG`, `u32` G, `f64` L, then
    /// `G²` pairs of `f64` (re, im) row-major.
    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(BINARY_HEADER_LEN + 16 * self.samples.len());
        out.extend_from_slice(BINARY_MAGIC);
        out.extend_from_slice(&(self.size as u32).to_le_bytes());
        out.extend_from_slice(&self.half_width.to_le_bytes());
        for z in &self.samples {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
        out
    }

    pub fn from_binary(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < BINARY_HEADER_LEN || &bytes[..4] != BINARY_MAGIC {
            return Err(Error::Format("grid binary: missing BSVG header".into()));
        }
        let size = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
        let half_width = f64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
        check_header(size, half_width)?;
        let expected = BINARY_HEADER_LEN + 16 * size * size;
        if bytes.len() != expected {
            return Err(Error::Format(format!(
                "grid binary: expected {expected} bytes, got {}",
                bytes.len()
            )));
        }
        let samples = bytes[BINARY_HEADER_LEN..]
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
                C64::new(re, im)
            })
            .collect();
        Self::new(size, half_width, samples)
    }

    /// Reads either format; binary files are recognized by their magic.
    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        if bytes.starts_with(BINARY_MAGIC) {
            Self::from_binary(&bytes)
        } else {
            let text = std::str::from_utf8(&bytes)
                .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
            Self::from_json(text)
        }
    }
}

fn sup(values: &[C64]) -> f64 {
    values.iter().fold(0.0, |m, z| m.max(z.norm()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandNorm {
    pub n: i32,
    pub weight: f64,
    pub sup_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovDecomposition {
    pub grid_size: usize,
    pub half_width: f64,
    pub n_min: i32,
    pub n_max: i32,
    pub coarse_weight: f64,
    pub coarse_sup_norm: f64,
    pub bands: Vec<BandNorm>,
    pub estimate: f64,
}

impl BesovDecomposition {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("finite floats always serialize")
    }
}

/// `max(0, 1 − |log₂|ξ| − n|)`.
pub fn band_filter(n: i32, xi: f64) -> f64 {
    if xi <= 0.0 {
        return 0.0;
    }
    (1.0 - (xi.log2() - f64::from(n)).abs()).max(0.0)
}

fn signed_index(k: usize, size: usize) -> f64 {
    if k < size / 2 {
        k as f64
    } else {
        k as f64 - size as f64
    }
}

struct Fft2 {
    size: usize,
    forward: std::sync::Arc<dyn Fft<f64>>,
    inverse: std::sync::Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(size: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    fn run(&self, data: &mut [C64], fft: &dyn Fft<f64>) {
        let n = self.size;
        for row in data.chunks_exact_mut(n) {
            fft.process(row);
        }
        let mut column = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                column[i] = data[i * n + j];
            }
            fft.process(&mut column);
            for i in 0..n {
                data[i * n + j] = column[i];
            }
        }
    }

    fn forward(&self, data: &mut [C64]) {
        self.run(data, self.forward.as_ref());
    }

    /// Unnormalized inverse; callers divide by `G²`.
    fn inverse(&self, data: &mut [C64]) {
        self.run(data, self.inverse.as_ref());
    }
}

/// Dyadic decomposition and norm estimate for a sampled function.
pub fn besov_norm_estimate(grid: &Grid) -> BesovDecomposition {
    let g = grid.size;
    let l = grid.half_width;
    let fft = Fft2::new(g);
    let mut spectrum = grid.samples.clone();
    fft.forward(&mut spectrum);

    let step = std::f64::consts::PI / l;
    let radial: Vec<f64> = (0..g * g)
        .map(|idx| {
            let (i, j) = (idx / g, idx % g);
            step * signed_index(i, g).hypot(signed_index(j, g))
        })
        .collect();
    let xi_max = radial.iter().cloned().fold(0.0, f64::max);
    let n_min = step.log2().floor() as i32;
    let n_max = if xi_max > 0.0 { xi_max.log2().ceil() as i32 } else { n_min };

    let scale = 1.0 / (g * g) as f64;
    let band_sup = |filter: &dyn Fn(f64) -> f64| -> f64 {
        let mut data: Vec<C64> = spectrum
            .iter()
            .zip(&radial)
            .map(|(z, &xi)| z * filter(xi))
            .collect();
        fft.inverse(&mut data);
        sup(&data) * scale
    };

    let mut bands = Vec::new();
    let mut estimate = 0.0;
    for n in n_min..=n_max {
        let sup_norm = band_sup(&|xi| band_filter(n, xi));
        let weight = 2f64.powi(n);
        estimate += weight * sup_norm;
        bands.push(BandNorm {
            n,
            weight,
            sup_norm,
        });
    }
    let coarse_sup_norm = band_sup(&|xi| {
        let covered: f64 = (n_min..=n_max).map(|n| band_filter(n, xi)).sum();
        (1.0 - covered).max(0.0)
    });
    let coarse_weight = 2f64.powi(n_min);
    estimate += coarse_weight * coarse_sup_norm;

    BesovDecomposition {
        grid_size: g,
        half_width: l,
        n_min,
        n_max,
        coarse_weight,
        coarse_sup_norm,
        bands,
        estimate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filters_partition_unity_above_n_min() {
        let n_min = -2;
        for k in 0..2000 {
            let xi = 2f64.powf(f64::from(n_min) + 10.0 * k as f64 / 2000.0);
            let total: f64 = (n_min..=n_min + 12).map(|n| band_filter(n, xi)).sum();
            assert!((total - 1.0).abs() < 1e-14, "ξ = {xi}: {total}");
        }
    }

    #[test]
    fn zero_grid_gives_zero() {
        let d = besov_norm_estimate(&Grid::zeros(32, 4.0).unwrap());
        assert_eq!(d.estimate, 0.0);
    }

    #[test]
    fn constant_lands_in_coarse_block() {
        let g = Grid::from_fn(16, 2.0, |_, _| C64::new(3.0, 0.0)).unwrap();
        let d = besov_norm_estimate(&g);
        assert!((d.coarse_sup_norm - 3.0).abs() < 1e-14);
        assert!(d.bands.iter().all(|b| b.sup_norm < 1e-14));
    }

    #[test]
    fn rejects_bad_headers() {
        assert!(matches!(Grid::zeros(12, 1.0), Err(Error::GridNotPowerOfTwo(12))));
        assert!(Grid::zeros(8, 0.0).is_err());
        assert!(Grid::zeros(8, f64::NAN).is_err());
        assert!(Grid::new(4, 1.0, vec![C64::new(0.0, 0.0); 15]).is_err());
    }

    #[test]
    fn json_and_binary_round_trip() {
        let g = Grid::from_fn(8, 3.0, |x, y| C64::new((x * y).sin(), x - y)).unwrap();
        assert_eq!(Grid::from_json(&g.to_json()).unwrap(), g);
        assert_eq!(Grid::from_binary(&g.to_binary()).unwrap(), g);

        let mut bytes = g.to_binary();
        bytes.pop();
        assert!(Grid::from_binary(&bytes).is_err());
        assert!(Grid::from_binary(b"BSVG").is_err());
    }

    #[test]
    fn decomposition_serializes() {
        let g = Grid::from_fn(16, 4.0, |x, _| C64::new(x.cos(), 0.0)).unwrap();
        let d = besov_norm_estimate(&g);
        let back: BesovDecomposition = serde_json::from_str(&d.to_json()).unwrap();
        assert_eq!(back, d);
    }
}
