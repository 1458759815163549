//! Physical-space evaluation `u(x) = U(Ax)`, torus sampling and rasters.

use num_complex::Complex64;

use super::{HullField, ZERO};
use crate::error::{Error, Result};
use crate::grid::TorusGrid;

const IMAGINARY_TOL: f64 = 1e-10;

/// Default points per axis for sup-norm estimates on `T^p`.
pub fn default_grid_resolution(p: usize) -> usize {
    match p {
        0..=3 => 64,
        4 => 32,
        _ => 16,
    }
}

/// Square window `[lo, hi]²` in physical space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn centered(half_width: f64) -> Self {
        Window {
            lo: -half_width,
            hi: half_width,
        }
    }

    /// Center of pixel `(row, col)`; rows run from the top (`y = hi`) down.
    pub fn pixel_center(&self, resolution: usize, row: usize, col: usize) -> [f64; 2] {
        let h = (self.hi - self.lo) / resolution as f64;
        [
            self.lo + (col as f64 + 0.5) * h,
            self.hi - (row as f64 + 0.5) * h,
        ]
    }
}

/// Row-major 8-bit grayscale image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Raster {
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }
}

impl HullField {
    /// `u(x) = Σ_m a_m e^{i k(m)·x}` by direct summation.
    pub fn evaluate_physical(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        let d = self.active.module().dimension();
        points
            .iter()
            .map(|x| {
                if x.len() != d {
                    return Err(Error::InvalidArgument(format!(
                        "point of dimension {} in R^{d}",
                        x.len()
                    )));
                }
                let mut sum = ZERO;
                let mut scale = 0.0f64;
                for (a, k) in self.coeffs.iter().zip(self.active.wavevectors()) {
                    let phase: f64 = k.iter().zip(x).map(|(ki, xi)| ki * xi).sum();
                    sum += a * Complex64::from_polar(1.0, phase);
                    scale += a.norm();
                }
                if sum.im.abs() > IMAGINARY_TOL * scale.max(1.0) {
                    return Err(Error::ImaginaryResidue(sum.im.abs()));
                }
                Ok(sum.re)
            })
            .collect()
    }

    /// `U` on the uniform `resolution^p` torus grid. Coefficients are folded
    /// modulo `resolution`, which is exact at grid points for any resolution.
    pub fn torus_values(&self, resolution: usize) -> Vec<f64> {
        let grid = TorusGrid::new(self.active.rank(), resolution);
        let mut data = vec![ZERO; grid.len()];
        for (m, &a) in self.active.indices().iter().zip(&self.coeffs) {
            data[grid.position(&m.0)] += a;
        }
        grid.to_values(&mut data);
        data.into_iter().map(|z| z.re).collect()
    }

    /// `(min, max)` of `U` over the `resolution^p` torus grid.
    pub fn torus_min_max(&self, resolution: usize) -> (f64, f64) {
        min_max(&self.torus_values(resolution))
    }

    /// Grid estimate of `sup |u|` (a lower bound for the true supremum).
    pub fn sup_norm_estimate(&self, resolution: usize) -> f64 {
        let (lo, hi) = self.torus_min_max(resolution);
        lo.abs().max(hi.abs())
    }

    /// `inf_c ||u - c||_∞` estimated on the torus grid: half the sampled
    /// range, with the midrange as optimal constant.
    pub fn separation_from_constants(&self, resolution: usize) -> f64 {
        let (lo, hi) = self.torus_min_max(resolution);
        0.5 * (hi - lo)
    }

    /// Grayscale image of `u` over `window`, values mapped linearly from
    /// `[min, max]` to `[0, 255]`; a constant image is 128 everywhere.
    pub fn render_image(&self, window: Window, resolution: usize) -> Result<Raster> {
        let d = self.active.module().dimension();
        if d != 2 {
            return Err(Error::DimensionUnsupported(d));
        }
        if resolution == 0 {
            return Err(Error::InvalidArgument("zero resolution".into()));
        }
        let mut points = Vec::with_capacity(resolution * resolution);
        for row in 0..resolution {
            for col in 0..resolution {
                points.push(window.pixel_center(resolution, row, col).to_vec());
            }
        }
        let values = self.evaluate_physical(&points)?;
        let (lo, hi) = min_max(&values);
        let range = hi - lo;
        let flat = range <= 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        let pixels = values
            .iter()
            .map(|&v| {
                if flat {
                    128
                } else {
                    ((v - lo) / range * 255.0).round().clamp(0.0, 255.0) as u8
                }
            })
            .collect();
        Ok(Raster {
            width: resolution,
            height: resolution,
            pixels,
        })
    }
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}
