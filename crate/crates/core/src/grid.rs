//! Uniform grids on the torus `T^p` and the multidimensional transforms
//! between mode coefficients and grid values.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// `size^p` equispaced points `φ_j = 2π j / size` per axis, row-major with
/// the last axis fastest.
#[derive(Clone)]
pub struct TorusGrid {
    dims: usize,
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid")
            .field("dims", &self.dims)
            .field("size", &self.size)
            .finish()
    }
}

impl TorusGrid {
    pub fn new(dims: usize, size: usize) -> Self {
        assert!(size > 0, "grid size must be positive");
        let mut planner = FftPlanner::new();
        TorusGrid {
            dims,
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.size.pow(self.dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat grid position of mode `m`, wrapping each coordinate modulo `size`.
    pub fn position(&self, m: &[i64]) -> usize {
        let l = self.size as i64;
        m.iter()
            .fold(0usize, |acc, &x| acc * self.size + x.rem_euclid(l) as usize)
    }

    /// Torus coordinates of flat grid point `j`.
    pub fn point(&self, mut j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dims];
        let h = 2.0 * std::f64::consts::PI / self.size as f64;
        for a in (0..self.dims).rev() {
            out[a] = (j % self.size) as f64 * h;
            j /= self.size;
        }
        out
    }

    /// Coefficients → grid values: `U(φ_j) = Σ_m a_m e^{i m·φ_j}`.
    pub fn to_values(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse, None, Prune::Inputs);
    }

    /// [`Self::to_values`] for data supported in the band `|m|∞ <= band`;
    /// lines that are identically zero are skipped.
    pub fn to_values_banded(&self, data: &mut [Complex64], band: usize) {
        self.transform(data, &self.inverse, Some(band), Prune::Inputs);
    }

    /// Grid values → coefficients, normalized so `to_coefficients ∘ to_values`
    /// is the identity.
    pub fn to_coefficients(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward, None, Prune::Outputs);
        self.normalize(data);
    }

    /// [`Self::to_coefficients`] where only modes in the band `|m|∞ <= band`
    /// are needed; entries outside the band are left unspecified.
    pub fn to_coefficients_banded(&self, data: &mut [Complex64], band: usize) {
        self.transform(data, &self.forward, Some(band), Prune::Outputs);
        self.normalize(data);
    }

    fn normalize(&self, data: &mut [Complex64]) {
        let scale = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|x| *x *= scale);
    }

    /// Whether every base-`size` digit of `x` (`count` of them) is in band.
    fn digits_in_band(&self, mut x: usize, count: usize, in_band: &[bool]) -> bool {
        for _ in 0..count {
            if !in_band[x % self.size] {
                return false;
            }
            x /= self.size;
        }
        true
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>, band: Option<usize>, prune: Prune) {
        assert_eq!(data.len(), self.len());
        let n = self.size;
        if n == 1 {
            return;
        }
        let in_band: Vec<bool> = (0..n)
            .map(|j| band.is_none_or(|b| j <= b || j + b >= n))
            .collect();
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let total = self.len();
        for axis in 0..self.dims {
            let later = self.dims - 1 - axis;
            let stride = n.pow(later as u32);
            let block = stride * n;
            for outer in (0..total).step_by(block) {
                // inputs are zero unless the untransformed (later) axes are in
                // band; outputs are discarded unless the earlier axes are
                if band.is_some() && prune == Prune::Outputs && !self.digits_in_band(outer / block, axis, &in_band) {
                    continue;
                }
                for inner in 0..stride {
                    if band.is_some() && prune == Prune::Inputs && !self.digits_in_band(inner, later, &in_band) {
                        continue;
                    }
                    let base = outer + inner;
                    for (k, x) in line.iter_mut().enumerate() {
                        *x = data[base + k * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (k, x) in line.iter().enumerate() {
                        data[base + k * stride] = *x;
                    }
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Prune {
    Inputs,
    Outputs,
}
