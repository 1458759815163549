//! Pseudospectral products on the padded torus grid.
//!
//! The grid has `factor·(2N+1) >= 4N+2` points per axis, so a product of up
//! to three fields supported in the box `|m|∞ <= N` is resolved without
//! aliasing onto the box. Products of three factors are formed pointwise on
//! the grid in one pass; the intermediate product is never truncated.

use std::cell::RefCell;

use num_complex::Complex64;

use super::{HullField, ZERO};
use crate::error::Result;

thread_local! {
    // Grid-sized work buffer; large enough that fresh allocations per
    // product cost more in page faults than the transforms themselves.
    static SCRATCH: RefCell<Vec<Complex64>> = const { RefCell::new(Vec::new()) };
}

/// Runs `f` on a zeroed grid buffer of length `len`.
fn with_scratch<R>(len: usize, f: impl FnOnce(&mut [Complex64]) -> R) -> R {
    SCRATCH.with(|cell| match cell.try_borrow_mut() {
        Ok(mut buf) => {
            buf.clear();
            buf.resize(len, ZERO);
            f(&mut buf)
        }
        Err(_) => f(&mut vec![ZERO; len]),
    })
}

impl HullField {
    /// Values of `U` at the padded grid points (real up to round-off).
    pub fn padded_values(&self) -> Vec<f64> {
        let grid = self.active.grid();
        with_scratch(grid.len(), |data| {
            for (&pos, &a) in self.active.grid_positions().iter().zip(&self.coeffs) {
                data[pos] += a;
            }
            grid.to_values_banded(data, self.active.half_width());
            data.iter().map(|z| z.re).collect()
        })
    }

    /// Projects real padded-grid values back onto the active set.
    pub(crate) fn from_padded_values(&self, values: &[f64]) -> HullField {
        self.from_padded_map(values, |v| v)
    }

    /// [`Self::from_padded_values`] of `op` applied pointwise to `values`.
    fn from_padded_map(&self, values: &[f64], op: impl Fn(f64) -> f64) -> HullField {
        let grid = self.active.grid();
        let coeffs = with_scratch(grid.len(), |data| {
            for (d, &v) in data.iter_mut().zip(values) {
                d.re = op(v);
            }
            grid.to_coefficients_banded(data, self.active.half_width());
            self.active.grid_positions().iter().map(|&pos| data[pos]).collect()
        });
        let mut out = HullField {
            active: self.active.clone(),
            coeffs,
            symmetric: false,
        };
        out.enforce_hermitian();
        out
    }

    /// Coefficients of `f·g` restricted to the active set.
    pub fn pointwise_product(&self, other: &HullField) -> Result<HullField> {
        self.check_same_active(other)?;
        let a = self.padded_values();
        let b = other.padded_values();
        let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        let mut out = self.from_padded_values(&prod);
        out.symmetric = self.symmetric && other.symmetric;
        Ok(out)
    }

    /// Coefficients of `f·g·h` restricted to the active set.
    pub fn triple_product(&self, g: &HullField, h: &HullField) -> Result<HullField> {
        self.check_same_active(g)?;
        self.check_same_active(h)?;
        let a = self.padded_values();
        let b = g.padded_values();
        let c = h.padded_values();
        let prod: Vec<f64> = a
            .iter()
            .zip(&b)
            .zip(&c)
            .map(|((x, y), z)| x * y * z)
            .collect();
        let mut out = self.from_padded_values(&prod);
        out.symmetric = self.symmetric && g.symmetric && h.symmetric;
        Ok(out)
    }

    /// Coefficients of `u³` restricted to the active set.
    pub fn cube(&self) -> HullField {
        self.cube_from_values(&self.padded_values())
    }

    /// [`Self::cube`] from precomputed [`Self::padded_values`].
    pub(crate) fn cube_from_values(&self, a: &[f64]) -> HullField {
        let mut out = self.from_padded_map(a, |x| x * x * x);
        out.symmetric = self.symmetric;
        out
    }

    /// `||f g||²_{ℓ²}` of the full (untruncated) product, by Parseval on
    /// the padded grid, which resolves trigonometric polynomials of degree
    /// `4N` exactly.
    pub fn product_l2_norm_sq(&self, other: &HullField) -> Result<f64> {
        self.check_same_active(other)?;
        let a = self.padded_values();
        let b = other.padded_values();
        let n = a.len() as f64;
        Ok(a.iter().zip(&b).map(|(x, y)| (x * y) * (x * y)).sum::<f64>() / n)
    }

    /// Swift-Hohenberg potential
    /// `P_λ(u) = ½||(Δ+1)u||² - ½λ||u||² + ¼||u²||²`, with `Δ` acting on
    /// mode `m` as `-|k(m)|²` and `u²` taken without truncation.
    pub fn energy(&self, lambda: f64) -> f64 {
        self.energy_from_values(lambda, &self.padded_values())
    }

    /// [`Self::energy`] from precomputed [`Self::padded_values`].
    pub(crate) fn energy_from_values(&self, lambda: f64, values: &[f64]) -> f64 {
        let quadratic: f64 = self
            .coeffs
            .iter()
            .zip(self.active.wavenumbers_sq())
            .map(|(a, k2)| {
                let s = 1.0 - k2;
                0.5 * s * s * a.norm_sqr()
            })
            .sum();
        let quartic = values.iter().map(|v| v.powi(4)).sum::<f64>() / values.len() as f64;
        quadratic - 0.5 * lambda * self.l2_norm_sq() + 0.25 * quartic
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::field::ActiveModeSet;
    use crate::testing::{cos_field, direct_triple, module, seeded};

    fn square(n: usize) -> Arc<ActiveModeSet> {
        ActiveModeSet::new(module("dihedral:4"), n, f64::INFINITY).unwrap()
    }

    /// Direct double convolution restricted to the active set.
    fn direct_pair(f: &HullField, g: &HullField) -> Vec<Complex64> {
        let a = f.active();
        let mut out = vec![ZERO; a.len()];
        for (i, m) in a.indices().iter().enumerate() {
            for (j, mj) in a.indices().iter().enumerate() {
                let rest: Vec<i64> = m.0.iter().zip(&mj.0).map(|(x, y)| x - y).collect();
                if let Some(k) = a.position(&rest) {
                    out[i] += f.coefficients()[j] * g.coefficients()[k];
                }
            }
        }
        out
    }

    #[test]
    fn square_of_cosine() {
        let f = cos_field(square(2), &[1, 0], 1.0);
        let p = f.pointwise_product(&f).unwrap();
        assert!((p.get(&[0, 0]).unwrap().re - 2.0).abs() < 1e-14);
        assert!((p.get(&[2, 0]).unwrap().re - 1.0).abs() < 1e-14);
        assert!((p.get(&[-2, 0]).unwrap().re - 1.0).abs() < 1e-14);
        assert!(p.get(&[1, 0]).unwrap().norm() < 1e-14);
        let z = HullField::zeros(square(2));
        assert_eq!(z.pointwise_product(&f).unwrap().l1_norm(), 0.0);
    }

    #[test]
    fn product_matches_direct_convolution() {
        let a = square(2);
        let mut rng = seeded(1);
        for _ in 0..20 {
            let f = HullField::random(a.clone(), &mut rng);
            let g = HullField::random(a.clone(), &mut rng);
            let p = f.pointwise_product(&g).unwrap();
            let d = direct_pair(&f, &g);
            for (x, y) in p.coefficients().iter().zip(&d) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn triple_products_match_direct_convolution() {
        let a = square(2);
        let mut rng = seeded(2);
        for _ in 0..10 {
            let f = HullField::random(a.clone(), &mut rng);
            let g = HullField::random(a.clone(), &mut rng);
            let h = HullField::random(a.clone(), &mut rng);
            let fast = f.triple_product(&g, &h).unwrap();
            let slow = direct_triple(&f, &g, &h);
            for (x, y) in fast.coefficients().iter().zip(&slow) {
                assert!((x - y).norm() < 1e-12);
            }
            let cube = f.cube();
            let slow = direct_triple(&f, &f, &f);
            for (x, y) in cube.coefficients().iter().zip(&slow) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn energy_of_critical_cosine() {
        let f = cos_field(square(2), &[1, 0], 1.0);
        for lambda in [-1.0, 0.0, 0.3] {
            let p = f.energy(lambda);
            assert!((p - (1.5 - lambda)).abs() < 1e-13);
            let n = f.l2_norm_sq();
            assert!(p >= 0.25 * (n * n - 2.0 * lambda * n));
        }
        assert_eq!(HullField::zeros(square(2)).energy(0.4), 0.0);
    }

    #[test]
    fn associativity_of_inner_product() {
        let a = ActiveModeSet::new(module("dihedral:12"), 2, f64::INFINITY).unwrap();
        let mut rng = seeded(9);
        for _ in 0..5 {
            let u = HullField::random(a.clone(), &mut rng);
            let v = HullField::random(a.clone(), &mut rng);
            let w = HullField::random(a.clone(), &mut rng);
            let lhs = u.inner_l2(&v.pointwise_product(&w).unwrap()).unwrap();
            let rhs = u.pointwise_product(&v).unwrap().inner_l2(&w).unwrap();
            assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn cauchy_schwarz_for_squares() {
        let f = cos_field(square(2), &[1, 0], 1.0);
        assert!((f.product_l2_norm_sq(&f).unwrap() - 6.0).abs() < 1e-13);
        let a = ActiveModeSet::new(module("dihedral:12"), 2, f64::INFINITY).unwrap();
        let mut rng = seeded(4);
        for _ in 0..100 {
            let u = HullField::random(a.clone(), &mut rng);
            let n = u.l2_norm_sq();
            assert!(u.product_l2_norm_sq(&u).unwrap() - n * n >= -1e-12 * n * n);
        }
    }
}
