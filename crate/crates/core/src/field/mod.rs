//! Truncated hull functions on the torus and the algebra acting on them.

mod active;
mod conditions;
mod physical;
mod product;

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::ModeIndex;

pub use active::{ActiveModeSet, DEFAULT_DEALIAS_FACTOR};
pub use conditions::ConditionIII;
pub use physical::{default_grid_resolution, Raster, Window};

/// Fourier coefficients `a_m` of a hull function `U(φ) = Σ a_m e^{i m·φ}`
/// over an [`ActiveModeSet`].
///
/// Hermitian symmetry `a_{-m} = conj(a_m)` holds for every field produced by
/// this crate, so `U` and `u(x) = U(Ax)` are real.
#[derive(Clone, Debug)]
pub struct HullField {
    active: Arc<ActiveModeSet>,
    coeffs: Vec<Complex64>,
    symmetric: bool,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl HullField {
    pub fn zeros(active: Arc<ActiveModeSet>) -> Self {
        let n = active.len();
        HullField {
            active,
            coeffs: vec![ZERO; n],
            symmetric: true,
        }
    }

    /// Builds a field from raw coefficients in active order, then projects
    /// onto Hermitian fields.
    pub fn from_coefficients(active: Arc<ActiveModeSet>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != active.len() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for {} active modes",
                coeffs.len(),
                active.len()
            )));
        }
        let mut f = HullField {
            active,
            coeffs,
            symmetric: false,
        };
        f.enforce_hermitian();
        Ok(f)
    }

    /// Takes coefficients verbatim, without projection.
    pub(crate) fn from_raw(active: Arc<ActiveModeSet>, coeffs: Vec<Complex64>, symmetric: bool) -> Result<Self> {
        if coeffs.len() != active.len() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for {} active modes",
                coeffs.len(),
                active.len()
            )));
        }
        Ok(HullField {
            active,
            coeffs,
            symmetric,
        })
    }

    /// Uniform random Hermitian field with real and imaginary parts in
    /// `[-1, 1]` on every active mode.
    pub fn random<R: Rng + ?Sized>(active: Arc<ActiveModeSet>, rng: &mut R) -> Self {
        let mut coeffs = vec![ZERO; active.len()];
        for i in 0..active.len() {
            let j = active.negation(i);
            if j < i {
                continue;
            }
            let re = rng.gen_range(-1.0..=1.0);
            let im = if i == j { 0.0 } else { rng.gen_range(-1.0..=1.0) };
            coeffs[i] = Complex64::new(re, im);
            coeffs[j] = coeffs[i].conj();
        }
        HullField {
            active,
            coeffs,
            symmetric: false,
        }
    }

    pub fn active(&self) -> &Arc<ActiveModeSet> {
        &self.active
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Direct mutable access; callers must restore Hermitian symmetry.
    pub(crate) fn coefficients_mut(&mut self) -> &mut [Complex64] {
        self.symmetric = false;
        &mut self.coeffs
    }

    /// True if the field was produced by [`HullField::symmetrize`] (or an
    /// operation known to preserve H-symmetry).
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn set_symmetric_flag(&mut self, flag: bool) {
        self.symmetric = flag;
    }

    pub fn get(&self, m: &[i64]) -> Result<Complex64> {
        self.active
            .position(m)
            .map(|i| self.coeffs[i])
            .ok_or_else(|| Error::InactiveMode(m.to_vec()))
    }

    /// Sets `a_m = value` and `a_{-m} = conj(value)`. For `m = 0` only the
    /// real part is kept.
    pub fn set(&mut self, m: &[i64], value: Complex64) -> Result<()> {
        let i = self
            .active
            .position(m)
            .ok_or_else(|| Error::InactiveMode(m.to_vec()))?;
        let j = self.active.negation(i);
        if i == j {
            self.coeffs[i] = Complex64::new(value.re, 0.0);
        } else {
            self.coeffs[i] = value;
            self.coeffs[j] = value.conj();
        }
        self.symmetric = false;
        Ok(())
    }

    pub(crate) fn check_same_active(&self, other: &HullField) -> Result<()> {
        if self.active.same_as(&other.active) {
            Ok(())
        } else {
            Err(Error::MismatchedActiveSets)
        }
    }

    /// Replaces each pair `(a_m, a_{-m})` by its Hermitian average.
    pub fn enforce_hermitian(&mut self) {
        for i in 0..self.coeffs.len() {
            let j = self.active.negation(i);
            if j < i {
                continue;
            }
            if i == j {
                self.coeffs[i].im = 0.0;
            } else {
                let avg = (self.coeffs[i] + self.coeffs[j].conj()) * 0.5;
                self.coeffs[i] = avg;
                self.coeffs[j] = avg.conj();
            }
        }
    }

    /// `max_m |a_{-m} - conj(a_m)|`
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|i| (self.coeffs[self.active.negation(i)] - self.coeffs[i].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Group average `a_m ← |H|⁻¹ Σ_γ a_{M_γ m}`: the orthogonal projection
    /// onto H-symmetric fields.
    pub fn symmetrize(&self) -> HullField {
        let order = self.active.group_order();
        let mut out = vec![ZERO; self.coeffs.len()];
        for g in 0..order {
            for (o, &j) in out.iter_mut().zip(self.active.action(g)) {
                *o += self.coeffs[j];
            }
        }
        let scale = 1.0 / order as f64;
        out.iter_mut().for_each(|x| *x *= scale);
        HullField {
            active: self.active.clone(),
            coeffs: out,
            symmetric: true,
        }
    }

    /// `max_γ max_m |a_{M_γ m} - a_m|`
    pub fn symmetry_drift(&self) -> f64 {
        let mut worst = 0.0f64;
        for g in 0..self.active.group_order() {
            for (i, &j) in self.active.action(g).iter().enumerate() {
                worst = worst.max((self.coeffs[j] - self.coeffs[i]).norm());
            }
        }
        worst
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm()).sum()
    }

    /// `(Σ (|m|² + 1)^s |a_m|²)^{1/2}` with `|m|` the Euclidean norm of the
    /// integer index.
    pub fn hs_norm(&self, s: f64) -> f64 {
        self.active
            .indices()
            .iter()
            .zip(&self.coeffs)
            .map(|(m, a)| (m.norm_sq() as f64 + 1.0).powf(s) * a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `Σ_i ||∂_{φ_i} U||²_{L²} = Σ_m |m|² |a_m|²`
    pub fn hull_gradient_sq(&self) -> f64 {
        self.active
            .indices()
            .iter()
            .zip(&self.coeffs)
            .map(|(m, a)| m.norm_sq() as f64 * a.norm_sqr())
            .sum()
    }

    /// `Re Σ a_m conj(b_m)`
    pub fn inner_l2(&self, other: &HullField) -> Result<f64> {
        self.check_same_active(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum())
    }

    /// Modes with `|a_m| > eps`, in active order.
    pub fn support_set(&self, eps: f64) -> Vec<ModeIndex> {
        self.active
            .indices()
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, a)| a.norm() > eps)
            .map(|(m, _)| m.clone())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    pub fn scale(&self, c: f64) -> HullField {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|a| *a *= c);
        out
    }

    /// `self + c·other`
    pub fn add_scaled(&self, c: f64, other: &HullField) -> Result<HullField> {
        self.check_same_active(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * c;
        }
        out.symmetric = self.symmetric && other.symmetric;
        Ok(out)
    }

    pub fn max_abs_difference(&self, other: &HullField) -> Result<f64> {
        self.check_same_active(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// `C = (Σ_{m active} (|m|²+1)^{-s})^{1/2}`, so that `l1 <= C·H^s` on the
/// active set by Cauchy-Schwarz. The sum stays bounded as the truncation
/// grows only for `s > p/2`.
pub fn l1_hs_bound_constant(active: &ActiveModeSet, s: f64) -> f64 {
    active
        .indices()
        .iter()
        .map(|m| (m.norm_sq() as f64 + 1.0).powf(-s))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{cos_field, module, seeded};

    fn twelve(n: usize) -> Arc<ActiveModeSet> {
        ActiveModeSet::new(module("dihedral:12"), n, f64::INFINITY).unwrap()
    }

    #[test]
    fn set_assigns_conjugate_partner() {
        let mut f = HullField::zeros(twelve(1));
        f.set(&[1, 0, 0, 0], Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(f.get(&[-1, 0, 0, 0]).unwrap(), Complex64::new(1.0, 0.0));
        f.set(&[1, 0, 0, 0], Complex64::new(0.0, 1.0)).unwrap();
        assert_eq!(f.get(&[-1, 0, 0, 0]).unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(f.get(&[0, 1, 0, 0]).unwrap(), ZERO);
        assert!(matches!(f.get(&[2, 0, 0, 0]), Err(Error::InactiveMode(_))));
        assert!(f.set(&[0, 0, 5, 0], ZERO).is_err());
    }

    #[test]
    fn norms_of_single_cosine() {
        let f = cos_field(twelve(1), &[1, 0, 0, 0], 1.0);
        assert!((f.l2_norm() - 2f64.sqrt()).abs() < 1e-15);
        assert!((f.l1_norm() - 2.0).abs() < 1e-15);
        assert!((f.hs_norm(0.0) - f.l2_norm()).abs() < 1e-15);
        let g = cos_field(twelve(1), &[1, 1, 0, 0], 1.0);
        assert!((g.hs_norm(1.0) - 6f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn bound_constant_hand_values() {
        let zero = twelve(0);
        assert_eq!(l1_hs_bound_constant(&zero, 2.0), 1.0);
        let sq = ActiveModeSet::new(module("cyclic:2"), 1, f64::INFINITY).unwrap();
        assert!((l1_hs_bound_constant(&sq, 1.0) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn l1_bounded_by_hs_on_random_fields() {
        let a = ActiveModeSet::new(module("dihedral:12"), 2, f64::INFINITY).unwrap();
        let c = l1_hs_bound_constant(&a, 3.0);
        let mut rng = seeded(11);
        for _ in 0..100 {
            let f = HullField::random(a.clone(), &mut rng);
            assert!(f.l1_norm() <= c * f.hs_norm(3.0) + 1e-12);
        }
    }

    #[test]
    fn symmetrize_spreads_delta_over_orbit() {
        let mut f = HullField::zeros(twelve(1));
        f.set(&[1, 0, 0, 0], Complex64::new(1.0, 0.0)).unwrap();
        let s = f.symmetrize();
        let support = s.support_set(1e-14);
        assert_eq!(support.len(), 12);
        // mass 2 (delta plus Hermitian partner) spread evenly over 12 modes
        for m in &support {
            assert!((s.get(&m.0).unwrap().re - 1.0 / 6.0).abs() < 1e-15);
        }
        assert!(s.symmetry_drift() < 1e-15);
        let again = s.symmetrize();
        assert!(again.max_abs_difference(&s).unwrap() < 1e-15);
        let z = HullField::zeros(twelve(1)).symmetrize();
        assert_eq!(z.l1_norm(), 0.0);
    }

    #[test]
    fn symmetrize_is_orthogonal_projection() {
        let a = twelve(2);
        let mut rng = seeded(3);
        for _ in 0..10 {
            let f = HullField::random(a.clone(), &mut rng);
            let g = HullField::random(a.clone(), &mut rng);
            let pf = f.symmetrize();
            let residual = g.add_scaled(-1.0, &g.symmetrize()).unwrap();
            assert!(pf.inner_l2(&residual).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn inner_product_basics() {
        let a = twelve(2);
        let mut rng = seeded(5);
        let f = HullField::random(a.clone(), &mut rng);
        assert!((f.inner_l2(&f).unwrap() - f.l2_norm_sq()).abs() < 1e-12);
        assert_eq!(f.inner_l2(&HullField::zeros(a)).unwrap(), 0.0);
        let other = HullField::zeros(twelve(1));
        assert_eq!(f.inner_l2(&other).unwrap_err(), Error::MismatchedActiveSets);
    }

    #[test]
    fn support_of_zero_and_large_eps() {
        let a = twelve(1);
        assert!(HullField::zeros(a.clone()).support_set(0.0).is_empty());
        let f = cos_field(a, &[1, 0, 0, 0], 1.0);
        assert!(f.support_set(1.0).is_empty());
        assert_eq!(f.support_set(0.5).len(), 2);
    }
}
