//! Density of the active frequencies (condition iii).

use super::HullField;
use crate::error::{Error, Result};
use crate::lattice::ModeIndex;

/// Result of a density check: `passed` iff `uncovered` is empty.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionIII {
    pub passed: bool,
    /// Module points in the ball with no support wavevector within `r`.
    pub uncovered: Vec<ModeIndex>,
    /// Number of module points enumerated.
    pub points_checked: usize,
    pub coefficient_bound: i64,
}

impl HullField {
    /// Checks that `{k : |a_k| > eps}` is `r`-dense in the module points of
    /// the ball `|k| <= radius`, enumerated with `|m|∞ <= bound`.
    pub fn condition_iii_check(
        &self,
        radius: f64,
        r: f64,
        eps: f64,
        bound: i64,
    ) -> Result<ConditionIII> {
        let k_max = self.active.k_max();
        if radius > k_max {
            return Err(Error::BallExceedsTruncation { radius, k_max });
        }
        let support: Vec<&[f64]> = self
            .coeffs
            .iter()
            .zip(self.active.wavevectors())
            .filter(|(a, _)| a.norm() > eps)
            .map(|(_, k)| k.as_slice())
            .collect();
        let points = self.active.module().module_points_in_ball(radius, bound);
        let r2 = r * r;
        let uncovered: Vec<ModeIndex> = points
            .iter()
            .filter(|(_, k)| {
                !support.iter().any(|s| {
                    s.iter().zip(k).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= r2
                })
            })
            .map(|(m, _)| m.clone())
            .collect();
        Ok(ConditionIII {
            passed: uncovered.is_empty(),
            uncovered,
            points_checked: points.len(),
            coefficient_bound: bound,
        })
    }
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::field::ActiveModeSet;
    use crate::testing::module;

    #[test]
    fn zero_field_leaves_origin_uncovered() {
        let a = ActiveModeSet::new(module("dihedral:12"), 2, 3.0).unwrap();
        let f = HullField::zeros(a);
        let c = f.condition_iii_check(0.0, 0.5, 0.0, 2).unwrap();
        assert!(!c.passed);
        assert_eq!(c.uncovered, vec![ModeIndex::zero(4)]);
    }

    #[test]
    fn ball_beyond_cap_is_rejected() {
        let a = ActiveModeSet::new(module("dihedral:12"), 2, 1.5).unwrap();
        let f = HullField::zeros(a);
        assert!(matches!(
            f.condition_iii_check(2.0, 0.5, 0.0, 2),
            Err(Error::BallExceedsTruncation { .. })
        ));
    }

    #[test]
    fn full_support_covers_at_covering_radius() {
        let m = module("dihedral:12");
        let a = ActiveModeSet::new(m.clone(), 2, 2.0).unwrap();
        let mut f = HullField::zeros(a.clone());
        for i in 0..a.len() {
            f.coefficients_mut()[i] = Complex64::new(1.0, 0.0);
        }
        let bound = 2;
        let points = m.module_points_in_ball(2.0, bound);
        // brute-force covering radius of the active wavevectors over the ball
        let cover = points
            .iter()
            .map(|(_, k)| {
                a.wavevectors()
                    .iter()
                    .map(|w| ((w[0] - k[0]).powi(2) + (w[1] - k[1]).powi(2)).sqrt())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        assert!(f.condition_iii_check(2.0, cover, 0.5, bound).unwrap().passed);
        assert!(!f.condition_iii_check(2.0, cover, 1.0, bound).unwrap().passed);
    }
}
