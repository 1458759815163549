use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::lattice::{for_each_bounded, FrequencyModule, ModeIndex};

pub const DEFAULT_DEALIAS_FACTOR: usize = 2;

/// Finite truncation of `Z^p`: the largest H-invariant subset of the box
/// `|m|∞ <= N` intersected with the ball `|k(m)| <= K_max`.
///
/// Indices are stored in lexicographic order. Group action and negation are
/// tabulated as permutations of that order.
#[derive(Debug)]
pub struct ActiveModeSet {
    module: Arc<FrequencyModule>,
    half_width: usize,
    k_max: f64,
    indices: Vec<ModeIndex>,
    /// Dense lookup over the box, `u32::MAX` for inactive.
    lookup: Vec<u32>,
    negation: Vec<usize>,
    actions: Vec<Vec<usize>>,
    wavevectors: Vec<Vec<f64>>,
    k_sq: Vec<f64>,
    dealias_factor: usize,
    grid: TorusGrid,
    grid_positions: Vec<usize>,
}

impl ActiveModeSet {
    pub fn new(module: Arc<FrequencyModule>, half_width: usize, k_max: f64) -> Result<Arc<Self>> {
        Self::with_dealias(module, half_width, k_max, DEFAULT_DEALIAS_FACTOR)
    }

    /// `dealias_factor` pads the transform grid to `factor·(2N+1)` points per
    /// axis; 2 is the minimum that keeps cubic products exact on the box.
    pub fn with_dealias(
        module: Arc<FrequencyModule>,
        half_width: usize,
        k_max: f64,
        dealias_factor: usize,
    ) -> Result<Arc<Self>> {
        if dealias_factor < 2 {
            return Err(Error::InvalidArgument(format!(
                "dealias factor {dealias_factor} < 2 aliases cubic terms"
            )));
        }
        if k_max.is_nan() || k_max < 0.0 {
            return Err(Error::InvalidArgument(format!("K_max = {k_max}")));
        }
        let p = module.rank();
        let n = half_width as i64;
        let side = 2 * half_width + 1;
        let box_len = side.pow(p as u32);
        let flat = |m: &[i64]| -> Option<usize> {
            let mut acc = 0usize;
            for &x in m {
                if x.abs() > n {
                    return None;
                }
                acc = acc * side + (x + n) as usize;
            }
            Some(acc)
        };
        let k_max_sq = k_max * k_max;
        let mut keep = vec![false; box_len];
        let mut candidates = Vec::new();
        for_each_bounded(p, n, |m| {
            if k_max.is_infinite() || module.wavenumber_sq(m) <= k_max_sq * (1.0 + 1e-12) {
                keep[flat(m).unwrap()] = true;
                candidates.push(m.to_vec());
            }
            false
        });
        let reps = module.integer_reps();
        loop {
            let mut changed = false;
            for m in &candidates {
                let i = flat(m).unwrap();
                if !keep[i] {
                    continue;
                }
                let closed = reps
                    .iter()
                    .all(|r| flat(&r.apply(m)).is_some_and(|j| keep[j]));
                if !closed {
                    keep[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let indices: Vec<ModeIndex> = candidates
            .into_iter()
            .filter(|m| keep[flat(m).unwrap()])
            .map(ModeIndex)
            .collect();
        if half_width > 0 && indices.len() <= 1 {
            return Err(Error::EmptyActiveSet);
        }
        let mut lookup = vec![u32::MAX; box_len];
        for (i, m) in indices.iter().enumerate() {
            lookup[flat(&m.0).unwrap()] = i as u32;
        }
        let find = |m: &[i64]| flat(m).map(|j| lookup[j]).filter(|&i| i != u32::MAX);
        let negation = indices
            .iter()
            .map(|m| find(&m.neg().0).expect("box and ball are symmetric") as usize)
            .collect();
        let actions = reps
            .iter()
            .map(|r| {
                indices
                    .iter()
                    .map(|m| find(&r.apply(&m.0)).expect("set is invariant") as usize)
                    .collect()
            })
            .collect();
        let wavevectors: Vec<Vec<f64>> = indices.iter().map(|m| module.mode_wavevector(&m.0)).collect();
        let k_sq = wavevectors
            .iter()
            .map(|k| k.iter().map(|x| x * x).sum())
            .collect();
        let grid = TorusGrid::new(p, dealias_factor * side);
        let grid_positions = indices.iter().map(|m| grid.position(&m.0)).collect();
        Ok(Arc::new(ActiveModeSet {
            module,
            half_width,
            k_max,
            indices,
            lookup,
            negation,
            actions,
            wavevectors,
            k_sq,
            dealias_factor,
            grid,
            grid_positions,
        }))
    }

    pub fn module(&self) -> &Arc<FrequencyModule> {
        &self.module
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn dealias_factor(&self) -> usize {
        self.dealias_factor
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.module.rank()
    }

    pub fn indices(&self) -> &[ModeIndex] {
        &self.indices
    }

    pub fn index(&self, i: usize) -> &ModeIndex {
        &self.indices[i]
    }

    /// Position of `m` in the active ordering.
    pub fn position(&self, m: &[i64]) -> Option<usize> {
        if m.len() != self.rank() {
            return None;
        }
        let n = self.half_width as i64;
        let side = 2 * self.half_width + 1;
        let mut acc = 0usize;
        for &x in m {
            if x.abs() > n {
                return None;
            }
            acc = acc * side + (x + n) as usize;
        }
        let i = self.lookup[acc];
        (i != u32::MAX).then_some(i as usize)
    }

    pub fn zero_position(&self) -> usize {
        self.position(&vec![0; self.rank()]).expect("zero mode is always active")
    }

    /// Position of `-m_i`.
    pub fn negation(&self, i: usize) -> usize {
        self.negation[i]
    }

    /// `action(g)[i]` is the position of `M_g m_i`.
    pub fn action(&self, g: usize) -> &[usize] {
        &self.actions[g]
    }

    pub fn group_order(&self) -> usize {
        self.actions.len()
    }

    pub fn wavevector(&self, i: usize) -> &[f64] {
        &self.wavevectors[i]
    }

    pub fn wavevectors(&self) -> &[Vec<f64>] {
        &self.wavevectors
    }

    /// `|k(m_i)|²`
    pub fn wavenumber_sq(&self, i: usize) -> f64 {
        self.k_sq[i]
    }

    pub fn wavenumbers_sq(&self) -> &[f64] {
        &self.k_sq
    }

    /// Padded transform grid used for products.
    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub(crate) fn grid_positions(&self) -> &[usize] {
        &self.grid_positions
    }

    /// Same truncation of the same module.
    pub fn same_as(&self, other: &ActiveModeSet) -> bool {
        std::ptr::eq(self, other)
            || (self.half_width == other.half_width
                && self.k_max == other.k_max
                && self.dealias_factor == other.dealias_factor
                && self.indices.len() == other.indices.len()
                && self.module.holohedry().descriptor() == other.module.holohedry().descriptor()
                && self.module.generators() == other.module.generators())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::module;

    #[test]
    fn twelvefold_unit_box_reduces_to_whole_orbits() {
        let m = module("dihedral:12");
        let a = ActiveModeSet::new(m.clone(), 1, f64::INFINITY).unwrap();
        // oracle: keep m iff every rotated/reflected wavevector has integer
        // coordinates inside the box
        let h = m.holohedry().clone();
        let mut expected = 0;
        for_each_bounded(4, 1, |idx| {
            let k = m.mode_wavevector(idx);
            let inside = h.elements().iter().all(|g| {
                let c = m.integer_coordinates(&g.apply(&k), 1e-9).unwrap();
                c.max_abs() <= 1
            });
            expected += inside as usize;
            false
        });
        assert_eq!(expected, 49);
        assert_eq!(a.len(), expected);
    }

    #[test]
    fn zero_width_has_only_origin() {
        let a = ActiveModeSet::new(module("dihedral:12"), 0, f64::INFINITY).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a.index(0), &ModeIndex::zero(4));
    }

    #[test]
    fn critical_orbit_is_active_under_a_cap() {
        let m = module("dihedral:12");
        let a = ActiveModeSet::new(m.clone(), 3, 1.1).unwrap();
        let e0 = [1, 0, 0, 0];
        for r in m.integer_reps() {
            assert!(a.position(&r.apply(&e0)).is_some());
        }
        let orbit = a.wavenumbers_sq().iter().filter(|&&k| (k - 1.0).abs() < 1e-9).count();
        assert_eq!(orbit, 12);
    }

    #[test]
    fn closed_under_negation_and_group() {
        let a = ActiveModeSet::new(module("dihedral:12"), 3, 3.0).unwrap();
        for i in 0..a.len() {
            assert_eq!(a.index(a.negation(i)), &a.index(i).neg());
        }
        for g in 0..a.group_order() {
            let mut seen = a.action(g).to_vec();
            seen.sort_unstable();
            seen.dedup();
            assert_eq!(seen.len(), a.len());
        }
    }

    #[test]
    fn cap_excluding_generators_is_empty() {
        assert_eq!(
            ActiveModeSet::new(module("dihedral:12"), 2, 0.05).unwrap_err(),
            Error::EmptyActiveSet
        );
        assert!(ActiveModeSet::with_dealias(module("dihedral:4"), 2, 5.0, 1).is_err());
    }
}
