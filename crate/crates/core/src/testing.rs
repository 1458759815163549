//! Shared fixtures for unit tests.

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::field::{ActiveModeSet, HullField};
use crate::lattice::{
    build_holohedry, generate_frequency_module, FrequencyModule, SymmetryDescriptor,
    DEFAULT_RELATION_BOUND,
};

pub fn module(spec: &str) -> Arc<FrequencyModule> {
    let d: SymmetryDescriptor = spec.parse().unwrap();
    let h = Arc::new(build_holohedry(&d).unwrap());
    let mut k0 = vec![0.0; d.dimension()];
    k0[0] = 1.0;
    Arc::new(generate_frequency_module(h, &k0, DEFAULT_RELATION_BOUND).unwrap())
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `a_{±m} = amp`, i.e. `u = 2·amp·cos(k(m)·x)`.
pub fn cos_field(active: Arc<ActiveModeSet>, m: &[i64], amp: f64) -> HullField {
    let mut f = HullField::zeros(active);
    f.set(m, Complex64::new(amp, 0.0)).unwrap();
    f
}

pub fn direct_triple(f: &HullField, g: &HullField, h: &HullField) -> Vec<Complex64> {
    crate::convolution::triple_convolution(f, g, h)
        .unwrap()
        .coefficients()
        .to_vec()
}
