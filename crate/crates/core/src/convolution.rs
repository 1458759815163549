//! Direct (brute-force) triple convolution on the active set.
//!
//! This is the amplitude-equation form of cubic nonlinearities,
//! `[fgh]_m = Σ_{m'+m''+m'''=m} f_{m'} g_{m''} h_{m'''}`, and serves as the
//! reference for the pseudospectral products.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::HullField;

/// Maximum number of `(m', m'')` pairs visited per output mode.
pub const MAX_TRIPLES_PER_MODE: usize = 10_000;

/// Exact coefficients of `f·g·h` restricted to the active set.
pub fn triple_convolution(f: &HullField, g: &HullField, h: &HullField) -> Result<HullField> {
    f.check_same_active(g)?;
    f.check_same_active(h)?;
    let active = f.active().clone();
    let n = active.len();
    if n * n > MAX_TRIPLES_PER_MODE {
        return Err(Error::TooLarge(n * n));
    }
    let p = active.rank();
    let (fc, gc, hc) = (f.coefficients(), g.coefficients(), h.coefficients());
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let mut rest = vec![0i64; p];
    for (i, m) in active.indices().iter().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, mj) in active.indices().iter().enumerate() {
            if fc[j] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (k, mk) in active.indices().iter().enumerate() {
                for a in 0..p {
                    rest[a] = m.0[a] - mj.0[a] - mk.0[a];
                }
                if let Some(l) = active.position(&rest) {
                    acc += fc[j] * gc[k] * hc[l];
                }
            }
        }
        out[i] = acc;
    }
    HullField::from_coefficients(active, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ActiveModeSet;
    use crate::testing::{cos_field, module};

    #[test]
    fn cube_of_cosine() {
        // (2 cos θ)³ = 6 cos θ + 2 cos 3θ
        let a = ActiveModeSet::new(module("dihedral:4"), 3, f64::INFINITY).unwrap();
        let f = cos_field(a, &[1, 0], 1.0);
        let c = triple_convolution(&f, &f, &f).unwrap();
        assert!((c.get(&[1, 0]).unwrap().re - 3.0).abs() < 1e-14);
        assert!((c.get(&[-1, 0]).unwrap().re - 3.0).abs() < 1e-14);
        assert!((c.get(&[3, 0]).unwrap().re - 1.0).abs() < 1e-14);
        assert!((c.l1_norm() - 8.0).abs() < 1e-13);
    }

    #[test]
    fn guard_rejects_large_sets() {
        let a = ActiveModeSet::new(module("dihedral:12"), 2, f64::INFINITY).unwrap();
        let f = HullField::zeros(a);
        assert!(matches!(triple_convolution(&f, &f, &f), Err(Error::TooLarge(_))));
    }
}
