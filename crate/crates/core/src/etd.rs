//! φ-functions for exponential time differencing.
//!
//! `φ_0(z) = e^z`, `φ_{k+1}(z) = (φ_k(z) - 1/k!) / z`, with `φ_k(0) = 1/k!`.
//! Near zero the recurrence cancels catastrophically, so a truncated Taylor
//! series `Σ_j z^j / (j+k)!` is used below a threshold.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

pub const DEFAULT_PHI_THRESHOLD: f64 = 1e-2;
pub const PHI_SERIES_TERMS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Etdrk2,
    Etdrk4,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "etdrk2" => Ok(Scheme::Etdrk2),
            "etdrk4" => Ok(Scheme::Etdrk4),
            other => Err(Error::InvalidArgument(format!("unknown scheme `{other}`"))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Etdrk2 => "etdrk2",
            Scheme::Etdrk4 => "etdrk4",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepperConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub phi_series_threshold: f64,
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            scheme: Scheme::Etdrk2,
            dt: 0.01,
            phi_series_threshold: DEFAULT_PHI_THRESHOLD,
        }
    }
}

impl StepperConfig {
    pub fn new(scheme: Scheme, dt: f64) -> Self {
        StepperConfig {
            scheme,
            dt,
            ..Default::default()
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `[φ_1(z), φ_2(z), φ_3(z)]`
pub fn phi123(z: f64, threshold: f64) -> [f64; 3] {
    if z.abs() < threshold {
        let series = |k: usize| {
            // Horner on Σ_{j<terms} z^j / (j+k)!
            let mut acc = 0.0;
            for j in (0..PHI_SERIES_TERMS).rev() {
                acc = acc * z + 1.0 / factorial(j + k);
            }
            acc
        };
        [series(1), series(2), series(3)]
    } else {
        let p1 = z.exp_m1() / z;
        let p2 = (p1 - 1.0) / z;
        let p3 = (p2 - 0.5) / z;
        [p1, p2, p3]
    }
}

pub fn phi1(z: f64, threshold: f64) -> f64 {
    phi123(z, threshold)[0]
}

/// Divided difference `(f(a) - f(b)) / (a - b)`, replaced by the midpoint
/// derivative when `a ≈ b`.
pub fn divided_difference(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let gap = (a - b).abs();
    if gap <= 1e-6 * (1.0 + a.abs().max(b.abs())) {
        df(0.5 * (a + b))
    } else {
        (f(a) - f(b)) / (a - b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// φ_k by adaptive quadrature of `∫_0^1 e^{(1-θ)z} θ^{k-1}/(k-1)! dθ`.
    fn phi_quadrature(k: usize, z: f64) -> f64 {
        let n = 20_000;
        let h = 1.0 / n as f64;
        let f = |t: f64| ((1.0 - t) * z).exp() * t.powi(k as i32 - 1) / factorial(k - 1);
        // composite Simpson
        let mut s = f(0.0) + f(1.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn values_at_zero() {
        assert_eq!(phi123(0.0, DEFAULT_PHI_THRESHOLD), [1.0, 0.5, 1.0 / 6.0]);
    }

    #[test]
    fn agree_with_quadrature_across_branches() {
        for z in [-50.0, -3.0, -0.5, -0.011, -0.009, -1e-5, 1e-5, 0.009, 0.011, 0.3, 2.0] {
            let p = phi123(z, DEFAULT_PHI_THRESHOLD);
            for k in 1..=3 {
                let q = phi_quadrature(k, z);
                assert!(
                    (p[k - 1] - q).abs() < 1e-9 * q.abs().max(1e-3),
                    "phi{k}({z}) = {} vs {q}",
                    p[k - 1]
                );
            }
        }
    }

    #[test]
    fn branches_meet_continuously() {
        let t = DEFAULT_PHI_THRESHOLD;
        let below = phi123(t * (1.0 - 1e-9), t);
        let above = phi123(t * (1.0 + 1e-9), t);
        for k in 0..3 {
            assert!((below[k] - above[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn divided_difference_limit() {
        let d = divided_difference(f64::exp, f64::exp, 1.0, 1.0);
        assert!((d - 1f64.exp()).abs() < 1e-15);
        let d = divided_difference(f64::exp, f64::exp, 1.0, 0.0);
        assert!((d - (1f64.exp() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn scheme_tokens() {
        assert_eq!("ETDRK4".parse::<Scheme>().unwrap(), Scheme::Etdrk4);
        assert!("rk4".parse::<Scheme>().is_err());
        assert_eq!(Scheme::Etdrk2.to_string(), "etdrk2");
    }
}
