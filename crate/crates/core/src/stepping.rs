//! Fixed-step time loop shared by the Swift-Hohenberg and Brusselator states.

use crate::error::{Error, Result};

/// A state that can be advanced by an explicit step size.
pub trait Evolve {
    fn time(&self) -> f64;
    fn set_time(&mut self, t: f64);
    /// Configured step size.
    fn dt(&self) -> f64;
    fn advance(&mut self, h: f64) -> Result<()>;
}

/// Integrates to `t + duration`, calling `observe` on the initial state,
/// every `every` steps, and on the final state. Time is accumulated as
/// `t0 + n·dt` so long runs do not drift; a shorter last step lands exactly
/// on the end time.
pub fn integrate<S: Evolve, R>(
    state: &mut S,
    duration: f64,
    every: usize,
    mut observe: impl FnMut(&S) -> R,
) -> Result<Vec<R>> {
    if !(duration >= 0.0) {
        return Err(Error::InvalidArgument(format!("duration {duration}")));
    }
    let every = every.max(1);
    let dt = state.dt();
    let t0 = state.time();
    let t_end = t0 + duration;
    let slack = 1e-12 * t_end.abs().max(1.0);
    let mut out = vec![observe(state)];
    let full_steps = ((duration / dt) * (1.0 + 1e-12)).floor() as usize;
    for n in 1..=full_steps {
        state.advance(dt)?;
        state.set_time(t0 + n as f64 * dt);
        let last = n == full_steps && t_end - state.time() <= slack;
        if n % every == 0 || last {
            out.push(observe(state));
        }
    }
    let rest = t_end - state.time();
    if rest > slack {
        state.advance(rest)?;
        state.set_time(t_end);
        out.push(observe(state));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `x' = -x`, exact step.
    struct Decay {
        t: f64,
        x: f64,
    }

    impl Evolve for Decay {
        fn time(&self) -> f64 {
            self.t
        }
        fn set_time(&mut self, t: f64) {
            self.t = t;
        }
        fn dt(&self) -> f64 {
            0.1
        }
        fn advance(&mut self, h: f64) -> Result<()> {
            self.x *= (-h).exp();
            self.t += h;
            Ok(())
        }
    }

    #[test]
    fn samples_and_partial_last_step() {
        let mut s = Decay { t: 0.0, x: 1.0 };
        let out = integrate(&mut s, 1.05, 5, |s| (s.t, s.x)).unwrap();
        let times: Vec<f64> = out.iter().map(|o| o.0).collect();
        assert_eq!(times.len(), 4);
        assert!((times[1] - 0.5).abs() < 1e-12);
        assert!((times[2] - 1.0).abs() < 1e-12);
        assert_eq!(times[3], 1.05);
        assert!((out[3].1 - (-1.05f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn zero_duration_observes_once() {
        let mut s = Decay { t: 2.0, x: 1.0 };
        let out = integrate(&mut s, 0.0, 3, |s| s.t).unwrap();
        assert_eq!(out, vec![2.0]);
        assert!(integrate(&mut s, -1.0, 3, |s| s.t).is_err());
    }

    #[test]
    fn exact_multiple_has_no_extra_sample() {
        let mut s = Decay { t: 0.0, x: 1.0 };
        let out = integrate(&mut s, 1.0, 10, |s| s.t).unwrap();
        assert_eq!(out.len(), 2);
        assert!((out[1] - 1.0).abs() < 1e-15);
    }
}
