//! Swift-Hohenberg dynamics in hull form,
//! `U_t = -(Δ̃+1)² U + λU - U³`, integrated with exponential time
//! differencing. `Δ̃` multiplies mode `m` by `-|k(m)|²`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convolution::triple_convolution;
use crate::error::{Error, Result};
use crate::etd::{phi123, Scheme, StepperConfig};
use crate::field::{ActiveModeSet, HullField};
use crate::lattice::FrequencyModule;
use crate::stepping::Evolve;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShParams {
    pub lambda: f64,
}

/// `σ(m) = λ - (|k(m)|² - 1)²`
pub fn linear_symbol(module: &FrequencyModule, m: &[i64], lambda: f64) -> f64 {
    symbol_from_k2(module.wavenumber_sq(m), lambda)
}

fn symbol_from_k2(k2: f64, lambda: f64) -> f64 {
    let s = k2 - 1.0;
    lambda - s * s
}

/// `σ·a - u³`, with the cube taken pseudospectrally.
pub fn rhs(field: &HullField, lambda: f64) -> HullField {
    rhs_with_cube(field, field.cube(), lambda)
}

/// [`rhs`] with `u³` supplied by the caller.
pub(crate) fn rhs_with_cube(field: &HullField, cube: HullField, lambda: f64) -> HullField {
    let mut out = cube;
    let symmetric = out.is_symmetric();
    let k2 = field.active().wavenumbers_sq().to_vec();
    for ((o, a), k2) in out
        .coefficients_mut()
        .iter_mut()
        .zip(field.coefficients())
        .zip(k2)
    {
        *o = a * symbol_from_k2(k2, lambda) - *o;
    }
    out.set_symmetric_flag(symmetric);
    out
}

/// `u³` by direct triple convolution (amplitude-equation form).
pub fn cubic_direct(field: &HullField) -> Result<HullField> {
    triple_convolution(field, field, field)
}

/// Per-mode ETD weights for one step size.
#[derive(Clone, Debug)]
struct EtdWeights {
    h: f64,
    exp_full: Vec<f64>,
    exp_half: Vec<f64>,
    /// ETDRK2: `h φ1`, `h φ2`. ETDRK4: `(h/2) φ1(z/2)`, and the three
    /// quadrature weights `h f1`, `h f2`, `h f3`.
    w: [Vec<f64>; 4],
}

impl EtdWeights {
    fn new(symbols: &[f64], h: f64, scheme: Scheme, threshold: f64) -> Self {
        let n = symbols.len();
        let mut exp_full = Vec::with_capacity(n);
        let mut exp_half = Vec::with_capacity(n);
        let mut w: [Vec<f64>; 4] = Default::default();
        for &s in symbols {
            let z = s * h;
            exp_full.push(z.exp());
            exp_half.push((0.5 * z).exp());
            let [p1, p2, p3] = phi123(z, threshold);
            match scheme {
                Scheme::Etdrk2 => {
                    w[0].push(h * p1);
                    w[1].push(h * p2);
                }
                Scheme::Etdrk4 => {
                    let half = phi123(0.5 * z, threshold)[0];
                    w[0].push(0.5 * h * half);
                    w[1].push(h * (p1 - 3.0 * p2 + 4.0 * p3));
                    w[2].push(h * (p2 - 2.0 * p3));
                    w[3].push(h * (-p2 + 4.0 * p3));
                }
            }
        }
        EtdWeights {
            h,
            exp_full,
            exp_half,
            w,
        }
    }
}

/// Swift-Hohenberg state: the hull field plus time, parameter and stepper.
#[derive(Clone, Debug)]
pub struct SolverState {
    pub field: HullField,
    pub t: f64,
    pub params: ShParams,
    pub stepper: StepperConfig,
    symbols: Vec<f64>,
    weights: Option<EtdWeights>,
}

impl SolverState {
    pub fn new(field: HullField, params: ShParams, stepper: StepperConfig) -> Result<Self> {
        if !(stepper.dt > 0.0 && stepper.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt = {}", stepper.dt)));
        }
        let symbols = field
            .active()
            .wavenumbers_sq()
            .iter()
            .map(|&k2| symbol_from_k2(k2, params.lambda))
            .collect();
        Ok(SolverState {
            field,
            t: 0.0,
            params,
            stepper,
            symbols,
            weights: None,
        })
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn rhs(&self) -> HullField {
        rhs(&self.field, self.params.lambda)
    }

    /// One ETD step of size `h`; Hermitian symmetry is restored exactly and
    /// the H-symmetry flag is carried over.
    pub fn advance(&mut self, h: f64) -> Result<()> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("step size {h}")));
        }
        let stale = self.weights.as_ref().is_none_or(|w| w.h != h);
        if stale {
            self.weights = Some(EtdWeights::new(
                &self.symbols,
                h,
                self.stepper.scheme,
                self.stepper.phi_series_threshold,
            ));
        }
        let w = self.weights.as_ref().expect("weights just built");
        let symmetric = self.field.is_symmetric();
        let u = &self.field;
        let nl = |f: &HullField| f.cube().scale(-1.0);
        let mut next = match self.stepper.scheme {
            Scheme::Etdrk2 => {
                let nu = nl(u);
                let a = combine(u, &[(&w.exp_full, u), (&w.w[0], &nu)]);
                let na = nl(&a);
                let mut out = a.clone();
                for (i, o) in out.coefficients_mut().iter_mut().enumerate() {
                    *o += (na.coefficients()[i] - nu.coefficients()[i]) * w.w[1][i];
                }
                out
            }
            Scheme::Etdrk4 => {
                let nu = nl(u);
                let a = combine(u, &[(&w.exp_half, u), (&w.w[0], &nu)]);
                let na = nl(&a);
                let b = combine(u, &[(&w.exp_half, u), (&w.w[0], &na)]);
                let nb = nl(&b);
                let mut c = combine(u, &[(&w.exp_half, &a)]);
                for (i, o) in c.coefficients_mut().iter_mut().enumerate() {
                    *o += (nb.coefficients()[i] * 2.0 - nu.coefficients()[i]) * w.w[0][i];
                }
                let nc = nl(&c);
                let mut out = combine(u, &[(&w.exp_full, u), (&w.w[1], &nu), (&w.w[3], &nc)]);
                for (i, o) in out.coefficients_mut().iter_mut().enumerate() {
                    *o += (na.coefficients()[i] + nb.coefficients()[i]) * (2.0 * w.w[2][i]);
                }
                out
            }
        };
        next.enforce_hermitian();
        next.set_symmetric_flag(symmetric);
        let t_next = self.t + h;
        if !next.is_finite() {
            return Err(Error::NonFiniteState(t_next));
        }
        self.field = next;
        self.t = t_next;
        Ok(())
    }

    /// One step with the configured `dt`.
    pub fn step(&mut self) -> Result<()> {
        self.advance(self.stepper.dt)
    }
}

/// `Σ_j diag(w_j) f_j` over the active set of `like`.
fn combine(like: &HullField, terms: &[(&Vec<f64>, &HullField)]) -> HullField {
    let mut out = HullField::zeros(like.active().clone());
    let c = out.coefficients_mut();
    for (w, f) in terms {
        for ((o, a), s) in c.iter_mut().zip(f.coefficients()).zip(w.iter()) {
            *o += a * *s;
        }
    }
    out
}

/// One step of size `dt` on a copy of `state`.
pub fn step(state: &SolverState, dt: f64) -> Result<SolverState> {
    let mut next = state.clone();
    next.advance(dt)?;
    Ok(next)
}

/// Integrates to `t + duration`; see [`crate::stepping::integrate`].
pub fn integrate<R>(
    state: &mut SolverState,
    duration: f64,
    every: usize,
    observe: impl FnMut(&SolverState) -> R,
) -> Result<Vec<R>> {
    crate::stepping::integrate(state, duration, every, observe)
}

impl Evolve for SolverState {
    fn time(&self) -> f64 {
        self.t
    }

    fn set_time(&mut self, t: f64) {
        self.t = t;
    }

    fn dt(&self) -> f64 {
        self.stepper.dt
    }

    fn advance(&mut self, h: f64) -> Result<()> {
        SolverState::advance(self, h)
    }
}

/// H-symmetric field on the orbit of the base generator `e_0`, uniform
/// amplitude, `||u||_{ℓ²} = target_l2`. With `noise > 0`, seeded uniform
/// noise of modulus at most `noise` is added on every active mode before
/// symmetrizing and rescaling.
pub fn orbit_field(active: Arc<ActiveModeSet>, target_l2: f64, noise: f64, seed: u64) -> Result<HullField> {
    let p = active.rank();
    let mut e0 = vec![0i64; p];
    e0[0] = 1;
    let mut f = HullField::zeros(active.clone());
    f.set(&e0, Complex64::new(1.0, 0.0))?;
    if noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noisy = f.coefficients_mut();
        let c = noise / 2f64.sqrt();
        for i in 0..active.len() {
            let j = active.negation(i);
            if j < i {
                continue;
            }
            let z = Complex64::new(rng.gen_range(-c..=c), if i == j { 0.0 } else { rng.gen_range(-c..=c) });
            noisy[i] += z;
            if i != j {
                noisy[j] += z.conj();
            }
        }
    }
    let s = f.symmetrize();
    let norm = s.l2_norm();
    if norm == 0.0 {
        return Ok(s);
    }
    let mut out = s.scale(target_l2 / norm);
    out.set_symmetric_flag(true);
    Ok(out)
}

/// Quasicrystalline initial data `a√λ Σ_γ e^{iγk0·x}` with amplitude chosen
/// so that `||u||_{ℓ²} = ρ√λ`; `δ > 0` perturbs every active mode by at
/// most `δ√λ` before symmetrizing and rescaling.
pub fn quasicrystal_ic(active: Arc<ActiveModeSet>, lambda: f64, rho: f64, delta: f64, seed: u64) -> Result<HullField> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("quasicrystal IC needs λ > 0, got {lambda}")));
    }
    if !(rho > 0.0 && rho <= 1.0) || !(delta >= 0.0) {
        return Err(Error::InvalidArgument(format!("ρ = {rho}, δ = {delta}")));
    }
    let root = lambda.sqrt();
    orbit_field(active, rho * root, delta * root, seed)
}

/// Seeded random Hermitian field rescaled to `||u||_{ℓ²} = target_l2`.
pub fn random_ic(active: Arc<ActiveModeSet>, target_l2: f64, seed: u64) -> HullField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = HullField::random(active, &mut rng);
    let n = f.l2_norm();
    f.scale(target_l2 / n)
}

/// Early-time growth of the branch leaving `u = 0` along the critical orbit.
#[derive(Clone, Debug)]
pub struct BranchGrowth {
    pub times: Vec<f64>,
    pub l2: Vec<f64>,
    /// Least-squares slope of `ln ||u||_{ℓ²}`; `None` for the zero branch.
    pub rate: Option<f64>,
}

/// Integrates from the symmetrized critical orbit with `||u||_{ℓ²} = δ`.
pub fn branch_growth(
    active: Arc<ActiveModeSet>,
    lambda: f64,
    delta: f64,
    duration: f64,
    stepper: StepperConfig,
) -> Result<BranchGrowth> {
    if !(0.0..=1e-4).contains(&delta) {
        return Err(Error::InvalidArgument(format!("branch amplitude δ = {delta} > 1e-4")));
    }
    let field = orbit_field(active, delta, 0.0, 0)?;
    let mut state = SolverState::new(field, ShParams { lambda }, stepper)?;
    let samples = integrate(&mut state, duration, 10, |s| (s.t, s.field.l2_norm()))?;
    let (times, l2): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
    let rate = if l2.iter().all(|&x| x > 0.0) {
        Some(fit_log_slope(&times, &l2))
    } else {
        None
    };
    Ok(BranchGrowth { times, l2, rate })
}

/// Least-squares slope of `ln y` against `t`.
pub fn fit_log_slope(t: &[f64], y: &[f64]) -> f64 {
    let n = t.len() as f64;
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mt = t.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = t.iter().zip(&ly).map(|(a, b)| (a - mt) * (b - my)).sum();
    let var: f64 = t.iter().map(|a| (a - mt) * (a - mt)).sum();
    cov / var
}
