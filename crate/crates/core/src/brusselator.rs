//! Brusselator reaction-diffusion in hull form,
//! `u_t = d1 Δ̃u + A - (B+1)u + u²v`, `v_t = d2 Δ̃v + Bu - u²v`,
//! plus the linear (Turing) analysis of its homogeneous steady state.
//!
//! Fields are stored in absolute variables: the constant mode carries the
//! forcing `A` and the steady-state offset.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::etd::{divided_difference, phi123, StepperConfig};
use crate::field::{ActiveModeSet, HullField};
use crate::stepping::Evolve;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BrusselatorParams {
    pub a: f64,
    pub b: f64,
    pub d1: f64,
    pub d2: f64,
}

impl BrusselatorParams {
    pub fn new(a: f64, b: f64, d1: f64, d2: f64) -> Result<Self> {
        for (name, x) in [("A", a), ("B", b), ("d1", d1), ("d2", d2)] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} = {x} must be positive")));
            }
        }
        Ok(BrusselatorParams { a, b, d1, d2 })
    }

    /// `η = √(d1/d2)`
    pub fn eta(&self) -> f64 {
        (self.d1 / self.d2).sqrt()
    }

    pub fn with_b(self, b: f64) -> Self {
        BrusselatorParams { b, ..self }
    }
}

/// Homogeneous steady state `(A, B/A)`.
pub fn steady_state(params: &BrusselatorParams) -> (f64, f64) {
    (params.a, params.b / params.a)
}

/// Reaction terms `(A - (B+1)u + u²v, Bu - u²v)`.
pub fn kinetics(params: &BrusselatorParams, u: f64, v: f64) -> (f64, f64) {
    let uuv = u * u * v;
    (params.a - (params.b + 1.0) * u + uuv, params.b * u - uuv)
}

/// Linearization at the steady state for a mode with `|k|² = κ²`.
pub fn dispersion_matrix(params: &BrusselatorParams, k2: f64) -> [[f64; 2]; 2] {
    let a2 = params.a * params.a;
    [
        [-params.d1 * k2 + params.b - 1.0, a2],
        [-params.b, -params.d2 * k2 - a2],
    ]
}

fn det2(m: &[[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Largest real part of the eigenvalues of `dispersion_matrix(κ²)`.
pub fn max_growth_rate(params: &BrusselatorParams, k2: f64) -> f64 {
    let m = dispersion_matrix(params, k2);
    let half_tr = 0.5 * (m[0][0] + m[1][1]);
    let disc = half_tr * half_tr - det2(&m);
    if disc >= 0.0 {
        half_tr + disc.sqrt()
    } else {
        half_tr
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Minimizer of a convex function on `[0, ∞)`: bracket by doubling, golden
/// section, then a parabolic vertex through the final three points (exact
/// when `f` is quadratic).
fn minimize_convex(f: impl Fn(f64) -> f64) -> Result<f64> {
    let mut hi = 1.0;
    let mut steps = 0;
    while f(2.0 * hi) < f(hi) {
        hi *= 2.0;
        steps += 1;
        if steps > 200 || !hi.is_finite() {
            return Err(Error::NoBracket);
        }
    }
    let (mut lo, mut hi) = (0.0, 2.0 * hi);
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= 1e-10 * (1.0 + hi.abs()) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    // parabolic polish on a symmetric stencil large enough to beat round-off
    let h = 1e-2 * (1.0 + x);
    let (fm, f0, fp) = (f(x - h), f(x), f(x + h));
    let curv = fp - 2.0 * f0 + fm;
    let polished = if curv > 0.0 {
        x - 0.5 * h * (fp - fm) / curv
    } else {
        x
    };
    Ok(polished.max(0.0))
}

/// Minimizer and minimum of `det(dispersion_matrix(κ²))` over `κ² >= 0`.
fn det_minimum(params: &BrusselatorParams) -> Result<(f64, f64)> {
    let f = |k2: f64| det2(&dispersion_matrix(params, k2));
    let k2 = minimize_convex(f)?;
    Ok((k2, f(k2)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TuringAnalysis {
    pub eta: f64,
    /// Onset `B_c` from the dispersion scan.
    pub b_c: f64,
    /// Critical wavenumber from the dispersion scan.
    pub k_c: f64,
    /// Unit kernel vector of the critical matrix, first component negative.
    pub critical_eigenvector: [f64; 2],
    /// Turing onset precedes the homogeneous Hopf threshold `B = 1 + A²`.
    pub turing_first: bool,
    /// `(1 + Aη)²`
    pub b_c_closed_form: f64,
    /// `(A/√(d1 d2))^{1/2}`
    pub k_c_closed_form: f64,
    /// Disagreements between the scan and commonly quoted closed forms.
    pub notes: Vec<String>,
}

/// Locates the Turing onset for `(A, d1, d2)`; the `b` field of `params`
/// is ignored.
pub fn turing_analysis(params: &BrusselatorParams) -> Result<TuringAnalysis> {
    let p = BrusselatorParams::new(params.a, 1.0, params.d1, params.d2)?;
    let (a, d1, d2) = (p.a, p.d1, p.d2);
    let eta = p.eta();
    // min det is decreasing in B; at B = 1 it is A² > 0
    let min_det = |b: f64| det_minimum(&p.with_b(b)).map(|r| r.1);
    let mut lo = 1.0;
    let mut hi = 2.0;
    while min_det(hi)? >= 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e15 {
            return Err(Error::NoBracket);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if min_det(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let b_c = 0.5 * (lo + hi);
    let crit = p.with_b(b_c);
    let (k2_c, _) = det_minimum(&crit)?;
    if !(k2_c > 0.0) {
        return Err(Error::NoBracket);
    }
    let k_c = k2_c.sqrt();
    let m = dispersion_matrix(&crit, k2_c);
    let row = if m[0][0].hypot(m[0][1]) >= m[1][0].hypot(m[1][1]) {
        m[0]
    } else {
        m[1]
    };
    let (mut x, mut y) = (row[1], -row[0]);
    let n = x.hypot(y);
    if x > 0.0 {
        x = -x;
        y = -y;
    }
    let b_c_closed_form = (1.0 + a * eta).powi(2);
    let k_c_closed_form = (a / (d1 * d2).sqrt()).sqrt();
    let mut notes = Vec::new();
    let quoted_k = (a / eta).sqrt();
    if (quoted_k - k_c).abs() > 1e-8 * k_c {
        notes.push(format!("k_c = sqrt(A/eta) = {quoted_k} disagrees with the dispersion minimizer {k_c} (d2 != 1)"));
    }
    let in_quoted_window = 1.0 < eta && eta < a;
    if in_quoted_window && b_c >= 1.0 + a * a {
        notes.push(format!(
            "1 < eta < A, yet B_c = {b_c} >= 1 + A^2: the homogeneous Hopf instability comes first"
        ));
    }
    Ok(TuringAnalysis {
        eta,
        b_c,
        k_c,
        critical_eigenvector: [x / n, y / n],
        turing_first: b_c < 1.0 + a * a,
        b_c_closed_form,
        k_c_closed_form,
        notes,
    })
}

/// `(A δ_0 + u²v, -u²v)`, the explicitly treated part of the right-hand side.
fn nonlinear(params: &BrusselatorParams, u: &HullField, v: &HullField) -> Result<(HullField, HullField)> {
    let uuv = u.triple_product(u, v)?;
    let mut nu = uuv.clone();
    let zero = u.active().zero_position();
    nu.coefficients_mut()[zero] += params.a;
    nu.set_symmetric_flag(uuv.is_symmetric());
    Ok((nu, uuv.scale(-1.0)))
}

/// Exact right-hand side `(u_t, v_t)` in coefficient form.
pub fn bruss_rhs(state: &BrusselatorState) -> Result<(HullField, HullField)> {
    let p = &state.params;
    let (mut du, mut dv) = nonlinear(p, &state.u, &state.v)?;
    let (us, vs) = (du.is_symmetric(), dv.is_symmetric());
    let k2 = state.u.active().wavenumbers_sq();
    let (a, b) = (state.u.coefficients(), state.v.coefficients());
    for (i, x) in du.coefficients_mut().iter_mut().enumerate() {
        *x += a[i] * (-p.d1 * k2[i] - (p.b + 1.0));
    }
    for (i, x) in dv.coefficients_mut().iter_mut().enumerate() {
        *x += b[i] * (-p.d2 * k2[i]) + a[i] * p.b;
    }
    du.set_symmetric_flag(us && state.u.is_symmetric());
    dv.set_symmetric_flag(vs && state.v.is_symmetric());
    Ok((du, dv))
}

/// `f(hL)` for `L = [[α, 0], [B, β]]` is `[[f(hα), 0], [c, f(hβ)]]` with
/// `c = hB·f[hα, hβ]` (divided difference).
#[derive(Clone, Copy, Debug)]
struct Lower {
    uu: f64,
    vu: f64,
    vv: f64,
}

#[derive(Clone, Debug)]
struct Bweights {
    h: f64,
    exp: Vec<Lower>,
    /// `h φ1(hL)`
    phi: Vec<Lower>,
}

impl Bweights {
    fn new(params: &BrusselatorParams, k2: &[f64], h: f64, threshold: f64) -> Self {
        let p1 = |z: f64| phi123(z, threshold)[0];
        let dp1 = |z: f64| {
            let [a, b, _] = phi123(z, threshold);
            a - b
        };
        let mut exp = Vec::with_capacity(k2.len());
        let mut phi = Vec::with_capacity(k2.len());
        for &k2 in k2 {
            let za = h * (-params.d1 * k2 - (params.b + 1.0));
            let zb = h * (-params.d2 * k2);
            let c = h * params.b;
            exp.push(Lower {
                uu: za.exp(),
                vu: c * divided_difference(f64::exp, f64::exp, za, zb),
                vv: zb.exp(),
            });
            phi.push(Lower {
                uu: h * p1(za),
                vu: h * c * divided_difference(p1, dp1, za, zb),
                vv: h * p1(zb),
            });
        }
        Bweights { h, exp, phi }
    }
}

/// Brusselator state on a shared active set. Time stepping is the
/// first-order exponential integrator `w ← e^{hL}w + hφ1(hL)N(w)`;
/// `stepper.scheme` is not consulted.
#[derive(Clone, Debug)]
pub struct BrusselatorState {
    pub u: HullField,
    pub v: HullField,
    pub t: f64,
    pub params: BrusselatorParams,
    pub stepper: StepperConfig,
    weights: Option<Bweights>,
}

impl BrusselatorState {
    pub fn new(u: HullField, v: HullField, params: BrusselatorParams, stepper: StepperConfig) -> Result<Self> {
        u.check_same_active(&v)?;
        let params = BrusselatorParams::new(params.a, params.b, params.d1, params.d2)?;
        if !(stepper.dt > 0.0 && stepper.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt = {}", stepper.dt)));
        }
        Ok(BrusselatorState {
            u,
            v,
            t: 0.0,
            params,
            stepper,
            weights: None,
        })
    }

    /// Constant fields at the homogeneous steady state.
    pub fn steady(active: Arc<ActiveModeSet>, params: BrusselatorParams, stepper: StepperConfig) -> Result<Self> {
        let (us, vs) = steady_state(&params);
        let mut u = HullField::zeros(active.clone());
        let mut v = HullField::zeros(active);
        let zero = vec![0; u.active().rank()];
        u.set(&zero, Complex64::new(us, 0.0))?;
        v.set(&zero, Complex64::new(vs, 0.0))?;
        u.set_symmetric_flag(true);
        v.set_symmetric_flag(true);
        Self::new(u, v, params, stepper)
    }

    pub fn active(&self) -> &Arc<ActiveModeSet> {
        self.u.active()
    }

    pub fn advance(&mut self, h: f64) -> Result<()> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("step size {h}")));
        }
        if self.weights.as_ref().is_none_or(|w| w.h != h) {
            self.weights = Some(Bweights::new(
                &self.params,
                self.u.active().wavenumbers_sq(),
                h,
                self.stepper.phi_series_threshold,
            ));
        }
        let w = self.weights.as_ref().expect("weights just built");
        let (nu, nv) = nonlinear(&self.params, &self.u, &self.v)?;
        let symmetric = self.u.is_symmetric() && self.v.is_symmetric();
        let mut u = self.u.clone();
        let mut v = self.v.clone();
        {
            let (a, b) = (self.u.coefficients(), self.v.coefficients());
            let (na, nb) = (nu.coefficients(), nv.coefficients());
            for (i, x) in u.coefficients_mut().iter_mut().enumerate() {
                *x = a[i] * w.exp[i].uu + na[i] * w.phi[i].uu;
            }
            for (i, x) in v.coefficients_mut().iter_mut().enumerate() {
                *x = a[i] * w.exp[i].vu + b[i] * w.exp[i].vv + na[i] * w.phi[i].vu + nb[i] * w.phi[i].vv;
            }
        }
        u.enforce_hermitian();
        v.enforce_hermitian();
        u.set_symmetric_flag(symmetric);
        v.set_symmetric_flag(symmetric);
        let t_next = self.t + h;
        if !(u.is_finite() && v.is_finite()) {
            return Err(Error::NonFiniteState(t_next));
        }
        self.u = u;
        self.v = v;
        self.t = t_next;
        Ok(())
    }

    pub fn step(&mut self) -> Result<()> {
        self.advance(self.stepper.dt)
    }

    /// Minimum over the torus sample grid of both components.
    pub fn positivity_check(&self, resolution: usize) -> f64 {
        let (umin, _) = self.u.torus_min_max(resolution);
        let (vmin, _) = self.v.torus_min_max(resolution);
        umin.min(vmin)
    }
}

impl Evolve for BrusselatorState {
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
        BrusselatorState::advance(self, h)
    }
}

/// One step of size `dt` on a copy of `state`.
pub fn bruss_step(state: &BrusselatorState, dt: f64) -> Result<BrusselatorState> {
    let mut next = state.clone();
    next.advance(dt)?;
    Ok(next)
}

/// Integrates to `t + duration`; see [`crate::stepping::integrate`].
pub fn bruss_integrate<R>(
    state: &mut BrusselatorState,
    duration: f64,
    every: usize,
    observe: impl FnMut(&BrusselatorState) -> R,
) -> Result<Vec<R>> {
    crate::stepping::integrate(state, duration, every, observe)
}

/// Steady state plus `amplitude·(e_u, e_v)` on the H-orbit of the base
/// generator, where `(e_u, e_v)` is `direction`; each orbit mode carries the
/// real amplitude `amplitude`, so `u - ū = 2·amplitude·e_u Σ cos(γk0·x)`.
pub fn steady_plus_orbit(
    active: Arc<ActiveModeSet>,
    params: BrusselatorParams,
    stepper: StepperConfig,
    direction: [f64; 2],
    amplitude: f64,
) -> Result<BrusselatorState> {
    let mut state = BrusselatorState::steady(active.clone(), params, stepper)?;
    let orbit = crate::sh::orbit_field(active, 1.0, 0.0, 0)?;
    let per_mode = orbit.coefficients().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let bump = orbit.scale(amplitude / per_mode);
    state.u = state.u.add_scaled(direction[0], &bump)?;
    state.v = state.v.add_scaled(direction[1], &bump)?;
    state.u.set_symmetric_flag(true);
    state.v.set_symmetric_flag(true);
    Ok(state)
}

/// Amplitude of the base generator mode, `|(a_{e0}, b_{e0})|`.
pub fn base_mode_amplitude(state: &BrusselatorState) -> f64 {
    let p = state.active().rank();
    let mut e0 = vec![0; p];
    e0[0] = 1;
    let a = state.u.get(&e0).map(|z| z.norm()).unwrap_or(0.0);
    let b = state.v.get(&e0).map(|z| z.norm()).unwrap_or(0.0);
    a.hypot(b)
}

#[cfg(test)]
mod tests {
    use rand::Rng;

    use super::*;
    use crate::convolution::triple_convolution;
    use crate::sh::fit_log_slope;
    use crate::testing::{module, seeded};

    fn reference() -> BrusselatorParams {
        BrusselatorParams::new(2.0, 4.0, 0.25, 1.0).unwrap()
    }

    /// Twelvefold active set with the base orbit at `|k| = k_c`.
    fn critical_set(k_c: f64, n: usize) -> Arc<ActiveModeSet> {
        let m = Arc::new(module("dihedral:12").scaled(k_c).unwrap());
        ActiveModeSet::new(m, n, f64::INFINITY).unwrap()
    }

    #[test]
    fn steady_state_values() {
        assert_eq!(steady_state(&BrusselatorParams::new(1.0, 1.0, 1.0, 1.0).unwrap()), (1.0, 1.0));
        let p = reference();
        assert_eq!(steady_state(&p), (2.0, 2.0));
        let (u, v) = steady_state(&p);
        assert_eq!(kinetics(&p, u, v), (0.0, 0.0));
    }

    #[test]
    fn dispersion_examples() {
        let p = reference();
        assert_eq!(dispersion_matrix(&p, 0.0), [[3.0, 4.0], [-4.0, -4.0]]);
        let m = dispersion_matrix(&p, 4.0);
        assert_eq!(m, [[2.0, 4.0], [-4.0, -8.0]]);
        assert_eq!(det2(&m), 0.0);
        let m0 = dispersion_matrix(&p, 0.0);
        assert_eq!(m0[0][0] + m0[1][1], p.b - 1.0 - p.a * p.a);
    }

    #[test]
    fn reference_onset() {
        let t = turing_analysis(&reference()).unwrap();
        assert_eq!(t.eta, 0.5);
        assert!((t.b_c - 4.0).abs() < 4e-8);
        assert!((t.k_c - 2.0).abs() < 2e-8);
        let e = t.critical_eigenvector;
        let want = [-2.0 / 5f64.sqrt(), 1.0 / 5f64.sqrt()];
        assert!((e[0] * want[1] - e[1] * want[0]).abs() < 1e-6);
        assert!(e[0] < 0.0);
        assert!(t.turing_first);
        assert!(t.notes.is_empty());
    }

    #[test]
    fn equal_diffusion_never_turing_first() {
        for a in [0.3, 1.0, 2.5, 7.0] {
            let t = turing_analysis(&BrusselatorParams::new(a, 1.0, 0.7, 0.7).unwrap()).unwrap();
            assert_eq!(t.eta, 1.0);
            assert!(!t.turing_first);
        }
    }

    #[test]
    fn closed_forms_for_random_triples() {
        let mut rng = seeded(3);
        for _ in 0..20 {
            let p = BrusselatorParams::new(
                rng.gen_range(0.2..5.0),
                1.0,
                rng.gen_range(0.05..3.0),
                rng.gen_range(0.05..3.0),
            )
            .unwrap();
            let t = turing_analysis(&p).unwrap();
            assert!((t.b_c - t.b_c_closed_form).abs() < 1e-8 * t.b_c_closed_form, "{p:?}");
            assert!((t.k_c - t.k_c_closed_form).abs() < 1e-8 * t.k_c_closed_form, "{p:?}");
            let m = dispersion_matrix(&p.with_b(t.b_c), t.k_c * t.k_c);
            let e = t.critical_eigenvector;
            for row in m {
                let scale = row[0].abs() + row[1].abs();
                assert!((row[0] * e[0] + row[1] * e[1]).abs() < 1e-8 * scale.max(1.0));
            }
        }
    }

    #[test]
    fn eigenvector_direction_when_d2_is_one() {
        let p = BrusselatorParams::new(1.7, 1.0, 0.4, 1.0).unwrap();
        let t = turing_analysis(&p).unwrap();
        let eta = p.eta();
        let (x, y) = (-p.a, p.a * eta * eta + eta);
        let e = t.critical_eigenvector;
        let sin = (e[0] * y - e[1] * x) / x.hypot(y);
        assert!(sin.abs() < 1e-6);
    }

    #[test]
    fn quoted_wavenumber_flagged_when_d2_differs() {
        let t = turing_analysis(&BrusselatorParams::new(2.0, 1.0, 0.5, 2.0).unwrap()).unwrap();
        assert!(!t.notes.is_empty());
    }

    #[test]
    fn rhs_at_steady_state_and_zero() {
        let p = reference();
        let a = critical_set(2.0, 1);
        let s = BrusselatorState::steady(a.clone(), p, StepperConfig::default()).unwrap();
        let (du, dv) = bruss_rhs(&s).unwrap();
        assert!(du.l1_norm() < 1e-14 && dv.l1_norm() < 1e-14);
        let z = BrusselatorState::new(HullField::zeros(a.clone()), HullField::zeros(a), p, StepperConfig::default()).unwrap();
        let (du, dv) = bruss_rhs(&z).unwrap();
        assert_eq!(du.get(&[0, 0, 0, 0]).unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(du.l1_norm(), 2.0);
        assert_eq!(dv.l1_norm(), 0.0);
    }

    #[test]
    fn rhs_matches_direct_convolution() {
        let a = ActiveModeSet::new(module("dihedral:4"), 2, f64::INFINITY).unwrap();
        let mut rng = seeded(11);
        let u = HullField::random(a.clone(), &mut rng);
        let v = HullField::random(a.clone(), &mut rng);
        let p = reference();
        let s = BrusselatorState::new(u.clone(), v.clone(), p, StepperConfig::default()).unwrap();
        let (du, dv) = bruss_rhs(&s).unwrap();
        let uuv = triple_convolution(&u, &u, &v).unwrap();
        let (ca, cb, cc) = (u.coefficients(), v.coefficients(), uuv.coefficients());
        for i in 0..a.len() {
            let k2 = a.wavenumber_sq(i);
            let forcing = if i == a.zero_position() { p.a } else { 0.0 };
            let eu = ca[i] * (-p.d1 * k2 - p.b - 1.0) + cc[i] + forcing;
            let ev = cb[i] * (-p.d2 * k2) + ca[i] * p.b - cc[i];
            assert!((du.coefficients()[i] - eu).norm() < 1e-12);
            assert!((dv.coefficients()[i] - ev).norm() < 1e-12);
        }
    }

    #[test]
    fn lower_triangular_exponential_matches_series() {
        // e^{hL} by Taylor series of the 2x2 matrix
        let p = reference();
        for (k2, h) in [(0.0, 0.1), (3.0, 0.5), (5.0 / 0.75, 0.2), (20.0, 0.01)] {
            let w = Bweights::new(&p, &[k2], h, 1e-2);
            let l = [[h * (-p.d1 * k2 - p.b - 1.0), 0.0], [h * p.b, h * (-p.d2 * k2)]];
            let mut term = [[1.0, 0.0], [0.0, 1.0]];
            let mut exp = term;
            let mut phi = term;
            for j in 1..60 {
                let mut next = [[0.0; 2]; 2];
                for r in 0..2 {
                    for c in 0..2 {
                        next[r][c] = (0..2).map(|q| term[r][q] * l[q][c]).sum::<f64>() / j as f64;
                    }
                }
                term = next;
                for r in 0..2 {
                    for c in 0..2 {
                        exp[r][c] += term[r][c];
                        phi[r][c] += term[r][c] / (j + 1) as f64;
                    }
                }
            }
            let e = w.exp[0];
            let f = w.phi[0];
            assert!((e.uu - exp[0][0]).abs() < 1e-12);
            assert!((e.vu - exp[1][0]).abs() < 1e-9);
            assert!((e.vv - exp[1][1]).abs() < 1e-12);
            assert!((f.uu / h - phi[0][0]).abs() < 1e-12);
            assert!((f.vu / h - phi[1][0]).abs() < 1e-9);
            assert!((f.vv / h - phi[1][1]).abs() < 1e-12);
        }
    }

    #[test]
    fn steady_state_is_fixed() {
        let a = critical_set(2.0, 1);
        let mut s = BrusselatorState::steady(a, reference(), StepperConfig::default()).unwrap();
        let u0 = s.u.clone();
        let v0 = s.v.clone();
        bruss_integrate(&mut s, 10.0, 100, |_| ()).unwrap();
        assert!(s.u.max_abs_difference(&u0).unwrap() < 1e-12);
        assert!(s.v.max_abs_difference(&v0).unwrap() < 1e-12);
        assert!((s.t - 10.0).abs() < 1e-12);
    }

    fn growth_rate(b_factor: f64) -> (f64, f64) {
        let base = reference();
        let t = turing_analysis(&base).unwrap();
        let p = base.with_b(b_factor * t.b_c);
        let a = critical_set(t.k_c, 1);
        let mut s = steady_plus_orbit(a, p, StepperConfig::default(), t.critical_eigenvector, 1e-6).unwrap();
        let samples = bruss_integrate(&mut s, 20.0, 50, |s| (s.t, base_mode_amplitude(s))).unwrap();
        let late: Vec<_> = samples.into_iter().filter(|(t, _)| *t >= 2.0).collect();
        let (ts, ys): (Vec<f64>, Vec<f64>) = late.into_iter().unzip();
        (fit_log_slope(&ts, &ys), max_growth_rate(&p, t.k_c * t.k_c))
    }

    #[test]
    fn near_onset_growth_matches_dispersion() {
        let (measured, predicted) = growth_rate(1.05);
        assert!(predicted > 0.0);
        assert!((measured - predicted).abs() <= 0.05 * predicted, "{measured} vs {predicted}");
    }

    #[test]
    fn subcritical_perturbation_decays() {
        let (measured, predicted) = growth_rate(0.9);
        assert!(predicted < 0.0 && measured < 0.0);
    }

    #[test]
    fn positivity_and_comparison_bound() {
        let p = reference().with_b(3.0);
        let a = critical_set(2.0, 1);
        let s0 = steady_plus_orbit(a, p, StepperConfig::default(), [1.0, 0.5], 0.05).unwrap();
        let mut s = s0.clone();
        assert!(s.positivity_check(16) > 0.0);
        let lower = 0.5 * p.a / (p.b + 1.0);
        let mins = bruss_integrate(&mut s, 10.0, 100, |s| (s.t, s.positivity_check(16), s.u.torus_min_max(16).0)).unwrap();
        for (t, m, mu) in mins {
            assert!(m >= -1e-6);
            if t >= 1.0 {
                assert!(mu >= lower);
            }
        }
        let st = BrusselatorState::steady(s0.active().clone(), p, StepperConfig::default()).unwrap();
        assert!((st.positivity_check(8) - 1.5).abs() < 1e-14);
    }

    #[test]
    fn symmetric_fields_stay_symmetric() {
        let t = turing_analysis(&reference()).unwrap();
        let p = reference().with_b(1.1 * t.b_c);
        let a = critical_set(t.k_c, 1);
        let mut s = steady_plus_orbit(a, p, StepperConfig::default(), t.critical_eigenvector, 0.01).unwrap();
        for _ in 0..1000 {
            s.step().unwrap();
        }
        assert!(s.u.symmetry_drift() <= 1e-10);
        assert!(s.v.symmetry_drift() <= 1e-10);
    }
}
