//! Per-sample diagnostics and the inequality checks run over trajectories.
//!
//! Checks are pure functions of a recorded trajectory. Each produces a
//! [`CheckReport`] whose `worst_slack` is the largest violation margin over
//! the samples (non-positive means the inequality holds exactly) and whose
//! verdict is `worst_slack <= tolerance`.

use std::fmt;

use crate::brusselator::{bruss_rhs, BrusselatorState};
use crate::error::{Error, Result};
use crate::field::{ConditionIII, HullField};
use crate::lattice::{integer_rank, real_rank};
use crate::sh::{rhs_with_cube, SolverState};

/// Default Sobolev index for recorded `H^s` norms.
pub const DEFAULT_SOBOLEV_INDEX: f64 = 3.0;

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub l2: f64,
    pub l1: f64,
    pub hs: f64,
    /// `P_λ(u)`; zero for the Brusselator, which has no potential.
    pub energy: f64,
    /// `||∂_t u||_{ℓ²}` (both components for the Brusselator).
    pub rhs_l2: f64,
    pub grad_hull_sq: f64,
    pub sym_drift: f64,
    /// Extremes of `U` over the padded torus grid.
    pub min_u: f64,
    pub max_u: f64,
    /// Brusselator only.
    pub v_range: Option<(f64, f64)>,
}

fn grid_min_max(f: &HullField) -> (f64, f64) {
    min_max(&f.padded_values())
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

fn base_record(t: f64, u: &HullField, values: &[f64], s: f64) -> DiagnosticsRecord {
    let (min_u, max_u) = min_max(values);
    DiagnosticsRecord {
        t,
        l2: u.l2_norm(),
        l1: u.l1_norm(),
        hs: u.hs_norm(s),
        energy: 0.0,
        rhs_l2: 0.0,
        grad_hull_sq: u.hull_gradient_sq(),
        sym_drift: u.symmetry_drift(),
        min_u,
        max_u,
        v_range: None,
    }
}

/// Diagnostics of a Swift-Hohenberg state with `H^s` index `s`.
pub fn record(state: &SolverState, s: f64) -> DiagnosticsRecord {
    let u = &state.field;
    let lambda = state.params.lambda;
    let values = u.padded_values();
    DiagnosticsRecord {
        energy: u.energy_from_values(lambda, &values),
        rhs_l2: rhs_with_cube(u, u.cube_from_values(&values), lambda).l2_norm(),
        ..base_record(state.t, u, &values, s)
    }
}

/// Diagnostics of a Brusselator state; norms refer to `u`, except that
/// `rhs_l2` and `sym_drift` cover both components.
pub fn record_brusselator(state: &BrusselatorState, s: f64) -> Result<DiagnosticsRecord> {
    let (du, dv) = bruss_rhs(state)?;
    Ok(DiagnosticsRecord {
        rhs_l2: (du.l2_norm_sq() + dv.l2_norm_sq()).sqrt(),
        sym_drift: state.u.symmetry_drift().max(state.v.symmetry_drift()),
        v_range: Some(grid_min_max(&state.v)),
        ..base_record(state.t, &state.u, &state.u.padded_values(), s)
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub worst_slack: f64,
    /// Time of the worst slack.
    pub at: f64,
    pub tolerance: f64,
    /// Free-form measured quantities.
    pub detail: String,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, worst_slack: f64, at: f64, tolerance: f64) -> Self {
        CheckReport {
            name: name.into(),
            passed: worst_slack <= tolerance,
            worst_slack,
            at,
            tolerance,
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    /// Report from `(t, slack)` samples; an empty list passes with slack
    /// `-inf`.
    fn from_slacks(name: &str, slacks: impl IntoIterator<Item = (f64, f64)>, tolerance: f64) -> Self {
        let mut worst = (f64::NAN, f64::NEG_INFINITY);
        for (t, s) in slacks {
            // NaN slack is a failure
            if s.is_nan() {
                return CheckReport::new(name, f64::INFINITY, t, tolerance);
            }
            if s > worst.1 {
                worst = (t, s);
            }
        }
        CheckReport::new(name, worst.1, worst.0, tolerance)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: worst_slack = {:.3e} at t = {} (tolerance {:.1e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.worst_slack,
            self.at,
            self.tolerance
        )?;
        if !self.detail.is_empty() {
            write!(f, "; {}", self.detail)?;
        }
        Ok(())
    }
}

/// `l2(t) <= e^{λt} l2(0)` for `λ < 0`.
pub fn check_decay_negative_lambda(traj: &[DiagnosticsRecord], lambda: f64) -> Result<CheckReport> {
    if !(lambda < 0.0) {
        return Err(Error::InvalidArgument(format!("λ = {lambda} must be negative")));
    }
    let Some(first) = traj.first() else {
        return Ok(CheckReport::from_slacks("decay_negative_lambda", [], 1e-9));
    };
    let slacks = traj
        .iter()
        .map(|r| (r.t, r.l2 - (lambda * (r.t - first.t)).exp() * first.l2));
    Ok(CheckReport::from_slacks("decay_negative_lambda", slacks, 1e-9))
}

/// `l2(t)² <= N0/(1 + N0 t)` with `N0 = l2(0)²`, for `λ = 0`.
pub fn check_decay_zero_lambda(traj: &[DiagnosticsRecord]) -> CheckReport {
    let Some(first) = traj.first() else {
        return CheckReport::from_slacks("decay_zero_lambda", [], 1e-9);
    };
    let n0 = first.l2 * first.l2;
    let slacks = traj
        .iter()
        .map(|r| (r.t, r.l2 * r.l2 - n0 / (1.0 + n0 * (r.t - first.t))));
    CheckReport::from_slacks("decay_zero_lambda", slacks, 1e-9)
}

/// Absorbing ball of radius `√λ`. If `l2(0) <= √λ` the ball must be
/// forward invariant; otherwise the trajectory must enter `(1+ε)√λ` and
/// stay there.
pub fn check_absorbing_ball(traj: &[DiagnosticsRecord], lambda: f64, eps: f64) -> Result<CheckReport> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("λ = {lambda} must be positive")));
    }
    let root = lambda.sqrt();
    let Some(first) = traj.first() else {
        return Ok(CheckReport::from_slacks("absorbing_ball", [], 1e-9));
    };
    if first.l2 <= root {
        let slacks = traj.iter().map(|r| (r.t, r.l2 - root));
        return Ok(CheckReport::from_slacks("absorbing_ball_invariance", slacks, 1e-9)
            .with_detail(format!("radius sqrt(lambda) = {root}")));
    }
    let radius = (1.0 + eps) * root;
    let entry = traj
        .iter()
        .position(|r| r.l2 <= radius)
        .ok_or(Error::NeverEnters(traj.last().map_or(0.0, |r| r.t)))?;
    let slacks = traj[entry..].iter().map(|r| (r.t, r.l2 - radius));
    Ok(CheckReport::from_slacks("absorbing_ball_entry", slacks, 1e-9).with_detail(format!(
        "radius (1+{eps})sqrt(lambda) = {radius}, entered at t = {}",
        traj[entry].t
    )))
}

/// Steps of size `dt` between two sample times.
fn steps_between(t0: f64, t1: f64, dt: f64) -> f64 {
    ((t1 - t0) / dt).round().max(1.0)
}

/// Energy monotonicity `ΔP <= 10·dt³` per step, and the dissipation
/// identity `|ΔP/Δt + ||u_t||²| <= C·dt` at interval midpoints with
/// `C = 10·max ||u_t||²` (midpoint value by the trapezoid average).
pub fn check_lyapunov(traj: &[DiagnosticsRecord], dt: f64) -> [CheckReport; 2] {
    let per_step = 10.0 * dt.powi(3);
    let mono = traj.windows(2).map(|w| {
        let n = steps_between(w[0].t, w[1].t, dt);
        // normalize to one step so a single tolerance applies
        (0.5 * (w[0].t + w[1].t), (w[1].energy - w[0].energy) / n)
    });
    let monotone = CheckReport::from_slacks("lyapunov_monotonicity", mono, per_step);
    let c = 10.0 * traj.iter().map(|r| r.rhs_l2 * r.rhs_l2).fold(0.0, f64::max);
    let ident = traj.windows(2).map(|w| {
        let dp = (w[1].energy - w[0].energy) / (w[1].t - w[0].t);
        let diss = 0.5 * (w[0].rhs_l2.powi(2) + w[1].rhs_l2.powi(2));
        (0.5 * (w[0].t + w[1].t), (dp + diss).abs())
    });
    let identity = CheckReport::from_slacks("lyapunov_identity", ident, c * dt)
        .with_detail(format!("C = {c:.6e}"));
    [monotone, identity]
}

/// Finite-difference energy inequality `dN/dt <= N(λ - N) + 10·dt²` with
/// `N = l2²`, evaluated at interval midpoints (tolerance adds `1e-9`).
pub fn check_energy_inequality(traj: &[DiagnosticsRecord], lambda: f64, dt: f64) -> CheckReport {
    let slacks = traj.windows(2).map(|w| {
        let (n0, n1) = (w[0].l2 * w[0].l2, w[1].l2 * w[1].l2);
        let dn = (n1 - n0) / (w[1].t - w[0].t);
        let nm = 0.5 * (n0 + n1);
        (0.5 * (w[0].t + w[1].t), dn - nm * (lambda - nm))
    });
    CheckReport::from_slacks(&format!("energy_inequality(lambda={lambda})"), slacks, 10.0 * dt * dt + 1e-9)
}

/// `Σ|m|²|a_m|² (t) <= e^{2λt}·Σ|m|²|a_m|² (0)`.
pub fn check_hull_gradient_growth(traj: &[DiagnosticsRecord], lambda: f64) -> CheckReport {
    let Some(first) = traj.first() else {
        return CheckReport::from_slacks("hull_gradient_growth", [], 1e-9);
    };
    let slacks = traj.iter().map(|r| {
        (r.t, r.grad_hull_sq - (2.0 * lambda * (r.t - first.t)).exp() * first.grad_hull_sq)
    });
    CheckReport::from_slacks("hull_gradient_growth", slacks, 1e-9)
}

/// `l1 <= C·||u||_{H^s}` with `C` from [`crate::field::l1_hs_bound_constant`].
pub fn check_l1_control(traj: &[DiagnosticsRecord], constant: f64) -> CheckReport {
    let slacks = traj.iter().map(|r| (r.t, r.l1 - constant * r.hs));
    CheckReport::from_slacks("l1_control", slacks, 1e-12).with_detail(format!("C(s) = {constant:.6e}"))
}

/// Lower and upper branch bounds: `inf l2/√λ >= floor` and
/// `sup l2 <= √λ`. The measured constant `sup l2/√λ` goes in the detail.
pub fn check_branch_bounds(traj: &[DiagnosticsRecord], lambda: f64, floor: f64) -> [CheckReport; 2] {
    let root = lambda.sqrt();
    let lower = traj.iter().map(|r| (r.t, floor - r.l2 / root));
    let upper = traj.iter().map(|r| (r.t, r.l2 - root));
    let c_h = traj.iter().map(|r| r.l2 / root).fold(0.0, f64::max);
    let inf = traj.iter().map(|r| r.l2 / root).fold(f64::INFINITY, f64::min);
    [
        CheckReport::from_slacks("branch_lower_bound", lower, 0.0)
            .with_detail(format!("inf l2/sqrt(lambda) = {inf:.6}")),
        CheckReport::from_slacks("branch_upper_bound", upper, 1e-9)
            .with_detail(format!("measured C_H = {c_h:.6}")),
    ]
}

/// Separation from constants, estimated as half the grid range of `U`,
/// stays at least `threshold` at every sample.
pub fn check_separation(traj: &[DiagnosticsRecord], threshold: f64) -> CheckReport {
    let slacks = traj.iter().map(|r| (r.t, threshold - 0.5 * (r.max_u - r.min_u)));
    CheckReport::from_slacks("separation_from_constants", slacks, 0.0)
        .with_detail(format!("threshold {threshold:.6}, padded-grid samples"))
}

/// Symmetry drift stays below `tolerance` at every sample.
pub fn check_symmetry(traj: &[DiagnosticsRecord], tolerance: f64) -> CheckReport {
    let slacks = traj.iter().map(|r| (r.t, r.sym_drift));
    CheckReport::from_slacks("symmetry_drift", slacks, tolerance)
}

/// Outcome of [`classify_quasicrystal`].
#[derive(Clone, Debug, PartialEq)]
pub struct QuasicrystalReport {
    /// Always true for a truncated field: finitely many modes.
    pub l1_finite: bool,
    /// Some non-constant mode is above the threshold used for (ii).
    pub nonconstant: bool,
    /// Threshold defining the support used for (ii).
    pub support_eps: f64,
    pub support_integer_rank: usize,
    pub support_real_rank: usize,
    /// The subgroup generated by the support is not uniformly discrete.
    pub condition_ii: bool,
    /// Condition (iii) per ε of the grid, in the order given.
    pub condition_iii: Vec<(f64, ConditionIII)>,
    /// Largest ε of the grid for which (iii) holds.
    pub best_eps: Option<f64>,
}

impl QuasicrystalReport {
    pub fn is_quasicrystal(&self) -> bool {
        self.l1_finite && self.nonconstant && self.condition_ii && self.best_eps.is_some()
    }
}

/// Conditions (i)-(iii) for a field. (ii) is evaluated on the support at the
/// best ε passing (iii), or at the smallest ε of the grid if none passes;
/// it holds iff the integer span of the support's indices has larger rank
/// than the real span of its wavevectors. (iii) checks density in the ball
/// of radius `m_radius` with module points enumerated up to `|m|∞ <= bound`.
pub fn classify_quasicrystal(
    field: &HullField,
    eps_grid: &[f64],
    m_radius: f64,
    r: f64,
    bound: i64,
) -> Result<QuasicrystalReport> {
    if eps_grid.is_empty() {
        return Err(Error::InvalidArgument("empty ε grid".into()));
    }
    let mut condition_iii = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        condition_iii.push((eps, field.condition_iii_check(m_radius, r, eps, bound)?));
    }
    let best_eps = condition_iii
        .iter()
        .filter(|(_, c)| c.passed)
        .map(|(e, _)| *e)
        .fold(None, |acc: Option<f64>, e| Some(acc.map_or(e, |a| a.max(e))));
    let smallest = eps_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let support_eps = best_eps.unwrap_or(smallest);
    let active = field.active();
    let support: Vec<Vec<i64>> = field
        .support_set(support_eps)
        .into_iter()
        .filter(|m| m.max_abs() > 0)
        .map(|m| m.0)
        .collect();
    let d = active.module().dimension();
    let wavevectors: Vec<Vec<f64>> = support.iter().map(|m| active.module().mode_wavevector(m)).collect();
    let support_integer_rank = integer_rank(&support);
    let support_real_rank = real_rank(&wavevectors, d);
    Ok(QuasicrystalReport {
        l1_finite: field.l1_norm().is_finite(),
        nonconstant: !support.is_empty(),
        support_eps,
        support_integer_rank,
        support_real_rank,
        condition_ii: support_integer_rank > support_real_rank,
        condition_iii,
        best_eps,
    })
}
