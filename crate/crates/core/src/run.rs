//! Builds modules, active sets and initial states from a [`RunConfig`] and
//! drives simulations that write diagnostics and snapshots to disk.

use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use crate::brusselator::{steady_plus_orbit, turing_analysis, BrusselatorParams, BrusselatorState};
use crate::diagnostics::{record, record_brusselator, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::etd::StepperConfig;
use crate::field::{ActiveModeSet, HullField};
use crate::io::config::{Equation, InitialCondition, RunConfig};
use crate::io::export::write_diagnostics_csv;
use crate::io::snapshot::{read_snapshot, write_snapshot};
use crate::lattice::{build_holohedry, generate_frequency_module, FrequencyModule};
use crate::sh::{orbit_field, quasicrystal_ic, random_ic, ShParams, SolverState};
use crate::stepping::{integrate, Evolve};

pub fn brusselator_params(c: &RunConfig) -> Result<BrusselatorParams> {
    BrusselatorParams::new(c.a, c.b, c.d1, c.d2)
}

/// Frequency module of a run. Brusselator modules are scaled so that the
/// base orbit sits at the critical wavenumber `k_c`.
pub fn build_module(c: &RunConfig) -> Result<Arc<FrequencyModule>> {
    let h = Arc::new(build_holohedry(&c.symmetry)?);
    let module = generate_frequency_module(h, &c.base_direction(), c.relation_bound)?;
    Ok(Arc::new(match c.equation {
        Equation::Sh => module,
        Equation::Brusselator => module.scaled(turing_analysis(&brusselator_params(c)?)?.k_c)?,
    }))
}

pub fn build_active(c: &RunConfig) -> Result<Arc<ActiveModeSet>> {
    ActiveModeSet::with_dealias(build_module(c)?, c.n, c.k_max, c.dealias)
}

pub fn stepper(c: &RunConfig) -> StepperConfig {
    StepperConfig::new(c.scheme, c.dt)
}

#[derive(Clone, Debug)]
pub enum SimState {
    Sh(SolverState),
    Brusselator(BrusselatorState),
}

impl SimState {
    pub fn time(&self) -> f64 {
        match self {
            SimState::Sh(s) => s.t,
            SimState::Brusselator(s) => s.t,
        }
    }

    pub fn fields(&self) -> Vec<&HullField> {
        match self {
            SimState::Sh(s) => vec![&s.field],
            SimState::Brusselator(s) => vec![&s.u, &s.v],
        }
    }

    pub fn record(&self, sobolev: f64) -> Result<DiagnosticsRecord> {
        match self {
            SimState::Sh(s) => Ok(record(s, sobolev)),
            SimState::Brusselator(s) => record_brusselator(s, sobolev),
        }
    }
}

impl Evolve for SimState {
    fn time(&self) -> f64 {
        SimState::time(self)
    }

    fn set_time(&mut self, t: f64) {
        match self {
            SimState::Sh(s) => s.t = t,
            SimState::Brusselator(s) => s.t = t,
        }
    }

    fn dt(&self) -> f64 {
        match self {
            SimState::Sh(s) => s.stepper.dt,
            SimState::Brusselator(s) => s.stepper.dt,
        }
    }

    fn advance(&mut self, h: f64) -> Result<()> {
        match self {
            SimState::Sh(s) => s.advance(h),
            SimState::Brusselator(s) => s.advance(h),
        }
    }
}

/// Fields and start time of a `file:` initial condition, checked against
/// the run's active set.
fn load_fields(path: &std::path::Path, active: &Arc<ActiveModeSet>, components: usize) -> Result<(Vec<HullField>, f64)> {
    let snap = read_snapshot(path)?;
    if snap.fields.len() != components {
        return Err(Error::InvalidArgument(format!(
            "snapshot has {} components, run needs {components}",
            snap.fields.len()
        )));
    }
    if !snap.fields[0].active().same_as(active) {
        return Err(Error::MismatchedActiveSets);
    }
    let fields = snap
        .fields
        .into_iter()
        .map(|f| {
            let symmetric = f.is_symmetric();
            let mut g = HullField::from_coefficients(active.clone(), f.coefficients().to_vec())?;
            g.set_symmetric_flag(symmetric);
            Ok(g)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((fields, snap.t))
}

pub fn initial_state(c: &RunConfig) -> Result<SimState> {
    let active = build_active(c)?;
    let stepper = stepper(c);
    match c.equation {
        Equation::Sh => {
            let params = ShParams { lambda: c.lambda };
            let (field, t) = match &c.ic {
                // below onset the amplitude is absolute rather than relative to √λ
                InitialCondition::Quasicrystal if c.lambda > 0.0 => {
                    (quasicrystal_ic(active, c.lambda, c.ic_amplitude, c.perturbation, c.seed)?, 0.0)
                }
                InitialCondition::Quasicrystal => {
                    (orbit_field(active, c.ic_amplitude, c.perturbation, c.seed)?, 0.0)
                }
                InitialCondition::Random => (random_ic(active, c.ic_amplitude, c.seed), 0.0),
                InitialCondition::File(p) => {
                    let (mut f, t) = load_fields(p, &active, 1)?;
                    (f.remove(0), t)
                }
                InitialCondition::SteadyPlusCritical => {
                    return Err(Error::InvalidArgument("steady-plus-critical needs equation = brusselator".into()))
                }
            };
            Ok(SimState::Sh(SolverState::new(field, params, stepper)?.with_time(t)))
        }
        Equation::Brusselator => {
            let params = brusselator_params(c)?;
            let state = match &c.ic {
                InitialCondition::SteadyPlusCritical => {
                    let dir = turing_analysis(&params)?.critical_eigenvector;
                    steady_plus_orbit(active, params, stepper, dir, c.ic_amplitude)?
                }
                InitialCondition::Random => {
                    let mut s = BrusselatorState::steady(active.clone(), params, stepper)?;
                    s.u = s.u.add_scaled(1.0, &random_ic(active.clone(), c.ic_amplitude, c.seed))?;
                    s.v = s.v.add_scaled(1.0, &random_ic(active, c.ic_amplitude, c.seed.wrapping_add(1)))?;
                    s
                }
                InitialCondition::File(p) => {
                    let (mut f, t) = load_fields(p, &active, 2)?;
                    let v = f.pop().expect("two components");
                    let u = f.pop().expect("two components");
                    let mut s = BrusselatorState::new(u, v, params, stepper)?;
                    s.t = t;
                    s
                }
                InitialCondition::Quasicrystal => {
                    return Err(Error::InvalidArgument("quasicrystal IC needs equation = sh".into()))
                }
            };
            Ok(SimState::Brusselator(state))
        }
    }
}

#[derive(Debug)]
pub struct RunSummary {
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<PathBuf>,
    pub csv: PathBuf,
    pub final_state: SimState,
}

/// Runs `c` and writes `config.txt`, `diagnostics.csv`, periodic
/// `snapshot_<step>.snap` files and `final.snap` into `c.output`.
pub fn simulate(c: &RunConfig) -> Result<RunSummary> {
    fs::create_dir_all(&c.output)?;
    fs::write(c.output.join("config.txt"), c.to_text())?;
    let mut state = initial_state(c)?;
    let t0 = state.time();
    let t_end = t0 + c.t;
    let slack = 1e-12 * t_end.abs().max(1.0);
    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let mut failure: Option<Error> = None;
    integrate(&mut state, c.t, 1, |s| {
        if failure.is_some() {
            return;
        }
        let step = ((s.time() - t0) / c.dt).round() as usize;
        let last = (t_end - s.time()).abs() <= slack;
        let result = (|| -> Result<()> {
            if step.is_multiple_of(c.diag_every) || last {
                records.push(s.record(c.s)?);
            }
            if c.snapshot_every > 0 && step > 0 && step.is_multiple_of(c.snapshot_every) && !last {
                let path = c.output.join(format!("snapshot_{step:08}.snap"));
                write_snapshot(&path, c, s.time(), &s.fields())?;
                snapshots.push(path);
            }
            Ok(())
        })();
        if let Err(e) = result {
            failure = Some(e);
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let last = c.output.join("final.snap");
    write_snapshot(&last, c, state.time(), &state.fields())?;
    snapshots.push(last);
    let csv = c.output.join("diagnostics.csv");
    write_diagnostics_csv(&records, matches!(c.equation, Equation::Brusselator), &csv)?;
    Ok(RunSummary {
        records,
        snapshots,
        csv,
        final_state: state,
    })
}
