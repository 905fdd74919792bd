use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use super::forcing::Forcing;
use super::state::State;
use super::stepper::{PicardReport, Stepper};
use crate::diagnostics::{
    compute_record, energy_budget_concentration, energy_budget_velocity, eta_norms, flux_w1q, gradc_q_monitor,
    time_derivative_monitor, velocity_gradient_norm, w22_monitor, DiagnosticsRecord, RecordContext,
};
use crate::error::{Error, Result};

/// Norm level treated as blow-up.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    Blowup,
    PicardFailure,
}

/// Per-step invariants and budgets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepInfo {
    pub t: f64,
    pub picard: PicardReport,
    pub residual_v: f64,
    pub residual_c: f64,
    pub divergence_defect: f64,
    pub concentration_mean: f64,
}

/// Auxiliary run-level monitors sampled alongside each diagnostics record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonitorSample {
    pub t: f64,
    /// `||eta||_high / (||eta||_2^(1/2) ||grad eta||_2^(1/2) + ||eta||_1)`.
    pub gn_ratio: f64,
    /// Maximal-regularity ratio of the concentration equation (0 on the first sample).
    pub mr_ratio: f64,
    /// `||grad v||_{p_minus}`.
    pub grad_v_pminus: f64,
    /// `||grad v||_3`.
    pub grad_v_l3: f64,
    /// `||grad v||_inf`, `||v||_inf`, `||grad c||_inf`.
    pub grad_v_inf: f64,
    pub v_inf: f64,
    pub grad_c_inf: f64,
    /// `||grad c||_q^q`.
    pub gradc_q_pow: f64,
    /// `||g||_q^q + ||grad g||_q^q`.
    pub flux_w1q: f64,
    pub divergence_defect: f64,
    pub concentration_mean: f64,
    pub w22_domination: bool,
    pub w22_weight: Option<bool>,
    pub picard_contraction: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<DiagnosticsRecord>,
    pub monitors: Vec<MonitorSample>,
    pub steps: Vec<StepInfo>,
    pub final_state: State,
    pub termination: Termination,
    pub message: Option<String>,
}

impl RunOutput {
    pub fn max_picard_iterations(&self) -> usize {
        self.steps.iter().map(|s| s.picard.iterations).max().unwrap_or(0)
    }
}

/// A state advanced step by step with fixed configuration and forcing.
pub struct Simulation<'f> {
    stepper: Stepper,
    state: State,
    forcing: &'f dyn Forcing,
    t0: f64,
    step_index: usize,
}

impl<'f> Simulation<'f> {
    pub fn new(config: &SolverConfig, initial: State, forcing: &'f dyn Forcing) -> Result<Simulation<'f>> {
        let stepper = Stepper::new(config)?;
        if **initial.grid() != **stepper.grid() {
            return Err(Error::GridMismatch);
        }
        let state = State::new(initial.t, initial.v, initial.c)?;
        Ok(Simulation { stepper, t0: state.t, state, forcing, step_index: 0 })
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn stepper(&self) -> &Stepper {
        &self.stepper
    }

    pub fn forcing(&self) -> &'f dyn Forcing {
        self.forcing
    }

    pub fn steps_taken(&self) -> usize {
        self.step_index
    }

    /// Advances one step. On error the state is left unchanged.
    pub fn step(&mut self) -> Result<StepInfo> {
        let dt = self.stepper.config().dt;
        let (mut next, picard) = self.stepper.step(&self.state, self.forcing)?;
        // t0 + k dt rather than a running sum of dt
        next.t = self.t0 + (self.step_index + 1) as f64 * dt;
        if !next.is_finite() || next.max_coefficient() > BLOWUP_THRESHOLD {
            return Err(Error::Blowup { t: next.t, what: "state norm".into() });
        }
        let grid = self.stepper.grid();
        let f = self.forcing.momentum(grid, next.t);
        let g = self.forcing.flux(grid, next.t);
        let residual_v = energy_budget_velocity(self.stepper.model(), &self.state, &next, f.as_ref(), dt)?;
        let residual_c = energy_budget_concentration(&self.state, &next, g.as_ref(), dt)?;
        let info = StepInfo {
            t: next.t,
            picard,
            residual_v,
            residual_c,
            divergence_defect: next.divergence_defect(),
            concentration_mean: next.concentration_mean(),
        };
        self.state = next;
        self.step_index += 1;
        Ok(info)
    }

    pub fn into_state(self) -> State {
        self.state
    }
}

fn monitor(
    stepper: &Stepper,
    forcing: &dyn Forcing,
    state: &State,
    previous: Option<&State>,
    lap_c0_delta: f64,
    contraction: Option<f64>,
) -> Result<MonitorSample> {
    let model = stepper.model();
    let cfg = stepper.config();
    let grid = stepper.grid();
    let eta = eta_norms(state, model)?;
    let w22 = w22_monitor(state, model)?;
    let mr_ratio = match previous {
        Some(prev) => {
            let source = stepper.concentration_source(forcing, state.t)?;
            time_derivative_monitor(model, prev, state, cfg.delta_monitor, source.as_ref(), lap_c0_delta)?.mr_ratio
        }
        None => 0.0,
    };
    let (gq, _) = gradc_q_monitor(&state.c, cfg.q_monitor)?;
    let flux = match forcing.flux(grid, state.t) {
        Some(g) => flux_w1q(&g, cfg.q_monitor)?,
        None => 0.0,
    };
    Ok(MonitorSample {
        t: state.t,
        gn_ratio: eta.gagliardo_nirenberg_ratio(),
        mr_ratio,
        grad_v_pminus: velocity_gradient_norm(&state.v, model.index().p_minus())?,
        grad_v_l3: velocity_gradient_norm(&state.v, 3.0)?,
        grad_v_inf: velocity_gradient_norm(&state.v, f64::INFINITY)?,
        v_inf: state.v.to_physical().lq_norm(f64::INFINITY),
        grad_c_inf: state.c.gradient()?.to_physical().lq_norm(f64::INFINITY),
        gradc_q_pow: gq.powf(cfg.q_monitor),
        flux_w1q: flux,
        divergence_defect: state.divergence_defect(),
        concentration_mean: state.concentration_mean(),
        w22_domination: w22.domination_holds,
        w22_weight: w22.weight_holds,
        picard_contraction: contraction,
    })
}

/// Integrates to `t_end`, recording diagnostics every `cadence` steps and at
/// the final step. Blow-up and Picard divergence end the run early with the
/// last valid state; errors in the setup are returned as `Err`.
pub fn run(config: &SolverConfig, initial: State, forcing: &dyn Forcing) -> Result<RunOutput> {
    run_observed(config, initial, forcing, &mut |_, _| Ok(()))
}

/// [`run`] with a callback on the initial state (step 0) and after every
/// accepted step, e.g. for writing snapshots. Callback errors abort the run.
pub fn run_observed(
    config: &SolverConfig,
    initial: State,
    forcing: &dyn Forcing,
    observer: &mut dyn FnMut(usize, &State) -> Result<()>,
) -> Result<RunOutput> {
    let mut sim = Simulation::new(config, initial, forcing)?;
    let model = *sim.stepper().model();
    let total = config.steps();
    let lap_c0_delta = sim.state().c.laplacian().to_physical().lq_norm(config.delta_monitor);

    fn ctx<'a>(config: &SolverConfig, previous: Option<&'a State>, picard_iters: u32, residual: f64) -> RecordContext<'a> {
        RecordContext { q: config.q_monitor, delta: config.delta_monitor, previous, picard_iters, energy_residual: residual }
    }
    let first = compute_record(&model, sim.state(), ctx(config, None, 0, 0.0))?;
    let mut records = vec![first];
    let mut monitors = vec![monitor(sim.stepper(), forcing, sim.state(), None, lap_c0_delta, None)?];
    observer(0, sim.state())?;
    let mut last_recorded = sim.state().clone();
    let mut steps = Vec::with_capacity(total);
    let mut termination = Termination::Completed;
    let mut message = None;

    for k in 1..=total {
        let info = match sim.step() {
            Ok(info) => info,
            Err(e @ (Error::Blowup { .. } | Error::NonFinite(_))) => {
                termination = Termination::Blowup;
                message = Some(e.to_string());
                break;
            }
            Err(e @ Error::PicardDiverged { .. }) => {
                termination = Termination::PicardFailure;
                message = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        };
        steps.push(info);
        observer(k, sim.state())?;
        if k % config.cadence == 0 || k == total {
            let residual = info.residual_v + info.residual_c;
            let rec =
                compute_record(&model, sim.state(), ctx(config, Some(&last_recorded), info.picard.iterations as u32, residual))?;
            let mon =
                monitor(sim.stepper(), forcing, sim.state(), Some(&last_recorded), lap_c0_delta, info.picard.contraction)?;
            if !rec.is_finite() || rec.max_abs() > BLOWUP_THRESHOLD {
                termination = Termination::Blowup;
                message = Some(format!("diagnostics exceeded {BLOWUP_THRESHOLD:e} at t = {}", info.t));
                records.push(rec);
                break;
            }
            records.push(rec);
            monitors.push(mon);
            last_recorded = sim.state().clone();
        }
    }
    Ok(RunOutput { records, monitors, steps, final_state: sim.into_state(), termination, message })
}
