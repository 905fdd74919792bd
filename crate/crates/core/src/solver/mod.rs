//! IMEX Fourier-Galerkin time stepping.

mod config;
mod forcing;
mod run;
mod state;
mod stepper;

pub use config::{
    compute_regime, default_delta_monitor, default_q_monitor, Convection, RegimeFlags, SolverConfig, ViscousSplit,
};
pub use forcing::{Forcing, NoForcing, SteadyForcing};
pub use run::{run, run_observed, MonitorSample, RunOutput, Simulation, StepInfo, Termination, BLOWUP_THRESHOLD};
pub use state::State;
pub use stepper::{PicardReport, Stepper};
