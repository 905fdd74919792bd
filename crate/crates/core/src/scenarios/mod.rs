//! Manufactured solutions, convergence studies, twin runs and the
//! synovial-fluid demonstration.

mod convergence;
mod manufactured;
mod synovial;
mod trig;
mod uniqueness;

pub use convergence::{convergence_study, run_manufactured, ConvergenceRow, ConvergenceTable, StudySetup};
pub use manufactured::{make_manufactured, CaseId, ManufacturedCase, ManufacturedForcing, ManufacturedParams};
pub use synovial::{synovial_config, synovial_demo, synovial_forcing, synovial_initial, DemoOutput, SynovialParams};
pub use trig::{GridSampler, TrigPoly, Wave};
pub use uniqueness::{perturbation, uniqueness_experiment, TwinDemo, TwinRunReport};
