//! Monitored functionals of the a priori theory, energy budgets, and
//! discrete Grönwall certificates.

mod budgets;
mod functionals;
mod gronwall;
mod record;
mod time;

pub use budgets::{energy_budget_concentration, energy_budget_velocity};
pub use functionals::{
    calderon_zygmund_check, eta_field, eta_norms, flux_w1q, gradc_q_monitor, luxemburg_norm, modular_norm, potential,
    stress_integrals, velocity_gradient_norm, w22_monitor, CzReport, EtaNorms, StressIntegrals, W22Report,
};
pub use gronwall::{calibrate_constant, calibrated_certificate, gronwall_certificate, GronwallReport};
pub use record::{compute_record, DiagnosticsRecord, RecordContext, COLUMNS, SCHEMA_VERSION};
pub use time::{time_derivative_monitor, TimeDerivatives};
