use serde::{Deserialize, Serialize};

use super::functionals::{eta_norms, gradc_q_monitor, potential, stress_integrals, w22_monitor};
use super::time::time_derivative_monitor;
use crate::constitutive::StressModel;
use crate::error::Result;
use crate::solver::State;

/// Version of the diagnostics CSV layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Column order of the diagnostics CSV.
pub const COLUMNS: [&str; 20] = [
    "t",
    "kinetic",
    "visc_diss",
    "modular_gradv",
    "stress_dual",
    "conc_l2",
    "conc_diss",
    "gradc_q",
    "gradc_q_diss",
    "eta_l2",
    "eta_high",
    "grad_eta_l2",
    "w22_weighted",
    "laplacian_v_l2",
    "dt_v_l2",
    "dt_c_l2",
    "dt_c_ldelta",
    "potential",
    "picard_iters",
    "energy_residual",
];

/// One time sample of the monitored functionals.
///
/// Time derivatives are backward differences against the previous record and
/// are zero on the first record. `energy_residual` is the sum of the velocity
/// and concentration budget residuals of the step that produced the sample.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub kinetic: f64,
    pub visc_diss: f64,
    pub modular_gradv: f64,
    pub stress_dual: f64,
    pub conc_l2: f64,
    pub conc_diss: f64,
    pub gradc_q: f64,
    pub gradc_q_diss: f64,
    pub eta_l2: f64,
    pub eta_high: f64,
    pub grad_eta_l2: f64,
    pub w22_weighted: f64,
    pub laplacian_v_l2: f64,
    pub dt_v_l2: f64,
    pub dt_c_l2: f64,
    pub dt_c_ldelta: f64,
    pub potential: f64,
    pub picard_iters: u32,
    pub energy_residual: f64,
}

impl DiagnosticsRecord {
    pub fn values(&self) -> [f64; 20] {
        [
            self.t,
            self.kinetic,
            self.visc_diss,
            self.modular_gradv,
            self.stress_dual,
            self.conc_l2,
            self.conc_diss,
            self.gradc_q,
            self.gradc_q_diss,
            self.eta_l2,
            self.eta_high,
            self.grad_eta_l2,
            self.w22_weighted,
            self.laplacian_v_l2,
            self.dt_v_l2,
            self.dt_c_l2,
            self.dt_c_ldelta,
            self.potential,
            self.picard_iters as f64,
            self.energy_residual,
        ]
    }

    pub fn from_values(v: [f64; 20]) -> DiagnosticsRecord {
        DiagnosticsRecord {
            t: v[0],
            kinetic: v[1],
            visc_diss: v[2],
            modular_gradv: v[3],
            stress_dual: v[4],
            conc_l2: v[5],
            conc_diss: v[6],
            gradc_q: v[7],
            gradc_q_diss: v[8],
            eta_l2: v[9],
            eta_high: v[10],
            grad_eta_l2: v[11],
            w22_weighted: v[12],
            laplacian_v_l2: v[13],
            dt_v_l2: v[14],
            dt_c_l2: v[15],
            dt_c_ldelta: v[16],
            potential: v[17],
            picard_iters: v[18] as u32,
            energy_residual: v[19],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }

    /// Largest absolute entry, excluding time and the iteration count.
    pub fn max_abs(&self) -> f64 {
        let v = self.values();
        v[1..18].iter().chain(&v[19..]).fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Inputs beyond the state needed for one record.
#[derive(Debug, Clone, Copy)]
pub struct RecordContext<'a> {
    pub q: f64,
    pub delta: f64,
    pub previous: Option<&'a State>,
    pub picard_iters: u32,
    pub energy_residual: f64,
}

pub fn compute_record(model: &StressModel, state: &State, ctx: RecordContext<'_>) -> Result<DiagnosticsRecord> {
    let stress = stress_integrals(state, model)?;
    let (gradc_q, gradc_q_diss) = gradc_q_monitor(&state.c, ctx.q)?;
    let eta = eta_norms(state, model)?;
    let w22 = w22_monitor(state, model)?;
    let (dt_v_l2, dt_c_l2, dt_c_ldelta) = match ctx.previous {
        Some(prev) => {
            let td = time_derivative_monitor(model, prev, state, ctx.delta, None, 0.0)?;
            (td.dt_v_l2, td.dt_c_l2, td.dt_c_ldelta)
        }
        None => (0.0, 0.0, 0.0),
    };
    Ok(DiagnosticsRecord {
        t: state.t,
        kinetic: state.kinetic_energy(),
        visc_diss: stress.visc_diss,
        modular_gradv: stress.modular_gradv,
        stress_dual: stress.stress_dual,
        conc_l2: state.c.l2_norm().powi(2),
        conc_diss: state.c.gradient()?.l2_norm().powi(2),
        gradc_q,
        gradc_q_diss,
        eta_l2: eta.l2,
        eta_high: eta.high,
        grad_eta_l2: eta.grad_l2,
        w22_weighted: w22.weighted,
        laplacian_v_l2: w22.laplacian_sq.sqrt(),
        dt_v_l2,
        dt_c_l2,
        dt_c_ldelta,
        potential: potential(state, model)?,
        picard_iters: ctx.picard_iters,
        energy_residual: ctx.energy_residual,
    })
}
