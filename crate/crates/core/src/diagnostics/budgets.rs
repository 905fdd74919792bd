//! Discrete energy budgets of one time step.
//!
//! ```text
//! velocity:      (|v+|^2/2 - |v|^2/2)/dt + int S(c+, Dv+) : Dv+ - int f . v+
//! concentration: (|c+|^2/2 - |c|^2/2)/dt + |grad c+|^2     - int g . grad c+
//! ```
//!
//! For the IMEX scheme both residuals are first order in `dt`.

use crate::constitutive::StressModel;
use crate::error::{Error, Result};
use crate::solver::State;
use crate::spectral::{PhysicalField, Rank};

fn check_step(before: &State, after: &State, dt: f64) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("budget needs dt > 0, got {dt}")));
    }
    if **before.grid() != **after.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

fn check_vector(field: &PhysicalField, after: &State) -> Result<()> {
    if field.rank() != Rank::Vector {
        return Err(Error::RankMismatch { op: "energy budget forcing", rank: field.rank() });
    }
    if **field.grid() != **after.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// Signed residual of the kinetic energy balance; `f` is the force at the
/// end of the step.
pub fn energy_budget_velocity(
    model: &StressModel,
    before: &State,
    after: &State,
    f: Option<&PhysicalField>,
    dt: f64,
) -> Result<f64> {
    check_step(before, after, dt)?;
    let rate = 0.5 * (after.v.l2_norm().powi(2) - before.v.l2_norm().powi(2)) / dt;
    let dv = after.v.sym_gradient()?.to_physical();
    let s = model.eval_stress(&after.c.to_physical(), &dv)?;
    let diss = PhysicalField::integrate(&s.dot(&dv)?);
    let work = match f {
        None => 0.0,
        Some(f) => {
            check_vector(f, after)?;
            PhysicalField::integrate(&f.dot(&after.v.to_physical())?)
        }
    };
    Ok(rate + diss - work)
}

/// Signed residual of the `||c||_2^2` balance; `g` is the flux at the end of the step.
pub fn energy_budget_concentration(before: &State, after: &State, g: Option<&PhysicalField>, dt: f64) -> Result<f64> {
    check_step(before, after, dt)?;
    let rate = 0.5 * (after.c.l2_norm().powi(2) - before.c.l2_norm().powi(2)) / dt;
    let grad = after.c.gradient()?;
    let diss = grad.l2_norm().powi(2);
    let work = match g {
        None => 0.0,
        Some(g) => {
            check_vector(g, after)?;
            PhysicalField::integrate(&g.dot(&grad.to_physical())?)
        }
    };
    Ok(rate + diss - work)
}
