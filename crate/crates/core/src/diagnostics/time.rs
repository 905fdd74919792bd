use serde::Serialize;

use super::functionals::potential;
use crate::constitutive::StressModel;
use crate::error::{Error, Result};
use crate::solver::State;
use crate::spectral::{PhysicalField, Rank, SpectralField};

/// Backward-difference time derivatives between two samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeDerivatives {
    pub dt_v_l2: f64,
    pub dt_c_l2: f64,
    pub dt_c_ldelta: f64,
    /// `int (1+|Dv|^2)^(p(c)/2) / p(c)` at the later sample.
    pub potential: f64,
    /// `(||dc/dt||_d + ||lap c||_d) / (||v.grad c + div g||_d + ||lap c0||_d)`, 0 for 0/0.
    pub mr_ratio: f64,
}

/// `source` is `-div g` at the later sample; `lap_c0_delta` is `||lap c(0)||_delta`.
pub fn time_derivative_monitor(
    model: &StressModel,
    prev: &State,
    cur: &State,
    delta: f64,
    source: Option<&SpectralField>,
    lap_c0_delta: f64,
) -> Result<TimeDerivatives> {
    let span = cur.t - prev.t;
    if !(span > 0.0) {
        return Err(Error::MisalignedSeries(format!("samples at t = {} and {} are not increasing", prev.t, cur.t)));
    }
    let dv = cur.v.axpy(-1.0, &prev.v)?.scale(1.0 / span);
    let dc = cur.c.axpy(-1.0, &prev.c)?.scale(1.0 / span).to_physical();
    let dt_c_ldelta = dc.lq_norm(delta);
    let lap_c = cur.c.laplacian().to_physical().lq_norm(delta);

    let grad_c = cur.c.gradient()?.to_physical();
    let mut rhs = PhysicalField::from_components(cur.grid(), Rank::Scalar, vec![grad_c.dot(&cur.v.to_physical())?])?;
    if let Some(s) = source {
        let s = s.to_physical();
        for (o, x) in rhs.component_mut(0).iter_mut().zip(s.component(0)) {
            *o -= x;
        }
    }
    let num = dt_c_ldelta + lap_c;
    let den = rhs.lq_norm(delta) + lap_c0_delta;
    let mr_ratio = if num == 0.0 { 0.0 } else { num / den };
    Ok(TimeDerivatives {
        dt_v_l2: dv.l2_norm(),
        dt_c_l2: dc.l2_norm(),
        dt_c_ldelta,
        potential: potential(cur, model)?,
        mr_ratio,
    })
}
