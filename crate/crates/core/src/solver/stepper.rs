//! One step of the IMEX scheme.
//!
//! The concentration is advanced first with the lagged velocity:
//!
//! ```text
//! (c+ - c)/dt = lap c+ - div(c v) - div g(t+dt)
//! ```
//!
//! then the velocity with the new concentration, iterating on the stress:
//!
//! ```text
//! (v+ - v)/dt = nu_s lap v+ + P[-div(v (x) v) + div(S(c+, Dv_k) - 2 nu_s Dv_k) + f(t+dt)]
//! ```
//!
//! Both implicit operators are diagonal in Fourier space, so every solve is
//! a per-mode division. Nonlinear products are formed at the collocation
//! points and truncated with the configured dealiasing rule.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::Serialize;

use super::config::{Convection, SolverConfig, ViscousSplit};
use super::forcing::Forcing;
use super::state::State;
use crate::constitutive::StressModel;
use crate::error::{Error, Result};
use crate::spectral::{outer, DealiasRule, Grid, PhysicalField, Rank, SpectralField};

/// Upper cap on `nu_split / nu0` for the adaptive split.
const SPLIT_CAP: f64 = 1e6;

/// Outcome of the Picard iteration of one velocity step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PicardReport {
    pub iterations: usize,
    pub converged: bool,
    /// Last relative update `||v_{k+1} - v_k|| / ||v_{k+1}||`.
    pub final_update: f64,
    /// Largest ratio of consecutive update norms, while those are above roundoff.
    pub contraction: Option<f64>,
    pub nu_split: f64,
}

#[derive(Debug, Clone)]
pub struct Stepper {
    grid: Arc<Grid>,
    model: StressModel,
    config: SolverConfig,
}

fn blowup(t: f64, what: &str) -> Error {
    Error::Blowup { t, what: what.to_string() }
}

impl Stepper {
    pub fn new(config: &SolverConfig) -> Result<Stepper> {
        config.validate()?;
        Ok(Stepper { grid: config.grid()?, model: config.model()?, config: config.clone() })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn model(&self) -> &StressModel {
        &self.model
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    fn truncate(&self, f: &SpectralField, zero_mean: bool) -> SpectralField {
        f.dealias_and_zero_mean(self.config.dealias, zero_mean)
    }

    fn to_band(&self, f: &PhysicalField, t: f64, what: &str) -> Result<SpectralField> {
        let s = f.to_spectral().map_err(|_| blowup(t, what))?;
        Ok(self.truncate(&s, false))
    }

    /// Symmetric velocity gradient and stress at the collocation points.
    pub fn strain_and_stress(&self, c: &SpectralField, v: &SpectralField) -> Result<(PhysicalField, PhysicalField)> {
        let dv = v.sym_gradient()?.to_physical();
        let s = self.model.eval_stress(&c.to_physical(), &dv)?;
        Ok((dv, s))
    }

    /// Momentum convection term (before projection), dealiased.
    pub fn convection(&self, v: &SpectralField, t: f64) -> Result<SpectralField> {
        let g = &self.grid;
        if self.config.convection == Convection::Off {
            return Ok(SpectralField::zeros(g, Rank::Vector));
        }
        let vp = v.to_physical();
        let div_form = self.to_band(&outer(&vp, &vp)?, t, "convection")?.divergence()?;
        if self.config.convection == Convection::Divergence {
            return Ok(div_form);
        }
        // (v . grad) v_i = sum_j v_j d_j v_i
        let d = g.dim();
        let grad = v.gradient()?.to_physical();
        let mut adv = PhysicalField::zeros(g, Rank::Vector);
        for i in 0..d {
            for j in 0..d {
                let gij = grad.component(i * d + j);
                let vj = vp.component(j);
                for ((o, a), b) in adv.component_mut(i).iter_mut().zip(gij).zip(vj) {
                    *o += a * b;
                }
            }
        }
        let adv = self.to_band(&adv, t, "convection")?;
        Ok(div_form.axpy(1.0, &adv)?.scale(0.5))
    }

    /// Dealiased body force at time `t`, or `None` when absent.
    pub fn momentum_forcing(&self, forcing: &dyn Forcing, t: f64) -> Result<Option<SpectralField>> {
        match forcing.momentum(&self.grid, t) {
            None => Ok(None),
            Some(f) => {
                if f.rank() != Rank::Vector || **f.grid() != *self.grid {
                    return Err(Error::InvalidParameter("momentum forcing must be a vector on the solver grid".into()));
                }
                Ok(Some(self.to_band(&f, t, "momentum forcing")?))
            }
        }
    }

    /// Dealiased zero-mean concentration source `-div g` at time `t`.
    pub fn concentration_source(&self, forcing: &dyn Forcing, t: f64) -> Result<Option<SpectralField>> {
        match forcing.concentration_source(&self.grid, t) {
            Ok(None) => Ok(None),
            Ok(Some(s)) => {
                if s.rank() != Rank::Scalar || **s.grid() != *self.grid {
                    return Err(Error::InvalidParameter("concentration source must be a scalar on the solver grid".into()));
                }
                if !s.is_finite() {
                    return Err(blowup(t, "concentration source"));
                }
                Ok(Some(self.truncate(&s, true)))
            }
            Err(Error::NonFinite(_)) => Err(blowup(t, "concentration flux")),
            Err(e) => Err(e),
        }
    }

    /// Implicit diffusion, explicit advection and source; the mean mode is untouched.
    pub fn step_concentration(&self, state: &State, forcing: &dyn Forcing) -> Result<SpectralField> {
        let dt = self.config.dt;
        let t1 = state.t + dt;
        let g = &self.grid;
        let mut explicit = SpectralField::zeros(g, Rank::Scalar);
        if self.config.convection != Convection::Off {
            let cp = state.c.to_physical();
            let vp = state.v.to_physical();
            let flux = crate::spectral::scale_pointwise(cp.component(0), &vp);
            explicit = self.to_band(&flux, t1, "concentration transport")?.divergence()?.scale(-1.0);
        }
        if let Some(src) = self.concentration_source(forcing, t1)? {
            explicit = explicit.axpy(1.0, &src)?;
        }
        let ksq = g.k_squared();
        let mut out = state.c.clone();
        {
            let old = state.c.component(0);
            let rhs = explicit.component(0);
            let dst = out.component_mut(0);
            for idx in 1..g.len() {
                dst[idx] = (old[idx] + rhs[idx] * dt) / (1.0 + dt * ksq[idx]);
            }
        }
        let out = self.truncate(&out, false);
        if !out.is_finite() {
            return Err(blowup(t1, "concentration"));
        }
        Ok(out)
    }

    /// `nu_split` for the step that starts from `v`.
    pub fn split_viscosity(&self, v: &SpectralField) -> Result<f64> {
        let nu0 = self.model.nu0();
        match self.config.split {
            ViscousSplit::Fixed(nu) => Ok(nu),
            ViscousSplit::Adaptive => {
                let p_plus = self.model.index().p_plus();
                if p_plus <= 2.0 {
                    return Ok(nu0);
                }
                let dv = v.sym_gradient()?.to_physical();
                let max_sq = dv.magnitude().iter().fold(0.0f64, |m, x| m.max(x * x));
                let factor = (1.0 + max_sq).powf(0.5 * (p_plus - 2.0));
                Ok(nu0 * factor.clamp(1.0, SPLIT_CAP))
            }
        }
    }

    /// Projected divergence of `S(c, Dv) - 2 nu_s Dv`, dealiased.
    fn stress_remainder(&self, c_phys: &PhysicalField, v: &SpectralField, nu_s: f64, t: f64) -> Result<SpectralField> {
        let dv = v.sym_gradient()?.to_physical();
        if !dv.is_finite() {
            return Err(blowup(t, "strain rate"));
        }
        let mut s = self.model.eval_stress(c_phys, &dv)?;
        let m = self.grid.dim() * self.grid.dim();
        for a in 0..m {
            for (o, x) in s.component_mut(a).iter_mut().zip(dv.component(a)) {
                *o -= 2.0 * nu_s * x;
            }
        }
        self.to_band(&s, t, "stress")?.divergence()?.leray_project()
    }

    /// Velocity update with the concentration already advanced to `c_new`.
    pub fn step_velocity(
        &self,
        state: &State,
        c_new: &SpectralField,
        forcing: &dyn Forcing,
    ) -> Result<(SpectralField, PicardReport)> {
        let cfg = &self.config;
        let dt = cfg.dt;
        let t1 = state.t + dt;
        let g = &self.grid;

        let mut explicit = self.convection(&state.v, t1)?.scale(-1.0);
        if let Some(f) = self.momentum_forcing(forcing, t1)? {
            explicit = explicit.axpy(1.0, &f)?;
        }
        let base = state.v.axpy(dt, &explicit.leray_project()?)?;

        let nu_s = self.split_viscosity(&state.v)?;
        let ksq = g.k_squared();
        let denom: Vec<f64> = ksq.iter().map(|k2| 1.0 + dt * nu_s * k2).collect();
        let c_phys = c_new.to_physical();
        let linear_exact = self.model.is_newtonian() && nu_s == self.model.nu0();

        let solve = |remainder: Option<&SpectralField>| -> Result<SpectralField> {
            let mut next = base.clone();
            for a in 0..g.dim() {
                let dst = next.component_mut(a);
                let extra = remainder.map(|r| r.component(a));
                dst[0] = Complex64::new(0.0, 0.0);
                for idx in 1..g.len() {
                    let mut z = dst[idx];
                    if let Some(r) = extra {
                        z += r[idx] * dt;
                    }
                    dst[idx] = z / denom[idx];
                }
            }
            let next = self.truncate(&next, true).leray_project()?;
            if !next.is_finite() {
                return Err(blowup(t1, "velocity"));
            }
            Ok(next)
        };

        if linear_exact {
            let next = solve(None)?;
            let report =
                PicardReport { iterations: 1, converged: true, final_update: 0.0, contraction: None, nu_split: nu_s };
            return Ok((next, report));
        }

        let mut iterate = state.v.clone();
        let mut last_diff = f64::INFINITY;
        let mut growth = 0;
        let mut contraction: Option<f64> = None;
        let mut rel = f64::INFINITY;
        for it in 1..=cfg.picard_max {
            let remainder = self.stress_remainder(&c_phys, &iterate, nu_s, t1)?;
            let next = solve(Some(&remainder))?;
            let diff = next.axpy(-1.0, &iterate)?.l2_norm();
            let norm = next.l2_norm();
            rel = if norm > 0.0 { diff / norm } else if diff == 0.0 { 0.0 } else { f64::INFINITY };
            iterate = next;
            if rel <= cfg.picard_tol {
                let report = PicardReport { iterations: it, converged: true, final_update: rel, contraction, nu_split: nu_s };
                return Ok((iterate, report));
            }
            if it > 1 && diff > 1e3 * f64::EPSILON * norm {
                let ratio = diff / last_diff;
                contraction = Some(contraction.map_or(ratio, |c: f64| c.max(ratio)));
            }
            if it > 1 && diff > last_diff {
                growth += 1;
                if growth >= 3 {
                    return Err(Error::PicardDiverged { t: t1, iterations: it });
                }
            } else {
                growth = 0;
            }
            last_diff = diff;
        }
        log::warn!("Picard iteration reached {} iterations at t = {t1} (update {rel:.3e})", cfg.picard_max);
        let report =
            PicardReport { iterations: cfg.picard_max, converged: false, final_update: rel, contraction, nu_split: nu_s };
        Ok((iterate, report))
    }

    /// Full step: concentration first, then velocity with the new concentration.
    pub fn step(&self, state: &State, forcing: &dyn Forcing) -> Result<(State, PicardReport)> {
        let c = self.step_concentration(state, forcing)?;
        let (v, report) = self.step_velocity(state, &c, forcing)?;
        Ok((State { t: state.t + self.config.dt, v, c }, report))
    }

    /// Pressure from `-lap pi = div(div(v (x) v) - div S(c, Dv) - f)`, zero-mean.
    pub fn recover_pressure(&self, state: &State, forcing: &dyn Forcing) -> Result<SpectralField> {
        let g = &self.grid;
        let t = state.t;
        let (_, s) = self.strain_and_stress(&state.c, &state.v)?;
        let mut residual = self.convection(&state.v, t)?;
        residual = residual.axpy(-1.0, &self.to_band(&s, t, "stress")?.divergence()?)?;
        if let Some(f) = self.momentum_forcing(forcing, t)? {
            residual = residual.axpy(-1.0, &f)?;
        }
        let ksq = g.k_squared();
        let mut pi = SpectralField::zeros(g, Rank::Scalar);
        let dst = pi.component_mut(0);
        for idx in 1..g.len() {
            let k = g.wavevector(idx);
            let mut kn = Complex64::new(0.0, 0.0);
            for (a, ka) in k.iter().enumerate().take(g.dim()) {
                kn += residual.coeff(a, idx) * ka;
            }
            dst[idx] = kn * Complex64::new(0.0, 1.0) / ksq[idx];
        }
        Ok(pi.dealias_and_zero_mean(DealiasRule::None, true))
    }
}
