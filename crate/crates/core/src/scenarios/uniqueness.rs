//! Twin runs from nearby initial data with identical forcing, measuring
//! `y = ||v1 - v2||_2^2 + ||grad(c1 - c2)||_2^2` against the Grönwall
//! envelope `exp(C int phi) y(0)`, with
//! `phi = ||v2||_inf^2 + ||grad c1||_inf^2 + ||grad v1||_3^2 + 1`.

use std::f64::consts::PI;
use std::sync::mpsc::{sync_channel, Receiver, SyncSender};
use std::sync::Arc;
use std::thread;

use serde::Serialize;

use super::synovial::{synovial_forcing, synovial_initial, SynovialParams};
use crate::constitutive::PowerLawIndex;
use crate::diagnostics::{calibrated_certificate, velocity_gradient_norm, GronwallReport};
use crate::error::{Error, Result};
use crate::solver::{Convection, Forcing, NoForcing, RegimeFlags, Simulation, SolverConfig, State};
use crate::spectral::{Grid, PhysicalField, Rank, SpectralField};

/// Constant `F` of the envelope rate.
const FORCING_TERM: f64 = 1.0;

#[derive(Debug, Clone, Serialize)]
pub struct TwinRunReport {
    pub eps: f64,
    pub regime: RegimeFlags,
    /// Set when the configuration is outside the uniqueness regime.
    pub regime_warning: Option<String>,
    pub t: Vec<f64>,
    /// `||v1 - v2||_2^2` and `||grad(c1 - c2)||_2^2`.
    pub y_v: Vec<f64>,
    pub y_c: Vec<f64>,
    pub y: Vec<f64>,
    /// `int |D(v1 - v2)|^2` and `int |lap(c1 - c2)|^2`.
    pub diss_v: Vec<f64>,
    pub diss_c: Vec<f64>,
    /// Envelope rate before calibration.
    pub phi: Vec<f64>,
    pub gronwall: GronwallReport,
}

impl TwinRunReport {
    /// `y / envelope` at each sample; at most 1 when the certificate holds.
    pub fn envelope_ratio(&self) -> Vec<f64> {
        self.y
            .iter()
            .zip(&self.gronwall.envelope)
            .map(|(y, e)| if *e == 0.0 { if *y == 0.0 { 0.0 } else { f64::INFINITY } } else { y / e })
            .collect()
    }
}

/// Fixed single-mode perturbation directions: a shear mode of frequency
/// (0, 2) for the velocity and `cos(2 pi (x_1 + 2 x_2))` for the concentration.
pub fn perturbation(grid: &Arc<Grid>) -> Result<(SpectralField, SpectralField)> {
    let d = grid.dim();
    let dv = PhysicalField::from_fn(grid, Rank::Vector, |x| {
        let mut out = vec![0.0; d];
        out[0] = (4.0 * PI * x[1]).sin();
        out
    });
    let dc = PhysicalField::scalar_from_fn(grid, |x| (2.0 * PI * (x[0] + 2.0 * x[1])).cos());
    Ok((dv.to_spectral()?, dc.to_spectral()?))
}

/// A twin-run configuration: solver settings, base state and forcing.
pub struct TwinDemo {
    pub config: SolverConfig,
    pub initial: State,
    pub forcing: Box<dyn Forcing>,
}

impl TwinDemo {
    /// Stokes flow with heat-equation concentration (`p = 2`, transport off),
    /// so the difference of the runs evolves linearly.
    pub fn linear() -> Result<TwinDemo> {
        let mut config = SolverConfig::new(2, 32, 1e-3, 0.2, 0.05, PowerLawIndex::constant(2.0)?);
        config.convection = Convection::Off;
        let grid = config.grid()?;
        let params = SynovialParams { background: 0.5, blob_amplitude: 0.3, ..SynovialParams::default() };
        let initial = synovial_initial(&grid, &params)?;
        Ok(TwinDemo { config, initial, forcing: Box::new(NoForcing) })
    }

    /// The synovial setting at reduced resolution.
    pub fn nonlinear() -> Result<TwinDemo> {
        let index = PowerLawIndex::tanh_profile(2.0, 2.9, 0.6, 0.15, true)?;
        let config = SolverConfig::new(2, 32, 2e-3, 0.5, 0.01, index);
        let grid = config.grid()?;
        let params = SynovialParams { blob_width: 0.15, ..SynovialParams::default() };
        let initial = synovial_initial(&grid, &params)?;
        let forcing = synovial_forcing(&grid, &params)?;
        Ok(TwinDemo { config, initial, forcing: Box::new(forcing) })
    }

    pub fn run(&self, eps: f64) -> Result<TwinRunReport> {
        uniqueness_experiment(&self.config, &self.initial, self.forcing.as_ref(), eps)
    }
}

fn drive(mut sim: Simulation<'_>, cadence: usize, total: usize, tx: SyncSender<State>) -> Result<()> {
    if tx.send(sim.state().clone()).is_err() {
        return Ok(());
    }
    for k in 1..=total {
        sim.step()?;
        if (k % cadence == 0 || k == total) && tx.send(sim.state().clone()).is_err() {
            // receiver gone: the other run failed
            return Ok(());
        }
    }
    Ok(())
}

struct Sample {
    t: f64,
    y_v: f64,
    y_c: f64,
    diss_v: f64,
    diss_c: f64,
    phi: f64,
}

fn sample(a: &State, b: &State) -> Result<Sample> {
    let dv = a.v.axpy(-1.0, &b.v)?;
    let dc = a.c.axpy(-1.0, &b.c)?;
    let grad_c1 = a.c.gradient()?.to_physical().lq_norm(f64::INFINITY);
    let v2 = b.v.to_physical().lq_norm(f64::INFINITY);
    let gv1 = velocity_gradient_norm(&a.v, 3.0)?;
    Ok(Sample {
        t: a.t,
        y_v: dv.l2_norm().powi(2),
        y_c: dc.gradient()?.l2_norm().powi(2),
        diss_v: dv.sym_gradient()?.l2_norm().powi(2),
        diss_c: dc.laplacian().l2_norm().powi(2),
        phi: v2 * v2 + grad_c1 * grad_c1 + gv1 * gv1 + FORCING_TERM,
    })
}

fn collect(rx1: Receiver<State>, rx2: Receiver<State>) -> Result<Vec<Sample>> {
    let mut out = Vec::new();
    while let (Ok(a), Ok(b)) = (rx1.recv(), rx2.recv()) {
        out.push(sample(&a, &b)?);
    }
    Ok(out)
}

/// Runs the base state and its perturbation `(v0 + eps dv, c0 + eps dc)`
/// concurrently and certifies the difference functional. The constant of
/// the envelope is calibrated on the first interval and then frozen.
pub fn uniqueness_experiment(
    config: &SolverConfig,
    initial: &State,
    forcing: &dyn Forcing,
    eps: f64,
) -> Result<TwinRunReport> {
    config.validate()?;
    if !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("perturbation size must be finite, got {eps}")));
    }
    let regime = config.regime()?;
    let regime_warning = (!regime.unique_regime).then(|| {
        let msg = format!(
            "outside the uniqueness regime (d = {}, p_minus = {}, p_plus = {})",
            config.d,
            config.index.p_minus(),
            config.index.p_plus()
        );
        log::warn!("{msg}");
        msg
    });
    let grid = config.grid()?;
    let (dv, dc) = perturbation(&grid)?;
    // both states take the same arithmetic path, so eps = 0 gives identical runs
    let base = State::new(initial.t, initial.v.axpy(0.0, &dv)?, initial.c.axpy(0.0, &dc)?)?;
    let perturbed = State::new(initial.t, initial.v.axpy(eps, &dv)?, initial.c.axpy(eps, &dc)?)?;
    let sim1 = Simulation::new(config, base, forcing)?;
    let sim2 = Simulation::new(config, perturbed, forcing)?;
    let total = config.steps();
    let cadence = config.cadence;

    let (samples, r1, r2) = thread::scope(|s| {
        let (tx1, rx1) = sync_channel(2);
        let (tx2, rx2) = sync_channel(2);
        let h1 = s.spawn(move || drive(sim1, cadence, total, tx1));
        let h2 = s.spawn(move || drive(sim2, cadence, total, tx2));
        let samples = collect(rx1, rx2);
        (samples, h1.join().expect("twin run panicked"), h2.join().expect("twin run panicked"))
    });
    r1?;
    r2?;
    let samples = samples?;

    let t: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let y_v: Vec<f64> = samples.iter().map(|s| s.y_v).collect();
    let y_c: Vec<f64> = samples.iter().map(|s| s.y_c).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.y_v + s.y_c).collect();
    let phi: Vec<f64> = samples.iter().map(|s| s.phi).collect();
    let gronwall = calibrated_certificate(&t, &y, &phi, &vec![0.0; t.len()])?;
    Ok(TwinRunReport {
        eps,
        regime,
        regime_warning,
        t,
        y_v,
        y_c,
        y,
        diss_v: samples.iter().map(|s| s.diss_v).collect(),
        diss_c: samples.iter().map(|s| s.diss_c).collect(),
        phi,
        gronwall,
    })
}
