//! Shear-driven flow of a shear-thinning fluid whose exponent drops where
//! a localized concentration blob sits, a caricature of synovial fluid with
//! a hyaluronan-rich region.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constitutive::PowerLawIndex;
use crate::error::{Error, Result};
use crate::solver::{run, RegimeFlags, RunOutput, SolverConfig, State, SteadyForcing};
use crate::spectral::{Grid, PhysicalField, Rank};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynovialParams {
    pub background: f64,
    pub blob_amplitude: f64,
    /// Centre of the blob; only the first `d` entries are used.
    pub blob_center: [f64; 3],
    pub blob_width: f64,
    /// Amplitude of the initial vortex cell.
    pub vortex: f64,
    /// Amplitude of the body force `(F sin(2 pi x_2), 0, ...)`.
    pub shear: f64,
    /// Amplitude of the flux `a (cos(2 pi x_1), ..., cos(2 pi x_d))`.
    pub flux: f64,
}

impl Default for SynovialParams {
    fn default() -> Self {
        SynovialParams {
            background: 0.2,
            blob_amplitude: 1.0,
            blob_center: [0.5, 0.5, 0.5],
            blob_width: 0.12,
            vortex: 0.2,
            shear: 1.0,
            flux: 0.05,
        }
    }
}

impl SynovialParams {
    pub fn validate(&self) -> Result<()> {
        let vals = [self.background, self.blob_amplitude, self.blob_width, self.vortex, self.shear, self.flux];
        if vals.iter().chain(&self.blob_center).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("synovial parameters must be finite".into()));
        }
        if self.blob_width <= 0.0 {
            return Err(Error::InvalidParameter(format!("blob width must be positive, got {}", self.blob_width)));
        }
        Ok(())
    }

    /// Smooth periodic bump, `exp(sum_i (cos(2 pi (x_i - x0_i)) - 1) / (2 pi sigma)^2)`.
    pub fn concentration_at(&self, x: [f64; 3], d: usize) -> f64 {
        let s = (2.0 * PI * self.blob_width).powi(2);
        let e: f64 = (0..d).map(|i| ((2.0 * PI * (x[i] - self.blob_center[i])).cos() - 1.0) / s).sum();
        self.background + self.blob_amplitude * e.exp()
    }
}

/// The shipped demo configuration: `d = 2`, `n = 64`, `p` falling from 2.9
/// in the dilute fluid to 2 inside the blob.
pub fn synovial_config() -> SolverConfig {
    let index = PowerLawIndex::tanh_profile(2.0, 2.9, 0.6, 0.15, true).expect("valid profile");
    let mut cfg = SolverConfig::new(2, 64, 1e-3, 2.0, 0.01, index);
    cfg.cadence = 50;
    cfg
}

pub fn synovial_initial(grid: &Arc<Grid>, params: &SynovialParams) -> Result<State> {
    params.validate()?;
    let d = grid.dim();
    let a = params.vortex;
    let v = PhysicalField::from_fn(grid, Rank::Vector, |x| {
        let (s0, c0) = (2.0 * PI * x[0]).sin_cos();
        let (s1, c1) = (2.0 * PI * x[1]).sin_cos();
        let mut out = vec![0.0; d];
        out[0] = a * s0 * c1;
        out[1] = -a * c0 * s1;
        out
    });
    let c = PhysicalField::scalar_from_fn(grid, |x| params.concentration_at(x, d));
    State::from_physical(0.0, &v, &c)
}

pub fn synovial_forcing(grid: &Arc<Grid>, params: &SynovialParams) -> Result<SteadyForcing> {
    params.validate()?;
    let d = grid.dim();
    let f = PhysicalField::from_fn(grid, Rank::Vector, |x| {
        let mut out = vec![0.0; d];
        out[0] = params.shear * (2.0 * PI * x[1]).sin();
        out
    });
    let g = PhysicalField::from_fn(grid, Rank::Vector, |x| (0..d).map(|i| params.flux * (2.0 * PI * x[i]).cos()).collect());
    Ok(SteadyForcing { momentum: Some(f), flux: Some(g) })
}

#[derive(Debug, Clone)]
pub struct DemoOutput {
    pub regime: RegimeFlags,
    pub run: RunOutput,
}

/// Runs the demo from its initial blob. Out-of-regime configurations run
/// too but are labeled with a warning.
pub fn synovial_demo(config: &SolverConfig, params: &SynovialParams) -> Result<DemoOutput> {
    config.validate()?;
    let regime = config.regime()?;
    if !regime.unique_regime {
        log::warn!(
            "configuration outside the uniqueness regime (strong = {}, unique = {})",
            regime.strong_regime,
            regime.unique_regime
        );
    }
    let grid = config.grid()?;
    let forcing = synovial_forcing(&grid, params)?;
    let run = run(config, synovial_initial(&grid, params)?, &forcing)?;
    Ok(DemoOutput { regime, run })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_config_is_in_regime() {
        let r = synovial_config().regime().unwrap();
        assert!(r.strong_regime && r.unique_regime);
    }

    #[test]
    fn blob_peaks_at_center() {
        let p = SynovialParams::default();
        let peak = p.concentration_at([0.5, 0.5, 0.0], 2);
        assert!((peak - 1.2).abs() < 1e-15);
        assert!(p.concentration_at([0.0, 0.0, 0.0], 2) < 0.21);
    }
}
