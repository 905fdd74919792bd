use std::sync::Arc;

use crate::error::Result;
use crate::spectral::{Grid, PhysicalField, SpectralField};

/// Body force `f` and concentration flux `g` as functions of time.
pub trait Forcing: Send + Sync {
    fn momentum(&self, _grid: &Arc<Grid>, _t: f64) -> Option<PhysicalField> {
        None
    }

    fn flux(&self, _grid: &Arc<Grid>, _t: f64) -> Option<PhysicalField> {
        None
    }

    /// Source `-div g` of the concentration equation. Computed spectrally from
    /// [`Forcing::flux`] unless overridden with an exact expression.
    fn concentration_source(&self, grid: &Arc<Grid>, t: f64) -> Result<Option<SpectralField>> {
        match self.flux(grid, t) {
            None => Ok(None),
            Some(g) => Ok(Some(g.to_spectral()?.divergence()?.scale(-1.0))),
        }
    }
}

/// `f = 0`, `g = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoForcing;

impl Forcing for NoForcing {}

/// Time-independent sampled fields.
#[derive(Debug, Clone, Default)]
pub struct SteadyForcing {
    pub momentum: Option<PhysicalField>,
    pub flux: Option<PhysicalField>,
}

impl Forcing for SteadyForcing {
    fn momentum(&self, grid: &Arc<Grid>, _t: f64) -> Option<PhysicalField> {
        self.momentum.as_ref().filter(|f| **f.grid() == **grid).cloned()
    }

    fn flux(&self, grid: &Arc<Grid>, _t: f64) -> Option<PhysicalField> {
        self.flux.as_ref().filter(|f| **f.grid() == **grid).cloned()
    }
}
