use std::sync::Arc;

use log::warn;

use crate::error::{Error, Result};
use crate::spectral::{DealiasRule, Grid, PhysicalField, Rank, SpectralField};

/// Divergence defect above which initial data is projected.
const PROJECTION_TRIGGER: f64 = 1e-12;

/// Solver state. `v` is solenoidal and zero-mean; the mean of `c` sits in
/// its `k = 0` coefficient, which the scheme never changes.
#[derive(Debug, Clone)]
pub struct State {
    pub t: f64,
    pub v: SpectralField,
    pub c: SpectralField,
}

impl State {
    /// Validates and band-limits initial data; `v` is Leray-projected (with a
    /// warning) when it is not already divergence-free.
    pub fn new(t: f64, v: SpectralField, c: SpectralField) -> Result<State> {
        if v.rank() != Rank::Vector {
            return Err(Error::RankMismatch { op: "state velocity", rank: v.rank() });
        }
        if c.rank() != Rank::Scalar {
            return Err(Error::RankMismatch { op: "state concentration", rank: c.rank() });
        }
        if **v.grid() != **c.grid() {
            return Err(Error::GridMismatch);
        }
        if !v.is_finite() || !c.is_finite() || !t.is_finite() {
            return Err(Error::NonFinite("initial data"));
        }
        let mut v = v.dealias_and_zero_mean(DealiasRule::TwoThirds, true);
        if v.divergence_defect()? > PROJECTION_TRIGGER {
            warn!("initial velocity is not divergence-free; projecting");
        }
        v = v.leray_project()?;
        let c = c.dealias_and_zero_mean(DealiasRule::TwoThirds, false);
        Ok(State { t, v, c })
    }

    pub fn from_physical(t: f64, v: &PhysicalField, c: &PhysicalField) -> Result<State> {
        State::new(t, v.to_spectral()?, c.to_spectral()?)
    }

    /// Fluid at rest with uniform concentration `c_mean`.
    pub fn rest(grid: &Arc<Grid>, c_mean: f64) -> State {
        let mut c = SpectralField::zeros(grid, Rank::Scalar);
        c.component_mut(0)[0].re = c_mean;
        let mut v = SpectralField::zeros(grid, Rank::Vector);
        v.set_flags(true, true);
        State { t: 0.0, v, c }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.v.grid()
    }

    pub fn concentration_mean(&self) -> f64 {
        self.c.coeff(0, 0).re
    }

    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.v.l2_norm().powi(2)
    }

    pub fn divergence_defect(&self) -> f64 {
        self.v.divergence_defect().unwrap_or(f64::NAN)
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.c.is_finite()
    }

    /// Largest coefficient magnitude of either field.
    pub fn max_coefficient(&self) -> f64 {
        self.v.max_abs_coeff().max(self.c.max_abs_coeff())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn projects_gradient_initial_data() {
        let g = Grid::new(2, 16).unwrap();
        let v = PhysicalField::from_fn(&g, Rank::Vector, |x| {
            vec![(2.0 * PI * x[0]).cos() + (2.0 * PI * x[1]).sin(), 0.0]
        });
        let c = PhysicalField::scalar_from_fn(&g, |_| 1.5);
        let s = State::from_physical(0.0, &v, &c).unwrap();
        assert!(s.divergence_defect() < 1e-14);
        assert!((s.concentration_mean() - 1.5).abs() < 1e-15);
        // the cos(2 pi x) part is a pure gradient; only the shear survives
        assert!((s.kinetic_energy() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_ranks() {
        let g = Grid::new(2, 8).unwrap();
        let s = SpectralField::zeros(&g, Rank::Scalar);
        assert!(State::new(0.0, s.clone(), s).is_err());
    }
}
