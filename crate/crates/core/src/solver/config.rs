use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constitutive::{PowerLawIndex, StressModel};
use crate::error::{Error, Result};
use crate::spectral::{DealiasRule, Grid};

/// Form of the momentum convection term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convection {
    /// `div(v (x) v)`.
    #[default]
    Divergence,
    /// `(div(v (x) v) + (v . grad) v) / 2`.
    SkewSymmetric,
    /// No transport at all: drops momentum convection and the `div(c v)`
    /// term, leaving Stokes flow plus diffusion.
    Off,
}

/// Viscosity `nu_split` of the implicit linear operator `nu_split lap v`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViscousSplit {
    /// `nu0 (1 + max|Dv|^2)^((p_plus-2)/2)`, at least `nu0`, recomputed each step.
    #[default]
    Adaptive,
    /// A fixed value, which must be at least `nu0`.
    Fixed(f64),
}

/// Threshold flags of the strong-solution and uniqueness theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeFlags {
    pub strong_regime: bool,
    pub unique_regime: bool,
}

/// `strong <=> p_minus >= (d+2)/2`; `unique <=> strong` and
/// `p_plus < 3/2 p_minus` (d = 2) or `p_plus < 7/6 p_minus` (d = 3).
pub fn compute_regime(d: usize, p_minus: f64, p_plus: f64) -> Result<RegimeFlags> {
    if d != 2 && d != 3 {
        return Err(Error::InvalidParameter(format!("dimension must be 2 or 3, got {d}")));
    }
    if !(p_minus > 1.0) {
        return Err(Error::InvalidParameter(format!("requires p_minus > 1, got {p_minus}")));
    }
    if p_plus < p_minus {
        return Err(Error::InvalidParameter(format!("requires p_plus >= p_minus, got {p_plus} < {p_minus}")));
    }
    let strong = p_minus >= (d as f64 + 2.0) / 2.0;
    let ratio_ok = if d == 2 { p_plus < 1.5 * p_minus } else { 6.0 * p_plus < 7.0 * p_minus };
    Ok(RegimeFlags { strong_regime: strong, unique_regime: strong && ratio_ok })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub d: usize,
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub nu0: f64,
    pub index: PowerLawIndex,
    pub picard_tol: f64,
    pub picard_max: usize,
    pub split: ViscousSplit,
    /// Exponent of the `||grad c||_q` monitor; must exceed `2d`.
    pub q_monitor: f64,
    /// Exponent of the `||dc/dt||_delta` monitor.
    pub delta_monitor: f64,
    pub dealias: DealiasRule,
    pub convection: Convection,
    /// Steps between diagnostics records.
    pub cadence: usize,
}

impl SolverConfig {
    /// A configuration with every optional setting at its default.
    pub fn new(d: usize, n: usize, dt: f64, t_end: f64, nu0: f64, index: PowerLawIndex) -> Self {
        SolverConfig {
            d,
            n,
            dt,
            t_end,
            nu0,
            index,
            picard_tol: 1e-10,
            picard_max: 50,
            split: ViscousSplit::Adaptive,
            q_monitor: default_q_monitor(d),
            delta_monitor: default_delta_monitor(d),
            dealias: DealiasRule::TwoThirds,
            convection: Convection::Divergence,
            cadence: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        Grid::new(self.d, self.n)?;
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("requires dt > 0, got {}", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("requires t_end >= 0, got {}", self.t_end));
        }
        if !(self.picard_tol > 0.0) {
            return bad(format!("requires picard_tol > 0, got {}", self.picard_tol));
        }
        if self.picard_max == 0 {
            return bad("picard_max must be at least 1".into());
        }
        if !(self.q_monitor > 2.0 * self.d as f64) {
            return bad(format!("requires q_monitor > 2d = {}, got {}", 2 * self.d, self.q_monitor));
        }
        if !(self.delta_monitor >= 1.0 && self.delta_monitor.is_finite()) {
            return bad(format!("requires delta_monitor >= 1, got {}", self.delta_monitor));
        }
        if self.cadence == 0 {
            return bad("cadence must be at least 1".into());
        }
        if let ViscousSplit::Fixed(nu) = self.split {
            if !(nu >= self.nu0) {
                return bad(format!("fixed split viscosity {nu} is below nu0 = {}", self.nu0));
            }
        }
        StressModel::new(self.nu0, self.index)?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Arc<Grid>> {
        Grid::new(self.d, self.n)
    }

    pub fn model(&self) -> Result<StressModel> {
        StressModel::new(self.nu0, self.index)
    }

    pub fn regime(&self) -> Result<RegimeFlags> {
        compute_regime(self.d, self.index.p_minus(), self.index.p_plus())
    }

    /// Number of steps to reach `t_end`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

pub fn default_q_monitor(d: usize) -> f64 {
    2.0 * d as f64 + 2.0
}

pub fn default_delta_monitor(d: usize) -> f64 {
    if d == 2 {
        4.5
    } else {
        3.25
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_thresholds() {
        let r = compute_regime(2, 2.0, 2.9).unwrap();
        assert!(r.strong_regime && r.unique_regime);
        let r = compute_regime(3, 2.5, 3.0).unwrap();
        assert!(r.strong_regime && !r.unique_regime);
        let r = compute_regime(2, 1.8, 2.0).unwrap();
        assert!(!r.strong_regime && !r.unique_regime);
        // boundary of the 2D ratio is excluded
        assert!(!compute_regime(2, 2.0, 3.0).unwrap().unique_regime);
        assert!(compute_regime(3, 3.0, 3.4).unwrap().unique_regime);
        assert!(!compute_regime(3, 3.0, 3.5).unwrap().unique_regime);
    }

    #[test]
    fn regime_errors() {
        assert!(compute_regime(2, 1.0, 2.0).is_err());
        assert!(compute_regime(2, 2.5, 2.0).is_err());
        assert!(compute_regime(4, 2.5, 3.0).is_err());
    }

    #[test]
    fn validation() {
        let idx = PowerLawIndex::constant(2.0).unwrap();
        let mut cfg = SolverConfig::new(2, 32, 1e-3, 0.1, 0.1, idx);
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.q_monitor, 6.0);
        cfg.q_monitor = 4.0;
        assert!(cfg.validate().is_err());
        cfg.q_monitor = 6.0;
        cfg.split = ViscousSplit::Fixed(0.05);
        assert!(cfg.validate().is_err());
        cfg.split = ViscousSplit::Fixed(0.2);
        cfg.dt = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn step_count_rounds() {
        let idx = PowerLawIndex::constant(2.0).unwrap();
        let cfg = SolverConfig::new(2, 16, 1e-4, 0.003, 1.0, idx);
        assert_eq!(cfg.steps(), 30);
    }
}
