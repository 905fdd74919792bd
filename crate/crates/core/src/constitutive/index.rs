use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the concentration dependence of the power-law exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExponentProfile {
    /// `p(c) = p_minus = p_plus`.
    Constant,
    /// `p(c) = clamp(base + slope * c, p_minus, p_plus)`.
    AffineClamped { base: f64, slope: f64 },
    /// Smooth transition between the bounds centred at `center`.
    /// With `decreasing`, `p -> p_plus` as `c -> -inf` and `p -> p_minus` as `c -> +inf`.
    Tanh { center: f64, width: f64, decreasing: bool },
}

/// Lipschitz exponent function `p(c)` with `1 < p_minus <= p(c) <= p_plus`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawIndex {
    p_minus: f64,
    p_plus: f64,
    profile: ExponentProfile,
}

/// `p'(c)`, with `corner` set where a clamped profile is not differentiable
/// and the right derivative is reported instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentSlope {
    pub value: f64,
    pub corner: bool,
}

impl PowerLawIndex {
    pub fn new(p_minus: f64, p_plus: f64, profile: ExponentProfile) -> Result<Self> {
        if !(p_minus.is_finite() && p_plus.is_finite()) {
            return Err(Error::InvalidParameter("exponent bounds must be finite".into()));
        }
        if p_minus <= 1.0 {
            return Err(Error::InvalidParameter(format!("requires p_minus > 1, got {p_minus}")));
        }
        if p_plus < p_minus {
            return Err(Error::InvalidParameter(format!(
                "requires p_plus >= p_minus, got {p_plus} < {p_minus}"
            )));
        }
        match profile {
            ExponentProfile::Constant if p_plus != p_minus => {
                return Err(Error::InvalidParameter("constant profile needs p_minus == p_plus".into()))
            }
            ExponentProfile::AffineClamped { base, slope } if !(base.is_finite() && slope.is_finite()) => {
                return Err(Error::InvalidParameter("affine profile parameters must be finite".into()))
            }
            ExponentProfile::Tanh { width, center, .. } if !(width > 0.0 && center.is_finite()) => {
                return Err(Error::InvalidParameter("tanh profile needs width > 0".into()))
            }
            _ => {}
        }
        Ok(PowerLawIndex { p_minus, p_plus, profile })
    }

    pub fn constant(p: f64) -> Result<Self> {
        Self::new(p, p, ExponentProfile::Constant)
    }

    /// Clamped affine profile anchored at `p_plus` for negative slopes and at
    /// `p_minus` otherwise.
    pub fn affine_clamped(p_minus: f64, p_plus: f64, slope: f64) -> Result<Self> {
        let base = if slope < 0.0 { p_plus } else { p_minus };
        Self::new(p_minus, p_plus, ExponentProfile::AffineClamped { base, slope })
    }

    pub fn tanh_profile(p_minus: f64, p_plus: f64, center: f64, width: f64, decreasing: bool) -> Result<Self> {
        Self::new(p_minus, p_plus, ExponentProfile::Tanh { center, width, decreasing })
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn profile(&self) -> ExponentProfile {
        self.profile
    }

    pub fn is_constant(&self) -> bool {
        self.p_minus == self.p_plus
    }

    pub fn eval(&self, c: f64) -> f64 {
        let raw = match self.profile {
            ExponentProfile::Constant => self.p_minus,
            ExponentProfile::AffineClamped { base, slope } => base + slope * c,
            ExponentProfile::Tanh { center, width, decreasing } => {
                let mid = 0.5 * (self.p_plus + self.p_minus);
                let half = 0.5 * (self.p_plus - self.p_minus);
                let s = ((c - center) / width).tanh();
                if decreasing {
                    mid - half * s
                } else {
                    mid + half * s
                }
            }
        };
        raw.clamp(self.p_minus, self.p_plus)
    }

    pub fn slope(&self, c: f64) -> ExponentSlope {
        match self.profile {
            ExponentProfile::Constant => ExponentSlope { value: 0.0, corner: false },
            ExponentProfile::AffineClamped { base, slope } => {
                let raw = base + slope * c;
                if raw > self.p_minus && raw < self.p_plus {
                    ExponentSlope { value: slope, corner: false }
                } else if raw == self.p_minus || raw == self.p_plus {
                    // right derivative: moving c upward stays inside iff it moves p inward
                    let inward = (raw == self.p_minus && slope > 0.0) || (raw == self.p_plus && slope < 0.0);
                    let corner = self.p_minus != self.p_plus && slope != 0.0;
                    ExponentSlope { value: if inward { slope } else { 0.0 }, corner }
                } else {
                    ExponentSlope { value: 0.0, corner: false }
                }
            }
            ExponentProfile::Tanh { center, width, decreasing } => {
                let half = 0.5 * (self.p_plus - self.p_minus);
                let s = ((c - center) / width).tanh();
                let d = half * (1.0 - s * s) / width;
                ExponentSlope { value: if decreasing { -d } else { d }, corner: false }
            }
        }
    }

    /// Upper bound on `sup |p'(c)|`.
    pub fn lipschitz_bound(&self) -> f64 {
        match self.profile {
            ExponentProfile::Constant => 0.0,
            ExponentProfile::AffineClamped { slope, .. } => {
                if self.is_constant() {
                    0.0
                } else {
                    slope.abs()
                }
            }
            ExponentProfile::Tanh { width, .. } => 0.5 * (self.p_plus - self.p_minus) / width,
        }
    }
}
