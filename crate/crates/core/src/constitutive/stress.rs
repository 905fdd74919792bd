use serde::{Deserialize, Serialize};

use super::index::PowerLawIndex;
use crate::error::{Error, Result};
use crate::spectral::{PhysicalField, Rank};

/// `S(c, D) = 2 nu0 (1 + |D|^2)^((p(c)-2)/2) D`.
///
/// Point evaluations take tensors as row-major slices of length `d*d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressModel {
    nu0: f64,
    index: PowerLawIndex,
}

/// `dS/dc` at a point, with the exponent corner flag carried through.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationSensitivity {
    pub tensor: Vec<f64>,
    pub corner: bool,
}

pub(crate) fn frob_sq(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

impl StressModel {
    pub fn new(nu0: f64, index: PowerLawIndex) -> Result<Self> {
        if !(nu0 > 0.0 && nu0.is_finite()) {
            return Err(Error::InvalidParameter(format!("requires nu0 > 0, got {nu0}")));
        }
        Ok(StressModel { nu0, index })
    }

    pub fn newtonian(nu0: f64) -> Result<Self> {
        Self::new(nu0, PowerLawIndex::constant(2.0)?)
    }

    pub fn nu0(&self) -> f64 {
        self.nu0
    }

    pub fn index(&self) -> &PowerLawIndex {
        &self.index
    }

    /// Exactly linear (`p == 2` everywhere).
    pub fn is_newtonian(&self) -> bool {
        self.index.is_constant() && self.index.p_minus() == 2.0
    }

    /// Generalized viscosity `nu0 (1 + |D|^2)^((p-2)/2)` given `|D|^2`.
    pub fn viscosity(&self, c: f64, d_norm_sq: f64) -> f64 {
        let p = self.index.eval(c);
        self.nu0 * (1.0 + d_norm_sq).powf(0.5 * (p - 2.0))
    }

    pub fn stress_at(&self, c: f64, d: &[f64]) -> Vec<f64> {
        let two_nu = 2.0 * self.viscosity(c, frob_sq(d));
        d.iter().map(|x| two_nu * x).collect()
    }

    /// `dS_ij/dD_kh`, flattened as `[(i*d+j)*d*d + (k*d+h)]`, treating all
    /// `d*d` entries of `D` as independent.
    pub fn jacobian_d(&self, c: f64, d: &[f64]) -> Vec<f64> {
        let m = d.len();
        let p = self.index.eval(c);
        let base = 1.0 + frob_sq(d);
        let w = 2.0 * self.nu0 * base.powf(0.5 * (p - 2.0));
        let beta = (p - 2.0) / base;
        let mut jac = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                jac[a * m + b] = w * (if a == b { 1.0 } else { 0.0 } + beta * (d[a] * d[b]));
            }
        }
        jac
    }

    /// `dS/dc = 2 nu0 p'(c) (1/2) log(1 + |D|^2) (1 + |D|^2)^((p-2)/2) D`.
    pub fn jacobian_c(&self, c: f64, d: &[f64]) -> ConcentrationSensitivity {
        let slope = self.index.slope(c);
        let p = self.index.eval(c);
        let base = 1.0 + frob_sq(d);
        let factor = 2.0 * self.nu0 * slope.value * 0.5 * base.ln() * base.powf(0.5 * (p - 2.0));
        ConcentrationSensitivity { tensor: d.iter().map(|x| factor * x).collect(), corner: slope.corner }
    }

    /// Pointwise stress field from a concentration field and a strain-rate field.
    pub fn eval_stress(&self, c: &PhysicalField, d: &PhysicalField) -> Result<PhysicalField> {
        if !d.rank().is_tensor() || c.rank() != Rank::Scalar {
            return Err(Error::RankMismatch { op: "eval_stress", rank: d.rank() });
        }
        if **c.grid() != **d.grid() {
            return Err(Error::GridMismatch);
        }
        if !c.is_finite() || !d.is_finite() {
            return Err(Error::NonFinite("eval_stress"));
        }
        let dim = d.grid().dim();
        let m = dim * dim;
        let mut out = PhysicalField::zeros(d.grid(), Rank::SymTensor);
        let mut point = vec![0.0; m];
        let cv = c.component(0);
        for idx in 0..cv.len() {
            for (a, slot) in point.iter_mut().enumerate() {
                *slot = d.component(a)[idx];
            }
            let two_nu = 2.0 * self.viscosity(cv[idx], frob_sq(&point));
            for (a, &x) in point.iter().enumerate() {
                out.component_mut(a)[idx] = two_nu * x;
            }
        }
        Ok(out)
    }

    /// Pointwise exponent field `p(c(x))`.
    pub fn exponent_field(&self, c: &PhysicalField) -> Vec<f64> {
        c.component(0).iter().map(|&x| self.index.eval(x)).collect()
    }
}

/// Contraction of a flattened fourth-order tensor with `B (x) B`.
pub fn quadratic_form(jac: &[f64], b: &[f64]) -> f64 {
    let m = b.len();
    let mut acc = 0.0;
    for a in 0..m {
        for c in 0..m {
            acc += jac[a * m + c] * b[a] * b[c];
        }
    }
    acc
}

/// Spectral norm of the symmetric `m x m` matrix `jac` by power iteration.
pub fn operator_norm(jac: &[f64], m: usize) -> f64 {
    let mut x: Vec<f64> = (0..m).map(|i| 1.0 + 0.1 * i as f64).collect();
    let mut lambda = 0.0;
    for _ in 0..200 {
        let mut y = vec![0.0; m];
        for a in 0..m {
            for b in 0..m {
                y[a] += jac[a * m + b] * x[b];
            }
        }
        let norm = frob_sq(&y).sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm / frob_sq(&x).sqrt();
        x = y.into_iter().map(|v| v / norm).collect();
    }
    lambda
}
