//! Fourier-multiplier operators: derivatives, Leray projection, dealiasing.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{PhysicalField, Rank, SpectralField};
use super::grid::Grid;
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeKind {
    Gradient,
    Divergence,
    Laplacian,
    SymGradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DealiasRule {
    #[default]
    TwoThirds,
    None,
}

impl SpectralField {
    pub fn derivative(&self, kind: DerivativeKind) -> Result<SpectralField> {
        match kind {
            DerivativeKind::Gradient => self.gradient(),
            DerivativeKind::Divergence => self.divergence(),
            DerivativeKind::Laplacian => Ok(self.laplacian()),
            DerivativeKind::SymGradient => self.sym_gradient(),
        }
    }

    /// Scalar to vector, or vector to tensor with entry `(i, j) = d_j v_i`.
    pub fn gradient(&self) -> Result<SpectralField> {
        let g = self.grid().clone();
        let d = g.dim();
        let out_rank = match self.rank() {
            Rank::Scalar => Rank::Vector,
            Rank::Vector => Rank::Tensor,
            r => return Err(Error::RankMismatch { op: "gradient", rank: r }),
        };
        let mut out = SpectralField::zeros(&g, out_rank);
        let src = self.components();
        let dst = out.comps_mut();
        for idx in 0..g.len() {
            let k = g.derivative_wavevector(idx);
            for (i, comp) in src.iter().enumerate() {
                let ik = comp[idx] * I;
                for j in 0..d {
                    dst[i * d + j][idx] = ik * k[j];
                }
            }
        }
        Ok(out)
    }

    /// Vector to scalar, or tensor to vector with `(div T)_i = d_j T_ij`.
    pub fn divergence(&self) -> Result<SpectralField> {
        let g = self.grid().clone();
        let d = g.dim();
        let (out_rank, rows) = match self.rank() {
            Rank::Vector => (Rank::Scalar, 1),
            Rank::Tensor | Rank::SymTensor => (Rank::Vector, d),
            r => return Err(Error::RankMismatch { op: "divergence", rank: r }),
        };
        let mut out = SpectralField::zeros(&g, out_rank);
        let src = self.components();
        let dst = out.comps_mut();
        for idx in 0..g.len() {
            let k = g.derivative_wavevector(idx);
            for (i, row) in dst.iter_mut().enumerate().take(rows) {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..d {
                    acc += src[i * d + j][idx] * k[j];
                }
                row[idx] = acc * I;
            }
        }
        let zm = true;
        out.set_flags(zm, false);
        Ok(out)
    }

    pub fn laplacian(&self) -> SpectralField {
        let g = self.grid().clone();
        let ksq = g.k_squared();
        let mut out = self.clone();
        for comp in out.comps_mut() {
            for (z, k2) in comp.iter_mut().zip(ksq) {
                *z *= -k2;
            }
        }
        let (zm, df) = (self.is_zero_mean(), self.is_divergence_free());
        out.set_flags(zm, df);
        out
    }

    /// `D v = (grad v + grad v^T) / 2`.
    pub fn sym_gradient(&self) -> Result<SpectralField> {
        if self.rank() != Rank::Vector {
            return Err(Error::RankMismatch { op: "sym_gradient", rank: self.rank() });
        }
        let grad = self.gradient()?;
        let g = self.grid().clone();
        let d = g.dim();
        let mut out = SpectralField::zeros(&g, Rank::SymTensor);
        let src = grad.components();
        let dst = out.comps_mut();
        for i in 0..d {
            for j in 0..d {
                for idx in 0..g.len() {
                    dst[i * d + j][idx] = (src[i * d + j][idx] + src[j * d + i][idx]) * 0.5;
                }
            }
        }
        Ok(out)
    }

    /// Orthogonal projection onto divergence-free fields, `(I - k k^T/|k|^2)` per mode.
    pub fn leray_project(&self) -> Result<SpectralField> {
        if self.rank() != Rank::Vector {
            return Err(Error::RankMismatch { op: "leray_project", rank: self.rank() });
        }
        let g = self.grid().clone();
        let d = g.dim();
        let mut out = self.clone();
        let ksq = g.k_squared();
        let comps = out.comps_mut();
        for idx in 1..g.len() {
            let k = g.wavevector(idx);
            let mut kv = Complex64::new(0.0, 0.0);
            for (a, comp) in comps.iter().enumerate() {
                kv += comp[idx] * k[a];
            }
            let s = kv / ksq[idx];
            for (a, comp) in comps.iter_mut().enumerate().take(d) {
                comp[idx] -= s * k[a];
            }
        }
        let zm = self.is_zero_mean();
        out.set_flags(zm, true);
        Ok(out)
    }

    /// Two-thirds truncation and optional removal of the mean mode.
    pub fn dealias_and_zero_mean(&self, rule: DealiasRule, zero_mean: bool) -> SpectralField {
        let mut out = self.clone();
        let g = self.grid().clone();
        let (zm, df) = (self.is_zero_mean(), self.is_divergence_free());
        for comp in out.comps_mut() {
            if rule == DealiasRule::TwoThirds {
                for (z, &keep) in comp.iter_mut().zip(g.dealias_mask()) {
                    if !keep {
                        *z = Complex64::new(0.0, 0.0);
                    }
                }
            }
            if zero_mean {
                comp[0] = Complex64::new(0.0, 0.0);
            }
        }
        out.set_flags(zm || zero_mean, df);
        out
    }

    /// `|k . v_k|` over `|k| |v_k|`, in l2 over all modes; 0 for a field without gradient content.
    pub fn divergence_defect(&self) -> Result<f64> {
        if self.rank() != Rank::Vector {
            return Err(Error::RankMismatch { op: "divergence_defect", rank: self.rank() });
        }
        let g = self.grid();
        let ksq = g.k_squared();
        let (mut num, mut den) = (0.0, 0.0);
        for idx in 1..g.len() {
            let k = g.wavevector(idx);
            let mut kv = Complex64::new(0.0, 0.0);
            let mut vv = 0.0;
            for (a, comp) in self.components().iter().enumerate() {
                kv += comp[idx] * k[a];
                vv += comp[idx].norm_sqr();
            }
            num += kv.norm_sqr();
            den += ksq[idx] * vv;
        }
        Ok(if den == 0.0 { 0.0 } else { (num / den).sqrt() })
    }
}

/// Pointwise tensor product `u (x) w` of two physical vectors.
pub fn outer(u: &PhysicalField, w: &PhysicalField) -> Result<PhysicalField> {
    if u.rank() != Rank::Vector || w.rank() != Rank::Vector {
        return Err(Error::RankMismatch { op: "outer", rank: u.rank() });
    }
    let g = u.grid();
    let d = g.dim();
    let mut out = PhysicalField::zeros(g, Rank::Tensor);
    for i in 0..d {
        for j in 0..d {
            let dst = out.component_mut(i * d + j);
            for ((o, a), b) in dst.iter_mut().zip(u.component(i)).zip(w.component(j)) {
                *o = a * b;
            }
        }
    }
    Ok(out)
}

/// Pointwise `s * u` for scalar `s`.
pub fn scale_pointwise(s: &[f64], u: &PhysicalField) -> PhysicalField {
    let mut out = u.clone();
    for i in 0..u.rank().components(u.grid().dim()) {
        for (o, a) in out.component_mut(i).iter_mut().zip(s) {
            *o *= a;
        }
    }
    out
}

/// Random smooth zero-mean divergence-free field with amplitudes decaying
/// like `exp(-|k|/k0)`, restricted to the dealiased band.
pub fn random_solenoidal(grid: &Arc<Grid>, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rough = PhysicalField::from_fn(grid, Rank::Vector, |_| {
        (0..grid.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect()
    })
    .to_spectral()
    .expect("finite samples");
    let k0 = 2.0 * std::f64::consts::PI * 2.0;
    let mut smooth = rough;
    let ksq: Vec<f64> = grid.k_squared().to_vec();
    for comp in smooth.comps_mut() {
        for (z, k2) in comp.iter_mut().zip(&ksq) {
            *z *= (-k2.sqrt() / k0).exp();
        }
    }
    smooth
        .dealias_and_zero_mean(DealiasRule::TwoThirds, true)
        .leray_project()
        .expect("vector field")
}

/// `||grad v||_2 / ||D v||_2` computed spectrally.
pub fn korn_ratio(v: &SpectralField) -> Result<f64> {
    let grad = v.gradient()?.l2_norm();
    let sym = v.sym_gradient()?.l2_norm();
    Ok(if sym == 0.0 { 0.0 } else { grad / sym })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(d: usize, n: usize) -> Arc<Grid> {
        Grid::new(d, n).unwrap()
    }

    #[test]
    fn gradient_of_sine() {
        let g = grid(2, 16);
        let u = PhysicalField::scalar_from_fn(&g, |x| (2.0 * PI * x[0]).sin()).to_spectral().unwrap();
        let grad = u.derivative(DerivativeKind::Gradient).unwrap().to_physical();
        for idx in 0..g.len() {
            let x = g.point(idx);
            assert!((grad.component(0)[idx] - 2.0 * PI * (2.0 * PI * x[0]).cos()).abs() < 1e-12);
            assert!(grad.component(1)[idx].abs() < 1e-12);
        }
    }

    #[test]
    fn curl_of_stream_function_is_solenoidal() {
        let g = grid(2, 32);
        let psi = PhysicalField::scalar_from_fn(&g, |x| {
            (2.0 * PI * x[0]).sin() * (4.0 * PI * x[1]).cos() + (2.0 * PI * (x[0] + 2.0 * x[1])).cos()
        })
        .to_spectral()
        .unwrap();
        let gp = psi.gradient().unwrap();
        let mut v = SpectralField::zeros(&g, Rank::Vector);
        for idx in 0..g.len() {
            v.component_mut(0)[idx] = -gp.coeff(1, idx);
            v.component_mut(1)[idx] = gp.coeff(0, idx);
        }
        let div = v.divergence().unwrap();
        assert!(div.max_abs_coeff() < 1e-12);
    }

    #[test]
    fn sym_gradient_of_constant_vanishes() {
        let g = grid(3, 8);
        let v = PhysicalField::from_fn(&g, Rank::Vector, |_| vec![1.0, -2.0, 0.5]).to_spectral().unwrap();
        let dv = v.derivative(DerivativeKind::SymGradient).unwrap();
        assert_eq!(dv.rank(), Rank::SymTensor);
        assert!(dv.max_abs_coeff() < 1e-15);
    }

    #[test]
    fn rank_mismatches() {
        let g = grid(2, 8);
        let s = SpectralField::zeros(&g, Rank::Scalar);
        assert!(s.divergence().is_err());
        assert!(s.sym_gradient().is_err());
        assert!(s.leray_project().is_err());
        let t = SpectralField::zeros(&g, Rank::Tensor);
        assert!(t.gradient().is_err());
    }

    #[test]
    fn leray_annihilates_gradients() {
        let g = grid(2, 16);
        let phi = PhysicalField::scalar_from_fn(&g, |x| (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).sin())
            .to_spectral()
            .unwrap();
        let p = phi.gradient().unwrap().leray_project().unwrap();
        assert!(p.max_abs_coeff() < 1e-14);
    }

    #[test]
    fn leray_keeps_solenoidal_and_is_idempotent() {
        let g = grid(3, 16);
        let v = random_solenoidal(&g, 3);
        let p = v.leray_project().unwrap();
        for (a, b) in v.components().iter().zip(p.components()) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).norm() <= 1e-14 * v.max_abs_coeff().max(1.0));
            }
        }
        let pp = p.leray_project().unwrap();
        assert!(pp.axpy(-1.0, &p).unwrap().max_abs_coeff() <= 1e-15 * p.max_abs_coeff().max(1.0));
    }

    #[test]
    fn leray_output_is_divergence_free() {
        let g = grid(2, 32);
        let v = PhysicalField::from_fn(&g, Rank::Vector, |x| {
            vec![(2.0 * PI * x[0]).sin().exp(), (x[0] * 6.0 * PI).cos() * (2.0 * PI * x[1]).sin()]
        })
        .to_spectral()
        .unwrap();
        let p = v.leray_project().unwrap();
        assert!(p.is_divergence_free());
        assert!(p.divergence_defect().unwrap() < 1e-12);
    }

    #[test]
    fn dealias_band() {
        let g = grid(2, 12);
        let mode = |m: f64| {
            PhysicalField::scalar_from_fn(&g, move |x| (2.0 * PI * m * x[0]).cos()).to_spectral().unwrap()
        };
        let one = mode(1.0);
        let kept = one.dealias_and_zero_mean(DealiasRule::TwoThirds, false);
        assert!(kept.axpy(-1.0, &one).unwrap().max_abs_coeff() < 1e-15);
        let five = mode(5.0).dealias_and_zero_mean(DealiasRule::TwoThirds, false);
        assert!(five.max_abs_coeff() < 1e-15);
        let untouched = mode(5.0).dealias_and_zero_mean(DealiasRule::None, false);
        assert!(untouched.max_abs_coeff() > 0.4);
    }

    #[test]
    fn zero_mean_removes_dc() {
        let g = grid(2, 8);
        let u = PhysicalField::scalar_from_fn(&g, |x| 1.0 + (2.0 * PI * x[1]).sin()).to_spectral().unwrap();
        let z = u.dealias_and_zero_mean(DealiasRule::None, true);
        assert_eq!(z.coeff(0, 0), Complex64::new(0.0, 0.0));
        assert!(z.to_physical().mean(0).abs() < 1e-14);
        assert!(z.is_zero_mean());
    }

    #[test]
    fn laplacian_commutes_with_leray() {
        let g = grid(2, 16);
        let v = PhysicalField::from_fn(&g, Rank::Vector, |x| {
            vec![(2.0 * PI * (x[0] + x[1])).sin(), (4.0 * PI * x[0]).cos()]
        })
        .to_spectral()
        .unwrap();
        let a = v.laplacian().leray_project().unwrap();
        let b = v.leray_project().unwrap().laplacian();
        assert!(a.axpy(-1.0, &b).unwrap().max_abs_coeff() < 1e-10);
    }

    #[test]
    fn korn_equality_for_solenoidal() {
        let g = grid(2, 16);
        for seed in 0..20 {
            let v = random_solenoidal(&g, seed);
            let r = korn_ratio(&v).unwrap();
            assert!(r <= std::f64::consts::SQRT_2 + 1e-6, "{r}");
        }
    }
}
