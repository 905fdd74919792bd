use std::sync::Arc;

use rustfft::num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Tensorial rank of a field. Tensors are stored as `d*d` row-major components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank {
    Scalar,
    Vector,
    /// General second-order tensor, e.g. a velocity gradient.
    Tensor,
    SymTensor,
}

impl Rank {
    pub fn components(self, d: usize) -> usize {
        match self {
            Rank::Scalar => 1,
            Rank::Vector => d,
            Rank::Tensor | Rank::SymTensor => d * d,
        }
    }

    pub fn is_tensor(self) -> bool {
        matches!(self, Rank::Tensor | Rank::SymTensor)
    }
}

/// Real samples at the collocation points.
#[derive(Debug, Clone)]
pub struct PhysicalField {
    grid: Arc<Grid>,
    rank: Rank,
    comps: Vec<Vec<f64>>,
}

/// Complex Fourier amplitudes `u(x) = sum_k c_k exp(i k.x)`.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Arc<Grid>,
    rank: Rank,
    comps: Vec<Vec<Complex64>>,
    zero_mean: bool,
    divergence_free: bool,
}

impl PhysicalField {
    pub fn zeros(grid: &Arc<Grid>, rank: Rank) -> Self {
        let nc = rank.components(grid.dim());
        PhysicalField { grid: grid.clone(), rank, comps: vec![vec![0.0; grid.len()]; nc] }
    }

    pub fn from_components(grid: &Arc<Grid>, rank: Rank, comps: Vec<Vec<f64>>) -> Result<Self> {
        if comps.len() != rank.components(grid.dim()) || comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::InvalidParameter(format!(
                "component layout does not match {rank:?} on n={} d={}",
                grid.modes(),
                grid.dim()
            )));
        }
        Ok(PhysicalField { grid: grid.clone(), rank, comps })
    }

    /// Samples `f(x)` at every collocation point; `f` returns all components.
    pub fn from_fn<F>(grid: &Arc<Grid>, rank: Rank, mut f: F) -> Self
    where
        F: FnMut([f64; 3]) -> Vec<f64>,
    {
        let mut out = Self::zeros(grid, rank);
        for idx in 0..grid.len() {
            let vals = f(grid.point(idx));
            for (c, v) in out.comps.iter_mut().zip(vals) {
                c[idx] = v;
            }
        }
        out
    }

    pub fn scalar_from_fn<F: Fn([f64; 3]) -> f64>(grid: &Arc<Grid>, f: F) -> Self {
        Self::from_fn(grid, Rank::Scalar, |x| vec![f(x)])
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.comps[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.comps[i]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Vec<f64>> {
        self.comps
    }

    /// All components at point `idx`.
    pub fn at(&self, idx: usize) -> Vec<f64> {
        self.comps.iter().map(|c| c[idx]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|v| v.is_finite()))
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Pointwise Euclidean (Frobenius) magnitude.
    pub fn magnitude(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|idx| self.comps.iter().map(|c| c[idx] * c[idx]).sum::<f64>().sqrt())
            .collect()
    }

    /// Collocation quadrature of a pointwise quantity over the unit torus.
    pub fn integrate(values: &[f64]) -> f64 {
        values.iter().sum::<f64>() / values.len() as f64
    }

    /// `||u||_2` by collocation quadrature.
    pub fn l2_norm(&self) -> f64 {
        let n = self.grid.len() as f64;
        (self.comps.iter().flatten().map(|v| v * v).sum::<f64>() / n).sqrt()
    }

    /// `||u||_q` of the pointwise magnitude.
    pub fn lq_norm(&self, q: f64) -> f64 {
        let mag = self.magnitude();
        if q.is_infinite() {
            return mag.iter().fold(0.0, |m, v| m.max(*v));
        }
        Self::integrate(&mag.iter().map(|v| v.powf(q)).collect::<Vec<_>>()).powf(1.0 / q)
    }

    pub fn mean(&self, comp: usize) -> f64 {
        Self::integrate(&self.comps[comp])
    }

    /// Pointwise contraction `sum_c a_c b_c`.
    pub fn dot(&self, other: &PhysicalField) -> Result<Vec<f64>> {
        if self.rank != other.rank && !(self.rank.is_tensor() && other.rank.is_tensor()) {
            return Err(Error::RankMismatch { op: "dot", rank: other.rank });
        }
        if *self.grid != *other.grid {
            return Err(Error::GridMismatch);
        }
        let mut out = vec![0.0; self.grid.len()];
        for (a, b) in self.comps.iter().zip(&other.comps) {
            for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
                *o += x * y;
            }
        }
        Ok(out)
    }

    /// Forward transform. Coefficients are normalized by the point count.
    pub fn to_spectral(&self) -> Result<SpectralField> {
        if !self.is_finite() {
            return Err(Error::NonFinite("forward transform"));
        }
        let scale = 1.0 / self.grid.len() as f64;
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let mut buf: Vec<Complex64> = c.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                self.grid.fft_inplace(&mut buf, false);
                buf.iter_mut().for_each(|z| *z *= scale);
                buf
            })
            .collect();
        Ok(SpectralField {
            grid: self.grid.clone(),
            rank: self.rank,
            comps,
            zero_mean: false,
            divergence_free: false,
        })
    }
}

impl SpectralField {
    pub fn zeros(grid: &Arc<Grid>, rank: Rank) -> Self {
        let nc = rank.components(grid.dim());
        SpectralField {
            grid: grid.clone(),
            rank,
            comps: vec![vec![Complex64::new(0.0, 0.0); grid.len()]; nc],
            zero_mean: false,
            divergence_free: false,
        }
    }

    pub fn from_components(grid: &Arc<Grid>, rank: Rank, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        if comps.len() != rank.components(grid.dim()) || comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::InvalidParameter("component layout does not match rank".into()));
        }
        Ok(SpectralField { grid: grid.clone(), rank, comps, zero_mean: false, divergence_free: false })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    pub fn component(&self, i: usize) -> &[Complex64] {
        &self.comps[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut [Complex64] {
        self.divergence_free = false;
        self.zero_mean = false;
        &mut self.comps[i]
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    pub fn is_zero_mean(&self) -> bool {
        self.zero_mean
    }

    pub fn is_divergence_free(&self) -> bool {
        self.divergence_free
    }

    pub(crate) fn set_flags(&mut self, zero_mean: bool, divergence_free: bool) {
        self.zero_mean = zero_mean;
        self.divergence_free = divergence_free;
    }

    pub(crate) fn comps_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.comps
    }

    /// Component `i` as a scalar field.
    pub fn component_field(&self, i: usize) -> SpectralField {
        SpectralField {
            grid: self.grid.clone(),
            rank: Rank::Scalar,
            comps: vec![self.comps[i].clone()],
            zero_mean: self.zero_mean,
            divergence_free: false,
        }
    }

    pub fn coeff(&self, comp: usize, idx: usize) -> Complex64 {
        self.comps[comp][idx]
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Inverse transform, keeping the real part.
    pub fn to_physical(&self) -> PhysicalField {
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let mut buf = c.clone();
                self.grid.fft_inplace(&mut buf, true);
                buf.into_iter().map(|z| z.re).collect()
            })
            .collect();
        PhysicalField { grid: self.grid.clone(), rank: self.rank, comps }
    }

    /// Coefficient l2 norm; equals the physical L2 norm by Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.comps.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.comps.iter().flatten().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `int u . w dx` over the torus.
    pub fn inner(&self, other: &SpectralField) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).sum::<f64>())
            .sum())
    }

    /// Largest violation of `c(-k) = conj(c(k))` over all components.
    pub fn hermitian_defect(&self) -> f64 {
        let g = &self.grid;
        let n = g.modes();
        let mut worst: f64 = 0.0;
        for c in &self.comps {
            for idx in 0..g.len() {
                let m = g.axis_indices(idx);
                let mut mirror = 0;
                let mut stride = 1;
                for &mi in m.iter().take(g.dim()) {
                    mirror += ((n - mi) % n) * stride;
                    stride *= n;
                }
                worst = worst.max((c[idx] - c[mirror].conj()).norm());
            }
        }
        worst
    }

    pub(crate) fn check_compatible(&self, other: &SpectralField) -> Result<()> {
        if *self.grid != *other.grid {
            return Err(Error::GridMismatch);
        }
        if self.rank != other.rank {
            return Err(Error::RankMismatch { op: "binary operation", rank: other.rank });
        }
        Ok(())
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &SpectralField) -> Result<SpectralField> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, b) in out.comps.iter_mut().zip(&other.comps) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y * alpha;
            }
        }
        out.zero_mean = self.zero_mean && other.zero_mean;
        out.divergence_free = self.divergence_free && other.divergence_free;
        Ok(out)
    }

    pub fn scale(&self, alpha: f64) -> SpectralField {
        let mut out = self.clone();
        out.comps.iter_mut().flatten().for_each(|z| *z *= alpha);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_physical(grid: &Arc<Grid>, rank: Rank, seed: u64) -> PhysicalField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PhysicalField::from_fn(grid, rank, |_| {
            (0..rank.components(grid.dim())).map(|_| rng.gen_range(-1.0..1.0)).collect()
        })
    }

    #[test]
    fn constant_is_dc_only() {
        let g = Grid::new(2, 8).unwrap();
        let s = PhysicalField::scalar_from_fn(&g, |_| 1.0).to_spectral().unwrap();
        assert!((s.coeff(0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        for idx in 1..g.len() {
            assert!(s.coeff(0, idx).norm() < 1e-15);
        }
    }

    #[test]
    fn cosine_has_half_amplitudes() {
        let g = Grid::new(2, 8).unwrap();
        let s = PhysicalField::scalar_from_fn(&g, |x| (2.0 * PI * x[0]).cos()).to_spectral().unwrap();
        // flat index 1 is frequency (1,0); index 7 is (-1,0)
        for idx in 0..g.len() {
            let expect = if idx == 1 || idx == 7 { 0.5 } else { 0.0 };
            assert!((s.coeff(0, idx) - Complex64::new(expect, 0.0)).norm() < 1e-15, "idx {idx}");
        }
    }

    #[test]
    fn round_trip_and_parseval_all_sizes() {
        for (d, n) in [(2, 8), (2, 16), (2, 64), (3, 8), (3, 16)] {
            let g = Grid::new(d, n).unwrap();
            let u = random_physical(&g, Rank::Vector, n as u64);
            let s = u.to_spectral().unwrap();
            let back = s.to_physical();
            let scale = u.max_abs();
            for (a, b) in u.components().iter().zip(back.components()) {
                for (x, y) in a.iter().zip(b) {
                    assert!((x - y).abs() <= 1e-12 * scale);
                }
            }
            assert!((u.l2_norm() - s.l2_norm()).abs() <= 1e-12 * u.l2_norm());
            assert!(s.hermitian_defect() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_finite() {
        let g = Grid::new(2, 8).unwrap();
        let mut u = PhysicalField::zeros(&g, Rank::Scalar);
        u.component_mut(0)[3] = f64::NAN;
        assert!(matches!(u.to_spectral(), Err(Error::NonFinite(_))));
    }

    #[test]
    fn three_d_axis_order() {
        let g = Grid::new(3, 8).unwrap();
        let s = PhysicalField::scalar_from_fn(&g, |x| (2.0 * PI * x[2]).sin()).to_spectral().unwrap();
        // frequency (0,0,1) sits at flat index n*n
        assert!((s.coeff(0, 64) - Complex64::new(0.0, -0.5)).norm() < 1e-14);
    }
}
