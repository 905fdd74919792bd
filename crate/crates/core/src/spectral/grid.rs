use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform collocation grid on the unit torus `[0,1]^d`.
///
/// Flat indices run x-fastest: `idx = i0 + n*(i1 + n*i2)`.
pub struct Grid {
    d: usize,
    n: usize,
    len: usize,
    /// Signed integer frequency per axis index.
    freq: Vec<i64>,
    /// Angular wavenumber `2*pi*freq`, Nyquist kept (used by even symbols).
    wavenumber: Vec<f64>,
    /// Same as `wavenumber` but with the Nyquist entry zeroed (first derivatives).
    deriv_wavenumber: Vec<f64>,
    k_squared: Vec<f64>,
    dealias_mask: Vec<bool>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("d", &self.d).field("n", &self.n).finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.n == other.n
    }
}

/// Signed frequency of axis index `m` for an `n`-point transform.
/// Index `n/2` maps to `-n/2`.
pub fn signed_frequency(m: usize, n: usize) -> i64 {
    if m < n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

impl Grid {
    pub const MIN_N: usize = 8;
    pub const MAX_N: usize = 1024;

    pub fn new(d: usize, n: usize) -> Result<Arc<Grid>> {
        if d != 2 && d != 3 {
            return Err(Error::InvalidGrid(format!("dimension must be 2 or 3, got {d}")));
        }
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("odd mode count {n}")));
        }
        if !(Self::MIN_N..=Self::MAX_N).contains(&n) {
            return Err(Error::InvalidGrid(format!(
                "mode count {n} outside [{}, {}]",
                Self::MIN_N,
                Self::MAX_N
            )));
        }
        let freq: Vec<i64> = (0..n).map(|m| signed_frequency(m, n)).collect();
        let wavenumber: Vec<f64> = freq.iter().map(|&f| 2.0 * PI * f as f64).collect();
        let mut deriv_wavenumber = wavenumber.clone();
        deriv_wavenumber[n / 2] = 0.0;

        let len = n.pow(d as u32);
        let mut k_squared = vec![0.0; len];
        let mut dealias_mask = vec![true; len];
        let cutoff = n as i64 / 3;
        for (idx, (ks, keep)) in k_squared.iter_mut().zip(dealias_mask.iter_mut()).enumerate() {
            let mut rest = idx;
            for _ in 0..d {
                let m = rest % n;
                rest /= n;
                *ks += wavenumber[m] * wavenumber[m];
                if freq[m].abs() > cutoff {
                    *keep = false;
                }
            }
        }

        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Arc::new(Grid {
            d,
            n,
            len,
            freq,
            wavenumber,
            deriv_wavenumber,
            k_squared,
            dealias_mask,
            forward,
            inverse,
        }))
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    /// Number of collocation points (`n^d`).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Axis indices of a flat index.
    pub fn axis_indices(&self, idx: usize) -> [usize; 3] {
        let mut out = [0; 3];
        let mut rest = idx;
        for slot in out.iter_mut().take(self.d) {
            *slot = rest % self.n;
            rest /= self.n;
        }
        out
    }

    /// Coordinates of collocation point `idx`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        let m = self.axis_indices(idx);
        let mut x = [0.0; 3];
        for a in 0..self.d {
            x[a] = m[a] as f64 * h;
        }
        x
    }

    /// Integer frequency vector of mode `idx`.
    pub fn frequency(&self, idx: usize) -> [i64; 3] {
        let m = self.axis_indices(idx);
        let mut f = [0; 3];
        for a in 0..self.d {
            f[a] = self.freq[m[a]];
        }
        f
    }

    /// Angular wavevector of mode `idx` (Nyquist components kept).
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let m = self.axis_indices(idx);
        let mut k = [0.0; 3];
        for a in 0..self.d {
            k[a] = self.wavenumber[m[a]];
        }
        k
    }

    /// Wavevector used for first derivatives: Nyquist components zeroed.
    pub fn derivative_wavevector(&self, idx: usize) -> [f64; 3] {
        let m = self.axis_indices(idx);
        let mut k = [0.0; 3];
        for a in 0..self.d {
            k[a] = self.deriv_wavenumber[m[a]];
        }
        k
    }

    pub fn k_squared(&self) -> &[f64] {
        &self.k_squared
    }

    /// `true` for modes retained by the two-thirds rule.
    pub fn dealias_mask(&self) -> &[bool] {
        &self.dealias_mask
    }

    pub fn max_wavenumber(&self) -> f64 {
        self.wavenumber.iter().fold(0.0, |m, k| m.max(k.abs()))
    }

    /// In-place unnormalized transform along every axis.
    pub(crate) fn fft_inplace(&self, data: &mut [Complex64], inverse: bool) {
        debug_assert_eq!(data.len(), self.len);
        let plan = if inverse { &self.inverse } else { &self.forward };
        let n = self.n;
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        // axis 0 is contiguous
        plan.process_with_scratch(data, &mut scratch);
        let mut lines = vec![Complex64::new(0.0, 0.0); self.len];
        for axis in 1..self.d {
            let stride = n.pow(axis as u32);
            let block = stride * n;
            let mut pos = 0;
            for base in (0..self.len).step_by(block) {
                for off in 0..stride {
                    for j in 0..n {
                        lines[pos + j] = data[base + off + j * stride];
                    }
                    pos += n;
                }
            }
            plan.process_with_scratch(&mut lines, &mut scratch);
            pos = 0;
            for base in (0..self.len).step_by(block) {
                for off in 0..stride {
                    for j in 0..n {
                        data[base + off + j * stride] = lines[pos + j];
                    }
                    pos += n;
                }
            }
        }
    }
}
